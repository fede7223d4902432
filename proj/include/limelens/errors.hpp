#pragma once

#include <stdexcept>
#include <string>

namespace limelens {

/// Bad arguments or malformed input. Mapped to CLI exit code 1.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical breakdown or degenerate data. Mapped to CLI exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public UsageError {
public:
    using UsageError::UsageError;
};

/// Normal matrix singular to tolerance (e.g. every sample landed in xi's
/// bin, so the binary columns are constant and the fit collapses).
class DegenerateDesign : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Some alpha_j is within 1e-12 of 0 or 1: the bandwidth is pathologically
/// small or large relative to xi's bin, and the closed-form inverse blows up.
class NearDegenerateBin : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Duplicate empirical quantiles: the data cannot support p distinct boxes.
class CollapsedBins : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace limelens
