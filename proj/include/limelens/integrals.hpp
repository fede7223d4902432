#pragma once

#include <limits>

namespace limelens {

/// The one-dimensional weighted Gaussian moment
///   integral of x^order * exp(-(x-xi)^2/(2 nu^2) - (x-mu)^2/(2 sigma^2))
///   over (lo, hi), normalized by sigma*sqrt(2*pi).
/// lo/hi may be -inf/+inf; order 2 is only available on the full line.
struct IntegralSpec {
    double xi = 0.0;
    double mu = 0.0;
    double nu = 1.0;
    double sigma = 1.0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    int order = 0;

    void validate() const;
};

/// Exact closed form (erf bracket for order 0, erf + Gaussian bracket for
/// order 1, full-line moment for order 2).
double gauss_closed(const IntegralSpec& spec);

/// Independent oracle: adaptive quadrature of the raw integrand on the
/// +-12 max(nu, sigma) window around {xi, mu}, clipped to (lo, hi).
/// Absolute accuracy tol (>= 1e-13) plus a sub-1e-30 truncation tail.
double gauss_quadrature(const IntegralSpec& spec, double tol);

}  // namespace limelens
