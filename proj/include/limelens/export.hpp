#pragma once

#include <ostream>
#include <string>

#include "limelens/harness.hpp"
#include "limelens/sampling.hpp"
#include "limelens/surrogate.hpp"
#include "limelens/theory.hpp"

namespace limelens {

/// One double at 17 significant digits; the serialization used everywhere
/// so emitted files are byte-stable across runs and thread counts.
std::string format_real(double v);

std::string to_json(const SamplingConfig& config);
std::string to_json(const Explanation& explanation);
std::string to_json(const theory::TheoryReport& report, const SamplingConfig& config);
std::string to_json(const ExperimentRecord& record);

/// Flat key,value lines (beta entries get one line each).
std::string to_csv(const Explanation& explanation);
std::string to_csv(const theory::TheoryReport& report);

/// Per-repetition beta rows: rep,beta_0..beta_d.
std::string record_csv(const ExperimentRecord& record);

/// Columns y_1..y_d, x_1..x_d, z_1..z_d, pi.
void write_perturbations_csv(std::ostream& out, const PerturbationSet& set);

}  // namespace limelens
