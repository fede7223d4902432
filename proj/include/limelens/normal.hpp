#pragma once

namespace limelens {

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal CDF, accurate in both tails (erfc-based).
double normal_cdf(double x);

/// Inverse standard normal CDF on (0,1); returns -inf/+inf at 0/1.
/// Wichura's AS241 rational approximation polished with Newton steps.
double normal_quantile(double p);

/// 0.5*(erf(b) - erf(a)) without cancellation when both arguments sit in
/// the same far tail. Infinite arguments are fine (erf(+-inf) = +-1).
double half_erf_diff(double a, double b);

}  // namespace limelens
