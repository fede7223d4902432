#include "limelens/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "limelens/errors.hpp"
#include "limelens/normal.hpp"

namespace limelens {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2Pi = 2.5066282746310005024;

struct Integrand {
    double xi, mu, inv_two_nu2, inv_two_sigma2, norm;
    int order;

    double operator()(double x) const {
        const double dxi = x - xi;
        const double dmu = x - mu;
        double v = std::exp(-dxi * dxi * inv_two_nu2 - dmu * dmu * inv_two_sigma2) * norm;
        for (int k = 0; k < order; ++k) v *= x;
        return v;
    }
};

struct AdaptiveState {
    const Integrand& f;
    double tol;
    int max_depth;
    bool converged = true;

    double simpson(double a, double b, double fa, double fm, double fb) const {
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    }

    double refine(double a, double b, double fa, double fm, double fb, double whole,
                  double eps, int depth) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = f(lm);
        const double frm = f(rm);
        const double left = simpson(a, m, fa, flm, fm);
        const double right = simpson(m, b, fm, frm, fb);
        const double delta = left + right - whole;
        if (std::abs(delta) <= 15.0 * eps || depth >= max_depth) {
            if (depth >= max_depth && std::abs(delta) > 15.0 * eps) converged = false;
            return left + right + delta / 15.0;
        }
        return refine(a, m, fa, flm, fm, left, 0.5 * eps, depth + 1) +
               refine(m, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
    }
};

}  // namespace

void IntegralSpec::validate() const {
    if (!(nu > 0.0) || !(sigma > 0.0)) throw UsageError("nu and sigma must be positive");
    if (!(lo < hi)) throw UsageError("integration bounds require lo < hi");
    if (order < 0 || order > 2) throw UsageError("order must be 0, 1 or 2");
    if (order == 2 && (std::isfinite(lo) || std::isfinite(hi))) {
        throw UsageError("order-2 integral is only available on the full line");
    }
}

double gauss_closed(const IntegralSpec& spec) {
    spec.validate();
    const double nu2 = spec.nu * spec.nu;
    const double sigma2 = spec.sigma * spec.sigma;
    const double sum = nu2 + sigma2;
    const double mu_tilde = (nu2 * spec.mu + sigma2 * spec.xi) / sum;
    const double sigma_tilde = spec.nu * spec.sigma / std::sqrt(sum);
    const double diff = spec.xi - spec.mu;
    const double prefactor = spec.nu / std::sqrt(sum) * std::exp(-diff * diff / (2.0 * sum));

    if (spec.order == 2) {
        return (mu_tilde * mu_tilde + sigma_tilde * sigma_tilde) * prefactor;
    }

    const double ua = std::isfinite(spec.lo) ? (spec.lo - mu_tilde) / (sigma_tilde * M_SQRT2)
                                             : -kInf;
    const double ub = std::isfinite(spec.hi) ? (spec.hi - mu_tilde) / (sigma_tilde * M_SQRT2)
                                             : kInf;
    const double erf_bracket = half_erf_diff(ua, ub);
    if (spec.order == 0) return prefactor * erf_bracket;

    // Order 1: the Gaussian term of the antiderivative vanishes at infinite
    // endpoints.
    const double ga = std::isfinite(ua) ? std::exp(-ua * ua) : 0.0;
    const double gb = std::isfinite(ub) ? std::exp(-ub * ub) : 0.0;
    return prefactor * (mu_tilde * erf_bracket - sigma_tilde / kSqrt2Pi * (gb - ga));
}

double gauss_quadrature(const IntegralSpec& spec, double tol) {
    spec.validate();
    if (!(tol >= 1e-13)) throw UsageError("quadrature tolerance must be at least 1e-13");

    const double spread = 12.0 * std::max(spec.nu, spec.sigma);
    double a = std::max(spec.lo, std::min(spec.xi, spec.mu) - spread);
    double b = std::min(spec.hi, std::max(spec.xi, spec.mu) + spread);
    if (!(a < b)) return 0.0;

    const Integrand f{spec.xi,
                      spec.mu,
                      1.0 / (2.0 * spec.nu * spec.nu),
                      1.0 / (2.0 * spec.sigma * spec.sigma),
                      1.0 / (spec.sigma * kSqrt2Pi),
                      spec.order};

    AdaptiveState state{f, tol, 60};
    // Seed with several panels so the first error estimate cannot be fooled
    // by symmetry.
    constexpr int kPanels = 8;
    double total = 0.0;
    const double step = (b - a) / kPanels;
    for (int i = 0; i < kPanels; ++i) {
        const double pa = a + i * step;
        const double pb = (i + 1 == kPanels) ? b : a + (i + 1) * step;
        const double pm = 0.5 * (pa + pb);
        const double fa = f(pa);
        const double fm = f(pm);
        const double fb = f(pb);
        const double whole = state.simpson(pa, pb, fa, fm, fb);
        total += state.refine(pa, pb, fa, fm, fb, whole, tol / kPanels, 0);
    }
    if (!state.converged) {
        throw NumericalError("adaptive quadrature hit maximum depth; estimate " +
                             std::to_string(total));
    }
    return total;
}

}  // namespace limelens
