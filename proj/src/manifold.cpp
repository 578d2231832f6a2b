#include "mfreg/manifold.hpp"
#include "mfreg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mfreg {

ManifoldSpec ManifoldSpec::s2() {
    ManifoldSpec spec;
    spec.d = 2;
    spec.alpha = 0.0;
    spec.beta = 0.0;
    spec.eps = 1.0;
    spec.omega_d = 4.0 * std::numbers::pi;
    return spec;
}

void ManifoldSpec::validate() const {
    if (d <= 0)
        throw UsageError("ManifoldSpec: dimension d must be positive");
    if (alpha <= -1.0 || beta <= -1.0)
        throw UsageError("ManifoldSpec: Jacobi parameters must exceed -1");
    if (eps <= 0.0)
        throw UsageError("ManifoldSpec: eps must be positive");
    if (omega_d <= 0.0)
        throw UsageError("ManifoldSpec: omega_d must be positive");
}

double jacobi_poly(int n, double alpha, double beta, double x) {
    if (n < 0)
        throw UsageError("jacobi_poly: degree must be nonnegative");
    if (alpha <= -1.0 || beta <= -1.0)
        throw UsageError("jacobi_poly: parameters must exceed -1");
    if (std::abs(x) > 1.0 + 1e-12)
        throw NumericError("jacobi_poly: argument outside [-1,1]");
    x = std::clamp(x, -1.0, 1.0);

    if (n == 0) return 1.0;
    const double p1 = 0.5 * ((alpha + beta + 2.0) * x + (alpha - beta));
    if (n == 1) return p1;

    double pm2 = 1.0;
    double pm1 = p1;
    for (int k = 2; k <= n; ++k) {
        const double a = 2.0 * k * (k + alpha + beta) * (2.0 * k + alpha + beta - 2.0);
        const double b = (2.0 * k + alpha + beta - 1.0) *
                         ((2.0 * k + alpha + beta) * (2.0 * k + alpha + beta - 2.0) * x +
                          alpha * alpha - beta * beta);
        const double c = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * (2.0 * k + alpha + beta);
        const double pk = (b * pm1 - c * pm2) / a;
        pm2 = pm1;
        pm1 = pk;
    }
    return pm1;
}

double normalized_jacobi(int n, const ManifoldSpec& spec, double c) {
    const double at_one = jacobi_poly(n, spec.alpha, spec.beta, 1.0);
    if (at_one == 0.0)
        throw NumericError("normalized_jacobi: P_n(1) vanished");
    return jacobi_poly(n, spec.alpha, spec.beta, c) / at_one;
}

std::int64_t eigenspace_dim(int n, const ManifoldSpec& spec) {
    if (n < 0)
        throw UsageError("eigenspace_dim: degree must be nonnegative");
    const double a = spec.alpha;
    const double b = spec.beta;
    const double lg = (std::lgamma(b + 1.0) + std::lgamma(n + a + b + 1.0) +
                       std::lgamma(n + a + 1.0)) -
                      (std::lgamma(a + 1.0) + std::lgamma(a + b + 2.0) +
                       std::lgamma(n + 1.0) + std::lgamma(n + b + 1.0));
    const double value = (2.0 * n + a + b + 1.0) * std::exp(lg);
    // Eigenspace dimensions are integers; the Gamma-ratio formula is exact up
    // to floating-point rounding for the parameter tables of interest.
    return static_cast<std::int64_t>(std::llround(value));
}

double lb_eigenvalue(int n, const ManifoldSpec& spec) {
    if (n < 0)
        throw UsageError("lb_eigenvalue: degree must be nonnegative");
    const double ne = n * spec.eps;
    return -ne * (ne + spec.alpha + spec.beta + 1.0);
}

double great_circle_angle(const SphPoint& x, const SphPoint& y) {
    const double c = std::cos(x.colat) * std::cos(y.colat) +
                     std::sin(x.colat) * std::sin(y.colat) * std::cos(x.lon - y.lon);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

double addition_kernel(int n, const SphPoint& x, const SphPoint& y,
                       const ManifoldSpec& spec) {
    const double angle = great_circle_angle(x, y);
    const double dim = static_cast<double>(eigenspace_dim(n, spec));
    return dim / spec.omega_d * normalized_jacobi(n, spec, std::cos(angle));
}

} // namespace mfreg
