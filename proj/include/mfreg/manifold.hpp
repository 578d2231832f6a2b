#ifndef MFREG_MANIFOLD_HPP
#define MFREG_MANIFOLD_HPP

#include <cstdint>

namespace mfreg {

/// Parameters of a connected compact two-point homogeneous space: Jacobi
/// parameters (alpha, beta), distance scaling eps, topological dimension d
/// and total measure omega_d. They fix the zonal kernels, the eigenspace
/// dimensions and the Laplace-Beltrami eigenvalues.
///
/// Only the sphere preset is numerically pinned down; zonal-kernel
/// computations accept any (alpha, beta, eps) with alpha, beta > -1.
struct ManifoldSpec {
    int d = 2;
    double alpha = 0.0;
    double beta = 0.0;
    double eps = 1.0;
    double omega_d = 0.0;

    /// The unit sphere S^2: d=2, alpha=beta=0, eps=1, omega_d=4*pi.
    static ManifoldSpec s2();

    /// Throws UsageError when Jacobi parameters or measure are invalid.
    void validate() const;
};

/// Point on S^2 in spherical coordinates, colatitude in [0,pi],
/// longitude in [0,2*pi).
struct SphPoint {
    double colat = 0.0;
    double lon = 0.0;
};

/// Jacobi polynomial P_n^{(alpha,beta)}(x) by the ascending three-term
/// recurrence. Exact for n=0,1. Throws NumericError if |x| > 1 + 1e-12
/// (values just outside [-1,1] are clamped).
double jacobi_poly(int n, double alpha, double beta, double x);

/// Normalized zonal polynomial R_n(c) = P_n^{(a,b)}(c) / P_n^{(a,b)}(1);
/// R_n(1) == 1 exactly.
double normalized_jacobi(int n, const ManifoldSpec& spec, double c);

/// Dimension delta(n,d) of the degree-n Laplace-Beltrami eigenspace,
/// evaluated from the Gamma-function formula. For the sphere this is 2n+1.
std::int64_t eigenspace_dim(int n, const ManifoldSpec& spec);

/// Laplace-Beltrami eigenvalue lambda_n = -n*eps*(n*eps + alpha + beta + 1).
double lb_eigenvalue(int n, const ManifoldSpec& spec);

/// Great-circle (central) angle between two points on S^2, in [0,pi].
double great_circle_angle(const SphPoint& x, const SphPoint& y);

/// Zonal addition kernel: delta(n,d)/omega_d * R_n(cos(distance(x,y))).
/// Equals the sum over the degree-n eigenspace of products of basis
/// eigenfunctions at x and y.
double addition_kernel(int n, const SphPoint& x, const SphPoint& y,
                       const ManifoldSpec& spec);

} // namespace mfreg

#endif
