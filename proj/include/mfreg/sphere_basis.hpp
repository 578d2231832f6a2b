#ifndef MFREG_SPHERE_BASIS_HPP
#define MFREG_SPHERE_BASIS_HPP

#include "mfreg/manifold.hpp"

#include <Eigen/Dense>
#include <vector>

namespace mfreg {

/// Product quadrature on S^2: Gauss-Legendre in colatitude, uniform trapezoid
/// in longitude. Integrates products of spherical harmonics exactly whenever
/// both degrees are <= max_degree; weights sum to 4*pi.
struct QuadratureGrid {
    std::vector<SphPoint> nodes;
    std::vector<double> weights;
    int max_degree = 0;

    static QuadratureGrid gauss_legendre(int max_degree);
};

/// Real orthonormal spherical harmonic S_{n,j} on S^2.
///
/// The order index j = 1..2n+1 enumerates m = -n..n: sin-type harmonics for
/// m < 0, the zonal harmonic at m = 0 (j = n+1), cos-type for m > 0.
/// Normalization: integral over S^2 of S_{n,j} S_{m,k} equals
/// delta_{nm} delta_{jk}.
double real_harmonic(int n, int j, const SphPoint& p);

/// Evaluates every S_{n,j} with n <= max_n at one point, packed degree-major
/// ((0,1), (1,1), (1,2), (1,3), (2,1), ...). `out` must hold (max_n+1)^2
/// values.
void real_harmonic_all(int max_n, const SphPoint& p, double* out);

/// Quadrature projection of a pointwise field onto S_{n,j}. Exact (to 1e-10)
/// for fields band-limited within the grid bound. Throws UsageError when the
/// requested degree exceeds the grid's exactness bound.
double project_field(const std::vector<double>& field, const QuadratureGrid& grid,
                     int n, int j);

/// Precomputed table of basis values on a quadrature grid, for repeated
/// projection/synthesis. Immutable after construction.
class SphericalBasisTable {
public:
    SphericalBasisTable(QuadratureGrid grid, int n_min, int max_degree);

    /// Coefficients of `field` for all table degrees, packed degree-major.
    std::vector<double> project(const std::vector<double>& field) const;

    /// Pointwise field on the grid nodes from packed coefficients.
    std::vector<double> synthesize(const std::vector<double>& coeffs) const;

    int coeff_count() const { return static_cast<int>(values_.cols()); }
    int n_min() const { return n_min_; }
    int max_degree() const { return max_degree_; }
    int offset(int n) const;
    const QuadratureGrid& grid() const { return grid_; }

private:
    QuadratureGrid grid_;
    int n_min_;
    int max_degree_;
    std::vector<int> offsets_;
    Eigen::MatrixXd values_; // nodes x coeffs
};

} // namespace mfreg

#endif
