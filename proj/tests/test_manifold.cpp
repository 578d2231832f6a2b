#include <doctest.h>

#include "mfreg/errors.hpp"
#include "mfreg/manifold.hpp"
#include "mfreg/sphere_basis.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace mfreg;

namespace {

constexpr double kPi = std::numbers::pi;

// Explicit Legendre polynomials, the low-degree oracle for the recurrence.
double legendre_explicit(int n, double x) {
    switch (n) {
    case 0: return 1.0;
    case 1: return x;
    case 2: return (3.0 * x * x - 1.0) / 2.0;
    case 3: return (5.0 * x * x * x - 3.0 * x) / 2.0;
    case 4: return (35.0 * std::pow(x, 4) - 30.0 * x * x + 3.0) / 8.0;
    default: return std::nan("");
    }
}

SphPoint random_point(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    // uniform on the sphere
    const double colat = std::acos(1.0 - 2.0 * u01(gen));
    const double lon = 2.0 * kPi * u01(gen);
    return {colat, lon};
}

} // namespace

TEST_CASE("jacobi polynomial recurrence") {
    CHECK(jacobi_poly(0, 0.7, -0.2, 0.3) == 1.0);
    CHECK(jacobi_poly(2, 0.0, 0.0, 0.0) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(jacobi_poly(5, 0.0, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));

    // against explicit Legendre polynomials, n <= 4
    for (int n = 0; n <= 4; ++n) {
        for (double x = -1.0; x <= 1.0; x += 0.125) {
            CHECK(jacobi_poly(n, 0.0, 0.0, x) ==
                  doctest::Approx(legendre_explicit(n, x)).epsilon(1e-12));
        }
    }

    CHECK_THROWS_AS(jacobi_poly(3, 0.0, 0.0, 1.001), NumericError);
    CHECK_NOTHROW(jacobi_poly(3, 0.0, 0.0, 1.0 + 1e-13)); // clamped
}

TEST_CASE("normalized jacobi") {
    const ManifoldSpec s2 = ManifoldSpec::s2();
    CHECK(normalized_jacobi(7, s2, 1.0) == 1.0);
    CHECK(normalized_jacobi(2, s2, 0.0) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(normalized_jacobi(1, s2, -1.0) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("eigenspace dimension") {
    const ManifoldSpec s2 = ManifoldSpec::s2();
    CHECK(eigenspace_dim(0, s2) == 1);
    CHECK(eigenspace_dim(3, s2) == 7);
    CHECK(eigenspace_dim(30, s2) == 61);
    for (int n = 0; n <= 60; ++n)
        CHECK(eigenspace_dim(n, s2) == 2 * n + 1);
}

TEST_CASE("laplace-beltrami eigenvalues") {
    const ManifoldSpec s2 = ManifoldSpec::s2();
    CHECK(lb_eigenvalue(0, s2) == 0.0);
    CHECK(lb_eigenvalue(1, s2) == doctest::Approx(-2.0));
    CHECK(lb_eigenvalue(4, s2) == doctest::Approx(-20.0));
}

TEST_CASE("real harmonics: pinned values and index checks") {
    CHECK(real_harmonic(0, 1, {1.1, 2.2}) ==
          doctest::Approx(1.0 / std::sqrt(4.0 * kPi)).epsilon(1e-14));
    // m = 0 of degree 1 at the pole: sqrt(3/4pi)
    CHECK(real_harmonic(1, 2, {0.0, 0.0}) ==
          doctest::Approx(std::sqrt(3.0 / (4.0 * kPi))).epsilon(1e-13));
    CHECK_THROWS_AS(real_harmonic(2, 6, {0.3, 0.4}), UsageError);
    CHECK_THROWS_AS(real_harmonic(2, 0, {0.3, 0.4}), UsageError);
}

TEST_CASE("quadrature grid integrates the measure and detects bound violations") {
    const QuadratureGrid grid = QuadratureGrid::gauss_legendre(12);
    double total = 0.0;
    for (double w : grid.weights) total += w;
    CHECK(total == doctest::Approx(4.0 * kPi).epsilon(1e-12));

    std::vector<double> field(grid.nodes.size(), 0.0);
    CHECK_THROWS_AS(project_field(field, grid, 13, 1), UsageError);
}

TEST_CASE("orthonormality under quadrature") {
    const QuadratureGrid grid = QuadratureGrid::gauss_legendre(8);
    auto inner = [&](int n1, int j1, int n2, int j2) {
        double acc = 0.0;
        for (size_t i = 0; i < grid.nodes.size(); ++i)
            acc += grid.weights[i] * real_harmonic(n1, j1, grid.nodes[i]) *
                   real_harmonic(n2, j2, grid.nodes[i]);
        return acc;
    };
    CHECK(std::abs(inner(2, 1, 2, 2)) < 1e-10);
    CHECK(inner(2, 1, 2, 1) == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(std::abs(inner(3, 4, 2, 3)) < 1e-10);
    CHECK(inner(4, 7, 4, 7) == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("addition kernel: pinned values") {
    const ManifoldSpec s2 = ManifoldSpec::s2();
    const SphPoint x{0.7, 1.3}, y{2.0, 5.1};
    CHECK(addition_kernel(0, x, y, s2) ==
          doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-13));
    CHECK(addition_kernel(5, x, x, s2) ==
          doctest::Approx(11.0 / (4.0 * kPi)).epsilon(1e-13));
    // points a right angle apart: Legendre P_2(0) = -1/2
    const SphPoint north{0.0, 0.0}, equator{kPi / 2.0, 0.4};
    CHECK(addition_kernel(2, north, equator, s2) ==
          doctest::Approx(5.0 / (4.0 * kPi) * (-0.5)).epsilon(1e-12));
}

TEST_CASE("addition formula holds against the explicit basis") {
    const ManifoldSpec s2 = ManifoldSpec::s2();
    std::mt19937_64 gen(7121);
    std::vector<double> bx(31 * 31), by(31 * 31);
    for (int pair = 0; pair < 25; ++pair) {
        const SphPoint x = random_point(gen);
        const SphPoint y = random_point(gen);
        real_harmonic_all(30, x, bx.data());
        real_harmonic_all(30, y, by.data());
        for (int n = 0; n <= 30; ++n) {
            double lhs = 0.0;
            const int off = n * n;
            for (int j = 0; j < 2 * n + 1; ++j)
                lhs += bx[off + j] * by[off + j];
            CHECK(std::abs(lhs - addition_kernel(n, x, y, s2)) < 1e-8);
        }
    }
}

TEST_CASE("field projection: orthonormality, zero field, linearity") {
    const QuadratureGrid grid = QuadratureGrid::gauss_legendre(8);
    std::vector<double> field(grid.nodes.size());

    for (size_t i = 0; i < grid.nodes.size(); ++i)
        field[i] = real_harmonic(3, 2, grid.nodes[i]);
    for (int n = 0; n <= 4; ++n) {
        for (int j = 1; j <= 2 * n + 1; ++j) {
            const double expect = (n == 3 && j == 2) ? 1.0 : 0.0;
            CHECK(std::abs(project_field(field, grid, n, j) - expect) < 1e-10);
        }
    }

    std::fill(field.begin(), field.end(), 0.0);
    CHECK(project_field(field, grid, 2, 2) == 0.0);

    for (size_t i = 0; i < grid.nodes.size(); ++i)
        field[i] = 2.0 * real_harmonic(1, 1, grid.nodes[i]) +
                   5.0 * real_harmonic(4, 3, grid.nodes[i]);
    CHECK(project_field(field, grid, 1, 1) == doctest::Approx(2.0).epsilon(1e-11));
    CHECK(project_field(field, grid, 4, 3) == doctest::Approx(5.0).epsilon(1e-11));
}

TEST_CASE("basis table round trip") {
    const QuadratureGrid grid = QuadratureGrid::gauss_legendre(20);
    const SphericalBasisTable table(grid, 0, 10);

    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> coeffs(table.coeff_count());
    for (double& c : coeffs) c = u(gen);

    const std::vector<double> field = table.synthesize(coeffs);
    const std::vector<double> back = table.project(field);
    REQUIRE(back.size() == coeffs.size());
    for (size_t i = 0; i < coeffs.size(); ++i)
        CHECK(std::abs(back[i] - coeffs[i]) < 1e-9);
}
