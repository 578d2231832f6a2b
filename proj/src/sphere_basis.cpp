#include "mfreg/sphere_basis.hpp"
#include "mfreg/errors.hpp"

#include <cmath>
#include <numbers>

namespace mfreg {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre_rule(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

// Normalized colatitude functions q_{n,m}(theta) so that the real harmonic is
// q_{n,|m|} * {1, sqrt(2) cos(m phi), sqrt(2) sin(|m| phi)}. Holmes-Featherstone
// style recurrence; stable for the degree range used here (n <= ~120).
// Fills q packed as q[n*(n+1)/2 + m] for 0 <= m <= n <= max_n.
void normalized_colat_all(int max_n, double colat, std::vector<double>& q) {
    const double ct = std::cos(colat);
    const double st = std::sin(colat);
    q.assign(static_cast<size_t>(max_n + 1) * (max_n + 2) / 2, 0.0);
    auto at = [&](int n, int m) -> double& {
        return q[static_cast<size_t>(n) * (n + 1) / 2 + m];
    };
    at(0, 0) = 1.0 / std::sqrt(4.0 * kPi);
    for (int m = 1; m <= max_n; ++m)
        at(m, m) = at(m - 1, m - 1) * st * std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    for (int m = 0; m < max_n; ++m)
        at(m + 1, m) = std::sqrt(2.0 * m + 3.0) * ct * at(m, m);
    for (int m = 0; m <= max_n; ++m) {
        for (int n = m + 2; n <= max_n; ++n) {
            const double a = std::sqrt((4.0 * n * n - 1.0) /
                                       (static_cast<double>(n - m) * (n + m)));
            const double b = std::sqrt((2.0 * n + 1.0) * (n + m - 1.0) * (n - m - 1.0) /
                                       (static_cast<double>(n - m) * (n + m) * (2.0 * n - 3.0)));
            at(n, m) = a * ct * at(n - 1, m) - b * at(n - 2, m);
        }
    }
}

} // namespace

QuadratureGrid QuadratureGrid::gauss_legendre(int max_degree) {
    if (max_degree < 0)
        throw UsageError("QuadratureGrid: max_degree must be nonnegative");
    // Exact for products of two harmonics of degree <= max_degree:
    // cos(theta)-polynomials up to 2*max_degree and azimuthal modes up to
    // 2*max_degree.
    const int ntheta = max_degree + 1;
    const int nphi = 2 * max_degree + 1;
    std::vector<double> gx, gw;
    gauss_legendre_rule(ntheta, gx, gw);

    QuadratureGrid grid;
    grid.max_degree = max_degree;
    grid.nodes.reserve(static_cast<size_t>(ntheta) * nphi);
    grid.weights.reserve(static_cast<size_t>(ntheta) * nphi);
    const double wphi = 2.0 * kPi / nphi;
    for (int i = 0; i < ntheta; ++i) {
        const double colat = std::acos(gx[i]);
        for (int k = 0; k < nphi; ++k) {
            grid.nodes.push_back({colat, 2.0 * kPi * k / nphi});
            grid.weights.push_back(gw[i] * wphi);
        }
    }
    return grid;
}

double real_harmonic(int n, int j, const SphPoint& p) {
    if (n < 0)
        throw UsageError("real_harmonic: degree must be nonnegative");
    if (j < 1 || j > 2 * n + 1)
        throw UsageError("real_harmonic: order index out of range");
    const int m = j - 1 - n;
    const int ma = std::abs(m);

    std::vector<double> q;
    normalized_colat_all(n, p.colat, q);
    const double qnm = q[static_cast<size_t>(n) * (n + 1) / 2 + ma];
    if (m == 0) return qnm;
    const double sqrt2 = std::numbers::sqrt2;
    return m > 0 ? sqrt2 * qnm * std::cos(m * p.lon)
                 : sqrt2 * qnm * std::sin(ma * p.lon);
}

void real_harmonic_all(int max_n, const SphPoint& p, double* out) {
    std::vector<double> q;
    normalized_colat_all(max_n, p.colat, q);
    std::vector<double> cosm(max_n + 1), sinm(max_n + 1);
    for (int m = 0; m <= max_n; ++m) {
        cosm[m] = std::cos(m * p.lon);
        sinm[m] = std::sin(m * p.lon);
    }
    const double sqrt2 = std::numbers::sqrt2;
    size_t idx = 0;
    for (int n = 0; n <= max_n; ++n) {
        const double* qn = &q[static_cast<size_t>(n) * (n + 1) / 2];
        for (int m = -n; m <= n; ++m) {
            const int ma = std::abs(m);
            if (m == 0)
                out[idx++] = qn[0];
            else if (m > 0)
                out[idx++] = sqrt2 * qn[ma] * cosm[ma];
            else
                out[idx++] = sqrt2 * qn[ma] * sinm[ma];
        }
    }
}

double project_field(const std::vector<double>& field, const QuadratureGrid& grid,
                     int n, int j) {
    if (field.size() != grid.nodes.size())
        throw UsageError("project_field: field size does not match grid");
    if (n > grid.max_degree)
        throw UsageError("project_field: degree exceeds grid exactness bound");
    double acc = 0.0;
    for (size_t i = 0; i < grid.nodes.size(); ++i)
        acc += grid.weights[i] * field[i] * real_harmonic(n, j, grid.nodes[i]);
    return acc;
}

SphericalBasisTable::SphericalBasisTable(QuadratureGrid grid, int n_min, int max_degree)
    : grid_(std::move(grid)), n_min_(n_min), max_degree_(max_degree) {
    if (n_min < 0 || max_degree < n_min)
        throw UsageError("SphericalBasisTable: invalid degree range");
    if (max_degree > grid_.max_degree)
        throw UsageError("SphericalBasisTable: degree range exceeds grid bound");

    offsets_.assign(max_degree_ + 1, 0);
    int count = 0;
    for (int n = n_min_; n <= max_degree_; ++n) {
        offsets_[n] = count;
        count += 2 * n + 1;
    }

    const int nodes = static_cast<int>(grid_.nodes.size());
    values_.resize(nodes, count);
    std::vector<double> row(static_cast<size_t>(max_degree_ + 1) * (max_degree_ + 1));
    for (int i = 0; i < nodes; ++i) {
        real_harmonic_all(max_degree_, grid_.nodes[i], row.data());
        for (int n = n_min_; n <= max_degree_; ++n) {
            const size_t src = static_cast<size_t>(n) * n; // offset of degree n in full table
            for (int j = 0; j < 2 * n + 1; ++j)
                values_(i, offsets_[n] + j) = row[src + j];
        }
    }
}

int SphericalBasisTable::offset(int n) const {
    if (n < n_min_ || n > max_degree_)
        throw UsageError("SphericalBasisTable: degree out of range");
    return offsets_[n];
}

std::vector<double> SphericalBasisTable::project(const std::vector<double>& field) const {
    if (static_cast<int>(field.size()) != values_.rows())
        throw UsageError("SphericalBasisTable: field size does not match grid");
    Eigen::Map<const Eigen::VectorXd> f(field.data(), values_.rows());
    Eigen::Map<const Eigen::VectorXd> w(grid_.weights.data(), values_.rows());
    Eigen::VectorXd coeffs = values_.transpose() * f.cwiseProduct(w).matrix();
    return {coeffs.data(), coeffs.data() + coeffs.size()};
}

std::vector<double> SphericalBasisTable::synthesize(const std::vector<double>& coeffs) const {
    if (static_cast<int>(coeffs.size()) != values_.cols())
        throw UsageError("SphericalBasisTable: coefficient count mismatch");
    Eigen::Map<const Eigen::VectorXd> c(coeffs.data(), values_.cols());
    Eigen::VectorXd field = values_ * c;
    return {field.data(), field.data() + field.size()};
}

} // namespace mfreg
