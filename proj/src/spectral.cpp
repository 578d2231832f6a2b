#include "mfreg/spectral.hpp"
#include "mfreg/errors.hpp"
#include "mfreg/fft.hpp"
#include "mfreg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mfreg {

namespace {
constexpr double kPi = std::numbers::pi;
}

FdftFrame fdft(const CoefficientSample& sample, double omega) {
    if (sample.N < 2)
        throw UsageError("fdft: need at least two time points");
    FdftFrame frame;
    frame.omega = omega;
    frame.coeffs.assign(sample.C, {0.0, 0.0});
    const double norm = 1.0 / std::sqrt(2.0 * kPi * sample.N);
    for (int t = 1; t <= sample.N; ++t) {
        const std::complex<double> e = std::polar(norm, -omega * t);
        const double* row = &sample.data[static_cast<size_t>(t - 1) * sample.C];
        for (int c = 0; c < sample.C; ++c)
            frame.coeffs[c] += row[c] * e;
    }
    return frame;
}

double fejer_kernel(int T, double omega) {
    if (T < 1)
        throw UsageError("fejer_kernel: T must be >= 1");
    const double s = std::sin(omega / 2.0);
    if (std::abs(s) < 1e-12)
        return static_cast<double>(T);
    const double num = std::sin(T * omega / 2.0);
    return num * num / (s * s) / T;
}

PeriodogramSet periodogram(const CoefficientSample& sample) {
    const int T = sample.N;
    if (T < 2)
        throw UsageError("periodogram: need at least two time points");
    const int K = (T - 1) / 2;
    PeriodogramSet set;
    set.T = T;
    set.freqs.resize(K);
    for (int k = 1; k <= K; ++k)
        set.freqs[k - 1] = 2.0 * kPi * k / T;

    const int ndeg = sample.spec.ndeg();
    set.degrees.resize(ndeg);
    set.deltas.resize(ndeg);
    set.I = Eigen::MatrixXd::Zero(ndeg, K);

    std::vector<double> series;
    const double norm = 1.0 / (2.0 * kPi * T);
    for (int i = 0; i < ndeg; ++i) {
        const int n = sample.spec.n_min + i;
        set.degrees[i] = n;
        set.deltas[i] = sample.spec.deltas[i];
        for (int j = 1; j <= sample.spec.deltas[i]; ++j) {
            sample.copy_series(n, j, series);
            const std::vector<std::complex<double>> spec = fft::real_dft(series);
            for (int k = 1; k <= K; ++k)
                set.I(i, k - 1) += norm * std::norm(spec[k]);
        }
        set.I.row(i) /= sample.spec.deltas[i];
    }
    return set;
}

SpectralModel SpectralModel::from_spec(const SpharmaSpec& spec) {
    SpectralModel model;
    model.shape = spec;
    model.kind = spec.exponents.kind;
    return model;
}

int SpectralModel::theta_dim() const {
    switch (kind) {
    case ExponentKind::dpbs: return 3;
    case ExponentKind::ipbs: return 2;
    case ExponentKind::custom: return shape.ndeg();
    }
    return 0;
}

double SpectralModel::alpha_at(int n, const std::vector<double>& theta) const {
    if (static_cast<int>(theta.size()) != theta_dim())
        throw UsageError("SpectralModel: theta dimension mismatch");
    const int pos = shape.idx(n) + 1; // family abscissa index
    switch (kind) {
    case ExponentKind::dpbs:
        return alpha_dpbs(pos, {theta[0], theta[1], theta[2]});
    case ExponentKind::ipbs:
        return alpha_ipbs(pos, {theta[0], theta[1]});
    case ExponentKind::custom:
        return theta[pos - 1];
    }
    return 0.0;
}

double SpectralModel::eval(int n, double omega, const std::vector<double>& theta) const {
    return spectral_density_alpha(n, shape, alpha_at(n, theta), omega) /
           shape.delta_at(n);
}

ContrastProblem::ContrastProblem(SpectralModel model, PeriodogramSet data,
                                 std::vector<double> lower, std::vector<double> upper,
                                 std::vector<double> weights)
    : model_(std::move(model)), data_(std::move(data)),
      lower_(std::move(lower)), upper_(std::move(upper)),
      weights_(std::move(weights)) {
    const int dim = model_.theta_dim();
    if (static_cast<int>(lower_.size()) != dim ||
        static_cast<int>(upper_.size()) != dim)
        throw UsageError("ContrastProblem: bound dimensions do not match theta");
    for (int i = 0; i < dim; ++i)
        if (!(lower_[i] < upper_[i]))
            throw UsageError("ContrastProblem: empty bound box");
    const int ndeg = static_cast<int>(data_.degrees.size());
    if (ndeg != model_.shape.ndeg())
        throw UsageError("ContrastProblem: periodogram degrees do not match the model");
    if (weights_.empty()) {
        weights_.resize(ndeg);
        for (int i = 0; i < ndeg; ++i)
            weights_[i] = static_cast<double>(data_.deltas[i]);
    }
    if (static_cast<int>(weights_.size()) != ndeg)
        throw UsageError("ContrastProblem: one weight per degree required");

    // Bounds must keep every alpha(n, theta) inside (0,1). The families are
    // coordinatewise monotone in theta, so checking box corners suffices.
    std::vector<double> corner(dim);
    for (int mask = 0; mask < (1 << dim); ++mask) {
        for (int i = 0; i < dim; ++i)
            corner[i] = (mask >> i) & 1 ? upper_[i] : lower_[i];
        for (int n = model_.shape.n_min; n <= model_.shape.M; ++n) {
            const double a = model_.alpha_at(n, corner);
            if (!(a > 0.0 && a < 1.0))
                throw UsageError("ContrastProblem: bounds allow alpha outside (0,1)");
        }
    }

    // theta-independent tables
    const int K = static_cast<int>(data_.freqs.size());
    log_pole_.resize(K);
    for (int k = 0; k < K; ++k) {
        const double s = std::sin(data_.freqs[k] / 2.0);
        log_pole_[k] = std::log(4.0 * s * s);
    }
    log_srd_.resize(ndeg, K);
    for (int i = 0; i < ndeg; ++i) {
        const int n = data_.degrees[i];
        for (int k = 0; k < K; ++k)
            log_srd_(i, k) = std::log(model_.shape.sigma2_at(n) *
                                      arma_spectral_factor(n, model_.shape, data_.freqs[k]) /
                                      model_.shape.delta_at(n));
    }
}

bool ContrastProblem::in_bounds(const std::vector<double>& theta) const {
    if (theta.size() != lower_.size()) return false;
    for (size_t i = 0; i < theta.size(); ++i)
        if (theta[i] < lower_[i] || theta[i] > upper_[i]) return false;
    return true;
}

double ContrastProblem::evaluate(const std::vector<double>& theta) const {
    if (!in_bounds(theta))
        throw UsageError("whittle_contrast: theta violates the bounds");
    const int ndeg = static_cast<int>(data_.degrees.size());
    const int K = static_cast<int>(data_.freqs.size());
    if (K == 0)
        throw UsageError("whittle_contrast: no usable Fourier frequencies");
    double total = 0.0;
    for (int i = 0; i < ndeg; ++i) {
        const double alpha = model_.alpha_at(data_.degrees[i], theta);
        double acc = 0.0;
        for (int k = 0; k < K; ++k) {
            const double logf = log_srd_(i, k) - 0.5 * alpha * log_pole_[k];
            acc += logf + data_.I(i, k) * std::exp(-logf);
        }
        total += weights_[i] * acc / K;
    }
    if (!std::isfinite(total))
        throw NumericError("whittle_contrast: non-finite contrast value");
    return total;
}

double whittle_contrast(const std::vector<double>& theta, const ContrastProblem& prob) {
    return prob.evaluate(theta);
}

namespace {

// Nelder-Mead with candidates clamped into the box. Returns best point and
// value; iteration count and convergence through the out-parameters.
void nelder_mead(const ContrastProblem& prob, std::vector<double> start,
                 std::vector<double>& best, double& best_val, int& iterations,
                 bool& converged) {
    const int dim = static_cast<int>(start.size());
    const auto& lo = prob.lower();
    const auto& hi = prob.upper();
    auto clamp = [&](std::vector<double>& x) {
        for (int i = 0; i < dim; ++i)
            x[i] = std::clamp(x[i], lo[i], hi[i]);
    };

    std::vector<std::vector<double>> simplex(dim + 1, start);
    for (int i = 0; i < dim; ++i) {
        const double step = 0.1 * (hi[i] - lo[i]);
        simplex[i + 1][i] += (start[i] + step <= hi[i]) ? step : -step;
        clamp(simplex[i + 1]);
    }
    std::vector<double> value(dim + 1);
    for (int i = 0; i <= dim; ++i)
        value[i] = prob.evaluate(simplex[i]);

    const int max_iter = 500;
    converged = false;
    int iter = 0;
    std::vector<int> order(dim + 1);
    for (; iter < max_iter; ++iter) {
        for (int i = 0; i <= dim; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return value[a] < value[b]; });
        const int ib = order[0], iw = order[dim], is = order[dim - 1];

        if (value[iw] - value[ib] <= 1e-8 * (std::abs(value[ib]) + 1.0)) {
            converged = true;
            break;
        }

        std::vector<double> centroid(dim, 0.0);
        for (int i = 0; i <= dim; ++i) {
            if (i == iw) continue;
            for (int d = 0; d < dim; ++d) centroid[d] += simplex[i][d];
        }
        for (int d = 0; d < dim; ++d) centroid[d] /= dim;

        auto blend = [&](double coef) {
            std::vector<double> x(dim);
            for (int d = 0; d < dim; ++d)
                x[d] = centroid[d] + coef * (simplex[iw][d] - centroid[d]);
            clamp(x);
            return x;
        };

        const std::vector<double> refl = blend(-1.0);
        const double frefl = prob.evaluate(refl);
        if (frefl < value[ib]) {
            const std::vector<double> expd = blend(-2.0);
            const double fexpd = prob.evaluate(expd);
            if (fexpd < frefl) {
                simplex[iw] = expd;
                value[iw] = fexpd;
            } else {
                simplex[iw] = refl;
                value[iw] = frefl;
            }
        } else if (frefl < value[is]) {
            simplex[iw] = refl;
            value[iw] = frefl;
        } else {
            const std::vector<double> ctr = blend(frefl < value[iw] ? -0.5 : 0.5);
            const double fctr = prob.evaluate(ctr);
            if (fctr < std::min(value[iw], frefl)) {
                simplex[iw] = ctr;
                value[iw] = fctr;
            } else {
                // shrink toward the best vertex
                for (int i = 0; i <= dim; ++i) {
                    if (i == ib) continue;
                    for (int d = 0; d < dim; ++d)
                        simplex[i][d] = simplex[ib][d] +
                                        0.5 * (simplex[i][d] - simplex[ib][d]);
                    clamp(simplex[i]);
                    value[i] = prob.evaluate(simplex[i]);
                }
            }
        }
    }
    int ib = 0;
    for (int i = 1; i <= dim; ++i)
        if (value[i] < value[ib]) ib = i;
    best = simplex[ib];
    best_val = value[ib];
    iterations = iter;
}

} // namespace

MinContrastResult minimum_contrast(const ContrastProblem& prob,
                                   const std::vector<double>& init,
                                   std::uint64_t jitter_seed) {
    if (!prob.in_bounds(init))
        throw UsageError("minimum_contrast: init violates the bounds");
    const int dim = static_cast<int>(init.size());
    const auto& lo = prob.lower();
    const auto& hi = prob.upper();

    NormalStream jitter(mix_seed({jitter_seed, 0xA11CEULL}));
    MinContrastResult result;
    result.value = std::numeric_limits<double>::infinity();

    const int restarts = 3;
    for (int r = 0; r < restarts; ++r) {
        std::vector<double> start = init;
        if (r > 0) {
            for (int i = 0; i < dim; ++i) {
                start[i] += 0.15 * (hi[i] - lo[i]) * jitter.next();
                start[i] = std::clamp(start[i], lo[i], hi[i]);
            }
        }
        std::vector<double> best;
        double best_val = 0.0;
        int iterations = 0;
        bool converged = false;
        nelder_mead(prob, start, best, best_val, iterations, converged);
        if (best_val < result.value) {
            result.theta = best;
            result.value = best_val;
            result.iterations = iterations;
            result.converged = converged;
        }
        result.restarts = r + 1;
    }
    return result;
}

void default_theta_box(ExponentKind kind, int theta_dim,
                       std::vector<double>& lower, std::vector<double>& upper) {
    switch (kind) {
    case ExponentKind::dpbs:
        lower = {0.05, 0.05, 0.05};
        upper = {0.95, 0.95, 0.95};
        return;
    case ExponentKind::ipbs:
        // the truth (1,1) sits close to the admissibility boundary
        // alpha(x=-pi) > 0; this box keeps every corner admissible
        lower = {0.95, 0.55};
        upper = {1.60, 1.00};
        return;
    case ExponentKind::custom:
        lower.assign(theta_dim, 0.01);
        upper.assign(theta_dim, 0.95);
        return;
    }
    throw UsageError("default_theta_box: unknown family");
}

std::vector<double> default_theta_init(const std::vector<double>& lower,
                                       const std::vector<double>& upper) {
    std::vector<double> init(lower.size());
    for (size_t i = 0; i < lower.size(); ++i)
        init[i] = 0.5 * (lower[i] + upper[i]);
    return init;
}

std::vector<DegreeCov> invert_to_covariance(const std::vector<double>& theta,
                                            const SpectralModel& model, int N) {
    std::vector<DegreeCov> covs;
    covs.reserve(model.shape.ndeg());
    for (int n = model.shape.n_min; n <= model.shape.M; ++n) {
        DegreeCov cov;
        cov.n = n;
        cov.first_row =
            covariance_from_alpha(n, model.shape, model.alpha_at(n, theta), N);
        covs.push_back(std::move(cov));
    }
    return covs;
}

GlsFit plugin_gls(const DesignMatrix& X, const CoefficientSample& Y,
                  const std::vector<double>& theta_hat, const SpectralModel& model) {
    std::vector<DegreeCov> covs = invert_to_covariance(theta_hat, model, Y.N);
    for (DegreeCov& cov : covs) {
        const double d = model.shape.delta_at(cov.n);
        for (double& v : cov.first_row) v /= d * d;
    }
    return gls_fit(X, Y, covs);
}

CoefficientSample residual_sample(const CoefficientSample& Y, const DesignMatrix& X,
                                  const Eigen::MatrixXd& beta_hat) {
    if (X.N() != Y.N)
        throw UsageError("residual_sample: design and sample sizes differ");
    if (beta_hat.rows() != Y.spec.ndeg() || beta_hat.cols() != X.p())
        throw UsageError("residual_sample: beta dimensions do not match");
    CoefficientSample out = Y;
    for (int n = Y.spec.n_min; n <= Y.spec.M; ++n) {
        const int i = Y.spec.idx(n);
        for (int t = 1; t <= Y.N; ++t) {
            double mean = 0.0;
            for (int j = 0; j < X.p(); ++j)
                mean += X.X(t - 1, j) * beta_hat(i, j);
            for (int k = 1; k <= Y.spec.deltas[i]; ++k)
                out.at(t, n, k) -= mean;
        }
    }
    return out;
}

} // namespace mfreg
