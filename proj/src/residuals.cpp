#include "mfreg/residuals.hpp"
#include "mfreg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mfreg {

namespace {
constexpr double kPi = std::numbers::pi;
}

void RepetitionStack::validate() const {
    if (reps.empty())
        throw UsageError("RepetitionStack: no repetitions");
    const int ndeg = static_cast<int>(degrees.size());
    for (int t : times)
        if (t < 0 || t >= N)
            throw UsageError("RepetitionStack: surface time out of range");
    for (const RepetitionRecord& rec : reps) {
        if (rec.beta_hat.rows() != ndeg || rec.beta_hat.cols() != p ||
            rec.predictor.rows() != ndeg || rec.predictor.cols() != N ||
            rec.response.rows() != ndeg || rec.response.cols() != N)
            throw UsageError("RepetitionStack: repetition shapes disagree");
        if (rec.coef_at_times.cols() != static_cast<int>(times.size()) &&
            !times.empty())
            throw UsageError("RepetitionStack: coefficient slices missing");
    }
}

Eigen::MatrixXd emqe_beta(const RepetitionStack& stack, const BetaCoefficients& truth) {
    stack.validate();
    const int ndeg = static_cast<int>(stack.degrees.size());
    if (truth.b.rows() != ndeg || truth.b.cols() != stack.p)
        throw UsageError("emqe_beta: truth dimensions do not match the stack");
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(ndeg, stack.p);
    for (const RepetitionRecord& rec : stack.reps)
        acc += (rec.beta_hat - truth.b).array().square().matrix();
    return acc / stack.R();
}

Eigen::MatrixXd emqe_predictor(const RepetitionStack& stack) {
    stack.validate();
    const int ndeg = static_cast<int>(stack.degrees.size());
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(ndeg, stack.N);
    for (const RepetitionRecord& rec : stack.reps)
        acc += (rec.predictor - rec.response).array().square().matrix();
    return acc / stack.R();
}

Eigen::MatrixXd l1_prediction_norms(const RepetitionStack& stack, bool normalize) {
    stack.validate();
    const int ndeg = static_cast<int>(stack.degrees.size());
    Eigen::MatrixXd out(ndeg, stack.R());
    for (int r = 0; r < stack.R(); ++r) {
        const RepetitionRecord& rec = stack.reps[r];
        for (int i = 0; i < ndeg; ++i) {
            double acc = (rec.predictor.row(i) - rec.response.row(i)).cwiseAbs().sum();
            out(i, r) = normalize ? acc / stack.N : acc;
        }
    }
    return out;
}

namespace {

// Trapezoid integral of |f_theta - f_theta0| over [wmin, pi], doubled for the
// negative half.
double spectral_l1_distance(const SpectralModel& model, int n,
                            const std::vector<double>& theta,
                            const std::vector<double>& theta0, double wmin, int K) {
    const double a1 = model.alpha_at(n, theta);
    const double a0 = model.alpha_at(n, theta0);
    const double h = (kPi - wmin) / (K - 1);
    double acc = 0.0;
    for (int k = 0; k < K; ++k) {
        const double w = wmin + k * h;
        const double diff = std::abs(spectral_density_alpha(n, model.shape, a1, w) -
                                     spectral_density_alpha(n, model.shape, a0, w));
        acc += (k == 0 || k == K - 1) ? 0.5 * diff : diff;
    }
    return 2.0 * acc * h;
}

} // namespace

Eigen::MatrixXd l1_spectral_norms(const RepetitionStack& stack,
                                  const SpectralModel& model,
                                  const std::vector<double>& theta0) {
    stack.validate();
    const int ndeg = static_cast<int>(stack.degrees.size());
    if (model.shape.ndeg() != ndeg)
        throw UsageError("l1_spectral_norms: model degrees do not match the stack");
    const double wmin = 2.0 * kPi / stack.N;

    Eigen::MatrixXd out(ndeg, stack.R());
    for (int r = 0; r < stack.R(); ++r) {
        const RepetitionRecord& rec = stack.reps[r];
        if (rec.theta_hat.empty())
            throw UsageError("l1_spectral_norms: repetition lacks a contrast estimate");
        for (int i = 0; i < ndeg; ++i) {
            const int n = stack.degrees[i];
            int K = 4097;
            double coarse = spectral_l1_distance(model, n, rec.theta_hat, theta0, wmin, K);
            double fine = 0.0;
            bool converged = false;
            while (K <= (1 << 20)) {
                K = 2 * (K - 1) + 1;
                fine = spectral_l1_distance(model, n, rec.theta_hat, theta0, wmin, K);
                if (std::abs(fine - coarse) <= 1e-6 * std::max(std::abs(fine), 1e-12)) {
                    converged = true;
                    break;
                }
                coarse = fine;
            }
            if (!converged)
                throw NumericError("l1_spectral_norms: quadrature did not converge");
            out(i, r) = fine;
        }
    }
    return out;
}

HistogramSummary histogram(const std::vector<double>& values, int bins,
                           const std::string& statistic) {
    if (values.empty())
        throw UsageError("histogram: empty input");
    if (bins < 1)
        throw UsageError("histogram: need at least one bin");

    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }

    HistogramSummary h;
    h.statistic = statistic;
    h.edges.resize(bins + 1);
    const double width = (hi - lo) / bins;
    for (int b = 0; b <= bins; ++b)
        h.edges[b] = lo + b * width;
    h.counts.assign(bins, 0);
    for (double v : values) {
        int b = static_cast<int>((v - lo) / width);
        b = std::clamp(b, 0, bins - 1); // the maximum closes the last bin
        ++h.counts[b];
    }
    return h;
}

MeanFields repetition_mean_fields(const RepetitionStack& stack,
                                  const SphericalBasisTable& table,
                                  const DesignMatrix& X) {
    stack.validate();
    if (X.N() != stack.N || X.p() != stack.p)
        throw UsageError("repetition_mean_fields: design does not match the stack");
    const int ndeg = static_cast<int>(stack.degrees.size());
    if (table.n_min() != stack.degrees.front() ||
        table.max_degree() != stack.degrees.back())
        throw UsageError("repetition_mean_fields: table degrees do not match");

    const int ntimes = static_cast<int>(stack.times.size());
    const int C = table.coeff_count();

    Eigen::MatrixXd mean_coefs = Eigen::MatrixXd::Zero(C, ntimes);
    Eigen::MatrixXd mean_beta = Eigen::MatrixXd::Zero(ndeg, stack.p);
    for (const RepetitionRecord& rec : stack.reps) {
        if (ntimes > 0) {
            if (rec.coef_at_times.rows() != C)
                throw UsageError("repetition_mean_fields: slice length mismatch");
            mean_coefs += rec.coef_at_times;
        }
        mean_beta += rec.beta_hat;
    }
    mean_coefs /= stack.R();
    mean_beta /= stack.R();

    MeanFields fields;
    fields.times = stack.times;
    std::vector<double> coeffs(C);
    for (int q = 0; q < ntimes; ++q) {
        for (int c = 0; c < C; ++c) coeffs[c] = mean_coefs(c, q);
        fields.rem.push_back(table.synthesize(coeffs));

        // predictor coefficients are constant across the orders of a degree
        const int t = stack.times[q];
        for (int i = 0; i < ndeg; ++i) {
            const int n = stack.degrees[i];
            double v = 0.0;
            for (int j = 0; j < stack.p; ++j)
                v += X.X(t, j) * mean_beta(i, j);
            const int off = table.offset(n);
            for (int k = 0; k < 2 * n + 1; ++k)
                coeffs[off + k] = v;
        }
        fields.rtpem.push_back(table.synthesize(coeffs));
    }
    return fields;
}

} // namespace mfreg
