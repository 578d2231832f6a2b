#ifndef MFREG_RESIDUALS_HPP
#define MFREG_RESIDUALS_HPP

#include "mfreg/regression.hpp"
#include "mfreg/spectral.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace mfreg {

/// Per-repetition summaries kept for the residual analysis: the fit, the
/// aggregated responses it predicted, the contrast estimate on the
/// misspecified path, and response-coefficient slices at the selected
/// surface times.
struct RepetitionRecord {
    Eigen::MatrixXd beta_hat;      // ndeg x p
    Eigen::MatrixXd predictor;     // ndeg x N
    Eigen::MatrixXd response;      // ndeg x N
    std::vector<double> theta_hat; // empty on the totally specified path
    Eigen::MatrixXd coef_at_times; // C x |times| response coefficients
};

struct RepetitionStack {
    int N = 0;
    int p = 0;
    std::vector<int> degrees;
    std::vector<int> times; // 0-based surface times, within 0..N-1
    std::vector<RepetitionRecord> reps;

    int R() const { return static_cast<int>(reps.size()); }
    void validate() const;
};

/// Empirical mean quadratic error of the coefficient estimates,
/// (1/R) sum_r (beta_hat^{(r)}_{n,j} - beta_{n,j})^2, per (n, j).
Eigen::MatrixXd emqe_beta(const RepetitionStack& stack, const BetaCoefficients& truth);

/// Prediction EMQE per (n, t): (1/R) sum_r (Yhat_n(t) - Y_n(t))^2 on the
/// per-degree aggregated responses stored in the stack.
Eigen::MatrixXd emqe_predictor(const RepetitionStack& stack);

/// Discrete L1 prediction error sum_t |Yhat_n(t) - Y_n(t)| per (degree,
/// repetition); optionally normalized by 1/N.
Eigen::MatrixXd l1_prediction_norms(const RepetitionStack& stack,
                                    bool normalize = false);

/// L1 distance between the fitted and the generating spectral densities per
/// (degree, repetition), integrated over |omega| in [2*pi/N, pi] (the pole
/// window is excluded; both spectra may diverge at 0). Trapezoid rule with a
/// refinement check.
Eigen::MatrixXd l1_spectral_norms(const RepetitionStack& stack,
                                  const SpectralModel& model,
                                  const std::vector<double>& theta0);

struct HistogramSummary {
    std::string statistic;
    std::vector<double> edges;  // strictly increasing, bins+1 entries
    std::vector<long> counts;   // bins entries, conserving the sample count
};

/// Equal-width histogram spanning [min, max]; a degenerate range is widened
/// symmetrically so exactly one bin is occupied.
HistogramSummary histogram(const std::vector<double>& values, int bins,
                           const std::string& statistic);

/// Repetition means synthesized on the sphere at the stack's surface times:
/// REM averages the observed response coefficients, RTPEM averages the
/// predictor coefficients (x_t' beta_hat_n, shared across orders).
struct MeanFields {
    std::vector<int> times;
    std::vector<std::vector<double>> rem;   // per time, grid field
    std::vector<std::vector<double>> rtpem; // per time, grid field
};

MeanFields repetition_mean_fields(const RepetitionStack& stack,
                                  const SphericalBasisTable& table,
                                  const DesignMatrix& X);

} // namespace mfreg

#endif
