#ifndef MFREG_SPECTRAL_HPP
#define MFREG_SPECTRAL_HPP

#include "mfreg/lrd.hpp"
#include "mfreg/regression.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace mfreg {

/// Functional discrete Fourier transform of the coefficient paths at one
/// frequency: (1/sqrt(2*pi*T)) sum_{t=1..T} V_{n,j}(t) e^{-i omega t},
/// one complex value per (n,j) in sample coefficient order.
struct FdftFrame {
    double omega = 0.0;
    std::vector<std::complex<double>> coeffs;
};

FdftFrame fdft(const CoefficientSample& sample, double omega);

/// Fejer kernel F_T(omega) = (1/T)(sin(T omega/2)/sin(omega/2))^2, with the
/// limit value T at omega = 0 (mod 2*pi).
double fejer_kernel(int T, double omega);

/// Per-degree periodogram at the positive Fourier frequencies
/// omega_k = 2*pi*k/T, k = 1..floor((T-1)/2):
/// I_n(omega_k) = (1/delta_n) sum_j |fdft coefficient (n,j)|^2.
/// Values at negative frequencies follow by evenness.
struct PeriodogramSet {
    int T = 0;
    std::vector<int> degrees;
    std::vector<int> deltas;
    std::vector<double> freqs; // positive Fourier frequencies
    Eigen::MatrixXd I;         // ndeg x K, nonnegative
};

PeriodogramSet periodogram(const CoefficientSample& sample);

/// Semiparametric spectral family of the misspecified-model path: the SRD
/// shape (sigma2, phi, psi per degree) is fixed, the LRD exponents alpha(n)
/// depend on the free parameter theta through the declared family.
/// Evaluation is on the per-coefficient scale f_n(omega)/delta_n, matching
/// the order-averaged periodogram.
struct SpectralModel {
    SpharmaSpec shape;
    ExponentKind kind = ExponentKind::custom;

    static SpectralModel from_spec(const SpharmaSpec& spec);

    int theta_dim() const;
    /// alpha(n, theta); the degree position within the shape's range selects
    /// the family abscissa.
    double alpha_at(int n, const std::vector<double>& theta) const;
    /// Per-coefficient model spectrum at (n, omega).
    double eval(int n, double omega, const std::vector<double>& theta) const;
};

/// Whittle minimum-contrast problem: periodogram data, model family, box
/// bounds on theta and per-degree weights (default delta(n,2)).
class ContrastProblem {
public:
    ContrastProblem(SpectralModel model, PeriodogramSet data,
                    std::vector<double> lower, std::vector<double> upper,
                    std::vector<double> weights = {});

    const SpectralModel& model() const { return model_; }
    const PeriodogramSet& data() const { return data_; }
    const std::vector<double>& lower() const { return lower_; }
    const std::vector<double>& upper() const { return upper_; }
    const std::vector<double>& weights() const { return weights_; }

    bool in_bounds(const std::vector<double>& theta) const;

    /// Contrast value; used by whittle_contrast.
    double evaluate(const std::vector<double>& theta) const;

private:
    SpectralModel model_;
    PeriodogramSet data_;
    std::vector<double> lower_, upper_, weights_;
    // theta-independent tables
    std::vector<double> log_pole_;   // log(4 sin^2(w_k/2)) per frequency
    Eigen::MatrixXd log_srd_;        // log(sigma2 M_n(w_k)/delta_n)
};

/// Sum over degrees of w_n * mean_k [ log f_{n,theta}(w_k) +
/// I_n(w_k)/f_{n,theta}(w_k) ] over the positive Fourier frequencies.
/// Throws UsageError outside the bounds.
double whittle_contrast(const std::vector<double>& theta, const ContrastProblem& prob);

struct MinContrastResult {
    std::vector<double> theta;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    int restarts = 0;
};

/// Box-constrained Nelder-Mead minimization of the Whittle contrast with
/// three deterministic jittered restarts. Convergence: relative contrast
/// change below 1e-8 or 500 iterations per restart; non-convergence is
/// reported through the flag, never silently.
MinContrastResult minimum_contrast(const ContrastProblem& prob,
                                   const std::vector<double>& init,
                                   std::uint64_t jitter_seed = 0x5EED);

/// Default admissible boxes containing the scenario truth; every corner
/// keeps alpha(n, theta) inside (0,1).
void default_theta_box(ExponentKind kind, int theta_dim,
                       std::vector<double>& lower, std::vector<double>& upper);

/// Default optimizer start: the box center.
std::vector<double> default_theta_init(const std::vector<double>& lower,
                                       const std::vector<double>& upper);

/// Fourier inversion of the fitted family: B-hat_{n,theta}(0..N-1) for every
/// degree, on the degree-level scale (same convention as covariance_bn).
std::vector<DegreeCov> invert_to_covariance(const std::vector<double>& theta,
                                            const SpectralModel& model, int N);

/// Plug-in GLS: gls_fit with the estimated Toeplitz weights
/// Lambda-hat_{n,theta}/delta^2. Coincides with the oracle fit when theta
/// equals the generating parameter.
GlsFit plugin_gls(const DesignMatrix& X, const CoefficientSample& Y,
                  const std::vector<double>& theta_hat, const SpectralModel& model);

/// Per-order residuals Y_{n,k}(t) - x_t' beta_n. Contrast estimation runs on
/// these rather than on the raw responses, so the regression mean does not
/// leak into the periodogram.
CoefficientSample residual_sample(const CoefficientSample& Y, const DesignMatrix& X,
                                  const Eigen::MatrixXd& beta_hat);

} // namespace mfreg

#endif
