#ifndef MFREG_REGRESSION_HPP
#define MFREG_REGRESSION_HPP

#include "mfreg/lrd.hpp"
#include "mfreg/sphere_basis.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <vector>

namespace mfreg {

/// N x p design matrix of scalar time-varying regressors.
struct DesignMatrix {
    Eigen::MatrixXd X;

    int N() const { return static_cast<int>(X.rows()); }
    int p() const { return static_cast<int>(X.cols()); }

    /// Throws UsageError when p > N or the columns are rank deficient.
    void validate() const;
};

/// One-way ANOVA indicator design: the time axis is split into p contiguous
/// blocks of length floor(N/p), the last block absorbing the remainder.
DesignMatrix anova_design(int N, int p);

/// Fourier coefficients beta_{n,j} of the functional regression parameters,
/// degrees n = n_min..n_min+rows-1, regressors j = 1..p.
struct BetaCoefficients {
    int n_min = 1;
    Eigen::MatrixXd b; // (#degrees) x p

    int M() const { return n_min + static_cast<int>(b.rows()) - 1; }
};

/// Beta-density-shaped coefficient curves on the grid x_n = (n-1)/(M-1):
/// beta_{n,j} = (1/6) x^{a-1} (1-x)^{r_j-1} Gamma(a+r_j)/(Gamma(a)Gamma(r_j))
/// with a = 2 and r_j = 5j/(j+1).
BetaCoefficients true_beta(int M, int p);

/// Response synthesis Y_{n,k}(t) = sum_j X_{t,j} beta_{n,j} + V_{n,k}(t);
/// the coefficients are shared across the orders k of each degree.
CoefficientSample synthesize_response(const DesignMatrix& X,
                                      const BetaCoefficients& beta,
                                      const CoefficientSample& eps);

/// Symmetric Toeplitz covariance of one degree, stored by its first row
/// B_n(0..N-1).
struct DegreeCov {
    int n = 0;
    std::vector<double> first_row;
};

/// Cholesky factor of a DegreeCov; throws NumericError when the matrix is
/// not positive definite. Immutable after construction, safe to share across
/// threads.
class CovFactor {
public:
    explicit CovFactor(DegreeCov cov);

    int n() const { return cov_.n; }
    int size() const { return static_cast<int>(cov_.first_row.size()); }
    const DegreeCov& cov() const { return cov_; }

    /// L^{-1} B for the lower Cholesky factor L.
    Eigen::MatrixXd whiten(const Eigen::MatrixXd& B) const;

private:
    DegreeCov cov_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Model covariances Lambda_n for every degree of `spec`, at sample size N.
/// With `aggregate_scale` the rows are divided by delta(n)^2, the covariance
/// of the order-averaged response series.
std::vector<DegreeCov> degree_covariances(const SpharmaSpec& spec, int N,
                                          bool aggregate_scale);

/// Per-degree GLS fit: estimates, variances (X^T Lambda^-1 X)^-1, predictor
/// and the aggregated responses it was fitted to.
struct GlsFit {
    std::vector<int> degrees;
    Eigen::MatrixXd beta_hat;              // ndeg x p
    std::vector<Eigen::MatrixXd> variance; // p x p per degree
    Eigen::MatrixXd predictor;             // ndeg x N, Yhat_n(t)
    Eigen::MatrixXd response;              // ndeg x N, aggregated Y_n(t)
    double loss = 0.0;                     // sum_n |Y_n - X beta_n|^2_{Lambda^-1}
};

/// Order-averaged per-degree responses Y_n(t) = mean_k Y_{n,k}(t),
/// as an (ndeg x N) matrix.
Eigen::MatrixXd aggregate_orders(const CoefficientSample& sample);

/// GLS estimation degree by degree via the whitened normal equations
/// (the covariance is factorized, never inverted).
GlsFit gls_fit(const DesignMatrix& X, const CoefficientSample& Y,
               const std::vector<DegreeCov>& covs);

/// Same, with pre-factorized covariances (reused across repetitions) and an
/// already aggregated response matrix.
GlsFit gls_fit_prefactored(const DesignMatrix& X, const Eigen::MatrixXd& Ydeg,
                           const std::vector<int>& degrees,
                           const std::vector<const CovFactor*>& factors);

/// Synthesis of the regression parameters on a grid: one field per regressor.
std::vector<std::vector<double>> reconstruct_beta(const BetaCoefficients& beta,
                                                  const SphericalBasisTable& table);

} // namespace mfreg

#endif
