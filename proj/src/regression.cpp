#include "mfreg/regression.hpp"
#include "mfreg/errors.hpp"

#include <cmath>

namespace mfreg {

void DesignMatrix::validate() const {
    if (p() < 1 || N() < p())
        throw UsageError("DesignMatrix: need 1 <= p <= N");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < p())
        throw UsageError("DesignMatrix: columns are rank deficient");
}

DesignMatrix anova_design(int N, int p) {
    if (p < 1 || N < p)
        throw UsageError("anova_design: need 1 <= p <= N");
    DesignMatrix design;
    design.X = Eigen::MatrixXd::Zero(N, p);
    const int block = N / p;
    for (int t = 0; t < N; ++t) {
        int j = std::min(t / block, p - 1); // last block absorbs the remainder
        design.X(t, j) = 1.0;
    }
    return design;
}

BetaCoefficients true_beta(int M, int p) {
    if (M < 2 || p < 1)
        throw UsageError("true_beta: need M >= 2 and p >= 1");
    BetaCoefficients beta;
    beta.n_min = 1;
    beta.b.resize(M, p);
    const double a = 2.0;
    for (int j = 1; j <= p; ++j) {
        const double r = 5.0 * j / (j + 1.0);
        const double norm =
            std::exp(std::lgamma(a + r) - std::lgamma(a) - std::lgamma(r)) / 6.0;
        for (int n = 1; n <= M; ++n) {
            const double x = static_cast<double>(n - 1) / (M - 1);
            beta.b(n - 1, j - 1) =
                norm * std::pow(x, a - 1.0) * std::pow(1.0 - x, r - 1.0);
        }
    }
    return beta;
}

CoefficientSample synthesize_response(const DesignMatrix& X,
                                      const BetaCoefficients& beta,
                                      const CoefficientSample& eps) {
    if (X.N() != eps.N)
        throw UsageError("synthesize_response: design and sample sizes differ");
    if (beta.n_min != eps.spec.n_min || beta.M() != eps.spec.M)
        throw UsageError("synthesize_response: beta degrees do not match the sample");

    CoefficientSample out = eps;
    for (int n = eps.spec.n_min; n <= eps.spec.M; ++n) {
        const int i = eps.spec.idx(n);
        for (int t = 1; t <= eps.N; ++t) {
            double mean = 0.0;
            for (int j = 0; j < X.p(); ++j)
                mean += X.X(t - 1, j) * beta.b(i, j);
            for (int k = 1; k <= eps.spec.deltas[i]; ++k)
                out.at(t, n, k) += mean;
        }
    }
    return out;
}

CovFactor::CovFactor(DegreeCov cov) : cov_(std::move(cov)) {
    const int N = static_cast<int>(cov_.first_row.size());
    if (N < 1)
        throw UsageError("CovFactor: empty covariance row");
    Eigen::MatrixXd lambda(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            lambda(i, j) = cov_.first_row[std::abs(i - j)];
    llt_.compute(lambda);
    if (llt_.info() != Eigen::Success)
        throw NumericError("CovFactor: covariance of degree " +
                           std::to_string(cov_.n) + " is not positive definite");
}

Eigen::MatrixXd CovFactor::whiten(const Eigen::MatrixXd& B) const {
    return llt_.matrixL().solve(B);
}

std::vector<DegreeCov> degree_covariances(const SpharmaSpec& spec, int N,
                                          bool aggregate_scale) {
    std::vector<DegreeCov> covs;
    covs.reserve(spec.ndeg());
    for (int n = spec.n_min; n <= spec.M; ++n) {
        DegreeCov cov;
        cov.n = n;
        cov.first_row = covariance_bn(n, spec, N);
        if (aggregate_scale) {
            const double d = spec.delta_at(n);
            for (double& v : cov.first_row) v /= d * d;
        }
        covs.push_back(std::move(cov));
    }
    return covs;
}

Eigen::MatrixXd aggregate_orders(const CoefficientSample& sample) {
    const int ndeg = sample.spec.ndeg();
    Eigen::MatrixXd out(ndeg, sample.N);
    for (int i = 0; i < ndeg; ++i) {
        const int n = sample.spec.n_min + i;
        const int delta = sample.spec.deltas[i];
        for (int t = 1; t <= sample.N; ++t) {
            double acc = 0.0;
            for (int k = 1; k <= delta; ++k)
                acc += sample.at(t, n, k);
            out(i, t - 1) = acc / delta;
        }
    }
    return out;
}

GlsFit gls_fit_prefactored(const DesignMatrix& X, const Eigen::MatrixXd& Ydeg,
                           const std::vector<int>& degrees,
                           const std::vector<const CovFactor*>& factors) {
    X.validate();
    const int ndeg = static_cast<int>(degrees.size());
    if (Ydeg.rows() != ndeg || static_cast<int>(factors.size()) != ndeg)
        throw UsageError("gls_fit: degree count mismatch");
    const int N = X.N();
    const int p = X.p();

    GlsFit fit;
    fit.degrees = degrees;
    fit.beta_hat.resize(ndeg, p);
    fit.variance.resize(ndeg);
    fit.predictor.resize(ndeg, N);
    fit.response = Ydeg;
    fit.loss = 0.0;

    for (int i = 0; i < ndeg; ++i) {
        const CovFactor& factor = *factors[i];
        if (factor.size() != N)
            throw UsageError("gls_fit: covariance size does not match the sample");
        const Eigen::MatrixXd Z = factor.whiten(X.X);
        const Eigen::VectorXd w = factor.whiten(Ydeg.row(i).transpose());

        const Eigen::MatrixXd ztz = Z.transpose() * Z;
        Eigen::LLT<Eigen::MatrixXd> small(ztz);
        if (small.info() != Eigen::Success)
            throw NumericError("gls_fit: normal equations are singular");
        const Eigen::VectorXd beta = small.solve(Z.transpose() * w);

        fit.beta_hat.row(i) = beta.transpose();
        fit.variance[i] = small.solve(Eigen::MatrixXd::Identity(p, p));
        fit.predictor.row(i) = (X.X * beta).transpose();
        fit.loss += (w - Z * beta).squaredNorm();
    }
    return fit;
}

GlsFit gls_fit(const DesignMatrix& X, const CoefficientSample& Y,
               const std::vector<DegreeCov>& covs) {
    if (static_cast<int>(covs.size()) != Y.spec.ndeg())
        throw UsageError("gls_fit: one covariance per degree required");
    std::vector<int> degrees(Y.spec.ndeg());
    std::vector<CovFactor> owned;
    owned.reserve(covs.size());
    std::vector<const CovFactor*> factors;
    for (int i = 0; i < Y.spec.ndeg(); ++i) {
        degrees[i] = Y.spec.n_min + i;
        if (covs[i].n != degrees[i])
            throw UsageError("gls_fit: covariance degrees out of order");
        owned.emplace_back(covs[i]);
    }
    for (const CovFactor& f : owned) factors.push_back(&f);
    return gls_fit_prefactored(X, aggregate_orders(Y), degrees, factors);
}

std::vector<std::vector<double>> reconstruct_beta(const BetaCoefficients& beta,
                                                  const SphericalBasisTable& table) {
    if (beta.n_min != table.n_min() || beta.M() != table.max_degree())
        throw UsageError("reconstruct_beta: table degrees do not match beta");
    const int p = static_cast<int>(beta.b.cols());
    std::vector<std::vector<double>> fields;
    fields.reserve(p);
    std::vector<double> coeffs(table.coeff_count());
    for (int j = 0; j < p; ++j) {
        for (int n = beta.n_min; n <= beta.M(); ++n) {
            const int off = table.offset(n);
            for (int k = 0; k < 2 * n + 1; ++k)
                coeffs[off + k] = beta.b(n - beta.n_min, j);
        }
        fields.push_back(table.synthesize(coeffs));
    }
    return fields;
}

} // namespace mfreg
