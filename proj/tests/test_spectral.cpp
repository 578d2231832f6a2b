#include <doctest.h>

#include "mfreg/errors.hpp"
#include "mfreg/rng.hpp"
#include "mfreg/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace mfreg;

namespace {

constexpr double kPi = std::numbers::pi;

SpharmaSpec one_degree(double sigma2, double phi, double psi, double alpha, int dim) {
    SpharmaSpec spec;
    spec.n_min = 1;
    spec.M = 1;
    spec.sigma2 = {sigma2};
    spec.phi = {phi};
    spec.psi = {psi};
    spec.deltas = {dim};
    spec.exponents = LrdExponentFamily::custom({alpha});
    return spec;
}

SpharmaSpec dpbs_spec(int M) {
    SpharmaSpec spec;
    spec.n_min = 1;
    spec.M = M;
    spec.sigma2.resize(M);
    spec.phi.resize(M);
    spec.psi.resize(M);
    spec.deltas.resize(M);
    for (int n = 1; n <= M; ++n) {
        spec.sigma2[n - 1] = std::pow(n + 1.0, -1.5);
        spec.phi[n - 1] = std::pow(0.7 * (n + 1.0 / n), -1.5);
        spec.psi[n - 1] = 0.4 * std::pow(n + 1.0 / n, -1.5);
        spec.deltas[n - 1] = 2 * n + 1;
    }
    spec.exponents = LrdExponentFamily::dpbs(M, {0.75, 0.76, 0.77});
    return spec;
}

} // namespace

TEST_CASE("fdft basics") {
    const SpharmaSpec spec = one_degree(1.0, 0.2, 0.1, 0.3, 2);
    const int T = 32;
    CoefficientSample s = simulate(spec, T, 50, 11);

    SUBCASE("value at omega = 0 is the scaled mean") {
        const FdftFrame frame = fdft(s, 0.0);
        std::vector<double> series;
        for (int j = 1; j <= 2; ++j) {
            s.copy_series(1, j, series);
            double sum = 0.0;
            for (double v : series) sum += v;
            const double expect = sum / std::sqrt(2.0 * kPi * T);
            CHECK(frame.coeffs[j - 1].real() == doctest::Approx(expect).epsilon(1e-12));
            CHECK(std::abs(frame.coeffs[j - 1].imag()) < 1e-12);
        }
    }
    SUBCASE("constant series cancels at the first Fourier frequency") {
        CoefficientSample c = CoefficientSample::zeros(spec, T);
        for (double& v : c.data) v = 3.7;
        const FdftFrame frame = fdft(c, 2.0 * kPi / T);
        for (const auto& z : frame.coeffs)
            CHECK(std::abs(z) < 1e-10);
    }
    SUBCASE("parseval over the full Fourier grid") {
        double lhs = 0.0;
        for (int k = 0; k < T; ++k) {
            const FdftFrame frame = fdft(s, 2.0 * kPi * k / T);
            for (const auto& z : frame.coeffs) lhs += std::norm(z);
        }
        double rhs = 0.0;
        for (double v : s.data) rhs += v * v;
        rhs /= 2.0 * kPi;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }
    SUBCASE("conjugate symmetry") {
        for (double w : {0.4, 1.1, 2.9}) {
            const FdftFrame plus = fdft(s, w);
            const FdftFrame minus = fdft(s, -w);
            for (size_t c = 0; c < plus.coeffs.size(); ++c)
                CHECK(std::abs(minus.coeffs[c] - std::conj(plus.coeffs[c])) < 1e-10);
        }
    }
}

TEST_CASE("fejer kernel") {
    CHECK(fejer_kernel(7, 0.0) == doctest::Approx(7.0));
    CHECK(fejer_kernel(200, 0.0) == doctest::Approx(200.0));
    CHECK(std::abs(fejer_kernel(2, kPi)) < 1e-20);
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int i = 0; i < 1000; ++i)
        CHECK(fejer_kernel(16, u(gen)) >= 0.0);
}

TEST_CASE("periodogram") {
    SUBCASE("white-noise level") {
        const double sigma2 = 1.3;
        const SpharmaSpec spec = one_degree(sigma2, 0.0, 0.0, 0.0, 3);
        const CoefficientSample s = simulate(spec, 2000, 100, 21);
        const PeriodogramSet set = periodogram(s);
        const double mean = set.I.row(0).mean();
        const double expect = sigma2 / (2.0 * kPi * 3.0);
        CHECK(std::abs(mean / expect - 1.0) < 0.10);
    }
    SUBCASE("line spectrum of a deterministic sinusoid") {
        const SpharmaSpec spec = one_degree(1.0, 0.0, 0.0, 0.0, 1);
        const int T = 128, k0 = 17;
        CoefficientSample s = CoefficientSample::zeros(spec, T);
        for (int t = 1; t <= T; ++t)
            s.at(t, 1, 1) = std::cos(2.0 * kPi * k0 * t / T);
        const PeriodogramSet set = periodogram(s);
        const double peak = set.I(0, k0 - 1);
        CHECK(peak > 0.0);
        for (int k = 1; k <= (T - 1) / 2; ++k) {
            if (k == k0) continue;
            CHECK(set.I(0, k - 1) <= 1e-8 * peak);
        }
    }
    SUBCASE("evenness in omega") {
        const SpharmaSpec spec = one_degree(1.0, 0.4, 0.2, 0.35, 2);
        const CoefficientSample s = simulate(spec, 256, 100, 31);
        for (int k : {1, 9, 60}) {
            const double w = 2.0 * kPi * k / 256;
            const FdftFrame plus = fdft(s, w);
            const FdftFrame minus = fdft(s, -w);
            double ip = 0.0, im = 0.0;
            for (const auto& z : plus.coeffs) ip += std::norm(z);
            for (const auto& z : minus.coeffs) im += std::norm(z);
            CHECK(std::abs(ip - im) < 1e-10 * std::max(1.0, ip));
        }
    }
}

TEST_CASE("expected periodogram matches the Fejer-smoothed spectrum") {
    const SpharmaSpec spec = one_degree(1.0, 0.4, 0.2, 0.3, 3);
    const int T = 256, R = 60;
    const std::vector<double> b = covariance_bn(1, spec, T);

    const std::vector<int> kprobe = {2, 11, 47};
    std::vector<std::vector<double>> draws(kprobe.size());
    for (int r = 0; r < R; ++r) {
        const CoefficientSample s =
            simulate(spec, T, 400, mix_seed({909, static_cast<std::uint64_t>(r)}));
        const PeriodogramSet set = periodogram(s);
        for (size_t q = 0; q < kprobe.size(); ++q)
            draws[q].push_back(set.I(0, kprobe[q] - 1));
    }

    for (size_t q = 0; q < kprobe.size(); ++q) {
        const double w = 2.0 * kPi * kprobe[q] / T;
        // (1/2pi) sum_{|u|<T} (1-|u|/T) e^{-iwu} B(u)/delta
        double expect = b[0];
        for (int u = 1; u < T; ++u)
            expect += 2.0 * (1.0 - static_cast<double>(u) / T) * std::cos(w * u) * b[u];
        expect /= 2.0 * kPi * 3.0;

        double mean = 0.0;
        for (double v : draws[q]) mean += v;
        mean /= R;
        double var = 0.0;
        for (double v : draws[q]) var += (v - mean) * (v - mean);
        const double se = std::sqrt(var / (R - 1) / R);
        CHECK(std::abs(mean - expect) < 3.0 * se);
    }
}

TEST_CASE("whittle contrast") {
    SUBCASE("white-noise closed-form minimizer") {
        // family with near-zero memory exponent: the contrast in the variance
        // parameter v is log v + 2*pi*delta*Ibar/v, minimized at 2*pi*delta*Ibar
        const int delta = 2;
        const SpharmaSpec gen_spec = one_degree(0.9, 0.0, 0.0, 0.0, delta);
        const CoefficientSample s = simulate(gen_spec, 1024, 100, 77);
        const PeriodogramSet set = periodogram(s);
        const double ibar = set.I.row(0).mean();
        const double vstar = 2.0 * kPi * delta * ibar;

        auto contrast_at = [&](double v) {
            SpharmaSpec shape = one_degree(v, 0.0, 0.0, 1e-9, delta);
            const SpectralModel model = SpectralModel::from_spec(shape);
            const ContrastProblem prob(model, set, {1e-10}, {1e-6});
            return whittle_contrast({1e-9}, prob);
        };
        double best_v = 0.0, best_c = std::numeric_limits<double>::infinity();
        for (double v = 0.5 * vstar; v <= 1.5 * vstar; v += 0.01 * vstar) {
            const double c = contrast_at(v);
            if (c < best_c) {
                best_c = c;
                best_v = v;
            }
        }
        CHECK(std::abs(best_v / vstar - 1.0) < 0.02);
    }
    SUBCASE("theta_0 beats random admissible parameters on simulated data") {
        const SpharmaSpec spec = dpbs_spec(8);
        const CoefficientSample s = simulate(spec, 2000, 500, 1234);
        const SpectralModel model = SpectralModel::from_spec(spec);
        std::vector<double> lo, hi;
        default_theta_box(ExponentKind::dpbs, 3, lo, hi);
        const ContrastProblem prob(model, periodogram(s), lo, hi);

        const std::vector<double> theta0 = {0.75, 0.76, 0.77};
        const double c0 = whittle_contrast(theta0, prob);
        std::mt19937_64 gen(5150);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int wins = 0;
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> theta(3);
            for (int i = 0; i < 3; ++i)
                theta[i] = lo[i] + (hi[i] - lo[i]) * u(gen);
            if (c0 <= whittle_contrast(theta, prob)) ++wins;
        }
        CHECK(wins >= 18);
    }
    SUBCASE("scaling identity of the contrast formula") {
        const SpharmaSpec spec = dpbs_spec(4);
        const CoefficientSample s = simulate(spec, 256, 200, 8);
        const PeriodogramSet set = periodogram(s);
        const SpectralModel model = SpectralModel::from_spec(spec);
        std::vector<double> lo, hi;
        default_theta_box(ExponentKind::dpbs, 3, lo, hi);
        const ContrastProblem prob(model, set, lo, hi);
        const std::vector<double> theta = {0.6, 0.5, 0.55};
        const double base = whittle_contrast(theta, prob);

        const double c = 2.5;
        SpharmaSpec scaled = spec;
        for (double& v : scaled.sigma2) v *= c;
        const ContrastProblem prob_scaled(SpectralModel::from_spec(scaled), set, lo, hi);
        const double shifted = whittle_contrast(theta, prob_scaled);

        // contrast(c f) = contrast(f) + sum_w log c + (1/c - 1) sum_w avg(I/f)
        double wsum = 0.0, ratio = 0.0;
        const int K = static_cast<int>(set.freqs.size());
        for (int i = 0; i < prob.model().shape.ndeg(); ++i) {
            const double w = prob.weights()[i];
            wsum += w;
            double acc = 0.0;
            for (int k = 0; k < K; ++k)
                acc += set.I(i, k) / model.eval(i + 1, set.freqs[k], theta);
            ratio += w * acc / K;
        }
        const double expect = base + wsum * std::log(c) + (1.0 / c - 1.0) * ratio;
        CHECK(shifted == doctest::Approx(expect).epsilon(1e-10));
    }
    SUBCASE("bound violation is rejected") {
        const SpharmaSpec spec = dpbs_spec(4);
        const CoefficientSample s = simulate(spec, 128, 100, 9);
        std::vector<double> lo, hi;
        default_theta_box(ExponentKind::dpbs, 3, lo, hi);
        const ContrastProblem prob(SpectralModel::from_spec(spec), periodogram(s), lo, hi);
        CHECK_THROWS_AS(whittle_contrast({2.0, 0.5, 0.5}, prob), UsageError);
    }
}

TEST_CASE("minimum contrast optimizer") {
    SUBCASE("descent from theta_0 and convergence flag") {
        const SpharmaSpec spec = dpbs_spec(6);
        const CoefficientSample s = simulate(spec, 1000, 400, 313);
        std::vector<double> lo, hi;
        default_theta_box(ExponentKind::dpbs, 3, lo, hi);
        const ContrastProblem prob(SpectralModel::from_spec(spec), periodogram(s), lo, hi);

        const std::vector<double> theta0 = {0.75, 0.76, 0.77};
        const MinContrastResult res = minimum_contrast(prob, theta0);
        CHECK(res.converged);
        CHECK(prob.in_bounds(res.theta));
        CHECK(res.value <= whittle_contrast(theta0, prob));
        CHECK(res.iterations > 0);
    }
    SUBCASE("FARIMA(0,d,0) exponent recovery") {
        const double d = 0.2;
        std::vector<double> errs;
        for (int r = 0; r < 5; ++r) {
            const SpharmaSpec spec = one_degree(1.0, 0.0, 0.0, 2.0 * d, 1);
            const CoefficientSample s = simulate(
                spec, 2000, 500, mix_seed({31337, static_cast<std::uint64_t>(r)}));
            const SpectralModel model = SpectralModel::from_spec(spec);
            const ContrastProblem prob(model, periodogram(s), {0.01}, {0.95});
            const MinContrastResult res =
                minimum_contrast(prob, default_theta_init({0.01}, {0.95}));
            errs.push_back(std::abs(res.theta[0] / 2.0 - d));
        }
        std::sort(errs.begin(), errs.end());
        CHECK(errs[2] < 0.05); // median of 5
    }
    SUBCASE("argmin is invariant to weight rescaling") {
        const SpharmaSpec spec = dpbs_spec(5);
        const CoefficientSample s = simulate(spec, 512, 300, 2718);
        const PeriodogramSet set = periodogram(s);
        const SpectralModel model = SpectralModel::from_spec(spec);
        std::vector<double> lo, hi;
        default_theta_box(ExponentKind::dpbs, 3, lo, hi);

        std::vector<double> w1(5), w5(5);
        for (int i = 0; i < 5; ++i) {
            w1[i] = 2.0 * (i + 1) + 1.0;
            w5[i] = 5.0 * w1[i];
        }
        const MinContrastResult a =
            minimum_contrast(ContrastProblem(model, set, lo, hi, w1), {0.5, 0.5, 0.5});
        const MinContrastResult b =
            minimum_contrast(ContrastProblem(model, set, lo, hi, w5), {0.5, 0.5, 0.5});
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs(a.theta[i] - b.theta[i]) < 1e-4);
    }
}

TEST_CASE("covariance inversion of the fitted family") {
    const SpharmaSpec spec = dpbs_spec(6);
    const SpectralModel model = SpectralModel::from_spec(spec);
    const std::vector<double> theta0 = {0.75, 0.76, 0.77};

    SUBCASE("at theta_0 the inversion reproduces the model covariance") {
        const std::vector<DegreeCov> covs = invert_to_covariance(theta0, model, 128);
        for (int n = 1; n <= 6; ++n) {
            const std::vector<double> oracle = covariance_bn(n, spec, 128);
            for (int t = 0; t < 128; ++t)
                CHECK(std::abs(covs[n - 1].first_row[t] - oracle[t]) < 1e-8);
        }
    }
    SUBCASE("positivity, domination, factorizability") {
        const std::vector<double> theta = {0.6, 0.4, 0.3};
        const std::vector<DegreeCov> covs = invert_to_covariance(theta, model, 500);
        for (const DegreeCov& cov : covs) {
            CHECK(cov.first_row[0] > 0.0);
            for (double v : cov.first_row)
                CHECK(std::abs(v) <= cov.first_row[0] + 1e-14);
            CHECK_NOTHROW([&] { CovFactor factor(cov); }());
        }
    }
}

TEST_CASE("plug-in GLS") {
    const int M = 6, N = 200, p = 3;
    const SpharmaSpec spec = dpbs_spec(M);
    const DesignMatrix X = anova_design(N, p);
    const BetaCoefficients beta = true_beta(M, p);
    const CoefficientSample eps = simulate(spec, N, 400, 5115);
    const CoefficientSample y = synthesize_response(X, beta, eps);
    const SpectralModel model = SpectralModel::from_spec(spec);

    SUBCASE("coincides with the oracle at theta_0") {
        const GlsFit oracle = gls_fit(X, y, degree_covariances(spec, N, true));
        const GlsFit plugin = plugin_gls(X, y, {0.75, 0.76, 0.77}, model);
        CHECK((oracle.beta_hat - plugin.beta_hat).lpNorm<Eigen::Infinity>() < 1e-10);
        CHECK((oracle.predictor - plugin.predictor).lpNorm<Eigen::Infinity>() < 1e-10);
    }
    SUBCASE("estimation noise can only inflate the mean quadratic error") {
        const int R = 30;
        double emqe_oracle = 0.0, emqe_plugin = 0.0;
        std::vector<double> lo, hi;
        default_theta_box(ExponentKind::dpbs, 3, lo, hi);
        const std::vector<DegreeCov> true_covs = degree_covariances(spec, N, true);
        std::vector<DegreeCov> eye(M);
        for (int n = 1; n <= M; ++n) {
            eye[n - 1].n = n;
            eye[n - 1].first_row.assign(N, 0.0);
            eye[n - 1].first_row[0] = 1.0;
        }
        for (int r = 0; r < R; ++r) {
            const CoefficientSample e =
                simulate(spec, N, 400, mix_seed({888, static_cast<std::uint64_t>(r)}));
            const CoefficientSample yr = synthesize_response(X, beta, e);
            const GlsFit oracle = gls_fit(X, yr, true_covs);
            const GlsFit ols = gls_fit(X, yr, eye);
            const CoefficientSample resid = residual_sample(yr, X, ols.beta_hat);
            const ContrastProblem prob(model, periodogram(resid), lo, hi);
            const MinContrastResult fit =
                minimum_contrast(prob, default_theta_init(lo, hi));
            const GlsFit plugin = plugin_gls(X, yr, fit.theta, model);
            emqe_oracle += (oracle.beta_hat - beta.b).squaredNorm();
            emqe_plugin += (plugin.beta_hat - beta.b).squaredNorm();
        }
        CHECK(emqe_plugin >= emqe_oracle * 0.999);
    }
}
