#include <doctest.h>

#include "mfreg/errors.hpp"
#include "mfreg/residuals.hpp"

#include <cmath>
#include <random>

using namespace mfreg;

namespace {

RepetitionStack make_stack(int ndeg, int p, int N, int R) {
    RepetitionStack stack;
    stack.N = N;
    stack.p = p;
    for (int n = 1; n <= ndeg; ++n) stack.degrees.push_back(n);
    stack.reps.resize(R);
    for (RepetitionRecord& rec : stack.reps) {
        rec.beta_hat = Eigen::MatrixXd::Zero(ndeg, p);
        rec.predictor = Eigen::MatrixXd::Zero(ndeg, N);
        rec.response = Eigen::MatrixXd::Zero(ndeg, N);
        rec.coef_at_times.resize(0, 0);
    }
    return stack;
}

} // namespace

TEST_CASE("emqe of the coefficient estimates") {
    const int ndeg = 3, p = 2, N = 4;
    BetaCoefficients truth;
    truth.n_min = 1;
    truth.b = Eigen::MatrixXd::Constant(ndeg, p, 1.5);

    SUBCASE("exact estimates give zero") {
        RepetitionStack stack = make_stack(ndeg, p, N, 5);
        for (RepetitionRecord& rec : stack.reps) rec.beta_hat = truth.b;
        CHECK(emqe_beta(stack, truth).lpNorm<Eigen::Infinity>() == 0.0);
    }
    SUBCASE("symmetric errors average to the square") {
        RepetitionStack stack = make_stack(ndeg, p, N, 2);
        const double e = 0.3;
        stack.reps[0].beta_hat = truth.b.array() + e;
        stack.reps[1].beta_hat = truth.b.array() - e;
        const Eigen::MatrixXd emqe = emqe_beta(stack, truth);
        for (int i = 0; i < ndeg; ++i)
            for (int j = 0; j < p; ++j)
                CHECK(emqe(i, j) == doctest::Approx(e * e).epsilon(1e-14));
    }
    SUBCASE("dimension mismatch is rejected") {
        RepetitionStack stack = make_stack(ndeg, p, N, 2);
        BetaCoefficients bad;
        bad.b = Eigen::MatrixXd::Zero(ndeg + 1, p);
        CHECK_THROWS_AS(emqe_beta(stack, bad), UsageError);
    }
}

TEST_CASE("prediction emqe and l1 norms") {
    const int ndeg = 2, p = 1, N = 5;
    RepetitionStack stack = make_stack(ndeg, p, N, 1);

    SUBCASE("noiseless stack gives zeros") {
        CHECK(emqe_predictor(stack).lpNorm<Eigen::Infinity>() == 0.0);
        CHECK(l1_prediction_norms(stack).lpNorm<Eigen::Infinity>() == 0.0);
    }
    SUBCASE("single-run degenerate case") {
        stack.reps[0].predictor(1, 3) = 2.0; // one residual of size 2
        const Eigen::MatrixXd emqe = emqe_predictor(stack);
        CHECK(emqe(1, 3) == doctest::Approx(4.0));
        CHECK(emqe(0, 0) == 0.0);
        const Eigen::MatrixXd l1 = l1_prediction_norms(stack);
        CHECK(l1(1, 0) == doctest::Approx(2.0));
        const Eigen::MatrixXd l1n = l1_prediction_norms(stack, true);
        CHECK(l1n(1, 0) == doctest::Approx(2.0 / N));
    }
    SUBCASE("unit residual at one time point") {
        stack.reps[0].predictor(0, 2) = 1.0;
        CHECK(l1_prediction_norms(stack)(0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("aggregation consistency") {
        RepetitionStack big = make_stack(ndeg, p, N, 7);
        std::mt19937_64 gen(4);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (RepetitionRecord& rec : big.reps)
            for (int i = 0; i < ndeg; ++i)
                for (int t = 0; t < N; ++t) {
                    rec.predictor(i, t) = gauss(gen);
                    rec.response(i, t) = gauss(gen);
                }
        const Eigen::MatrixXd emqe = emqe_predictor(big);
        for (int i = 0; i < ndeg; ++i) {
            double norm_mean = 0.0;
            for (const RepetitionRecord& rec : big.reps)
                norm_mean += (rec.predictor.row(i) - rec.response.row(i)).squaredNorm();
            norm_mean /= big.R() * N;
            CHECK(emqe.row(i).mean() == doctest::Approx(norm_mean).epsilon(1e-12));
        }
    }
}

TEST_CASE("l1 spectral norms") {
    SpharmaSpec spec;
    spec.n_min = 1;
    spec.M = 3;
    spec.sigma2 = {1.0, 0.5, 0.25};
    spec.phi = {0.3, 0.2, 0.1};
    spec.psi = {0.1, 0.1, 0.1};
    spec.deltas = {3, 5, 7};
    spec.exponents = LrdExponentFamily::custom({0.4, 0.3, 0.2});
    const SpectralModel model = SpectralModel::from_spec(spec);
    const std::vector<double> theta0 = {0.4, 0.3, 0.2};

    RepetitionStack stack = make_stack(3, 1, 64, 2);
    stack.reps[0].theta_hat = theta0;
    stack.reps[1].theta_hat = {0.5, 0.35, 0.25};

    const Eigen::MatrixXd norms = l1_spectral_norms(stack, model, theta0);
    for (int i = 0; i < 3; ++i) {
        CHECK(norms(i, 0) == doctest::Approx(0.0).epsilon(1e-8)); // exact identity
        CHECK(norms(i, 1) > 0.0);
    }

    SUBCASE("missing estimates are rejected") {
        stack.reps[1].theta_hat.clear();
        CHECK_THROWS_AS(l1_spectral_norms(stack, model, theta0), UsageError);
    }
}

TEST_CASE("histogram") {
    SUBCASE("identical values occupy a single bin") {
        const HistogramSummary h = histogram(std::vector<double>(10, 3.3), 7, "x");
        long occupied = 0, total = 0;
        for (long c : h.counts) {
            if (c > 0) ++occupied;
            total += c;
        }
        CHECK(occupied == 1);
        CHECK(total == 10);
        for (size_t b = 1; b < h.edges.size(); ++b)
            CHECK(h.edges[b] > h.edges[b - 1]);
    }
    SUBCASE("uniform integers split evenly") {
        std::vector<double> values;
        for (int v = 1; v <= 100; ++v) values.push_back(v);
        const HistogramSummary h = histogram(values, 10, "u");
        for (long c : h.counts) CHECK(c == 10);
    }
    SUBCASE("count conservation on random data") {
        std::mt19937_64 gen(8);
        std::normal_distribution<double> gauss(0.0, 2.0);
        std::vector<double> values(137);
        for (double& v : values) v = gauss(gen);
        const HistogramSummary h = histogram(values, 12, "g");
        long total = 0;
        for (long c : h.counts) total += c;
        CHECK(total == 137);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(histogram({}, 4, "e"), UsageError);
        CHECK_THROWS_AS(histogram({1.0}, 0, "e"), UsageError);
    }
}

TEST_CASE("repetition mean fields") {
    const int M = 3, p = 2, N = 6;
    const QuadratureGrid grid = QuadratureGrid::gauss_legendre(2 * M);
    const SphericalBasisTable table(grid, 1, M);
    const DesignMatrix X = anova_design(N, p);

    RepetitionStack stack = make_stack(M, p, N, 1);
    stack.times = {0, 3};
    const int C = table.coeff_count();
    stack.reps[0].coef_at_times = Eigen::MatrixXd::Zero(C, 2);
    stack.reps[0].coef_at_times(table.offset(2) + 1, 0) = 1.25;
    stack.reps[0].beta_hat.setConstant(0.5);

    SUBCASE("single repetition returns its own synthesis") {
        const MeanFields fields = repetition_mean_fields(stack, table, X);
        REQUIRE(fields.rem.size() == 2);
        std::vector<double> coeffs(C, 0.0);
        coeffs[table.offset(2) + 1] = 1.25;
        const std::vector<double> expect = table.synthesize(coeffs);
        for (size_t i = 0; i < expect.size(); i += 13)
            CHECK(fields.rem[0][i] == doctest::Approx(expect[i]).epsilon(1e-12));
        for (size_t i = 0; i < expect.size(); i += 13)
            CHECK(fields.rem[1][i] == 0.0);
    }
    SUBCASE("rtpem of a noiseless stack synthesizes X beta") {
        const MeanFields fields = repetition_mean_fields(stack, table, X);
        // at time 0 the first treatment is active: x_0' beta_n = 0.5 per degree
        std::vector<double> coeffs(C);
        for (int n = 1; n <= M; ++n)
            for (int k = 0; k < 2 * n + 1; ++k)
                coeffs[table.offset(n) + k] = 0.5;
        const std::vector<double> expect = table.synthesize(coeffs);
        for (size_t i = 0; i < expect.size(); i += 13)
            CHECK(fields.rtpem[0][i] == doctest::Approx(expect[i]).epsilon(1e-12));
    }
    SUBCASE("out-of-range time is rejected") {
        stack.times = {0, N};
        CHECK_THROWS_AS(repetition_mean_fields(stack, table, X), UsageError);
    }
}
