#include "mfreg/lrd.hpp"
#include "mfreg/errors.hpp"
#include "mfreg/fft.hpp"
#include "mfreg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace mfreg {

namespace {
constexpr double kPi = std::numbers::pi;
}

const char* exponent_kind_name(ExponentKind kind) {
    switch (kind) {
    case ExponentKind::dpbs: return "dpbs";
    case ExponentKind::ipbs: return "ipbs";
    case ExponentKind::custom: return "custom";
    }
    return "?";
}

ExponentKind exponent_kind_from_name(const std::string& name) {
    if (name == "dpbs") return ExponentKind::dpbs;
    if (name == "ipbs") return ExponentKind::ipbs;
    if (name == "custom") return ExponentKind::custom;
    throw UsageError("unknown exponent family '" + name + "'");
}

double dpbs_x(int n) {
    if (n < 1 || n > 30)
        throw UsageError("dpbs_x: degree outside 1..30");
    return (n - 1) * (30.0 / 29.0);
}

double ipbs_x(int n) {
    if (n < 1 || n > 30)
        throw UsageError("ipbs_x: degree outside 1..30");
    return -kPi + (n - 1) * (2.0 * kPi / 29.0);
}

double alpha_dpbs(int n, const std::array<double, 3>& theta) {
    const double x = dpbs_x(n);
    // Normalizer: sup over i = 1..100 of (i x^2 + (i+1) x + (i+2))/100.
    double sup = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 100; ++i) {
        const double f = (i * x * x + (i + 1) * x + (i + 2)) / 100.0;
        sup = std::max(sup, f);
    }
    return (theta[0] * x * x + theta[1] * x + theta[2]) / sup;
}

double alpha_ipbs(int n, const std::array<double, 2>& upsilon) {
    const double x = ipbs_x(n);
    return 1.0 - 1.0 / (9.0 * std::exp(upsilon[0] + upsilon[1] * x));
}

LrdExponentFamily LrdExponentFamily::dpbs(int M, const std::array<double, 3>& theta) {
    LrdExponentFamily fam;
    fam.kind = ExponentKind::dpbs;
    fam.theta.assign(theta.begin(), theta.end());
    fam.values.resize(M);
    for (int n = 1; n <= M; ++n)
        fam.values[n - 1] = alpha_dpbs(n, theta);
    fam.validate();
    return fam;
}

LrdExponentFamily LrdExponentFamily::ipbs(int M, const std::array<double, 2>& upsilon) {
    LrdExponentFamily fam;
    fam.kind = ExponentKind::ipbs;
    fam.theta.assign(upsilon.begin(), upsilon.end());
    fam.values.resize(M);
    for (int n = 1; n <= M; ++n)
        fam.values[n - 1] = alpha_ipbs(n, upsilon);
    fam.validate();
    return fam;
}

LrdExponentFamily LrdExponentFamily::custom(std::vector<double> values) {
    LrdExponentFamily fam;
    fam.kind = ExponentKind::custom;
    fam.values = std::move(values);
    fam.validate();
    return fam;
}

double LrdExponentFamily::alpha(int n) const {
    if (n < 1 || n > static_cast<int>(values.size()))
        throw UsageError("LrdExponentFamily: degree out of range");
    return values[n - 1];
}

void LrdExponentFamily::validate() const {
    for (double a : values) {
        if (!(a >= 0.0 && a < 1.0))
            throw NumericError("LRD exponent outside [0,1)");
        if ((kind == ExponentKind::dpbs || kind == ExponentKind::ipbs) && a == 0.0)
            throw NumericError("LRD exponent must be positive");
    }
    if (kind == ExponentKind::dpbs) {
        for (size_t i = 1; i < values.size(); ++i)
            if (!(values[i] < values[i - 1]))
                throw NumericError("DPBS exponents must be strictly decreasing");
    } else if (kind == ExponentKind::ipbs) {
        for (size_t i = 1; i < values.size(); ++i)
            if (!(values[i] > values[i - 1]))
                throw NumericError("IPBS exponents must be strictly increasing");
    }
}

std::vector<double> frac_int_coeffs(double dexp, int L) {
    if (!(dexp > 0.0 && dexp < 1.0))
        throw NumericError("frac_int_coeffs: exponent must lie in (0,1)");
    if (L < 1)
        throw UsageError("frac_int_coeffs: truncation length must be >= 1");
    std::vector<double> psi(L + 1);
    psi[0] = 1.0;
    for (int k = 1; k <= L; ++k)
        psi[k] = psi[k - 1] * (k - 1 + dexp) / k;
    return psi;
}

std::vector<double> fractional_noise_autocov(double d, int nlags) {
    if (!(d >= 0.0 && d < 0.5))
        throw NumericError("fractional_noise_autocov: d must lie in [0, 0.5)");
    std::vector<double> g(nlags, 0.0);
    if (nlags == 0) return g;
    if (d == 0.0) {
        g[0] = 1.0;
        return g;
    }
    g[0] = std::exp(std::lgamma(1.0 - 2.0 * d) - 2.0 * std::lgamma(1.0 - d));
    for (int t = 1; t < nlags; ++t)
        g[t] = g[t - 1] * (t - 1 + d) / (t - d);
    return g;
}

SpharmaSpec SpharmaSpec::paper_sim(ExponentKind scenario) {
    SpharmaSpec spec;
    spec.n_min = 1;
    spec.M = 30;
    spec.sigma2.resize(30);
    spec.phi.resize(30);
    spec.psi.resize(30);
    spec.deltas.resize(30);
    for (int n = 1; n <= 30; ++n) {
        spec.sigma2[n - 1] = std::pow(n + 1.0, -1.5);
        spec.phi[n - 1] = std::pow(0.7 * (n + 1.0 / n), -1.5);
        spec.psi[n - 1] = 0.4 * std::pow(n + 1.0 / n, -1.5);
        spec.deltas[n - 1] = 2 * n + 1;
    }
    switch (scenario) {
    case ExponentKind::dpbs:
        spec.exponents = LrdExponentFamily::dpbs(30, {0.75, 0.76, 0.77});
        break;
    case ExponentKind::ipbs:
        spec.exponents = LrdExponentFamily::ipbs(30, {1.0, 1.0});
        break;
    case ExponentKind::custom:
        throw UsageError("paper_sim: scenario must be dpbs or ipbs");
    }
    spec.validate();
    return spec;
}

int SpharmaSpec::idx(int n) const {
    if (n < n_min || n > M)
        throw UsageError("SpharmaSpec: degree out of range");
    return n - n_min;
}

double SpharmaSpec::alpha_at(int n) const {
    // exponent table is indexed by position within the spec's degree range
    return exponents.alpha(idx(n) + 1);
}

int SpharmaSpec::coeff_count() const {
    int c = 0;
    for (int d : deltas) c += d;
    return c;
}

void SpharmaSpec::validate() const {
    const size_t nd = static_cast<size_t>(ndeg());
    if (n_min < 0 || M < n_min)
        throw UsageError("SpharmaSpec: invalid degree range");
    if (sigma2.size() != nd || phi.size() != nd || psi.size() != nd || deltas.size() != nd)
        throw UsageError("SpharmaSpec: sequence lengths do not match degree range");
    if (exponents.values.size() != nd)
        throw UsageError("SpharmaSpec: exponent table length does not match degree range");
    for (size_t i = 0; i < nd; ++i) {
        if (!(sigma2[i] > 0.0))
            throw NumericError("SpharmaSpec: innovation variances must be positive");
        if (!(std::abs(phi[i]) < 1.0))
            throw NumericError("SpharmaSpec: AR eigenvalue breaks stability (|phi| >= 1)");
        if (deltas[i] < 1)
            throw UsageError("SpharmaSpec: eigenspace dimensions must be >= 1");
    }
    exponents.validate();
}

CoefficientSample CoefficientSample::zeros(const SpharmaSpec& spec, int N) {
    spec.validate();
    if (N < 1)
        throw UsageError("CoefficientSample: N must be positive");
    CoefficientSample s;
    s.spec = spec;
    s.N = N;
    s.offsets.resize(spec.ndeg());
    int c = 0;
    for (int i = 0; i < spec.ndeg(); ++i) {
        s.offsets[i] = c;
        c += spec.deltas[i];
    }
    s.C = c;
    s.data.assign(static_cast<size_t>(N) * c, 0.0);
    return s;
}

double& CoefficientSample::at(int t, int n, int j) {
    const int i = spec.idx(n);
    return data[static_cast<size_t>(t - 1) * C + offsets[i] + (j - 1)];
}

double CoefficientSample::at(int t, int n, int j) const {
    const int i = spec.idx(n);
    return data[static_cast<size_t>(t - 1) * C + offsets[i] + (j - 1)];
}

void CoefficientSample::copy_series(int n, int j, std::vector<double>& out) const {
    const int i = spec.idx(n);
    const size_t col = static_cast<size_t>(offsets[i]) + (j - 1);
    out.resize(N);
    for (int t = 0; t < N; ++t)
        out[t] = data[static_cast<size_t>(t) * C + col];
}

CoefficientSample simulate(const SpharmaSpec& spec, int N, int burn_in,
                           std::uint64_t seed, int filter_len) {
    spec.validate();
    if (N < 2)
        throw UsageError("simulate: N must be >= 2");
    if (burn_in < 0)
        throw UsageError("simulate: burn_in must be >= 0");
    const int L = filter_len > 0 ? filter_len : std::max(2000, 4 * N);

    CoefficientSample sample = CoefficientSample::zeros(spec, N);
    sample.seed = seed;

    std::vector<double> w, v;
    for (int n = spec.n_min; n <= spec.M; ++n) {
        const double phi = spec.phi_at(n);
        const double psi = spec.psi_at(n);
        const double alpha = spec.alpha_at(n);
        const double sd = std::sqrt(spec.sigma2_at(n) / spec.delta_at(n));
        const bool fractional = alpha > 0.0;
        const int keep = fractional ? L + N : N;

        std::unique_ptr<RealConvolver> conv;
        if (fractional)
            conv = std::make_unique<RealConvolver>(frac_int_coeffs(alpha / 2.0, L), keep);

        for (int j = 1; j <= spec.delta_at(n); ++j) {
            NormalStream rng(mix_seed({seed, static_cast<std::uint64_t>(n),
                                       static_cast<std::uint64_t>(j)}));
            w.assign(keep, 0.0);
            double wprev = 0.0, eprev = 0.0;
            for (int t = -burn_in; t < keep; ++t) {
                const double e = sd * rng.next();
                const double wt = phi * wprev + e + psi * eprev;
                wprev = wt;
                eprev = e;
                if (t >= 0) w[t] = wt;
            }
            if (fractional) {
                v.resize(N);
                conv->apply(w.data(), keep, v.data(), L, N);
            } else {
                v = w;
            }
            for (int t = 1; t <= N; ++t)
                sample.at(t, n, j) = v[t - 1];
        }
    }
    return sample;
}

double arma_spectral_factor(int n, const SpharmaSpec& spec, double omega) {
    const double phi = spec.phi_at(n);
    const double psi = spec.psi_at(n);
    const double c = std::cos(omega);
    const double num = 1.0 + 2.0 * psi * c + psi * psi;
    const double den = 1.0 - 2.0 * phi * c + phi * phi;
    return num / den / (2.0 * kPi);
}

double spectral_density_alpha(int n, const SpharmaSpec& spec, double alpha_n,
                              double omega) {
    if (omega == 0.0)
        throw NumericError("spectral_density: pole at omega = 0");
    if (std::abs(omega) > kPi + 1e-12)
        throw UsageError("spectral_density: omega outside [-pi, pi]");
    const double s2 = 4.0 * std::pow(std::sin(omega / 2.0), 2);
    return spec.sigma2_at(n) * arma_spectral_factor(n, spec, omega) *
           std::pow(s2, -alpha_n / 2.0);
}

double spectral_density(int n, const SpharmaSpec& spec, double omega) {
    return spectral_density_alpha(n, spec, spec.alpha_at(n), omega);
}

namespace {

// Shared per-resolution tables for the inversion quadrature: midpoint grid
// omega_k = -pi + (k+1/2) 2pi/K, its cosines and log(2|sin(omega/2)|).
struct MidpointTables {
    std::vector<double> cosw;
    std::vector<double> log2sin;
};

const MidpointTables& midpoint_tables(int K) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<MidpointTables>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(K);
    if (it != cache.end()) return *it->second;
    auto tab = std::make_unique<MidpointTables>();
    tab->cosw.resize(K);
    tab->log2sin.resize(K);
    for (int k = 0; k < K; ++k) {
        const double w = -kPi + (k + 0.5) * (2.0 * kPi / K);
        tab->cosw[k] = std::cos(w);
        tab->log2sin[k] = std::log(2.0 * std::abs(std::sin(w / 2.0)));
    }
    const MidpointTables& ref = *tab;
    cache.emplace(K, std::move(tab));
    return ref;
}

// Remainder R(t) = (1/2pi) Int (Mt(w) - Mt(0)) (2|sin(w/2)|)^{-alpha} e^{iwt} dw
// over the K-point midpoint grid, for t = 0..nlags-1.
std::vector<double> covariance_remainder(double phi, double psi, double alpha,
                                         int nlags, int K) {
    const MidpointTables& tab = midpoint_tables(K);
    const double m0 = (1.0 + psi) * (1.0 + psi) / ((1.0 - phi) * (1.0 - phi));
    std::vector<std::complex<double>> g(K);
    for (int k = 0; k < K; ++k) {
        const double c = tab.cosw[k];
        const double mt = (1.0 + 2.0 * psi * c + psi * psi) /
                          (1.0 - 2.0 * phi * c + phi * phi);
        const double pole = alpha == 0.0 ? 1.0 : std::exp(-alpha * tab.log2sin[k]);
        g[k] = (mt - m0) * pole;
    }
    // e^{i w_k t} = (-1)^t e^{i pi t / K} e^{2 pi i k t / K}: one inverse DFT
    // yields all lags.
    std::vector<std::complex<double>> G = fft::complex_dft(g, /*inverse=*/true);
    std::vector<double> r(nlags);
    for (int t = 0; t < nlags; ++t) {
        const std::complex<double> phase =
            std::polar(1.0, kPi * t / K) * ((t & 1) ? -1.0 : 1.0);
        r[t] = (phase * G[t]).real() / K;
    }
    return r;
}

} // namespace

std::vector<double> covariance_from_alpha(int n, const SpharmaSpec& spec,
                                          double alpha_n, int nlags) {
    if (nlags < 1)
        throw UsageError("covariance: nlags must be >= 1");
    if (!(alpha_n >= 0.0 && alpha_n < 1.0))
        throw NumericError("covariance: exponent outside [0,1)");
    const double phi = spec.phi_at(n);
    const double psi = spec.psi_at(n);
    const double s2 = spec.sigma2_at(n);
    const double m0 = (1.0 + psi) * (1.0 + psi) / ((1.0 - phi) * (1.0 - phi));

    const std::vector<double> fi = fractional_noise_autocov(alpha_n / 2.0, nlags);

    const int K = 1 << 16;
    std::vector<double> coarse = covariance_remainder(phi, psi, alpha_n, nlags, K);
    std::vector<double> fine = covariance_remainder(phi, psi, alpha_n, nlags, 2 * K);

    std::vector<double> b(nlags);
    double scale = 0.0, diff = 0.0;
    for (int t = 0; t < nlags; ++t) {
        b[t] = s2 * (m0 * fi[t] + fine[t]);
        const double bc = s2 * (m0 * fi[t] + coarse[t]);
        diff = std::max(diff, std::abs(b[t] - bc));
        scale = std::max(scale, std::abs(b[t]));
    }
    if (!(diff <= 1e-6 * std::max(scale, 1e-300)))
        throw NumericError("covariance: quadrature refinement did not converge");
    return b;
}

std::vector<double> covariance_bn(int n, const SpharmaSpec& spec, int nlags) {
    return covariance_from_alpha(n, spec, spec.alpha_at(n), nlags);
}

double trace_surrogate(const SpharmaSpec& spec) {
    double acc = 0.0;
    for (int n = spec.n_min; n <= spec.M; ++n)
        acc += covariance_bn(n, spec, 1)[0] * spec.delta_at(n);
    return acc;
}

PerDegreeSpectrum sample_spectrum(int n, const SpharmaSpec& spec, int npoints) {
    if (npoints < 2 || npoints % 2 != 0)
        throw UsageError("sample_spectrum: npoints must be even and >= 2");
    PerDegreeSpectrum s;
    s.n = n;
    s.omega.resize(npoints);
    s.values.resize(npoints);
    for (int k = 0; k < npoints; ++k) {
        const double w = -kPi + (k + 0.5) * (2.0 * kPi / npoints);
        s.omega[k] = w;
        s.values[k] = spectral_density(n, spec, w);
    }
    return s;
}

} // namespace mfreg
