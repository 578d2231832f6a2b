#ifndef MFREG_LRD_HPP
#define MFREG_LRD_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mfreg {

/// Families of long-range-dependence exponent sequences alpha(n, theta),
/// the eigenvalues of the LRD operator across Laplace-Beltrami degrees.
enum class ExponentKind { dpbs, ipbs, custom };

const char* exponent_kind_name(ExponentKind kind);
ExponentKind exponent_kind_from_name(const std::string& name);

/// Abscissa grids for degrees n = 1..30: DPBS runs 0..30 in steps of 30/29,
/// IPBS runs -pi..pi in steps of 2*pi/29.
double dpbs_x(int n);
double ipbs_x(int n);

/// Decreasing bounded exponent sequence. theta = (theta1, theta2, theta3);
/// the normalizer is the sup over i = 1..100 of
/// (i x^2 + (i+1) x + (i+2))/100, recomputed per degree.
double alpha_dpbs(int n, const std::array<double, 3>& theta);

/// Increasing bounded exponent sequence 1 - 1/(9 exp(u1 + u2 x_n)).
double alpha_ipbs(int n, const std::array<double, 2>& upsilon);

struct LrdExponentFamily {
    ExponentKind kind = ExponentKind::custom;
    std::vector<double> theta;  // dpbs: 3 entries, ipbs: 2, custom: unused
    std::vector<double> values; // alpha(n) for n = 1..values.size()

    static LrdExponentFamily dpbs(int M, const std::array<double, 3>& theta);
    static LrdExponentFamily ipbs(int M, const std::array<double, 2>& upsilon);
    static LrdExponentFamily custom(std::vector<double> values);

    double alpha(int n) const; // n is 1-based
    /// Range and (for dpbs/ipbs) strict monotonicity checks.
    void validate() const;
};

/// MA(infinity) coefficients of (1-z)^{-dexp}: psi_0 = 1,
/// psi_k = psi_{k-1} (k-1+dexp)/k, returned for k = 0..L.
std::vector<double> frac_int_coeffs(double dexp, int L);

/// Exact autocovariance of fractional noise with spectral density
/// (1/2pi) (2 sin(omega/2))^{-2d}, unit innovation variance:
/// gamma(0) = Gamma(1-2d)/Gamma(1-d)^2, gamma(t+1) = gamma(t)(t+d)/(t+1-d).
std::vector<double> fractional_noise_autocov(double d, int nlags);

/// Per-degree specification of the multifractionally integrated SPHARMA(1,1)
/// error process. Degrees run n_min..M; all sequences are indexed by degree.
/// `deltas` holds the eigenspace dimensions (2n+1 on the sphere; a single
/// degree of dimension 1 realizes a scalar FARIMA series).
struct SpharmaSpec {
    int n_min = 1;
    int M = 30;
    std::vector<double> sigma2; // innovation variance per degree, > 0
    std::vector<double> phi;    // AR eigenvalues, |phi| < 1
    std::vector<double> psi;    // MA eigenvalues
    std::vector<int> deltas;    // eigenspace dimensions, >= 1
    LrdExponentFamily exponents;

    /// Section-5 parameter block: M=30, sigma2_n = (n+1)^{-3/2},
    /// phi_n = [0.7(n + 1/n)]^{-3/2}, psi_n = 0.4 (n + 1/n)^{-3/2},
    /// deltas = 2n+1, exponents DPBS(0.75,0.76,0.77) or IPBS(1,1).
    static SpharmaSpec paper_sim(ExponentKind scenario);

    int ndeg() const { return M - n_min + 1; }
    int idx(int n) const;         // degree -> 0-based index, range-checked
    double sigma2_at(int n) const { return sigma2[idx(n)]; }
    double phi_at(int n) const { return phi[idx(n)]; }
    double psi_at(int n) const { return psi[idx(n)]; }
    double alpha_at(int n) const;
    int delta_at(int n) const { return deltas[idx(n)]; }
    int coeff_count() const;

    void validate() const;
};

/// Harmonic coefficient paths V_{n,j}(t) (or responses Y_{n,j}(t)) over time.
/// Storage is row-major (t, n, j) with t fastest-moving along rows, matching
/// the binary file layout.
struct CoefficientSample {
    SpharmaSpec spec;           // generating spec (degree layout + meta)
    int N = 0;                  // time points, t = 1..N
    std::uint64_t seed = 0;     // RNG provenance; 0 when synthetic
    std::vector<int> offsets;   // per-degree coefficient offsets
    int C = 0;                  // coefficients per time point
    std::vector<double> data;   // size N*C

    static CoefficientSample zeros(const SpharmaSpec& spec, int N);

    double& at(int t, int n, int j);           // t,j are 1-based
    double at(int t, int n, int j) const;
    void copy_series(int n, int j, std::vector<double>& out) const;
};

/// Simulates the multifractionally integrated SPHARMA(1,1) process: for each
/// (n,j) independently, Gaussian innovations of variance sigma2_n/delta_n
/// drive an ARMA(1,1) recursion, then the truncated fractional-integration
/// filter with exponent alpha(n)/2 is applied. Deterministic in
/// (spec, N, seed); substreams are keyed by (seed, n, j). filter_len = 0
/// selects the default max(2000, 4N).
CoefficientSample simulate(const SpharmaSpec& spec, int N, int burn_in,
                           std::uint64_t seed, int filter_len = 0);

/// Squared ARMA(1,1) transfer modulus |1+psi e^{-iw}|^2 / |1-phi e^{-iw}|^2,
/// normalized by 1/(2*pi). This is the short-range-dependence spectral factor
/// M_n(omega).
double arma_spectral_factor(int n, const SpharmaSpec& spec, double omega);

/// Semiparametric per-degree spectral density
/// f_n(w) = sigma2_n M_n(w) [4 sin^2(w/2)]^{-alpha(n)/2}.
/// Throws NumericError at the w = 0 pole.
double spectral_density(int n, const SpharmaSpec& spec, double omega);

/// Same family evaluated at an explicit exponent (used by the plug-in path).
double spectral_density_alpha(int n, const SpharmaSpec& spec, double alpha_n,
                              double omega);

/// Autocovariance B_n(t), t = 0..nlags-1, from Fourier inversion of the
/// spectral density. The integrable pole is handled by subtracting the exact
/// fractional-noise part; the smooth remainder is integrated on a symmetric
/// 2^16 midpoint grid excluding 0, with a refinement check (relative change
/// must fall below 1e-6 or NumericError is thrown).
std::vector<double> covariance_bn(int n, const SpharmaSpec& spec, int nlags);

/// covariance_bn with the exponent replaced (plug-in path, theta-hat).
std::vector<double> covariance_from_alpha(int n, const SpharmaSpec& spec,
                                          double alpha_n, int nlags);

/// Truncated trace sum_{n} B_n(0) delta(n,2); reported in experiment
/// metadata.
double trace_surrogate(const SpharmaSpec& spec);

/// Spectral density sampled on a symmetric grid excluding 0.
struct PerDegreeSpectrum {
    int n = 0;
    std::vector<double> omega;
    std::vector<double> values;
};

PerDegreeSpectrum sample_spectrum(int n, const SpharmaSpec& spec, int npoints);

} // namespace mfreg

#endif
