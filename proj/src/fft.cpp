#include "mfreg/fft.hpp"
#include "mfreg/errors.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>

namespace mfreg {

namespace {

// FFTW's planner is not thread-safe; plans are cached per (size, kind) and
// executed through the new-array interface on fftw_malloc'd buffers so the
// alignment assumption of the cached plan always holds.
std::mutex g_planner_mutex;

enum class Kind { c2c_fwd, c2c_bwd, r2c, c2r };

fftw_plan get_plan(std::size_t n, Kind kind) {
    static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(g_planner_mutex);
    auto key = std::make_pair(n, static_cast<int>(kind));
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    fftw_plan plan = nullptr;
    switch (kind) {
    case Kind::c2c_fwd:
    case Kind::c2c_bwd: {
        fftw_complex* buf = fftw_alloc_complex(n);
        plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf,
                                kind == Kind::c2c_fwd ? FFTW_FORWARD : FFTW_BACKWARD,
                                FFTW_ESTIMATE);
        fftw_free(buf);
        break;
    }
    case Kind::r2c: {
        double* in = fftw_alloc_real(n);
        fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
        fftw_free(in);
        fftw_free(out);
        break;
    }
    case Kind::c2r: {
        fftw_complex* in = fftw_alloc_complex(n / 2 + 1);
        double* out = fftw_alloc_real(n);
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
        fftw_free(in);
        fftw_free(out);
        break;
    }
    }
    if (!plan) throw NumericError("fft: plan creation failed");
    cache.emplace(key, plan);
    return plan;
}

struct ComplexBuf {
    fftw_complex* p;
    explicit ComplexBuf(std::size_t n) : p(fftw_alloc_complex(n)) {}
    ~ComplexBuf() { fftw_free(p); }
    ComplexBuf(const ComplexBuf&) = delete;
    ComplexBuf& operator=(const ComplexBuf&) = delete;
};

struct RealBuf {
    double* p;
    explicit RealBuf(std::size_t n) : p(fftw_alloc_real(n)) {}
    ~RealBuf() { fftw_free(p); }
    RealBuf(const RealBuf&) = delete;
    RealBuf& operator=(const RealBuf&) = delete;
};

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

} // namespace

namespace fft {

std::vector<std::complex<double>> complex_dft(const std::vector<std::complex<double>>& in,
                                              bool inverse) {
    const std::size_t n = in.size();
    if (n == 0) return {};
    fftw_plan plan = get_plan(n, inverse ? Kind::c2c_bwd : Kind::c2c_fwd);
    ComplexBuf buf(n);
    std::memcpy(buf.p, in.data(), n * sizeof(fftw_complex));
    fftw_execute_dft(plan, buf.p, buf.p);
    std::vector<std::complex<double>> out(n);
    std::memcpy(static_cast<void*>(out.data()), buf.p, n * sizeof(fftw_complex));
    return out;
}

std::vector<std::complex<double>> real_dft(const std::vector<double>& in) {
    const std::size_t n = in.size();
    if (n == 0) return {};
    fftw_plan plan = get_plan(n, Kind::r2c);
    RealBuf rin(n);
    ComplexBuf cout(n / 2 + 1);
    std::memcpy(rin.p, in.data(), n * sizeof(double));
    fftw_execute_dft_r2c(plan, rin.p, cout.p);
    std::vector<std::complex<double>> out(n / 2 + 1);
    std::memcpy(static_cast<void*>(out.data()), cout.p, (n / 2 + 1) * sizeof(fftw_complex));
    return out;
}

} // namespace fft

RealConvolver::RealConvolver(std::vector<double> kernel, std::size_t max_signal_len)
    : kernel_(std::move(kernel)) {
    if (kernel_.empty())
        throw UsageError("RealConvolver: empty kernel");
    fft_size_ = next_pow2(max_signal_len + kernel_.size() - 1);

    fftw_plan plan = get_plan(fft_size_, Kind::r2c);
    RealBuf in(fft_size_);
    ComplexBuf out(fft_size_ / 2 + 1);
    std::memset(in.p, 0, fft_size_ * sizeof(double));
    std::memcpy(in.p, kernel_.data(), kernel_.size() * sizeof(double));
    fftw_execute_dft_r2c(plan, in.p, out.p);
    kernel_hat_.resize(fft_size_ / 2 + 1);
    std::memcpy(static_cast<void*>(kernel_hat_.data()), out.p, kernel_hat_.size() * sizeof(fftw_complex));
}

void RealConvolver::apply(const double* signal, std::size_t nsig,
                          double* out, std::size_t first, std::size_t out_len) const {
    if (nsig + kernel_.size() - 1 > fft_size_)
        throw UsageError("RealConvolver: signal longer than planned maximum");
    if (first + out_len > nsig + kernel_.size() - 1)
        throw UsageError("RealConvolver: output range outside convolution support");

    // Short kernels are cheaper directly.
    if (kernel_.size() <= 32) {
        for (std::size_t i = 0; i < out_len; ++i) {
            const std::size_t t = first + i;
            double acc = 0.0;
            const std::size_t kmax = std::min(kernel_.size() - 1, t);
            const std::size_t kmin = t >= nsig ? t - nsig + 1 : 0;
            for (std::size_t k = kmin; k <= kmax; ++k)
                acc += kernel_[k] * signal[t - k];
            out[i] = acc;
        }
        return;
    }

    fftw_plan fwd = get_plan(fft_size_, Kind::r2c);
    fftw_plan bwd = get_plan(fft_size_, Kind::c2r);
    RealBuf rbuf(fft_size_);
    ComplexBuf cbuf(fft_size_ / 2 + 1);
    std::memset(rbuf.p, 0, fft_size_ * sizeof(double));
    std::memcpy(rbuf.p, signal, nsig * sizeof(double));
    fftw_execute_dft_r2c(fwd, rbuf.p, cbuf.p);

    auto* spec = reinterpret_cast<std::complex<double>*>(cbuf.p);
    for (std::size_t k = 0; k < kernel_hat_.size(); ++k)
        spec[k] *= kernel_hat_[k];
    fftw_execute_dft_c2r(bwd, cbuf.p, rbuf.p);

    const double scale = 1.0 / static_cast<double>(fft_size_);
    for (std::size_t i = 0; i < out_len; ++i)
        out[i] = rbuf.p[first + i] * scale;
}

} // namespace mfreg
