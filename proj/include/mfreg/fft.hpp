#ifndef MFREG_FFT_HPP
#define MFREG_FFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace mfreg {

// Thin deterministic wrappers around FFTW (plans are created with
// FFTW_ESTIMATE under a global mutex; execution is thread-safe).
namespace fft {

/// In-order complex DFT, out[k] = sum_t in[t] e^{-2*pi*i*k*t/n} (forward) or
/// the unnormalized inverse when `inverse` is true.
std::vector<std::complex<double>> complex_dft(const std::vector<std::complex<double>>& in,
                                              bool inverse);

/// Real-input forward DFT; returns the n/2+1 nonnegative-frequency bins.
std::vector<std::complex<double>> real_dft(const std::vector<double>& in);

} // namespace fft

/// Linear convolution with a fixed kernel, FFT-accelerated. The kernel
/// transform is computed once at construction; apply() can then run
/// concurrently from several threads.
class RealConvolver {
public:
    RealConvolver(std::vector<double> kernel, std::size_t max_signal_len);

    /// out[i] = sum_k kernel[k] * signal[first + i - k] for i = 0..out_len-1,
    /// where `first` indexes into the full convolution. signal is zero-padded
    /// outside its range.
    void apply(const double* signal, std::size_t nsig,
               double* out, std::size_t first, std::size_t out_len) const;

private:
    std::vector<double> kernel_;
    std::size_t fft_size_ = 0;
    std::vector<std::complex<double>> kernel_hat_;
};

} // namespace mfreg

#endif
