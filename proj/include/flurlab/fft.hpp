#pragma once

#include <complex>
#include <vector>

namespace flurlab {

// In-place radix-2 transform; size must be a power of two.
void fft(std::vector<std::complex<double>>& a, bool inverse);

std::size_t next_pow2(std::size_t n);

// Linear convolution of two real sequences (frequency domain for long inputs,
// direct below 1024 output taps).
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b);

// Correlation c(h) = sum_k a[k] * a[k+h], h = 0..max_lag, via one padded FFT.
std::vector<double> autocorrelation(const std::vector<double>& a, std::size_t max_lag);

}  // namespace flurlab
