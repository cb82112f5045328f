#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fracham::fft {

/// |X_k|^2 for k = 0..P/2 of the real DFT of x zero-padded to length P.
std::vector<double> power_spectrum(std::span<const double> x, std::size_t padded_length);

/// y_i = sum_{k=0}^{i} col[k] x[i-k]   (lower-triangular Toeplitz, O(n log n)).
std::vector<double> lower_toeplitz_apply(std::span<const double> col, std::span<const double> x);

/// y_i = sum_{k=0}^{n-1-i} col[k] x[i+k]   (transpose of the above).
std::vector<double> upper_toeplitz_apply(std::span<const double> col, std::span<const double> x);

} // namespace fracham::fft
