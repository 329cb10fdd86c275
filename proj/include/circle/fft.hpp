#pragma once

#include <complex>
#include <span>

namespace circle::fft {

using cd = std::complex<double>;

/// out[j] = sum_k in[k] exp(-2 pi i j k / n), unnormalized.
void forward(std::span<const cd> in, std::span<cd> out);

/// out[j] = sum_k in[k] exp(+2 pi i j k / n), unnormalized.
void backward(std::span<const cd> in, std::span<cd> out);

}  // namespace circle::fft
