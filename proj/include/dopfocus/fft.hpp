#pragma once

#include <span>

#include "dopfocus/types.hpp"

namespace dopfocus::fft {

// Thin wrappers over FFTW. Plans are cached per length; execution is
// thread-safe and may be called from OpenMP regions.

/// In-place unnormalized forward DFT: X[k] = sum_n x[n] e^{-j 2 pi k n / n_len}.
void forward(std::span<cplx> data);

/// In-place unnormalized inverse DFT: x[n] = sum_k X[k] e^{+j 2 pi k n / n_len}.
void inverse(std::span<cplx> data);

}  // namespace dopfocus::fft
