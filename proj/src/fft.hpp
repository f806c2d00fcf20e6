#pragma once

#include <complex>

namespace tauforge::detail {

// In-place length-M DFT. sign = +1 computes sum_k c_k e^{+2 pi i jk/M}
// (coefficients to samples), sign = -1 the forward transform without 1/M.
void dft_inplace(std::complex<double>* data, int M, int sign);

}  // namespace tauforge::detail
