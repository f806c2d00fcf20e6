#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace tauforge::detail {

namespace {

std::mutex plan_mutex;
std::map<std::pair<int, int>, fftw_plan> plans;

// Plans are built once per (M, sign) on scratch buffers and then executed on
// caller memory through the new-array interface, which is thread safe.
fftw_plan plan_for(int M, int sign) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_pair(M, sign);
  auto it = plans.find(key);
  if (it != plans.end()) return it->second;
  std::vector<fftw_complex> scratch(static_cast<size_t>(M));
  fftw_plan p = fftw_plan_dft_1d(M, scratch.data(), scratch.data(),
                                 sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans.emplace(key, p);
  return p;
}

}  // namespace

void dft_inplace(std::complex<double>* data, int M, int sign) {
  fftw_plan p = plan_for(M, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, buf, buf);
}

}  // namespace tauforge::detail
