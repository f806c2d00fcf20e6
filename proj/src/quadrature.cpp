#include "tauforge/quadrature.hpp"

#include <cmath>
#include <vector>

namespace tauforge {

RombergResult romberg(const std::function<cplx(double)>& f, double a, double b, cplx fa, cplx fb,
                      double tol, int max_levels) {
  RombergResult out;
  std::vector<cplx> prev{0.5 * (b - a) * (fa + fb)}, cur;
  cplx trap = prev[0];
  for (int k = 1; k <= max_levels; ++k) {
    const int n_new = 1 << (k - 1);
    const double h = (b - a) / static_cast<double>(n_new);
    cplx sum = 0.0;
    for (int i = 0; i < n_new; ++i) sum += f(a + (i + 0.5) * h);
    out.evaluations += n_new;
    trap = 0.5 * trap + 0.5 * h * sum;
    cur.assign(k + 1, 0.0);
    cur[0] = trap;
    double p4 = 1.0;
    for (int m = 1; m <= k; ++m) {
      p4 *= 4.0;
      cur[m] = cur[m - 1] + (cur[m - 1] - prev[m - 1]) / (p4 - 1.0);
    }
    out.error_estimate = std::abs(cur[k] - prev[k - 1]);
    out.value = cur[k];
    if (k >= 2 && out.error_estimate <= tol) {
      out.converged = true;
      return out;
    }
    prev.swap(cur);
  }
  return out;
}

}  // namespace tauforge
