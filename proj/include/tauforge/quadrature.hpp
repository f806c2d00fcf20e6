#pragma once

#include <functional>

#include "tauforge/loop.hpp"

namespace tauforge {

struct RombergResult {
  cplx value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;  // interior evaluations only
  bool converged = false;
};

// Trapezoid rule on [a, b] with repeated halving and Richardson extrapolation,
// until two successive diagonal entries differ by at most tol. fa and fb are
// the endpoint values, which callers usually already have.
RombergResult romberg(const std::function<cplx(double)>& f, double a, double b, cplx fa, cplx fb,
                      double tol, int max_levels = 10);

}  // namespace tauforge
