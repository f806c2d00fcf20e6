#pragma once

#include <stdexcept>
#include <string>

namespace tauforge {

struct TailMassError : std::runtime_error {
  double tail;
  TailMassError(const std::string& what, double tail_mass)
      : std::runtime_error(what), tail(tail_mass) {}
};

struct SingularLoopError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Loop is outside the big cell, or the solve was too ill-conditioned to trust.
struct BigCellError : std::runtime_error {
  double condition;
  double residual;
  BigCellError(const std::string& what, double cond, double res)
      : std::runtime_error(what), condition(cond), residual(res) {}
};

struct DegenerateFrameError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PathCrossesBadCellError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An internal numerical assertion failed (e.g. a Hamiltonian came out complex).
struct NumericalCheckError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tauforge
