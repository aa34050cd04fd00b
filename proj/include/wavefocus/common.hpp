// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace wavefocus {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kFourPi = 4.0 * kPi;

// A linear solve stopped before reaching the requested tolerance.  The
// achieved residual is carried so callers can report it instead of guessing.
class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, double achieved, int iters)
      : std::runtime_error(what), achieved_residual(achieved), iterations(iters) {}

  double achieved_residual;
  int iterations;
};

// Malformed or inconsistent input file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wavefocus
