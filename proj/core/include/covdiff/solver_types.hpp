// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace covdiff {

struct StopRule {
  int max_iterations = 1000;
  double tol = 1e-6;
  // Fixed-budget mode: run exactly max_iterations and ignore tol.
  bool fixed = false;

  static StopRule iterations(int p) { return {p, 0.0, true}; }
  static StopRule tolerance(double tol, int max_iterations) { return {max_iterations, tol, false}; }
};

struct SolveTrace {
  // Relative residuals; residuals[0] == 1 for the zero initial guess.
  std::vector<double> residuals;
  int iterations = 0;
  bool converged = false;

  double final_residual() const { return residuals.empty() ? 0.0 : residuals.back(); }
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BreakdownError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Applies the identity in place of a preconditioner.
struct IdentityPrecond {
  template <class Vec>
  void operator()(const Vec& r, Vec& z) const {
    z = r;
  }
};

namespace detail {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

template <class S>
S scalar_from(std::complex<double> v) {
  if constexpr (is_complex<S>::value) {
    return S(v);
  } else {
    if (v.imag() != 0.0) throw std::invalid_argument("complex coefficient for a real iteration");
    return static_cast<S>(v.real());
  }
}

}  // namespace detail

}  // namespace covdiff
