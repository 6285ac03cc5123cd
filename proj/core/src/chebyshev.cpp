// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#include "covdiff/chebyshev.hpp"

#include <stdexcept>

namespace covdiff {

LinearPolynomial optimal_linear_polynomial(std::complex<double> xi_n, std::complex<double> xi_1) {
  if (xi_n.real() == xi_1.real())
    throw std::invalid_argument("segment endpoints must have distinct real parts");
  const double a1 = std::abs(xi_1);
  const double an = std::abs(xi_n);
  if (a1 == 0.0 || an == 0.0) throw std::invalid_argument("segment endpoint at the origin");
  const std::complex<double> coef = -(a1 / xi_1 + an / xi_n) / (a1 + an);
  return {coef, std::abs(xi_1 - xi_n) / (a1 + an)};
}

double chebyshev_linear_max_modulus(std::complex<double> xi_n, std::complex<double> xi_1) {
  const std::complex<double> s = xi_1 + xi_n;
  if (std::abs(s) == 0.0) throw std::invalid_argument("segment centred at the origin");
  return std::abs(xi_1 - xi_n) / std::abs(s);
}

std::complex<double> chebyshev_t(int p, std::complex<double> z) {
  if (p < 0) throw std::invalid_argument("negative Chebyshev degree");
  if (p == 0) return 1.0;
  std::complex<double> t0 = 1.0, t1 = z;
  for (int k = 1; k < p; ++k) {
    const std::complex<double> t2 = 2.0 * z * t1 - t0;
    t0 = t1;
    t1 = t2;
  }
  return t1;
}

}  // namespace covdiff
