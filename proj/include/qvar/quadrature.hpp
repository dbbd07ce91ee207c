#pragma once

#include <vector>

namespace qvar {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1].
const QuadratureRule& gauss_legendre(int n);

/// Gauss-Hermite rule for weight exp(-x^2) on (-inf, inf).
const QuadratureRule& gauss_hermite(int n);

}  // namespace qvar
