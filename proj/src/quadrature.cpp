#include "qvar/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include <Eigen/Dense>

namespace qvar {

namespace {

QuadratureRule compute_gauss_legendre(int n) {
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < (n + 1) / 2; ++k) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(k)] = -x;
    rule.weights[static_cast<std::size_t>(k)] = w;
    rule.nodes[static_cast<std::size_t>(n - 1 - k)] = x;
    rule.weights[static_cast<std::size_t>(n - 1 - k)] = w;
  }
  return rule;
}

QuadratureRule compute_gauss_hermite(int n) {
  // Golub-Welsch on the Jacobi matrix of the (physicists') Hermite family.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = std::sqrt(k / 2.0);
    J(k - 1, k) = b;
    J(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success) throw std::runtime_error("gauss_hermite: eigen solve failed");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const double mu0 = std::sqrt(M_PI);
  for (int k = 0; k < n; ++k) {
    rule.nodes[static_cast<std::size_t>(k)] = es.eigenvalues()(k);
    double v = es.eigenvectors()(0, k);
    rule.weights[static_cast<std::size_t>(k)] = mu0 * v * v;
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  static std::map<int, QuadratureRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

const QuadratureRule& gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
  static std::map<int, QuadratureRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_hermite(n)).first;
  return it->second;
}

}  // namespace qvar
