#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "qvar/estimator.hpp"
#include "qvar/models.hpp"

namespace qvar {

struct SimConfig {
  ModelSpec model;
  int n = 0;
  double delta = 0.0;                  // derived from alpha when alpha is set
  std::optional<double> alpha;         // delta = n^-alpha
  DriftSpec drift;
  std::uint64_t seed = 0;
  double jitter_rel = 1e-12;

  double effective_delta() const;
};

/// Covariance matrix of X at the given times. If the Cholesky factorization
/// fails, a diagonal jitter of jitter_rel * max diagonal is added, escalated
/// by factors of 10 over three decades; every applied jitter is appended to
/// `warnings`.
Eigen::MatrixXd covariance_matrix(const ModelSpec& model, const std::vector<double>& times,
                                  double jitter_rel = 1e-12,
                                  std::vector<std::string>* warnings = nullptr);

/// N exact Gaussian draws at times j*delta, j=1..n. Replicate i is seeded
/// from (seed, i) so any subset reproduces identically regardless of
/// batching or thread count.
std::vector<PathSample> sample_paths(const SimConfig& config, int N,
                                     std::vector<std::string>* warnings = nullptr, int threads = 1);

/// Standard normal draws from a counter-derived seed (Box-Muller over the
/// mt19937_64 stream); the simulation primitive and the test oracle share it.
std::vector<double> normal_vector(std::uint64_t seed, int count);

/// Test oracle for the Gaussian fourth-moment identity: returns
/// (Cov(X^2, Y^2) by Gauss-Hermite quadrature, 2 Cov(X,Y)^2) for a
/// centered bivariate normal with the given covariance.
std::pair<double, double> gaussian_pair_moment_check(const Eigen::Matrix2d& cov);

}  // namespace qvar
