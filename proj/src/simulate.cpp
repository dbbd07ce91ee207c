#include "qvar/simulate.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "qvar/quadrature.hpp"
#include "qvar/util.hpp"

namespace qvar {

double SimConfig::effective_delta() const {
  if (alpha) {
    if (!(*alpha > 0 && *alpha <= 1)) throw std::invalid_argument("SimConfig: alpha must lie in (0,1]");
    return std::pow(static_cast<double>(n), -*alpha);
  }
  if (!(delta > 0)) throw std::invalid_argument("SimConfig: delta must be > 0");
  return delta;
}

namespace {

// Cholesky with escalating diagonal jitter. Returns the lower factor.
Eigen::MatrixXd chol_with_jitter(Eigen::MatrixXd K, double jitter_rel,
                                 std::vector<std::string>* warnings) {
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  const double scale = K.diagonal().maxCoeff();
  double rel = jitter_rel;
  for (int attempt = 0; attempt < 4; ++attempt, rel *= 10.0) {
    if (rel > 1e-9 * 1.0000001) break;
    Eigen::MatrixXd jittered = K + rel * scale * Eigen::MatrixXd::Identity(K.rows(), K.cols());
    llt.compute(jittered);
    if (llt.info() == Eigen::Success) {
      if (warnings)
        warnings->push_back("covariance factorization needed diagonal jitter " +
                            format_double(rel) + " (relative)");
      return llt.matrixL();
    }
  }
  throw std::runtime_error("covariance factorization failed even with jitter up to 1e-9 relative");
}

}  // namespace

Eigen::MatrixXd covariance_matrix(const ModelSpec& model, const std::vector<double>& times,
                                  double jitter_rel, std::vector<std::string>* warnings) {
  const int n = static_cast<int>(times.size());
  if (n == 0) throw std::invalid_argument("covariance_matrix: empty time grid");
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j)
      if (times[static_cast<std::size_t>(i)] == times[static_cast<std::size_t>(j)])
        throw std::invalid_argument("covariance_matrix: times must be distinct");
    if (model.kind == ModelKind::Fbm && !(times[static_cast<std::size_t>(i)] > 0))
      throw std::invalid_argument("covariance_matrix: FBM requires strictly positive times");
  }
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double v = covariance(model, times[static_cast<std::size_t>(i)], times[static_cast<std::size_t>(j)]);
      K(i, j) = v;
      K(j, i) = v;
    }
  // Probe the factorization so the returned matrix is usable as-is.
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) {
    const double scale = K.diagonal().maxCoeff();
    double rel = jitter_rel;
    for (int attempt = 0; attempt < 4; ++attempt, rel *= 10.0) {
      if (rel > 1e-9 * 1.0000001) break;
      Eigen::MatrixXd jittered = K + rel * scale * Eigen::MatrixXd::Identity(n, n);
      llt.compute(jittered);
      if (llt.info() == Eigen::Success) {
        if (warnings)
          warnings->push_back("covariance matrix stabilized with diagonal jitter " +
                              format_double(rel) + " (relative)");
        return jittered;
      }
    }
    throw std::runtime_error("covariance_matrix: factorization failed even with jitter");
  }
  return K;
}

std::vector<double> normal_vector(std::uint64_t seed, int count) {
  std::mt19937_64 engine(seed);
  auto uniform = [&engine]() {
    // (0, 1], safe for the log below.
    return (static_cast<double>(engine() >> 11) + 1.0) * 0x1p-53;
  };
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; i += 2) {
    double u1 = uniform();
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    out[static_cast<std::size_t>(i)] = radius * std::cos(2.0 * M_PI * u2);
    if (i + 1 < count) out[static_cast<std::size_t>(i + 1)] = radius * std::sin(2.0 * M_PI * u2);
  }
  return out;
}

std::vector<PathSample> sample_paths(const SimConfig& config, int N,
                                     std::vector<std::string>* warnings, int threads) {
  if (N < 1) throw std::invalid_argument("sample_paths: N must be >= 1");
  if (config.n < 2) throw std::invalid_argument("sample_paths: n must be >= 2");
  const double delta = config.effective_delta();
  std::vector<double> times(static_cast<std::size_t>(config.n));
  for (int j = 0; j < config.n; ++j) times[static_cast<std::size_t>(j)] = (j + 1) * delta;

  Eigen::MatrixXd K = covariance_matrix(config.model, times, config.jitter_rel, warnings);
  Eigen::MatrixXd Lfac = chol_with_jitter(K, config.jitter_rel, nullptr);

  std::vector<double> drift_values(static_cast<std::size_t>(config.n), 0.0);
  if (!config.drift.empty())
    for (int j = 0; j < config.n; ++j)
      drift_values[static_cast<std::size_t>(j)] = config.drift(times[static_cast<std::size_t>(j)]);

  std::vector<PathSample> paths(static_cast<std::size_t>(N));
  parallel_for(N, threads, [&](int i) {
    std::vector<double> z = normal_vector(derive_seed(config.seed, static_cast<std::uint64_t>(i)),
                                          config.n);
    Eigen::Map<const Eigen::VectorXd> zvec(z.data(), config.n);
    Eigen::VectorXd x = Lfac * zvec;
    PathSample& path = paths[static_cast<std::size_t>(i)];
    path.delta = delta;
    if (config.alpha) path.alpha = *config.alpha;
    path.values.resize(static_cast<std::size_t>(config.n));
    for (int j = 0; j < config.n; ++j)
      path.values[static_cast<std::size_t>(j)] = x(j) + drift_values[static_cast<std::size_t>(j)];
  });
  return paths;
}

std::pair<double, double> gaussian_pair_moment_check(const Eigen::Matrix2d& cov) {
  if (std::abs(cov(0, 1) - cov(1, 0)) > 1e-12 || cov(0, 0) < 0 || cov(1, 1) < 0)
    throw std::invalid_argument("gaussian_pair_moment_check: covariance must be symmetric PSD");
  const QuadratureRule& rule = gauss_hermite(40);
  const double sx = std::sqrt(cov(0, 0));
  double a21 = 0.0, a22 = 0.0;
  if (sx > 0) {
    a21 = cov(0, 1) / sx;
    double rem = cov(1, 1) - a21 * a21;
    a22 = std::sqrt(rem > 0 ? rem : 0.0);
  } else {
    a22 = std::sqrt(cov(1, 1));
  }
  // E[X^2 Y^2] over independent standard normals z1, z2 via the Hermite rule
  // (x = sqrt(2) t, weight pi^-1/2 per dimension).
  const double sqrt2 = std::sqrt(2.0);
  double ex2y2 = 0.0;
  for (std::size_t p = 0; p < rule.nodes.size(); ++p) {
    double z1 = sqrt2 * rule.nodes[p];
    double x2 = sx * z1 * sx * z1;
    double inner = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      double z2 = sqrt2 * rule.nodes[q];
      double y = a21 * z1 + a22 * z2;
      inner += rule.weights[q] * y * y;
    }
    ex2y2 += rule.weights[p] * x2 * inner;
  }
  ex2y2 /= M_PI;
  double lhs = ex2y2 - cov(0, 0) * cov(1, 1);
  double rhs = 2.0 * cov(0, 1) * cov(0, 1);
  return {lhs, rhs};
}

}  // namespace qvar
