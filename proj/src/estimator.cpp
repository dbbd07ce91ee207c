#include "qvar/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "qvar/calculus.hpp"
#include "qvar/util.hpp"

namespace qvar {

std::string denominator_mode_name(DenominatorMode mode) {
  return mode == DenominatorMode::PaperN ? "paper-n" : "unbiased-nprime";
}

DenominatorMode denominator_mode_from_name(const std::string& name) {
  if (name == "paper-n" || name == "n") return DenominatorMode::PaperN;
  if (name == "unbiased-nprime" || name == "nprime") return DenominatorMode::UnbiasedNPrime;
  throw std::invalid_argument("unknown denominator mode '" + name + "'");
}

double quadratic_variation(const PathSample& path, const VariationSequence& a) {
  const int n = path.n();
  const int L = a.length();
  if (n < L) throw std::invalid_argument("quadratic_variation: path shorter than the sequence");
  const int n_prime = n - L + 1;
  const auto& c = a.coeffs();
  double total = 0.0;
  for (int i = 0; i < n_prime; ++i) {
    double diff = 0.0;
    for (int j = 0; j < L; ++j) diff += c[static_cast<std::size_t>(j)] * path.values[static_cast<std::size_t>(i + j)];
    total += diff * diff;
  }
  return total;
}

EstimateReport estimate_C(const PathSample& path, const VariationSequence& a, int D, double s,
                          DenominatorMode mode, double ci_level) {
  if (!(s > 0 && s < 2)) throw std::invalid_argument("estimate_C: s must lie in (0,2)");
  if (!(path.delta > 0)) throw std::invalid_argument("estimate_C: delta must be > 0");

  EstimateReport rep;
  rep.n = path.n();
  rep.n_prime = path.n() - a.length() + 1;
  rep.mode = mode;
  rep.ci_level = ci_level;
  rep.V_an = quadratic_variation(path, a);

  const Filter b = self_convolution(a);
  const double R0 = remainder_power_closed(0, D, s, b);
  const double signedR0 = ((D % 2 == 0) ? 1.0 : -1.0) * R0;
  // Non-zero whenever M(a) > D; a vanishing denominator means a broken filter.
  if (!(signedR0 > 0)) throw std::logic_error("estimate_C: degenerate normalizer, M(a) <= D?");

  const double N = (mode == DenominatorMode::PaperN) ? rep.n : rep.n_prime;
  rep.C_hat = rep.V_an / (N * signedR0 * std::pow(path.delta, 2 * D + s));

  CltCheck clt = validate_clt(a, D, s);
  rep.clt_valid = clt.valid;
  if (clt.valid) {
    rep.vtilde = normalized_asymptotic_variance(a, D, s);
    rep.std_error = rep.C_hat * std::sqrt(rep.vtilde / rep.n);
    double z = normal_quantile(0.5 + ci_level / 2.0);
    rep.ci_lo = rep.C_hat - z * rep.std_error;
    rep.ci_hi = rep.C_hat + z * rep.std_error;
  } else {
    rep.warning = clt.diagnostic;
  }
  return rep;
}

double normalized_asymptotic_variance(const VariationSequence& a, int D, double s) {
  CltCheck clt = validate_clt(a, D, s);
  if (!clt.valid)
    throw std::domain_error("normalized_asymptotic_variance: " + clt.diagnostic);
  const Filter b = self_convolution(a);
  const double R0 = remainder_power_closed(0, D, s, b);
  const SeriesResult series = series_R2(b, D, s);
  return 2.0 * series.value / (R0 * R0);
}

Eigen::MatrixXd asymptotic_R_matrix(const std::vector<VariationSequence>& sequences, int D, double s) {
  const int k = static_cast<int>(sequences.size());
  if (k == 0) throw std::invalid_argument("asymptotic_R_matrix: need at least one sequence");
  for (int j = 0; j < k; ++j) {
    for (int l = j + 1; l < k; ++l) {
      const auto& fa = sequences[static_cast<std::size_t>(j)].as_filter();
      const auto& fb = sequences[static_cast<std::size_t>(l)].as_filter();
      if (fa.min_index == fb.min_index && fa.coeffs == fb.coeffs)
        throw std::invalid_argument("asymptotic_R_matrix: duplicate sequence '" +
                                    sequences[static_cast<std::size_t>(j)].label() + "'");
    }
  }
  std::vector<double> R0(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    CltCheck clt = validate_clt(sequences[static_cast<std::size_t>(j)], D, s);
    if (!clt.valid)
      throw std::domain_error("asymptotic_R_matrix: sequence '" +
                              sequences[static_cast<std::size_t>(j)].label() + "': " + clt.diagnostic);
    R0[static_cast<std::size_t>(j)] = remainder_power_closed(
        0, D, s, self_convolution(sequences[static_cast<std::size_t>(j)]));
  }
  Eigen::MatrixXd R(k, k);
  for (int j = 0; j < k; ++j) {
    for (int l = j; l < k; ++l) {
      Filter cross = convolve(sequences[static_cast<std::size_t>(j)], sequences[static_cast<std::size_t>(l)]);
      double series = series_R2(cross, D, s).value;
      double value = 2.0 * series /
                     (R0[static_cast<std::size_t>(j)] * R0[static_cast<std::size_t>(l)]);
      R(j, l) = value;
      R(l, j) = value;
    }
  }
  return R;
}

std::pair<Eigen::VectorXd, double> aggregate(const Eigen::MatrixXd& R) {
  if (R.rows() != R.cols() || R.rows() == 0)
    throw std::invalid_argument("aggregate: R must be square and non-empty");
  if (!R.isApprox(R.transpose(), 1e-12))
    throw std::invalid_argument("aggregate: R must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
  if (es.info() != Eigen::Success) throw std::runtime_error("aggregate: eigen solve failed");
  const Eigen::VectorXd& eig = es.eigenvalues();
  const double hi = eig.maxCoeff();
  const double cutoff = 1e-10 * std::max(hi, 1.0);
  if (eig.minCoeff() < -cutoff)
    throw std::domain_error("aggregate: R is indefinite; it is not a valid covariance matrix");
  if (!(hi > 0)) throw std::domain_error("aggregate: R vanishes");
  // A singular R means some linear combination of the normalized variations is
  // asymptotically degenerate; the minimum-variance weights are still defined
  // through the pseudo-inverse as long as the all-ones vector stays in the
  // range of R (i.e. carries no null-space mass).
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(R.rows());
  Eigen::VectorXd coef = es.eigenvectors().transpose() * ones;
  double null_mass = 0.0, denom = 0.0;
  Eigen::VectorXd scaled = Eigen::VectorXd::Zero(R.rows());
  for (int j = 0; j < R.rows(); ++j) {
    if (eig(j) <= cutoff) {
      null_mass += coef(j) * coef(j);
    } else {
      scaled(j) = coef(j) / eig(j);
      denom += coef(j) * coef(j) / eig(j);
    }
  }
  if (null_mass > 1e-8 * ones.squaredNorm())
    throw std::domain_error(
        "aggregate: R is singular along the requested weight direction; drop a sequence");
  Eigen::VectorXd solved = es.eigenvectors() * scaled;
  Eigen::VectorXd lambda = solved / denom;
  return {lambda, 1.0 / denom};
}

AggregationPlan make_aggregation_plan(const std::vector<VariationSequence>& sequences, int D, double s) {
  AggregationPlan plan;
  for (const auto& a : sequences) plan.labels.push_back(a.label());
  plan.R = asymptotic_R_matrix(sequences, D, s);
  auto [lambda, vagg] = aggregate(plan.R);
  plan.lambda = lambda;
  plan.vtilde_agg = vagg;
  return plan;
}

EstimateReport estimate_C_aggregated(const PathSample& path,
                                     const std::vector<VariationSequence>& sequences, int D, double s,
                                     DenominatorMode mode, double ci_level) {
  AggregationPlan plan = make_aggregation_plan(sequences, D, s);
  EstimateReport rep;
  rep.n = path.n();
  rep.mode = mode;
  rep.ci_level = ci_level;
  rep.clt_valid = true;
  int max_L = 0;
  for (std::size_t j = 0; j < sequences.size(); ++j) {
    EstimateReport single = estimate_C(path, sequences[j], D, s, mode, ci_level);
    rep.C_hat += plan.lambda(static_cast<Eigen::Index>(j)) * single.C_hat;
    rep.V_an += single.V_an;
    max_L = std::max(max_L, sequences[j].length());
  }
  rep.n_prime = rep.n - max_L + 1;
  rep.vtilde = plan.vtilde_agg;
  rep.std_error = rep.C_hat * std::sqrt(rep.vtilde / rep.n);
  double z = normal_quantile(0.5 + ci_level / 2.0);
  rep.ci_lo = rep.C_hat - z * rep.std_error;
  rep.ci_hi = rep.C_hat + z * rep.std_error;
  return rep;
}

std::pair<double, double> exact_variation_moments(const ModelSpec& model, const VariationSequence& a,
                                                  int n, double delta) {
  if (n > 5000) throw std::invalid_argument("exact_variation_moments: n exceeds the 5000 guard");
  const int L = a.length();
  if (n < L) throw std::invalid_argument("exact_variation_moments: path shorter than the sequence");
  if (!(delta > 0)) throw std::invalid_argument("exact_variation_moments: delta must be > 0");

  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double v = covariance(model, (i + 1) * delta, (j + 1) * delta);
      K(i, j) = v;
      K(j, i) = v;
    }

  const int n_prime = n - L + 1;
  const auto& c = a.coeffs();
  // G(i,i') = Cov(Delta_i, Delta_i') via bilinear expansion; only the mean
  // (diagonal) and the squared Frobenius sum are needed.
  double mean = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n_prime; ++i) {
    for (int ip = 0; ip < n_prime; ++ip) {
      double g = 0.0;
      for (int j = 0; j < L; ++j)
        for (int jp = 0; jp < L; ++jp)
          g += c[static_cast<std::size_t>(j)] * c[static_cast<std::size_t>(jp)] * K(i + j, ip + jp);
      if (i == ip) mean += g;
      sum_sq += g * g;
    }
  }
  return {mean, 2.0 * sum_sq};
}

nlohmann::json report_to_json(const EstimateReport& report) {
  nlohmann::json j;
  j["C_hat"] = report.C_hat;
  j["V_an"] = report.V_an;
  j["n"] = report.n;
  j["n_prime"] = report.n_prime;
  j["denominator_mode"] = denominator_mode_name(report.mode);
  j["vtilde"] = report.vtilde;
  j["std_error"] = report.std_error;
  j["ci"] = {report.ci_lo, report.ci_hi};
  j["ci_level"] = report.ci_level;
  j["clt_valid"] = report.clt_valid;
  if (!report.warning.empty()) j["warning"] = report.warning;
  return j;
}

std::string report_to_csv(const EstimateReport& report) {
  std::string line;
  line += format_double(report.C_hat);
  line += "," + format_double(report.V_an);
  line += "," + std::to_string(report.n);
  line += "," + std::to_string(report.n_prime);
  line += "," + denominator_mode_name(report.mode);
  line += "," + format_double(report.vtilde);
  line += "," + format_double(report.std_error);
  line += "," + format_double(report.ci_lo);
  line += "," + format_double(report.ci_hi);
  line += "," + std::string(report.clt_valid ? "1" : "0");
  return line;
}

}  // namespace qvar
