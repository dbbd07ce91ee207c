#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "qvar/models.hpp"
#include "qvar/sequence.hpp"

namespace qvar {

/// One discretized realization: values X(j delta), j = 1..n.
struct PathSample {
  double delta = 0.0;
  std::vector<double> values;
  double alpha = std::numeric_limits<double>::quiet_NaN();  // optional tag

  int n() const { return static_cast<int>(values.size()); }
};

enum class DenominatorMode { PaperN, UnbiasedNPrime };

std::string denominator_mode_name(DenominatorMode mode);
DenominatorMode denominator_mode_from_name(const std::string& name);

struct EstimateReport {
  double C_hat = 0.0;
  double V_an = 0.0;
  int n = 0;
  int n_prime = 0;
  DenominatorMode mode = DenominatorMode::PaperN;
  double vtilde = std::numeric_limits<double>::quiet_NaN();
  double std_error = std::numeric_limits<double>::quiet_NaN();
  double ci_lo = std::numeric_limits<double>::quiet_NaN();
  double ci_hi = std::numeric_limits<double>::quiet_NaN();
  double ci_level = 0.95;
  bool clt_valid = false;
  std::string warning;
};

nlohmann::json report_to_json(const EstimateReport& report);
std::string report_to_csv(const EstimateReport& report);  // one line, no newline

struct AggregationPlan {
  std::vector<std::string> labels;
  Eigen::MatrixXd R;
  Eigen::VectorXd lambda;
  double vtilde_agg = 0.0;
};

/// V_{a,n} = sum_{i=1}^{n'} (sum_j a_j X((i+j) delta))^2 with n' = n - L + 1.
double quadratic_variation(const PathSample& path, const VariationSequence& a);

/// Moment estimator C_hat = V_{a,n} / (N (-1)^D delta^(2D+s) R(0,1,2D,|.|^s,a^{2*}))
/// with N = n (as written in the defining formula) or n' (exactly unbiased
/// for a pure power variogram). A failed CLT check is flagged, not fatal.
EstimateReport estimate_C(const PathSample& path, const VariationSequence& a, int D, double s,
                          DenominatorMode mode = DenominatorMode::PaperN, double ci_level = 0.95);

/// Normalized asymptotic variance of (n^(1/2)/C)(C_{a,n} - C):
///   vtilde = 2 sum_i R^2(i,...) / R^2(0,...).
double normalized_asymptotic_variance(const VariationSequence& a, int D, double s);

/// Asymptotic covariance matrix of the normalized estimators for a set of
/// sequences; diagonal entries equal normalized_asymptotic_variance.
Eigen::MatrixXd asymptotic_R_matrix(const std::vector<VariationSequence>& sequences, int D, double s);

/// Minimum-variance unit-sum weights lambda* = R^-1 1 / (1^T R^-1 1).
/// Rejects matrices whose smallest eigenvalue is below 1e-10 of the largest.
std::pair<Eigen::VectorXd, double> aggregate(const Eigen::MatrixXd& R);

AggregationPlan make_aggregation_plan(const std::vector<VariationSequence>& sequences, int D, double s);

EstimateReport estimate_C_aggregated(const PathSample& path,
                                     const std::vector<VariationSequence>& sequences, int D, double s,
                                     DenominatorMode mode = DenominatorMode::PaperN,
                                     double ci_level = 0.95);

/// Exact finite-sample mean and variance of V_{a,n} under the model,
/// by bilinear expansion over the observation covariance matrix and the
/// Gaussian fourth-moment identity. Brute-force oracle; O(n^2 L^2).
std::pair<double, double> exact_variation_moments(const ModelSpec& model, const VariationSequence& a,
                                                  int n, double delta);

}  // namespace qvar
