#pragma once

#include <Eigen/Core>

namespace qvar {

enum class IncrementFamilyKind {
  FbmIntegrated,      // increments of an FBM with semivariogram C|h|^s
  SlepianIntegrated,  // increments of the process with k_C(h) = (1-(C/2)|h|^s)^+
};

/// Family of increment observations Y_C(i delta) - Y_C((i-1) delta),
/// i = 2..n, used for the Cramer-Rao benchmark.
struct IncrementFamily {
  IncrementFamilyKind kind = IncrementFamilyKind::FbmIntegrated;
  int D = 0;
  double s = 1.0;
  int n = 2;
  double delta = 0.0;  // 0 means infill: delta = 1/n

  double effective_delta() const { return delta > 0 ? delta : 1.0 / n; }
  /// True when R_C = C * R_1 entrywise (always for FBM; for the Slepian
  /// family as long as the compact support is not reached on the grid).
  bool linear_in_C(double C) const;
};

/// (n-1) x (n-1) covariance matrix of the increments at parameter C.
Eigen::MatrixXd increment_covariance(const IncrementFamily& family, double C);

/// Fisher information I_C = (1/2) Tr(R_C^-1 dR R_C^-1 dR). The derivative
/// dR/dC is R_C / C analytically for linear families, or a central finite
/// difference with step 1e-5 C otherwise.
double fisher_information(const IncrementFamily& family, double C, bool analytic_derivative = true);

inline double cramer_rao_bound(const IncrementFamily& family, double C) {
  return 1.0 / fisher_information(family, C);
}

/// Efficiency of a quadratic-variation estimator against the normalized
/// Cramer-Rao floor of 2: returns 2 / vtilde in (0, 1].
double efficiency(double vtilde);

}  // namespace qvar
