#include "qvar/fisher.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace qvar {

namespace {

// Semivariogram of the underlying stationary-increment process Y_C.
double family_semivariogram(const IncrementFamily& family, double C, double h) {
  h = std::abs(h);
  switch (family.kind) {
    case IncrementFamilyKind::FbmIntegrated:
      return C * std::pow(h, family.s);
    case IncrementFamilyKind::SlepianIntegrated: {
      double v = C * std::pow(h, family.s);
      return v < 2.0 ? v : 2.0;  // semivariogram saturates at 2*k(0) once lags decorrelate
    }
  }
  throw std::logic_error("family_semivariogram: unreachable");
}

void check(const IncrementFamily& family, double C) {
  if (!(C > 0)) throw std::invalid_argument("increment family: C must be > 0");
  if (!(family.s > 0 && family.s < 2)) throw std::invalid_argument("increment family: s must lie in (0,2)");
  if (family.n < 2) throw std::invalid_argument("increment family: n must be >= 2");
  if (family.kind == IncrementFamilyKind::SlepianIntegrated && !(family.s <= 1))
    throw std::invalid_argument("increment family: the Slepian family requires s <= 1");
}

}  // namespace

bool IncrementFamily::linear_in_C(double C) const {
  if (kind == IncrementFamilyKind::FbmIntegrated) return true;
  double max_lag = (n - 1) * effective_delta();
  return C * std::pow(max_lag, s) < 2.0;
}

Eigen::MatrixXd increment_covariance(const IncrementFamily& family, double C) {
  check(family, C);
  const int m = family.n - 1;
  const double d = family.effective_delta();
  auto V = [&](double h) { return family_semivariogram(family, C, h); };
  Eigen::MatrixXd R(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) {
      int u = i - j;
      // Cov(Y(a)-Y(b), Y(c)-Y(d)) = V(a-d) + V(b-c) - V(a-c) - V(b-d)
      double v = V((u + 1) * d) + V((u - 1) * d) - 2.0 * V(u * d);
      R(i, j) = v;
      R(j, i) = v;
    }
  return R;
}

double fisher_information(const IncrementFamily& family, double C, bool analytic_derivative) {
  check(family, C);
  Eigen::MatrixXd R = increment_covariance(family, C);
  Eigen::MatrixXd Rdot;
  if (analytic_derivative && family.linear_in_C(C)) {
    Rdot = R / C;
  } else {
    double h = 1e-5 * C;
    Rdot = (increment_covariance(family, C + h) - increment_covariance(family, C - h)) / (2.0 * h);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("fisher_information: increment covariance is singular");
  Eigen::MatrixXd S = llt.solve(Rdot);
  return 0.5 * (S * S).trace();
}

double efficiency(double vtilde) {
  if (!(vtilde > 0)) throw std::invalid_argument("efficiency: vtilde must be > 0");
  return 2.0 / vtilde;
}

}  // namespace qvar
