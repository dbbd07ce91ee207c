#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace qvar {

/// Local behavior of the semivariogram at 0:
/// V^(2D)(h) = V^(2D)(0) + C (-1)^D |h|^s + o(|h|^s).
struct LocalBehavior {
  int D = 0;       // quadratic-mean differentiability order
  double s = 1.0;  // smoothness exponent in (0,2)
  double C = 1.0;  // scale parameter, > 0
};

enum class ModelKind {
  Exponential,             // k(h) = exp(-C|h|)
  GeneralizedExponential,  // k(h) = exp(-C|h|^s)
  Slepian,                 // k(h) = (1 - (C/2)|h|^s)^+
  Matern32,                // k(h) = (1 + sqrt(3)|h|/theta) exp(-sqrt(3)|h|/theta)
  Matern52,                // k(h) = (1 + sqrt(5)|h|/theta + 5h^2/(3theta^2)) exp(-sqrt(5)|h|/theta)
  Fbm,                     // Cov(u,t) = C(|u|^s + |t|^s - |u-t|^s)
};

struct ModelSpec {
  ModelKind kind = ModelKind::Exponential;
  double C = 1.0;
  double s = 1.0;
  double theta = 1.0;

  bool stationary() const { return kind != ModelKind::Fbm; }
  std::string name() const;
};

ModelSpec make_exponential(double C);
ModelSpec make_generalized_exponential(double C, double s);
ModelSpec make_slepian(double C, double s);
ModelSpec make_matern32(double theta);
ModelSpec make_matern52(double theta);
ModelSpec make_fbm(double C, double s);

/// Stationary covariance k(|h|); throws for FBM (use covariance()).
double covariance_kernel(const ModelSpec& model, double h);
/// Covariance of X(t) and X(u).
double covariance(const ModelSpec& model, double t, double u);
/// Semivariogram V(h) = (1/2) E[(X(t+h) - X(t))^2].
double semivariogram(const ModelSpec& model, double h);
/// The (D, s, C) triple of the model's expansion at 0.
LocalBehavior local_behavior(const ModelSpec& model);

struct HypothesisReport {
  bool h0 = false, h1 = false, h2 = false, h3 = false;
  std::string notes;
  bool all() const { return h0 && h1 && h2 && h3; }
};

/// Which of the working hypotheses hold for the model at mesh exponent
/// alpha (delta_n = n^-alpha, alpha = 1 is the infill case).
HypothesisReport hypothesis_report(const ModelSpec& model, double alpha);

/// Mean function: polynomial coefficients (c0 + c1 t + ...) plus an
/// optional sinusoid amp * sin(2 pi freq t).
struct DriftSpec {
  std::vector<double> poly;
  bool has_sine = false;
  double amp = 0.0;
  double freq = 0.0;

  bool empty() const { return poly.empty() && !has_sine; }
  double operator()(double t) const;
  /// sup over [0, T] of |f^(M)|; exact for the sinusoid's envelope,
  /// grid-evaluated for polynomials (diagnostic use only).
  double derivative_sup(int M, double T) const;
};

ModelSpec model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const ModelSpec& model);
DriftSpec drift_from_json(const nlohmann::json& j);
nlohmann::json drift_to_json(const DriftSpec& drift);

}  // namespace qvar
