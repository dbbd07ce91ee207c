#include "qvar/models.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qvar {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

std::string ModelSpec::name() const {
  switch (kind) {
    case ModelKind::Exponential: return "exp";
    case ModelKind::GeneralizedExponential: return "genexp";
    case ModelKind::Slepian: return "slepian";
    case ModelKind::Matern32: return "matern32";
    case ModelKind::Matern52: return "matern52";
    case ModelKind::Fbm: return "fbm";
  }
  return "?";
}

ModelSpec make_exponential(double C) {
  require(C > 0, "exponential: C must be > 0");
  return {ModelKind::Exponential, C, 1.0, 1.0};
}

ModelSpec make_generalized_exponential(double C, double s) {
  require(C > 0, "generalized exponential: C must be > 0");
  require(s > 0 && s < 2, "generalized exponential: s must lie in (0,2)");
  return {ModelKind::GeneralizedExponential, C, s, 1.0};
}

ModelSpec make_slepian(double C, double s) {
  require(C > 0, "slepian: C must be > 0");
  // Validity bound for the (1 - (C/2)|h|^s)^+ parametrization on [0,1].
  require(C < 2, "slepian: C must be < 2");
  require(s > 0 && s <= 1, "slepian: s must lie in (0,1]");
  return {ModelKind::Slepian, C, s, 1.0};
}

ModelSpec make_matern32(double theta) {
  require(theta > 0, "matern32: theta must be > 0");
  return {ModelKind::Matern32, 1.0, 1.0, theta};
}

ModelSpec make_matern52(double theta) {
  require(theta > 0, "matern52: theta must be > 0");
  return {ModelKind::Matern52, 1.0, 1.0, theta};
}

ModelSpec make_fbm(double C, double s) {
  require(C > 0, "fbm: C must be > 0");
  require(s > 0 && s < 2, "fbm: s must lie in (0,2)");
  return {ModelKind::Fbm, C, s, 1.0};
}

double covariance_kernel(const ModelSpec& model, double h) {
  h = std::abs(h);
  switch (model.kind) {
    case ModelKind::Exponential:
      return std::exp(-model.C * h);
    case ModelKind::GeneralizedExponential:
      return std::exp(-model.C * std::pow(h, model.s));
    case ModelKind::Slepian: {
      double v = 1.0 - 0.5 * model.C * std::pow(h, model.s);
      return v > 0.0 ? v : 0.0;
    }
    case ModelKind::Matern32: {
      double u = std::sqrt(3.0) * h / model.theta;
      return (1.0 + u) * std::exp(-u);
    }
    case ModelKind::Matern52: {
      double u = std::sqrt(5.0) * h / model.theta;
      return (1.0 + u + u * u / 3.0) * std::exp(-u);
    }
    case ModelKind::Fbm:
      throw std::invalid_argument("covariance_kernel: FBM is not stationary");
  }
  throw std::logic_error("covariance_kernel: unreachable");
}

double covariance(const ModelSpec& model, double t, double u) {
  if (model.kind == ModelKind::Fbm) {
    return model.C * (std::pow(std::abs(u), model.s) + std::pow(std::abs(t), model.s) -
                      std::pow(std::abs(u - t), model.s));
  }
  return covariance_kernel(model, t - u);
}

double semivariogram(const ModelSpec& model, double h) {
  if (model.kind == ModelKind::Fbm) return model.C * std::pow(std::abs(h), model.s);
  return covariance_kernel(model, 0.0) - covariance_kernel(model, h);
}

LocalBehavior local_behavior(const ModelSpec& model) {
  switch (model.kind) {
    case ModelKind::Exponential:
      return {0, 1.0, model.C};
    case ModelKind::GeneralizedExponential:
      return {0, model.s, model.C};
    case ModelKind::Slepian:
      // V(h) = 1 - k(h) = (C/2)|h|^s near 0.
      return {0, model.s, model.C / 2.0};
    case ModelKind::Matern32:
      return {1, 1.0, 6.0 * std::sqrt(3.0) / std::pow(model.theta, 3)};
    case ModelKind::Matern52:
      return {2, 1.0, 200.0 * std::sqrt(5.0) / (3.0 * std::pow(model.theta, 5))};
    case ModelKind::Fbm:
      return {0, model.s, model.C};
  }
  throw std::logic_error("local_behavior: unreachable");
}

HypothesisReport hypothesis_report(const ModelSpec& model, double alpha) {
  require(alpha > 0 && alpha <= 1, "hypothesis_report: alpha must lie in (0,1]");
  HypothesisReport rep;
  rep.h0 = rep.h1 = rep.h2 = true;
  switch (model.kind) {
    case ModelKind::Exponential:
      rep.h3 = alpha > 0.5;
      rep.notes = "H3 requires alpha > 1/2";
      break;
    case ModelKind::GeneralizedExponential:
      rep.h3 = model.s > 1.0 / (2.0 * alpha);
      rep.notes = "H3 requires s > 1/(2 alpha)";
      break;
    case ModelKind::Slepian:
      rep.h3 = (alpha == 1.0) && model.C < 2.0;
      rep.notes = "H0-H3 hold in the infill situation for C < 2";
      if (alpha < 1.0) rep.h0 = rep.h1 = rep.h2 = false;
      break;
    case ModelKind::Matern32:
    case ModelKind::Matern52:
      // s = 1 for both half-integer cases.
      rep.h3 = 1.0 < 2.0 - 1.0 / (2.0 * alpha);
      rep.notes = "H3 requires s < 2 - 1/(2 alpha)";
      break;
    case ModelKind::Fbm:
      rep.h3 = true;  // the remainder r is identically zero
      rep.notes = "remainder vanishes identically";
      break;
  }
  return rep;
}

double DriftSpec::operator()(double t) const {
  double v = 0.0;
  for (std::size_t k = poly.size(); k-- > 0;) v = v * t + poly[k];
  if (has_sine) v += amp * std::sin(2.0 * M_PI * freq * t);
  return v;
}

double DriftSpec::derivative_sup(int M, double T) const {
  if (M < 0) throw std::invalid_argument("derivative_sup: M must be >= 0");
  double sup = 0.0;
  if (has_sine) sup += std::abs(amp) * std::pow(2.0 * M_PI * freq, M);
  // M-th derivative coefficients of the polynomial part.
  std::vector<double> d;
  for (std::size_t k = static_cast<std::size_t>(M); k < poly.size(); ++k) {
    double c = poly[k];
    for (int r = 0; r < M; ++r) c *= static_cast<double>(k - r);
    d.push_back(c);
  }
  if (!d.empty()) {
    double best = 0.0;
    const int grid = 1024;
    for (int g = 0; g <= grid; ++g) {
      double t = T * g / grid;
      double v = 0.0;
      for (std::size_t k = d.size(); k-- > 0;) v = v * t + d[k];
      best = std::max(best, std::abs(v));
    }
    sup += best;
  }
  return sup;
}

ModelSpec model_from_json(const nlohmann::json& j) {
  if (!j.contains("model")) throw std::invalid_argument("model descriptor: missing \"model\" field");
  std::string name = j.at("model").get<std::string>();
  auto num = [&](const char* key, double fallback, bool required) {
    if (j.contains(key)) return j.at(key).get<double>();
    if (required) throw std::invalid_argument(std::string("model descriptor: missing \"") + key + "\"");
    return fallback;
  };
  if (name == "exp") return make_exponential(num("C", 0, true));
  if (name == "genexp") return make_generalized_exponential(num("C", 0, true), num("s", 0, true));
  if (name == "slepian") return make_slepian(num("C", 0, true), num("s", 0, true));
  if (name == "matern32") return make_matern32(num("theta", 0, true));
  if (name == "matern52") return make_matern52(num("theta", 0, true));
  if (name == "fbm") return make_fbm(num("C", 0, true), num("s", 0, true));
  throw std::invalid_argument("model descriptor: unknown model '" + name + "'");
}

nlohmann::json model_to_json(const ModelSpec& model) {
  nlohmann::json j;
  j["model"] = model.name();
  switch (model.kind) {
    case ModelKind::Exponential:
      j["C"] = model.C;
      break;
    case ModelKind::GeneralizedExponential:
    case ModelKind::Slepian:
    case ModelKind::Fbm:
      j["C"] = model.C;
      j["s"] = model.s;
      break;
    case ModelKind::Matern32:
    case ModelKind::Matern52:
      j["theta"] = model.theta;
      break;
  }
  return j;
}

DriftSpec drift_from_json(const nlohmann::json& j) {
  DriftSpec d;
  if (j.is_null()) return d;
  if (j.contains("poly")) d.poly = j.at("poly").get<std::vector<double>>();
  if (j.contains("sine")) {
    d.has_sine = true;
    d.amp = j.at("sine").at("amp").get<double>();
    d.freq = j.at("sine").at("freq").get<double>();
  }
  if (d.empty()) throw std::invalid_argument("drift descriptor: expected \"poly\" or \"sine\"");
  return d;
}

nlohmann::json drift_to_json(const DriftSpec& drift) {
  nlohmann::json j;
  if (!drift.poly.empty()) j["poly"] = drift.poly;
  if (drift.has_sine) j["sine"] = {{"amp", drift.amp}, {"freq", drift.freq}};
  return j;
}

}  // namespace qvar
