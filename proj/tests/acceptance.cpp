// Acceptance gate: one pass/fail line per criterion, non-zero exit on any
// failure. Tolerances are part of the contract; do not loosen them.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qvar/calculus.hpp"
#include "qvar/estimator.hpp"
#include "qvar/fisher.hpp"
#include "qvar/grid2d.hpp"
#include "qvar/models.hpp"
#include "qvar/sequence.hpp"
#include "qvar/simulate.hpp"
#include "qvar/util.hpp"

using namespace qvar;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail = "") {
  std::printf("%s criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::vector<VariationSequence> zoo() {
  return {elementary(1), elementary(2),        elementary(3), elementary(4),
          parse_sequence("seq123"), daubechies(2), daubechies(3)};
}

struct MomentStats {
  double mean = 0, var = 0, skew = 0, exkurt = 0;
};

MomentStats moments(const std::vector<double>& xs) {
  MomentStats m;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) m.mean += x;
  m.mean /= n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double x : xs) {
    double d = x - m.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.var = m2 * n / (n - 1);
  m.skew = m3 / std::pow(m2, 1.5);
  m.exkurt = m4 / (m2 * m2) - 3.0;
  return m;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(QVAR_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---------------------------------------------------------------------------

void criterion_1() {
  double v = normalized_asymptotic_variance(elementary(1), 0, 1.0);
  report(1, "exact efficiency point vtilde(elem1, D=0, s=1) = 2", std::abs(v - 2.0) <= 1e-10,
         "vtilde = " + format_double(v));
}

void criterion_2() {
  bool pass = true;
  double worst = 0.0;
  for (int D : {0, 1, 2}) {
    for (const Filter& b : {self_convolution(elementary(D + 1)), self_convolution(elementary(D + 2))}) {
      for (double s : {0.5, 1.0, 1.5}) {
        auto f = [s](double t) { return std::pow(std::abs(t), s); };
        for (int i = -10; i <= 10; ++i) {
          double closed = remainder_power_closed(i, D, s, b);
          double quad = remainder_quadrature(i, 1.0, 2 * D, f, b);
          double err = std::abs(closed - quad) / std::max(1.0, std::abs(closed));
          worst = std::max(worst, err);
          if (err > 1e-8) pass = false;
        }
      }
    }
  }
  report(2, "closed form vs quadrature for R(i,1,2D,|.|^s,b)", pass,
         "worst relative deviation " + format_double(worst));
}

void criterion_3() {
  bool pass = true;
  double min_seen = 1e300;
  for (int D : {0, 1}) {
    for (const auto& a : zoo()) {
      for (int k = 1; k <= 19; ++k) {
        double s = k * 0.1;
        if (!validate_clt(a, D, s).valid) continue;
        double v = normalized_asymptotic_variance(a, D, s);
        min_seen = std::min(min_seen, v);
        if (v < 2.0 - 1e-6) pass = false;
      }
    }
  }
  report(3, "vtilde >= 2 across the sequence zoo for D in {0,1}", pass,
         "minimum vtilde " + format_double(min_seen));
}

void criterion_4() {
  bool pass = true;
  for (int k = 1; k <= 19; ++k) {
    double s = k * 0.1;
    if (normalized_asymptotic_variance(elementary(2), 0, s) >
        normalized_asymptotic_variance(elementary(3), 0, s) + 1e-12)
      pass = false;
    if (normalized_asymptotic_variance(daubechies(2), 0, s) >
        normalized_asymptotic_variance(daubechies(3), 0, s) + 1e-12)
      pass = false;
  }
  report(4, "order-2 curves sit below order-3 curves (elem and daub)", pass);
}

void criterion_5() {
  bool pass = true;
  std::string detail;
  std::vector<VariationSequence> set{elementary(1), parse_sequence("seq123"), elementary(2),
                                     daubechies(2)};
  for (int k = 1; k <= 14; ++k) {
    double s = k * 0.1;
    bool valid = true;
    for (const auto& a : set) valid = valid && validate_clt(a, 0, s).valid;
    if (!valid) continue;
    AggregationPlan plan = make_aggregation_plan(set, 0, s);
    double min_diag = plan.R.diagonal().minCoeff();
    if (plan.vtilde_agg > min_diag + 1e-12 || plan.vtilde_agg < 2.0 - 1e-6) {
      pass = false;
      detail = "violation at s = " + format_double(s);
    }
  }
  // optimal weights beat random unit-sum weights on random SPD matrices
  std::mt19937_64 rng(321);
  std::normal_distribution<double> gauss;
  for (int m = 0; m < 20 && pass; ++m) {
    Eigen::MatrixXd A(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) A(i, j) = gauss(rng);
    Eigen::MatrixXd R = A * A.transpose() + 0.1 * Eigen::MatrixXd::Identity(4, 4);
    auto [lambda, vopt] = aggregate(R);
    for (int t = 0; t < 10000; ++t) {
      Eigen::Vector4d w(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
      if (std::abs(w.sum()) < 1e-3) continue;
      w /= w.sum();
      if (vopt > w.dot(R * w) + 1e-12) {
        pass = false;
        detail = "random weights beat lambda* on matrix " + std::to_string(m);
        break;
      }
    }
  }
  report(5, "aggregation dominates individual sequences and random weights", pass, detail);
}

void criterion_6() {
  const int n = 200, N = 2000;
  bool pass = true;
  std::string detail;
  const double th32 = std::cbrt(2.0 * std::sqrt(3.0));
  const double th52 = std::pow(200.0 * std::sqrt(5.0) / 9.0, 0.2);
  std::vector<ModelSpec> models{make_exponential(3.0), make_matern32(th32), make_matern52(th52)};
  for (const auto& model : models) {
    LocalBehavior lb = local_behavior(model);
    VariationSequence a = elementary(lb.D + 1);
    SimConfig config;
    config.model = model;
    config.n = n;
    config.alpha = 1.0;
    config.seed = 20240615;
    auto paths = sample_paths(config, N, nullptr, thread_budget());
    std::vector<double> C_hats(paths.size());
    parallel_for(N, thread_budget(), [&](int i) {
      C_hats[static_cast<std::size_t>(i)] =
          estimate_C(paths[static_cast<std::size_t>(i)], a, lb.D, lb.s).C_hat;
    });
    MomentStats m = moments(C_hats);
    double theo_var = lb.C * lb.C * normalized_asymptotic_variance(a, lb.D, lb.s) / n;
    std::ostringstream d;
    d << model.name() << ": mean " << m.mean << " var-ratio " << m.var / theo_var << " skew "
      << m.skew << " exkurt " << m.exkurt;
    bool ok = std::abs(m.mean - 3.0) <= 0.1 && m.var / theo_var >= 0.8 && m.var / theo_var <= 1.2 &&
              std::abs(m.skew) < 0.25 && std::abs(m.exkurt) < 0.5;
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + d.str();
    }
  }
  report(6, "finite-sample law at n=200 for the three C=3 models", pass, detail);
}

void criterion_7() {
  const int n = 64, N = 20000;
  bool pass = true;
  std::string detail;
  for (const auto& model : {make_exponential(3.0), make_fbm(1.0, 0.8)}) {
    VariationSequence a = elementary(1);
    auto [mean_th, var_th] = exact_variation_moments(model, a, n, 1.0 / n);
    SimConfig config;
    config.model = model;
    config.n = n;
    config.alpha = 1.0;
    config.seed = 456;
    auto paths = sample_paths(config, N, nullptr, thread_budget());
    std::vector<double> V(paths.size());
    parallel_for(N, thread_budget(), [&](int i) {
      V[static_cast<std::size_t>(i)] = quadratic_variation(paths[static_cast<std::size_t>(i)], a);
    });
    MomentStats m = moments(V);
    double se_mean = std::sqrt(var_th / N);
    double m2 = m.var * (N - 1.0) / N;
    double m4 = (m.exkurt + 3.0) * m2 * m2;
    double se_var = std::sqrt(std::max(0.0, m4 - m2 * m2) / N);
    bool ok = std::abs(m.mean - mean_th) <= 5.0 * se_mean &&
              std::abs(m.var - var_th) <= 5.0 * se_var;
    if (!ok) {
      pass = false;
      detail += model.name() + ": mean dev " + format_double((m.mean - mean_th) / se_mean) +
                " se, var dev " + format_double((m.var - var_th) / se_var) + " se; ";
    }
  }
  // the fourth-moment identity itself, via Gauss-Hermite quadrature
  for (double rho = -0.9; rho <= 0.91; rho += 0.1) {
    Eigen::Matrix2d cov;
    cov << 1, rho, rho, 1;
    auto [lhs, rhs] = gaussian_pair_moment_check(cov);
    if (std::abs(lhs - rhs) > 1e-8) {
      pass = false;
      detail += "identity off at rho = " + format_double(rho);
    }
  }
  report(7, "exact moment oracle matches Monte Carlo; fourth-moment identity", pass, detail);
}

void criterion_8() {
  bool pass = true;
  double worst = 0.0;
  for (int n : {10, 50, 200})
    for (double s : {0.5, 1.0, 1.5})
      for (double C : {0.5, 3.0}) {
        IncrementFamily family;
        family.s = s;
        family.n = n;
        double lhs = fisher_information(family, C) * 2.0 * C * C / (n - 1);
        worst = std::max(worst, std::abs(lhs - 1.0));
        if (std::abs(lhs - 1.0) > 1e-10) pass = false;
      }
  report(8, "Cramer-Rao identity 1/I_C = 2C^2/(n-1) on the FBM family", pass,
         "worst deviation " + format_double(worst));
}

void criterion_9() {
  bool pass = true;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int D = 0; D <= 2 && pass; ++D) {
    std::vector<VariationSequence> pool;
    for (const auto& a : zoo())
      if (a.order() > D) pool.push_back(a);
    for (int t = 0; t < 200; ++t) {
      Filter g{0, {unif(rng), unif(rng), unif(rng) + 2.0}};
      Filter c = convolve_filters(elementary(D + 1).as_filter(), g);
      pool.emplace_back(c.coeffs, "rand");
    }
    for (const auto& a : pool) {
      Filter b = self_convolution(a);
      for (double s = 0.25; s < 1.8; s += 0.25) {
        double sum = 0.0;
        for (int j = b.min_index; j <= b.max_index(); ++j)
          sum += b.at(j) * std::pow(std::abs(j), 2 * D + s);
        if (!((D % 2 ? -1.0 : 1.0) * sum < 0.0)) {
          pass = false;
          break;
        }
      }
    }
  }
  report(9, "sign of (-1)^D sum a^{2*}_j |j|^{2D+s} on zoo + 200 random sequences", pass);
}

void criterion_10() {
  // exact annihilation of low-degree polynomial drift
  SimConfig config;
  config.model = make_exponential(3.0);
  config.n = 150;
  config.alpha = 1.0;
  config.seed = 8;
  PathSample p = sample_paths(config, 1).front();
  VariationSequence a3 = elementary(3);
  double plain = estimate_C(p, a3, 0, 1.0).C_hat;
  PathSample shifted = p;
  for (int j = 0; j < p.n(); ++j) {
    double t = (j + 1) * p.delta;
    shifted.values[static_cast<std::size_t>(j)] += 11.0 - 6.0 * t + 4.0 * t * t;
  }
  double drifted = estimate_C(shifted, a3, 0, 1.0).C_hat;
  bool annihilated = std::abs(drifted - plain) <= 1e-9 * std::abs(plain);

  // cubic drift with an order-2 sequence: the deterministic bias term
  // E[C_drift - C_plain] = C_hat of the pure drift path, decreasing in n
  auto pure_drift_bias = [](int n) {
    PathSample f;
    f.delta = 1.0 / n;
    f.values.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      double t = (j + 1) * f.delta;
      f.values[static_cast<std::size_t>(j)] = t * t * t;
    }
    return estimate_C(f, elementary(2), 0, 1.0).C_hat;
  };
  double b100 = pure_drift_bias(100), b400 = pure_drift_bias(400);
  bool shrinking = b400 < b100;
  report(10, "polynomial drift annihilation and vanishing cubic-drift bias",
         annihilated && shrinking,
         "bias(n=100) = " + format_double(b100) + ", bias(n=400) = " + format_double(b400));
}

void criterion_11() {
  const int reps = 200, nx = 64, ny = 64;
  const double theta = 5.0, step = 1.0 / 32;
  std::vector<double> err1, err2;
  for (int r = 0; r < reps; ++r) {
    Grid2D g = simulate_separable({1.0, theta, theta, 0.0}, nx, ny, step, step,
                                  9000 + static_cast<std::uint64_t>(r));
    Separable2DEstimate est = estimate_separable(g);
    err1.push_back(std::abs(est.theta1_hat - theta) / theta);
    err2.push_back(std::abs(est.theta2_hat - theta) / theta);
  }
  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
    return v[v.size() / 2];
  };
  double med1 = median(err1), med2 = median(err2);

  Grid2D g = simulate_separable({2.0, 4.0, 7.0, 0.5}, 20, 12, 0.05, 0.08, 5);
  Separable2DEstimate base = estimate_separable(g);
  Separable2DEstimate swapped = estimate_separable(g.transposed());
  bool invariant = swapped.C1_hat == base.C2_hat && swapped.C2_hat == base.C1_hat;
  Grid2D scaled = g;
  scaled.values *= 2.0;
  Separable2DEstimate sc = estimate_separable(scaled);
  invariant = invariant && std::abs(sc.C1_hat - 4.0 * base.C1_hat) <= 1e-9 * sc.C1_hat &&
              std::abs(sc.theta1_hat - base.theta1_hat) <= 1e-9 * base.theta1_hat;

  report(11, "2D synthetic recovery and invariances",
         med1 < 0.15 && med2 < 0.15 && invariant,
         "median relative theta errors " + format_double(med1) + ", " + format_double(med2));
}

void criterion_12() {
  char dir_template[] = "/tmp/qvar_accept_XXXXXX";
  const char* dir_c = mkdtemp(dir_template);
  if (!dir_c) {
    report(12, "seeded CLI runs are byte-identical", false, "mkdtemp failed");
    return;
  }
  std::string dir(dir_c);
  bool pass = true;
  std::string detail;

  std::string sim_args = "simulate --model '{\"model\":\"exp\",\"C\":3}' --n 100 --alpha 1 --N 8 "
                         "--seed 17 --out ";
  setenv("QVAR_THREADS", "1", 1);
  pass = pass && run_cli(sim_args + dir + "/a.csv") == 0;
  setenv("QVAR_THREADS", "4", 1);
  pass = pass && run_cli(sim_args + dir + "/b.csv") == 0;
  if (slurp(dir + "/a.csv") != slurp(dir + "/b.csv")) {
    pass = false;
    detail += "simulate outputs differ; ";
  }

  std::ofstream(dir + "/study.json")
      << R"({"study":"histogram","models":[{"model":"exp","C":3}],"n":[50],"N":32,"seed":6})";
  setenv("QVAR_THREADS", "2", 1);
  pass = pass && run_cli("mc-study --config " + dir + "/study.json --out " + dir + "/c1.csv") == 0;
  setenv("QVAR_THREADS", "5", 1);
  pass = pass && run_cli("mc-study --config " + dir + "/study.json --out " + dir + "/c2.csv") == 0;
  unsetenv("QVAR_THREADS");
  if (slurp(dir + "/c1.csv") != slurp(dir + "/c2.csv")) {
    pass = false;
    detail += "mc-study outputs differ";
  }
  report(12, "seeded CLI runs are byte-identical across thread counts", pass, detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all 12 criteria passed\n");
  return 0;
}
