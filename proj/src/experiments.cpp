#include "qvar/experiments.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qvar/simulate.hpp"
#include "qvar/util.hpp"

namespace qvar {

namespace {

std::vector<VariationSequence> parse_set(const std::vector<std::string>& specs) {
  std::vector<VariationSequence> out;
  out.reserve(specs.size());
  for (const auto& spec : specs) out.push_back(parse_sequence(spec));
  return out;
}

// Sample mean and unbiased sample variance.
std::pair<double, double> mean_var(const std::vector<double>& xs) {
  const auto n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double var = 0.0;
  if (xs.size() > 1) {
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= (n - 1.0);
  }
  return {mean, var};
}

std::vector<double> estimate_block(const ModelSpec& model, const VariationSequence& a, int D,
                                   double s, int n, int N, std::uint64_t block_seed,
                                   DenominatorMode mode, const DriftSpec& drift) {
  SimConfig sim;
  sim.model = model;
  sim.n = n;
  sim.alpha = 1.0;  // infill grid on [0, 1]
  sim.drift = drift;
  sim.seed = block_seed;
  std::vector<PathSample> paths = sample_paths(sim, N, nullptr, thread_budget());
  std::vector<double> C_hats(paths.size());
  parallel_for(N, thread_budget(), [&](int i) {
    C_hats[static_cast<std::size_t>(i)] =
        estimate_C(paths[static_cast<std::size_t>(i)], a, D, s, mode).C_hat;
  });
  return C_hats;
}

}  // namespace

std::string study_kind_name(StudyKind kind) {
  switch (kind) {
    case StudyKind::Histogram: return "histogram";
    case StudyKind::VarianceCurve: return "variance-curve";
    case StudyKind::AggregationCurve: return "aggregation-curve";
    case StudyKind::DriftRobustness: return "drift-robustness";
  }
  throw std::logic_error("study_kind_name: unreachable");
}

StudyKind study_kind_from_name(const std::string& name) {
  if (name == "histogram") return StudyKind::Histogram;
  if (name == "variance-curve") return StudyKind::VarianceCurve;
  if (name == "aggregation-curve") return StudyKind::AggregationCurve;
  if (name == "drift-robustness") return StudyKind::DriftRobustness;
  throw std::invalid_argument("unknown study kind: " + name);
}

StudyConfig study_config_from_json(const nlohmann::json& j) {
  StudyConfig config;
  config.kind = study_kind_from_name(j.at("study").get<std::string>());
  if (j.contains("models"))
    for (const auto& m : j.at("models")) config.models.push_back(model_from_json(m));
  if (j.contains("sequences")) {
    const auto& seqs = j.at("sequences");
    if (!seqs.empty() && seqs.front().is_array()) {
      for (const auto& set : seqs) config.sequence_sets.push_back(set.get<std::vector<std::string>>());
    } else {
      config.sequence_sets.push_back(seqs.get<std::vector<std::string>>());
    }
  }
  if (j.contains("n")) {
    if (j.at("n").is_array())
      config.n_values = j.at("n").get<std::vector<int>>();
    else
      config.n_values = {j.at("n").get<int>()};
  }
  config.replicates = j.value("N", 2000);
  config.D = j.value("D", 0);
  if (j.contains("s_grid")) {
    const auto& g = j.at("s_grid");
    if (g.is_array()) {
      config.s_grid = g.get<std::vector<double>>();
    } else {
      double lo = g.at("min").get<double>();
      double hi = g.at("max").get<double>();
      double step = g.value("step", 0.1);
      if (!(step > 0)) throw std::invalid_argument("s_grid step must be > 0");
      for (int k = 0; lo + k * step <= hi + 1e-12; ++k) config.s_grid.push_back(lo + k * step);
    }
  }
  config.seed = j.value("seed", std::uint64_t{0});
  config.mode = denominator_mode_from_name(j.value("denominator", std::string("paper-n")));
  if (j.contains("drift")) config.drift = drift_from_json(j.at("drift"));
  if (config.replicates < 1) throw std::invalid_argument("study: N must be >= 1");
  for (double s : config.s_grid)
    if (!(s > 0 && s < 2)) throw std::invalid_argument("study: s grid must lie in (0,2)");
  return config;
}

nlohmann::json study_config_to_json(const StudyConfig& config) {
  nlohmann::json j;
  j["study"] = study_kind_name(config.kind);
  j["models"] = nlohmann::json::array();
  for (const auto& m : config.models) j["models"].push_back(model_to_json(m));
  j["sequences"] = config.sequence_sets;
  j["n"] = config.n_values;
  j["N"] = config.replicates;
  j["D"] = config.D;
  j["s_grid"] = config.s_grid;
  j["seed"] = config.seed;
  j["denominator"] = denominator_mode_name(config.mode);
  if (!config.drift.empty()) j["drift"] = drift_to_json(config.drift);
  return j;
}

std::string histogram_study(const StudyConfig& config) {
  if (config.models.empty() || config.n_values.empty())
    throw std::invalid_argument("histogram study needs models and n values");
  std::ostringstream out;
  out << "# histogram study: per-replicate estimates and per-block moments\n"
      << "# sample rows:  kind,model,n,replicate,C_hat\n"
      << "# summary rows: kind,model,n,,,emp_mean,emp_var,theo_mean,theo_var\n"
      << "kind,model,n,replicate,C_hat,emp_mean,emp_var,theo_mean,theo_var\n";
  std::uint64_t block = 0;
  for (const auto& model : config.models) {
    LocalBehavior local = local_behavior(model);
    VariationSequence a = elementary(local.D + 1);
    CltCheck check = validate_clt(a, local.D, local.s);
    if (!check.valid)
      throw std::invalid_argument("histogram study: " + model.name() + ": " + check.diagnostic);
    double vtilde = normalized_asymptotic_variance(a, local.D, local.s);
    for (int n : config.n_values) {
      std::vector<double> C_hats = estimate_block(model, a, local.D, local.s, n,
                                                  config.replicates, derive_seed(config.seed, block++),
                                                  config.mode, DriftSpec{});
      for (std::size_t r = 0; r < C_hats.size(); ++r)
        out << "sample," << model.name() << ',' << n << ',' << r << ','
            << format_double(C_hats[r]) << ",,,,\n";
      auto [mean, var] = mean_var(C_hats);
      out << "summary," << model.name() << ',' << n << ",,," << format_double(mean) << ','
          << format_double(var) << ',' << format_double(local.C) << ','
          << format_double(local.C * local.C * vtilde / n) << '\n';
    }
  }
  return out.str();
}

std::string variance_curve_study(const std::vector<VariationSequence>& sequences, int D,
                                 const std::vector<double>& s_grid) {
  std::ostringstream out;
  out << "# normalized asymptotic variance vtilde over the s grid\n"
      << "sequence,s,vtilde\n";
  for (const auto& a : sequences) {
    for (double s : s_grid) {
      if (!validate_clt(a, D, s).valid) continue;  // M = D+1 curves stop at s <= 1.4
      out << a.label() << ',' << format_double(s) << ','
          << format_double(normalized_asymptotic_variance(a, D, s)) << '\n';
    }
  }
  for (double s : s_grid) out << "CR," << format_double(s) << ",2\n";
  return out.str();
}

std::string aggregation_curve_study(const std::vector<std::vector<VariationSequence>>& sets, int D,
                                    const std::vector<double>& s_grid) {
  std::ostringstream out;
  out << "# individual vtilde values and the aggregated vtilde per sequence set\n"
      << "kind,set,sequence,s,vtilde,note\n";
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const auto& set = sets[k];
    std::string set_name;
    for (const auto& a : set) set_name += (set_name.empty() ? "" : "+") + a.label();
    for (double s : s_grid) {
      bool all_valid = true;
      for (const auto& a : set)
        if (!validate_clt(a, D, s).valid) all_valid = false;
      if (!all_valid) continue;
      for (const auto& a : set)
        out << "individual," << set_name << ',' << a.label() << ',' << format_double(s) << ','
            << format_double(normalized_asymptotic_variance(a, D, s)) << ",\n";
      try {
        AggregationPlan plan = make_aggregation_plan(set, D, s);
        out << "aggregate," << set_name << ",," << format_double(s) << ','
            << format_double(plan.vtilde_agg) << ",\n";
      } catch (const std::exception& e) {
        out << "aggregate," << set_name << ",," << format_double(s) << ",,"
            << "singular: " << e.what() << '\n';
      }
    }
  }
  return out.str();
}

std::string drift_robustness_study(const StudyConfig& config) {
  if (config.models.empty() || config.n_values.empty())
    throw std::invalid_argument("drift study needs models and n values");
  VariationSequence a = config.sequence_sets.empty() || config.sequence_sets.front().empty()
                            ? elementary(2)
                            : parse_sequence(config.sequence_sets.front().front());
  std::ostringstream out;
  out << "# drift robustness: paired estimates on identical Gaussian draws\n"
      << "# summary columns: mean_bias_plain, mean_bias_drift, max |dC|/C_plain\n"
      << "kind,model,n,replicate,C_plain,C_drift,abs_delta,bias_plain,bias_drift,max_rel_delta\n";
  std::uint64_t block = 0;
  for (const auto& model : config.models) {
    LocalBehavior local = local_behavior(model);
    for (int n : config.n_values) {
      std::uint64_t block_seed = derive_seed(config.seed, block++);
      SimConfig sim;
      sim.model = model;
      sim.n = n;
      sim.alpha = 1.0;
      sim.seed = block_seed;
      std::vector<PathSample> paths = sample_paths(sim, config.replicates, nullptr, thread_budget());
      std::vector<double> plain(paths.size()), drifted(paths.size());
      parallel_for(config.replicates, thread_budget(), [&](int i) {
        const PathSample& p = paths[static_cast<std::size_t>(i)];
        plain[static_cast<std::size_t>(i)] = estimate_C(p, a, local.D, local.s, config.mode).C_hat;
        PathSample shifted = p;
        for (int j = 0; j < p.n(); ++j)
          shifted.values[static_cast<std::size_t>(j)] += config.drift((j + 1) * p.delta);
        drifted[static_cast<std::size_t>(i)] =
            estimate_C(shifted, a, local.D, local.s, config.mode).C_hat;
      });
      double max_rel = 0.0;
      for (std::size_t r = 0; r < plain.size(); ++r) {
        double ad = std::abs(drifted[r] - plain[r]);
        if (plain[r] != 0.0) max_rel = std::max(max_rel, ad / std::abs(plain[r]));
        out << "sample," << model.name() << ',' << n << ',' << r << ','
            << format_double(plain[r]) << ',' << format_double(drifted[r]) << ','
            << format_double(ad) << ",,,\n";
      }
      auto [mean_plain, var_plain] = mean_var(plain);
      auto [mean_drift, var_drift] = mean_var(drifted);
      (void)var_plain;
      (void)var_drift;
      out << "summary," << model.name() << ',' << n << ",,,,,"
          << format_double(mean_plain - local.C) << ',' << format_double(mean_drift - local.C)
          << ',' << format_double(max_rel) << '\n';
    }
  }
  return out.str();
}

std::string run_study(const StudyConfig& config) {
  switch (config.kind) {
    case StudyKind::Histogram:
      return histogram_study(config);
    case StudyKind::VarianceCurve: {
      if (config.sequence_sets.empty())
        throw std::invalid_argument("variance-curve study needs sequences");
      return variance_curve_study(parse_set(config.sequence_sets.front()), config.D, config.s_grid);
    }
    case StudyKind::AggregationCurve: {
      std::vector<std::vector<VariationSequence>> sets;
      for (const auto& labels : config.sequence_sets) sets.push_back(parse_set(labels));
      return aggregation_curve_study(sets, config.D, config.s_grid);
    }
    case StudyKind::DriftRobustness:
      return drift_robustness_study(config);
  }
  throw std::logic_error("run_study: unreachable");
}

}  // namespace qvar
