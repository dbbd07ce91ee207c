// qvar: command-line front end for quadratic-variation scale estimation.
// All numerics live in the library; this layer only parses arguments,
// moves files, and serializes results.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qvar/estimator.hpp"
#include "qvar/experiments.hpp"
#include "qvar/fisher.hpp"
#include "qvar/grid2d.hpp"
#include "qvar/models.hpp"
#include "qvar/sequence.hpp"
#include "qvar/simulate.hpp"
#include "qvar/util.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using nlohmann::json;
using namespace qvar;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(clock::now() - start_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_ = clock::now();
};

json make_manifest(const std::string& command, const json& config, std::uint64_t seed,
                   const std::vector<std::string>& warnings, double wall_time) {
  json m;
  m["command"] = command;
  m["config"] = config;
  m["seed"] = seed;
  m["version"] = kVersion;
  m["wall_time_s"] = wall_time;
  m["warnings"] = warnings;
  return m;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << content;
}

void write_manifest(const std::string& out_path, const json& manifest) {
  write_file(out_path + ".manifest.json", manifest.dump(2) + "\n");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> split_list(const std::string& text) {
  // Semicolons separate sequences so that explicit coefficient lists can
  // keep their internal commas: "elem1;1,-2,1".
  char sep = text.find(';') != std::string::npos ? ';' : ',';
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string paths_to_csv(const std::vector<PathSample>& paths, bool matrix) {
  std::ostringstream out;
  if (!matrix) {
    const PathSample& p = paths.front();
    out << "index,t,x\n";
    for (int j = 0; j < p.n(); ++j)
      out << (j + 1) << ',' << format_double((j + 1) * p.delta) << ','
          << format_double(p.values[static_cast<std::size_t>(j)]) << '\n';
    return out.str();
  }
  out << "# n=" << paths.front().n() << " delta=" << format_double(paths.front().delta) << '\n';
  for (const auto& p : paths) {
    for (int j = 0; j < p.n(); ++j) {
      if (j) out << ',';
      out << format_double(p.values[static_cast<std::size_t>(j)]);
    }
    out << '\n';
  }
  return out.str();
}

PathSample read_path_csv(const std::string& path, int row, std::optional<double> delta_override) {
  std::istringstream in(read_file(path));
  std::string line;
  double header_delta = 0.0;
  std::vector<std::string> data_lines;
  bool indexed_format = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find("delta=");
      if (pos != std::string::npos) header_delta = std::stod(line.substr(pos + 6));
      continue;
    }
    if (line.rfind("index,", 0) == 0) {
      indexed_format = true;
      continue;
    }
    data_lines.push_back(line);
  }
  if (data_lines.empty()) throw std::invalid_argument("path file has no data rows: " + path);
  PathSample sample;
  if (indexed_format) {
    std::vector<double> ts;
    for (const auto& l : data_lines) {
      std::istringstream cells(l);
      std::string idx, t, x;
      if (!std::getline(cells, idx, ',') || !std::getline(cells, t, ',') ||
          !std::getline(cells, x, ','))
        throw std::invalid_argument("malformed index,t,x row: " + l);
      ts.push_back(std::stod(t));
      sample.values.push_back(std::stod(x));
    }
    sample.delta = ts.size() > 1 ? ts[1] - ts[0] : ts[0];
  } else {
    if (row < 0 || row >= static_cast<int>(data_lines.size()))
      throw std::invalid_argument("replicate row out of range: " + std::to_string(row));
    std::istringstream cells(data_lines[static_cast<std::size_t>(row)]);
    std::string cell;
    while (std::getline(cells, cell, ',')) sample.values.push_back(std::stod(cell));
    sample.delta = header_delta;
  }
  if (delta_override) sample.delta = *delta_override;
  if (!(sample.delta > 0))
    throw std::invalid_argument("path spacing unknown: pass --delta or use a file with a header");
  return sample;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variogram scale estimation via quadratic a-variations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // --- simulate -----------------------------------------------------------
  auto* sim_cmd = app.add_subcommand("simulate", "Draw exact Gaussian paths");
  std::string sim_model_json, sim_drift_json, sim_out, sim_format = "auto";
  int sim_n = 0, sim_N = 1;
  double sim_delta = 0.0;
  std::optional<double> sim_alpha;
  std::uint64_t sim_seed = 0;
  sim_cmd->add_option("--model", sim_model_json, "Model JSON")->required();
  sim_cmd->add_option("--n", sim_n, "Observations per path")->required();
  sim_cmd->add_option("--delta", sim_delta, "Grid spacing");
  sim_cmd->add_option("--alpha", sim_alpha, "Mesh exponent: delta = n^-alpha");
  sim_cmd->add_option("--N", sim_N, "Number of replicates");
  sim_cmd->add_option("--drift", sim_drift_json, "Drift JSON");
  sim_cmd->add_option("--seed", sim_seed, "RNG seed");
  sim_cmd->add_option("--out", sim_out, "Output CSV path")->required();
  sim_cmd->add_option("--format", sim_format, "auto|path|matrix")
      ->check(CLI::IsMember({"auto", "path", "matrix"}));

  // --- estimate -----------------------------------------------------------
  auto* est_cmd = app.add_subcommand("estimate", "Estimate C from a path file");
  std::string est_paths, est_sequences = "elem1", est_denominator = "paper-n";
  int est_row = 0, est_D = 0;
  double est_s = 1.0, est_ci = 0.95;
  std::optional<double> est_delta;
  bool est_aggregate = false;
  est_cmd->add_option("--paths", est_paths, "Path CSV (index,t,x or matrix)")->required();
  est_cmd->add_option("--row", est_row, "Replicate row in a matrix file");
  est_cmd->add_option("--sequences", est_sequences, "Sequence spec(s), ','/';' separated");
  est_cmd->add_option("--D", est_D, "Differentiability order");
  est_cmd->add_option("--s", est_s, "Smoothness exponent");
  est_cmd->add_option("--delta", est_delta, "Override grid spacing");
  est_cmd->add_option("--denominator", est_denominator, "paper-n|unbiased-nprime");
  est_cmd->add_option("--ci-level", est_ci, "Confidence level");
  est_cmd->add_flag("--aggregate", est_aggregate, "Optimally aggregate the sequences");

  // --- vtilde -------------------------------------------------------------
  auto* vt_cmd = app.add_subcommand("vtilde", "Normalized asymptotic variance");
  std::string vt_sequence = "elem1";
  int vt_D = 0;
  double vt_s = 1.0;
  vt_cmd->add_option("--sequence", vt_sequence, "Sequence spec")->required();
  vt_cmd->add_option("--D", vt_D, "Differentiability order");
  vt_cmd->add_option("--s", vt_s, "Smoothness exponent")->required();

  // --- aggregate ----------------------------------------------------------
  auto* agg_cmd = app.add_subcommand("aggregate", "Covariance matrix and optimal weights");
  std::string agg_sequences;
  int agg_D = 0;
  double agg_s = 1.0;
  agg_cmd->add_option("--sequences", agg_sequences, "Sequence specs")->required();
  agg_cmd->add_option("--D", agg_D, "Differentiability order");
  agg_cmd->add_option("--s", agg_s, "Smoothness exponent")->required();

  // --- fisher -------------------------------------------------------------
  auto* fi_cmd = app.add_subcommand("fisher", "Fisher information / Cramer-Rao bound");
  std::string fi_family = "fbm";
  double fi_s = 1.0, fi_C = 1.0, fi_delta = 0.0;
  int fi_n = 2, fi_D = 0;
  fi_cmd->add_option("--family", fi_family, "fbm|slepian")
      ->check(CLI::IsMember({"fbm", "slepian"}));
  fi_cmd->add_option("--s", fi_s, "Smoothness exponent")->required();
  fi_cmd->add_option("--C", fi_C, "Scale parameter")->required();
  fi_cmd->add_option("--n", fi_n, "Number of observations")->required();
  fi_cmd->add_option("--D", fi_D, "Differentiability order");
  fi_cmd->add_option("--delta", fi_delta, "Spacing (default infill 1/n)");

  // --- mc-study / curve-study ----------------------------------------------
  auto* mc_cmd = app.add_subcommand("mc-study", "Monte Carlo study from a config file");
  auto* cs_cmd = app.add_subcommand("curve-study", "Variance/aggregation curves from a config file");
  std::string mc_config, mc_out, cs_config, cs_out;
  bool mc_full = false;
  mc_cmd->add_option("--config", mc_config, "StudyConfig JSON file")->required();
  mc_cmd->add_option("--out", mc_out, "Output CSV path")->required();
  mc_cmd->add_flag("--full", mc_full, "Use 10000 replicates");
  cs_cmd->add_option("--config", cs_config, "StudyConfig JSON file")->required();
  cs_cmd->add_option("--out", cs_out, "Output CSV path")->required();

  // --- simulate2d / estimate2d ----------------------------------------------
  auto* s2_cmd = app.add_subcommand("simulate2d", "Draw a separable exponential grid");
  double s2_sigma2 = 1.0, s2_theta1 = 1.0, s2_theta2 = 1.0, s2_mu = 0.0;
  double s2_step_x = 0.0, s2_step_y = 0.0;
  int s2_nx = 0, s2_ny = 0;
  std::uint64_t s2_seed = 0;
  std::string s2_out;
  s2_cmd->add_option("--sigma2", s2_sigma2, "Variance");
  s2_cmd->add_option("--theta1", s2_theta1, "Rate along x")->required();
  s2_cmd->add_option("--theta2", s2_theta2, "Rate along y")->required();
  s2_cmd->add_option("--mu", s2_mu, "Mean");
  s2_cmd->add_option("--nx", s2_nx, "Grid points along x")->required();
  s2_cmd->add_option("--ny", s2_ny, "Grid points along y")->required();
  s2_cmd->add_option("--step-x", s2_step_x, "Grid step along x")->required();
  s2_cmd->add_option("--step-y", s2_step_y, "Grid step along y")->required();
  s2_cmd->add_option("--seed", s2_seed, "RNG seed");
  s2_cmd->add_option("--out", s2_out, "Output CSV path")->required();

  auto* e2_cmd = app.add_subcommand("estimate2d", "Four-step separable estimation");
  std::string e2_grid;
  double e2_step_x = 0.0, e2_step_y = 0.0;
  e2_cmd->add_option("--grid", e2_grid, "Grid CSV")->required();
  e2_cmd->add_option("--step-x", e2_step_x, "Grid step along x")->required();
  e2_cmd->add_option("--step-y", e2_step_y, "Grid step along y")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Timer timer;
  try {
    if (*sim_cmd) {
      SimConfig config;
      config.model = model_from_json(json::parse(sim_model_json));
      config.n = sim_n;
      config.delta = sim_delta;
      config.alpha = sim_alpha;
      if (!sim_drift_json.empty()) config.drift = drift_from_json(json::parse(sim_drift_json));
      config.seed = sim_seed;
      std::vector<std::string> warnings;
      std::vector<PathSample> paths = sample_paths(config, sim_N, &warnings, thread_budget());
      bool matrix = sim_format == "matrix" || (sim_format == "auto" && sim_N > 1);
      write_file(sim_out, paths_to_csv(paths, matrix));
      json config_echo = {{"model", model_to_json(config.model)},
                          {"n", sim_n},
                          {"delta", paths.front().delta},
                          {"N", sim_N},
                          {"format", matrix ? "matrix" : "path"},
                          {"out", sim_out}};
      if (sim_alpha) config_echo["alpha"] = *sim_alpha;
      if (!config.drift.empty()) config_echo["drift"] = drift_to_json(config.drift);
      write_manifest(sim_out, make_manifest("simulate", config_echo, sim_seed, warnings,
                                            timer.seconds()));
    } else if (*est_cmd) {
      PathSample path = read_path_csv(est_paths, est_row, est_delta);
      std::vector<VariationSequence> sequences;
      for (const auto& spec : split_list(est_sequences)) sequences.push_back(parse_sequence(spec));
      if (sequences.empty()) throw std::invalid_argument("no sequences given");
      DenominatorMode mode = denominator_mode_from_name(est_denominator);
      json out;
      if (est_aggregate) {
        EstimateReport report = estimate_C_aggregated(path, sequences, est_D, est_s, mode, est_ci);
        out = report_to_json(report);
        AggregationPlan plan = make_aggregation_plan(sequences, est_D, est_s);
        out["lambda"] = std::vector<double>(plan.lambda.data(), plan.lambda.data() + plan.lambda.size());
        out["vtilde_agg"] = plan.vtilde_agg;
        out["sequences"] = plan.labels;
      } else {
        EstimateReport report = estimate_C(path, sequences.front(), est_D, est_s, mode, est_ci);
        out = report_to_json(report);
        out["sequence"] = sequences.front().label();
      }
      json config_echo = {{"paths", est_paths}, {"row", est_row}, {"sequences", est_sequences},
                          {"D", est_D},         {"s", est_s},     {"denominator", est_denominator},
                          {"aggregate", est_aggregate}};
      std::vector<std::string> warnings;
      if (out.contains("warning") && !out["warning"].get<std::string>().empty())
        warnings.push_back(out["warning"].get<std::string>());
      out["manifest"] = make_manifest("estimate", config_echo, 0, warnings, timer.seconds());
      std::cout << out.dump(2) << '\n';
    } else if (*vt_cmd) {
      VariationSequence a = parse_sequence(vt_sequence);
      double v = normalized_asymptotic_variance(a, vt_D, vt_s);
      json out = {{"sequence", a.label()}, {"D", vt_D}, {"s", vt_s}, {"vtilde", v}};
      out["manifest"] = make_manifest("vtilde", {{"sequence", vt_sequence}, {"D", vt_D}, {"s", vt_s}},
                                      0, {}, timer.seconds());
      std::cout << out.dump(2) << '\n';
    } else if (*agg_cmd) {
      std::vector<VariationSequence> sequences;
      for (const auto& spec : split_list(agg_sequences)) sequences.push_back(parse_sequence(spec));
      AggregationPlan plan = make_aggregation_plan(sequences, agg_D, agg_s);
      json R = json::array();
      for (int i = 0; i < plan.R.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < plan.R.cols(); ++j) row.push_back(plan.R(i, j));
        R.push_back(row);
      }
      json out = {{"sequences", plan.labels},
                  {"R", R},
                  {"lambda", std::vector<double>(plan.lambda.data(),
                                                 plan.lambda.data() + plan.lambda.size())},
                  {"vtilde_agg", plan.vtilde_agg}};
      out["manifest"] = make_manifest(
          "aggregate", {{"sequences", agg_sequences}, {"D", agg_D}, {"s", agg_s}}, 0, {},
          timer.seconds());
      std::cout << out.dump(2) << '\n';
    } else if (*fi_cmd) {
      IncrementFamily family;
      family.kind = fi_family == "fbm" ? IncrementFamilyKind::FbmIntegrated
                                       : IncrementFamilyKind::SlepianIntegrated;
      family.D = fi_D;
      family.s = fi_s;
      family.n = fi_n;
      family.delta = fi_delta;
      double info = fisher_information(family, fi_C);
      json out = {{"family", fi_family}, {"s", fi_s},      {"C", fi_C},
                  {"n", fi_n},           {"I_C", info},    {"CR_bound", 1.0 / info}};
      out["manifest"] = make_manifest(
          "fisher", {{"family", fi_family}, {"s", fi_s}, {"C", fi_C}, {"n", fi_n}}, 0, {},
          timer.seconds());
      std::cout << out.dump(2) << '\n';
    } else if (*mc_cmd || *cs_cmd) {
      const bool is_mc = static_cast<bool>(*mc_cmd);
      const std::string& config_path = is_mc ? mc_config : cs_config;
      const std::string& out_path = is_mc ? mc_out : cs_out;
      StudyConfig config = study_config_from_json(json::parse(read_file(config_path)));
      bool curve = config.kind == StudyKind::VarianceCurve ||
                   config.kind == StudyKind::AggregationCurve;
      if (is_mc == curve)
        throw std::invalid_argument(std::string(is_mc ? "mc-study" : "curve-study") +
                                    " cannot run a " + study_kind_name(config.kind) + " config");
      if (is_mc && mc_full) config.replicates = 10000;
      write_file(out_path, run_study(config));
      write_manifest(out_path, make_manifest(is_mc ? "mc-study" : "curve-study",
                                             study_config_to_json(config), config.seed, {},
                                             timer.seconds()));
    } else if (*s2_cmd) {
      SeparableExpModel model{s2_sigma2, s2_theta1, s2_theta2, s2_mu};
      Grid2D grid = simulate_separable(model, s2_nx, s2_ny, s2_step_x, s2_step_y, s2_seed);
      write_file(s2_out, grid_to_csv(grid));
      json config_echo = {{"sigma2", s2_sigma2}, {"theta1", s2_theta1}, {"theta2", s2_theta2},
                          {"mu", s2_mu},         {"nx", s2_nx},         {"ny", s2_ny},
                          {"step_x", s2_step_x}, {"step_y", s2_step_y}, {"out", s2_out}};
      write_manifest(s2_out, make_manifest("simulate2d", config_echo, s2_seed, {}, timer.seconds()));
    } else if (*e2_cmd) {
      Grid2D grid = ingest_grid(e2_grid, e2_step_x, e2_step_y);
      Separable2DEstimate est = estimate_separable(grid);
      json out = estimate_to_json(est);
      std::vector<std::string> warnings;
      if (!est.warning.empty()) warnings.push_back(est.warning);
      out["manifest"] = make_manifest(
          "estimate2d", {{"grid", e2_grid}, {"step_x", e2_step_x}, {"step_y", e2_step_y}}, 0,
          warnings, timer.seconds());
      std::cout << out.dump(2) << '\n';
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
