#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qvar/estimator.hpp"
#include "qvar/models.hpp"
#include "qvar/sequence.hpp"

namespace qvar {

enum class StudyKind { Histogram, VarianceCurve, AggregationCurve, DriftRobustness };

std::string study_kind_name(StudyKind kind);
StudyKind study_kind_from_name(const std::string& name);

/// Shared configuration for the batch Monte Carlo studies. Curve studies
/// ignore the model/replicate fields; MC studies ignore the s-grid.
struct StudyConfig {
  StudyKind kind = StudyKind::Histogram;
  std::vector<ModelSpec> models;
  std::vector<std::vector<std::string>> sequence_sets;  // labels or coefficient lists
  std::vector<int> n_values;
  int replicates = 2000;
  int D = 0;
  std::vector<double> s_grid;
  std::uint64_t seed = 0;
  DenominatorMode mode = DenominatorMode::PaperN;
  DriftSpec drift;
};

StudyConfig study_config_from_json(const nlohmann::json& j);
nlohmann::json study_config_to_json(const StudyConfig& config);

/// Replicated estimation under each (model, n); one sample row per
/// replicate plus a summary row per block with empirical and theoretical
/// moments. Deterministic for a fixed config, independent of parallelism.
std::string histogram_study(const StudyConfig& config);

/// Rows (sequence, s, vtilde) over the s-grid, plus the Cramer-Rao
/// reference rows vtilde = 2. Sequences with M = D+1 are skipped above
/// s = 1.4 (no Gaussian limit near the boundary).
std::string variance_curve_study(const std::vector<VariationSequence>& sequences, int D,
                                 const std::vector<double>& s_grid);

/// Per s: the individual vtilde of every sequence in each set and the
/// aggregated vtilde of the set. Near-singular covariance matrices are
/// flagged in the row rather than aborting the sweep.
std::string aggregation_curve_study(const std::vector<std::vector<VariationSequence>>& sets, int D,
                                    const std::vector<double>& s_grid);

/// Paired runs on identical Gaussian draws with and without the drift;
/// reports per-replicate |delta C_hat| and per-block bias summaries.
std::string drift_robustness_study(const StudyConfig& config);

/// Dispatch on config.kind.
std::string run_study(const StudyConfig& config);

}  // namespace qvar
