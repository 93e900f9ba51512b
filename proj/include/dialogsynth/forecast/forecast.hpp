#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialogsynth/corpus/types.hpp"
#include "dialogsynth/extract/concept_set.hpp"

namespace dialogsynth::forecast {

using LabelSet = std::set<std::string>;

struct TurnPrediction {
  int t = 0;
  std::map<std::string, double> probs;
};

struct PredictionTrajectory {
  std::string dialogue_id;
  std::vector<TurnPrediction> turns;

  /// Throws PreconditionError on non-increasing turns or probabilities outside [0,1].
  void validate() const;
};

struct CommitPolicy {
  double tau = 0.5;
  void validate() const;
};

struct CommitDecision {
  LabelSet committed;
  std::string top_label;
  double top_confidence = 0.0;

  bool deferred() const { return committed.empty(); }
};

CommitDecision commit(const TurnPrediction& tp, const CommitPolicy& policy);

double earliness(int t_pred, int T);
double edit_overheads(std::span<const std::string> sequence, const LabelSet& gt);

struct TrajectoryMetrics {
  std::optional<std::string> first_label;
  std::optional<double> first_conf;
  std::optional<std::string> last_label;
  std::optional<double> last_conf;
  bool first_correct = false;
  bool last_correct = false;
  double earliness_first = 0.0;
  double earliness_first_correct = 0.0;
  std::optional<double> edit_overhead;
  bool committed = false;

  bool operator==(const TrajectoryMetrics&) const = default;
};

/// T is the turn index of the last prediction.
TrajectoryMetrics evaluate_trajectory(const PredictionTrajectory& traj, const LabelSet& gt, const CommitPolicy& policy);

/// Parallel over trajectories; `gts[i]` belongs to `trajs[i]`.
std::vector<TrajectoryMetrics> evaluate_trajectories(std::span<const PredictionTrajectory> trajs,
                                                     std::span<const LabelSet> gts, const CommitPolicy& policy);
std::vector<TrajectoryMetrics> evaluate_trajectories_serial(std::span<const PredictionTrajectory> trajs,
                                                            std::span<const LabelSet> gts, const CommitPolicy& policy);

/// Percentages. Committed-only fields are absent when nothing committed.
struct ForecastSummary {
  std::size_t trajectories = 0;
  std::size_t committed = 0;
  std::optional<double> first_accuracy;
  std::optional<double> last_accuracy;
  std::optional<double> first_confidence;
  std::optional<double> last_confidence;
  std::optional<double> earliness_first;
  std::optional<double> earliness_first_correct;
  std::optional<double> edit_overhead;
  double non_commit_rate = 0.0;

  nlohmann::json to_json() const;
};

ForecastSummary aggregate(std::span<const TrajectoryMetrics> metrics);

nlohmann::json to_json(const TrajectoryMetrics& m);
PredictionTrajectory trajectory_from_json(const nlohmann::json& j);
/// Newline-delimited trajectories; errors carry the 1-based line number.
std::vector<PredictionTrajectory> parse_trajectories(std::string_view jsonl);

struct TrainingExample {
  std::string input;
  std::vector<std::string> labels;

  nlohmann::json to_json() const { return {{"input", input}, {"labels", labels}}; }
};

struct UnrollConfig {
  int K = 5;
  void validate() const;
};

TrainingExample build_static_example(const corpus::Dialogue& d);
/// Longest prefix first: u_{1:T}, u_{1:T-1}, ... for min(K, T) examples.
std::vector<TrainingExample> build_dynamic_examples(const corpus::Dialogue& d, const UnrollConfig& cfg = {});

struct InjectionConfig {
  std::size_t n_fp = 10;
  std::size_t n_fn = 10;
  /// Each substitution removes one concept and inserts an unrelated one.
  std::size_t n_substitute = 0;
  std::uint64_t seed = 0;
  /// Surfaces to draw hallucinations from; synthetic tokens when empty.
  std::vector<std::string> distractors;
};

struct Injection {
  extract::ConceptSet corrupted;
  std::set<std::string> gt_fp;
  std::set<std::string> gt_fn;
};

Injection inject_concept_errors(const extract::ConceptSet& cs, const InjectionConfig& cfg);

}  // namespace dialogsynth::forecast
