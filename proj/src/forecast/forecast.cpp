#include "dialogsynth/forecast/forecast.hpp"

#include <algorithm>
#include <cmath>

#include "dialogsynth/corpus/dialogue.hpp"
#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/rng.hpp"
#include "dialogsynth/util/text.hpp"

namespace dialogsynth::forecast {

using nlohmann::json;

void PredictionTrajectory::validate() const {
  for (std::size_t i = 0; i < turns.size(); ++i) {
    if (turns[i].t < 1) throw PreconditionError(dialogue_id + ": turn index must be >= 1");
    if (i > 0 && turns[i].t <= turns[i - 1].t) {
      throw PreconditionError(dialogue_id + ": turn indices must strictly increase");
    }
    for (const auto& [label, p] : turns[i].probs) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw PreconditionError(dialogue_id + ": probability of '" + label + "' at turn " +
                                std::to_string(turns[i].t) + " is outside [0,1]");
      }
    }
  }
}

void CommitPolicy::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must lie in (0,1)");
}

CommitDecision commit(const TurnPrediction& tp, const CommitPolicy& policy) {
  CommitDecision d;
  for (const auto& [label, p] : tp.probs) {
    if (p < policy.tau) continue;
    d.committed.insert(label);
    // map iteration is lexicographic, so strict > keeps the smallest id on ties
    if (d.top_label.empty() || p > d.top_confidence) {
      d.top_label = label;
      d.top_confidence = p;
    }
  }
  return d;
}

double earliness(int t_pred, int T) {
  if (t_pred < 1 || t_pred > T) {
    throw PreconditionError("earliness needs 1 <= t_pred <= T, got t_pred=" + std::to_string(t_pred) +
                            ", T=" + std::to_string(T));
  }
  return 1.0 - static_cast<double>(t_pred) / static_cast<double>(T);
}

double edit_overheads(std::span<const std::string> seq, const LabelSet& gt) {
  if (seq.empty()) throw PreconditionError("edit overheads need a non-empty label sequence");
  std::size_t changes = 0;
  for (std::size_t i = 1; i < seq.size(); ++i) changes += seq[i] != seq[i - 1] ? 1 : 0;
  const bool first_wrong = !gt.count(seq.front());
  if (changes == 0) return first_wrong ? 1.0 : 0.0;
  const bool reached = std::any_of(seq.begin(), seq.end(), [&](const std::string& y) { return gt.count(y) > 0; });
  const std::size_t necessary = first_wrong && reached ? 1 : 0;
  return static_cast<double>(changes - necessary) / static_cast<double>(changes);
}

TrajectoryMetrics evaluate_trajectory(const PredictionTrajectory& traj, const LabelSet& gt, const CommitPolicy& policy) {
  TrajectoryMetrics m;
  if (traj.turns.empty()) return m;
  const int T = traj.turns.back().t;
  std::vector<std::string> tops;
  bool seen_correct = false;
  for (const auto& tp : traj.turns) {
    const CommitDecision d = commit(tp, policy);
    if (d.deferred()) continue;
    const bool correct = gt.count(d.top_label) > 0;
    if (!m.committed) {
      m.committed = true;
      m.first_label = d.top_label;
      m.first_conf = d.top_confidence;
      m.first_correct = correct;
      m.earliness_first = earliness(tp.t, T);
    }
    if (correct && !seen_correct) {
      seen_correct = true;
      m.earliness_first_correct = earliness(tp.t, T);
    }
    m.last_label = d.top_label;
    m.last_conf = d.top_confidence;
    m.last_correct = correct;
    tops.push_back(d.top_label);
  }
  if (m.committed) m.edit_overhead = edit_overheads(tops, gt);
  return m;
}

std::vector<TrajectoryMetrics> evaluate_trajectories_serial(std::span<const PredictionTrajectory> trajs,
                                                            std::span<const LabelSet> gts, const CommitPolicy& policy) {
  if (trajs.size() != gts.size()) throw PreconditionError("one ground-truth set is needed per trajectory");
  std::vector<TrajectoryMetrics> out;
  out.reserve(trajs.size());
  for (std::size_t i = 0; i < trajs.size(); ++i) out.push_back(evaluate_trajectory(trajs[i], gts[i], policy));
  return out;
}

std::vector<TrajectoryMetrics> evaluate_trajectories(std::span<const PredictionTrajectory> trajs,
                                                     std::span<const LabelSet> gts, const CommitPolicy& policy) {
  if (trajs.size() != gts.size()) throw PreconditionError("one ground-truth set is needed per trajectory");
  std::vector<TrajectoryMetrics> out(trajs.size());
  const auto n = static_cast<std::ptrdiff_t>(trajs.size());
#pragma omp parallel for schedule(dynamic, 16) if (n > 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = evaluate_trajectory(trajs[k], gts[k], policy);
  }
  return out;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json ForecastSummary::to_json() const {
  return {{"trajectories", trajectories},
          {"committed", committed},
          {"first_accuracy", opt(first_accuracy)},
          {"last_accuracy", opt(last_accuracy)},
          {"first_confidence", opt(first_confidence)},
          {"last_confidence", opt(last_confidence)},
          {"earliness_first", opt(earliness_first)},
          {"earliness_first_correct", opt(earliness_first_correct)},
          {"edit_overhead", opt(edit_overhead)},
          {"non_commit_rate", non_commit_rate}};
}

ForecastSummary aggregate(std::span<const TrajectoryMetrics> metrics) {
  if (metrics.empty()) throw PreconditionError("cannot aggregate an empty metric list");
  ForecastSummary s;
  s.trajectories = metrics.size();
  double first_acc = 0, last_acc = 0, first_conf = 0, last_conf = 0, e1 = 0, e1c = 0, eo = 0;
  for (const auto& m : metrics) {
    if (!m.committed) continue;
    ++s.committed;
    first_acc += m.first_correct ? 1.0 : 0.0;
    last_acc += m.last_correct ? 1.0 : 0.0;
    first_conf += m.first_conf.value_or(0.0);
    last_conf += m.last_conf.value_or(0.0);
    e1 += m.earliness_first;
    e1c += m.earliness_first_correct;
    eo += m.edit_overhead.value_or(0.0);
  }
  s.non_commit_rate = 100.0 * static_cast<double>(s.trajectories - s.committed) / static_cast<double>(s.trajectories);
  if (s.committed > 0) {
    const double n = static_cast<double>(s.committed);
    s.first_accuracy = 100.0 * first_acc / n;
    s.last_accuracy = 100.0 * last_acc / n;
    s.first_confidence = 100.0 * first_conf / n;
    s.last_confidence = 100.0 * last_conf / n;
    s.earliness_first = 100.0 * e1 / n;
    s.earliness_first_correct = 100.0 * e1c / n;
    s.edit_overhead = 100.0 * eo / n;
  }
  return s;
}

json to_json(const TrajectoryMetrics& m) {
  auto str = [](const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); };
  return {{"committed", m.committed},
          {"first_label", str(m.first_label)},
          {"first_conf", opt(m.first_conf)},
          {"first_correct", m.first_correct},
          {"last_label", str(m.last_label)},
          {"last_conf", opt(m.last_conf)},
          {"last_correct", m.last_correct},
          {"earliness_first", m.earliness_first},
          {"earliness_first_correct", m.earliness_first_correct},
          {"edit_overhead", opt(m.edit_overhead)}};
}

PredictionTrajectory trajectory_from_json(const json& j) {
  if (!j.is_object()) throw IngestError("$", "trajectory must be a JSON object");
  PredictionTrajectory traj;
  auto id = j.find("dialogue_id");
  if (id == j.end() || !id->is_string()) throw IngestError("dialogue_id", "required string field");
  traj.dialogue_id = id->get<std::string>();
  auto turns = j.find("turns");
  if (turns == j.end() || !turns->is_array()) throw IngestError("turns", "required array field");
  for (std::size_t i = 0; i < turns->size(); ++i) {
    const std::string path = "turns[" + std::to_string(i) + "]";
    const json& e = (*turns)[i];
    if (!e.is_object()) throw IngestError(path, "expected an object");
    TurnPrediction tp;
    auto t = e.find("t");
    if (t == e.end() || !t->is_number_integer()) throw IngestError(path + ".t", "required integer field");
    tp.t = t->get<int>();
    auto probs = e.find("probs");
    if (probs == e.end() || !probs->is_object()) throw IngestError(path + ".probs", "required object field");
    for (auto it = probs->begin(); it != probs->end(); ++it) {
      if (!it->is_number()) throw IngestError(path + ".probs." + it.key(), "expected a number");
      tp.probs[text::normalize_label(it.key())] = it->get<double>();
    }
    traj.turns.push_back(std::move(tp));
  }
  try {
    traj.validate();
  } catch (const PreconditionError& e) {
    throw IngestError("turns", e.what());
  }
  return traj;
}

std::vector<PredictionTrajectory> parse_trajectories(std::string_view jsonl) {
  std::vector<PredictionTrajectory> out;
  std::size_t number = 0;
  for (const auto& raw : text::split_lines(jsonl)) {
    ++number;
    if (text::trim(raw).empty()) continue;
    try {
      out.push_back(trajectory_from_json(json::parse(raw)));
    } catch (const json::parse_error& e) {
      throw IngestError("line " + std::to_string(number), std::string("malformed JSON: ") + e.what());
    } catch (const IngestError& e) {
      const std::string what = e.what();
      const std::string marker = "': ";
      const auto cut = what.find(marker);
      throw IngestError("line " + std::to_string(number) + ": " + e.field_path(),
                        cut == std::string::npos ? what : what.substr(cut + marker.size()));
    }
  }
  return out;
}

void UnrollConfig::validate() const {
  if (K < 1) throw ConfigError("K must be >= 1");
}

TrainingExample build_static_example(const corpus::Dialogue& d) {
  if (d.labels.empty()) throw PreconditionError("dialogue '" + d.dialogue_id + "' has no diagnosis labels");
  return {corpus::serialize_dialogue(d), d.labels};
}

std::vector<TrainingExample> build_dynamic_examples(const corpus::Dialogue& d, const UnrollConfig& cfg) {
  cfg.validate();
  if (d.labels.empty()) throw PreconditionError("dialogue '" + d.dialogue_id + "' has no diagnosis labels");
  if (d.utterances.empty()) throw PreconditionError("dialogue '" + d.dialogue_id + "' has no utterances");
  corpus::serialize_dialogue(d);
  const std::size_t T = d.utterances.size();
  const std::size_t count = std::min(static_cast<std::size_t>(cfg.K), T);
  std::vector<TrainingExample> out;
  for (std::size_t k = 0; k < count; ++k) {
    std::span<const corpus::Utterance> prefix(d.utterances.data(), T - k);
    out.push_back({corpus::serialize_utterances(prefix), d.labels});
  }
  return out;
}

namespace {

std::string synthetic_surface(Rng& rng) {
  static constexpr std::string_view consonants = "bdfgklmnprstvz";
  static constexpr std::string_view vowels = "aeiou";
  std::string s;
  const std::size_t syllables = 3 + rng.below(2);
  for (std::size_t i = 0; i < syllables; ++i) {
    s.push_back(consonants[rng.below(consonants.size())]);
    s.push_back(vowels[rng.below(vowels.size())]);
  }
  s.push_back(consonants[rng.below(consonants.size())]);
  return s;
}

}  // namespace

Injection inject_concept_errors(const extract::ConceptSet& cs, const InjectionConfig& cfg) {
  const std::size_t removed = cfg.n_fn + cfg.n_substitute;
  if (removed > cs.size()) {
    throw PreconditionError("cannot remove " + std::to_string(removed) + " concepts from a set of " +
                            std::to_string(cs.size()));
  }
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(cs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<bool> drop(cs.size(), false);
  Injection out;
  for (std::size_t k = 0; k < removed; ++k) {
    drop[order[k]] = true;
    out.gt_fn.insert(cs.items()[order[k]].surface);
  }
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (!drop[i]) out.corrupted.insert(cs.items()[i]);
  }

  std::vector<std::string> pool;
  for (const auto& s : cfg.distractors) {
    const std::string n = text::normalize_term(s);
    if (!n.empty() && !cs.contains_surface(n)) pool.push_back(n);
  }
  rng.shuffle(std::span<std::string>(pool));
  std::size_t next = 0;
  const std::size_t wanted = cfg.n_fp + cfg.n_substitute;
  std::size_t attempts = 0;
  while (out.gt_fp.size() < wanted) {
    if (++attempts > 100 * (wanted + 1)) throw PreconditionError("could not draw enough distinct hallucinated concepts");
    std::string surface = next < pool.size() ? pool[next++] : synthetic_surface(rng);
    if (cs.contains_surface(surface) || out.gt_fp.count(surface)) continue;
    corpus::Concept c;
    c.surface = surface;
    c.source = "injected";
    if (out.corrupted.insert(std::move(c))) out.gt_fp.insert(surface);
  }
  return out;
}

}  // namespace dialogsynth::forecast
