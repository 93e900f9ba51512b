// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialogsynth/agents/pipeline.hpp"
#include "dialogsynth/agents/style.hpp"
#include "dialogsynth/concepts/checker.hpp"
#include "dialogsynth/concepts/embedder.hpp"
#include "dialogsynth/corpus/dialogue.hpp"
#include "dialogsynth/corpus/ontology.hpp"
#include "dialogsynth/extract/extractor.hpp"
#include "dialogsynth/extract/lexicon.hpp"
#include "dialogsynth/flow/checker.hpp"
#include "dialogsynth/forecast/forecast.hpp"
#include "dialogsynth/intrinsic/metrics.hpp"
#include "dialogsynth/kernels/self_bleu.hpp"
#include "dialogsynth/llm/mock_transport.hpp"
#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/resources.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace ds = dialogsynth;
using nlohmann::json;

namespace {

// Pinned tolerances and limits.
constexpr double kTrajectoryTol = 1e-12;
constexpr double kBleuTol = 1e-9;
constexpr double kAlphaTol = 1e-12;
constexpr double kSubstitutionRecoveryMin = 0.95;
constexpr double kCheckerSeconds = 5.0;
constexpr double kFlowSeconds = 1.0;
constexpr double kEditOverheadSeconds = 5.0;
constexpr double kPipelineSeconds = 10.0;

struct Outcome {
  bool ok = true;
  std::string detail;
};

class Failures {
 public:
  void fail(const std::string& what) {
    if (count_++ < 3) first_ += (first_.empty() ? "" : "; ") + what;
  }
  bool any() const { return count_ > 0; }
  Outcome outcome(std::string detail) const {
    if (count_ == 0) return {true, std::move(detail)};
    return {false, std::to_string(count_) + " failure(s): " + first_};
  }

 private:
  std::size_t count_ = 0;
  std::string first_;
};

// ------------------------------------------------------------ concept checker

std::vector<std::string> lexicon_terms() {
  std::vector<std::string> terms;
  for (const auto& e : ds::extract::Lexicon::ems_default().entries()) terms.push_back(e.term);
  return terms;
}

struct Recovery {
  std::size_t hit = 0, detected = 0, injected = 0;
  void add(const std::set<std::string>& det, const std::set<std::string>& gt) {
    for (const auto& s : det) hit += gt.count(s);
    detected += det.size();
    injected += gt.size();
  }
  double precision() const { return detected ? static_cast<double>(hit) / static_cast<double>(detected) : 1.0; }
  double recall() const { return injected ? static_cast<double>(hit) / static_cast<double>(injected) : 1.0; }
};

std::set<std::string> surfaces_of(const ds::extract::ConceptSet& cs) {
  auto v = cs.surfaces();
  return {v.begin(), v.end()};
}

Outcome checker_validation() {
  const auto terms = lexicon_terms();
  std::mt19937_64 rng(20240301);
  Recovery exact, substituted;
  ds::concepts::IdentityEmbedder identity;
  ds::concepts::HashedNgramEmbedder hashed;
  for (int set = 0; set < 50; ++set) {
    std::vector<std::string> pool = terms;
    for (int i = 0; i < 40; ++i) pool.push_back("finding " + std::to_string(set) + "-" + std::to_string(i));
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::size_t size = 20 + rng() % 21;
    std::vector<std::string> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
    std::vector<std::string> distractors(pool.begin() + static_cast<std::ptrdiff_t>(size), pool.end());
    const auto src = ds::extract::ConceptSet::from_surfaces(chosen, "record");

    ds::forecast::InjectionConfig ins;
    ins.seed = static_cast<std::uint64_t>(set);
    ins.distractors = distractors;
    const auto a = ds::forecast::inject_concept_errors(src, ins);
    const auto ra = ds::concepts::match_concepts(src, a.corrupted, &identity);
    exact.add(surfaces_of(ra.hallucinated), a.gt_fp);
    exact.add(surfaces_of(ra.missing), a.gt_fn);

    ds::forecast::InjectionConfig sub;
    sub.n_fp = 0;
    sub.n_fn = 0;
    sub.n_substitute = 10;
    sub.seed = static_cast<std::uint64_t>(1000 + set);
    const auto b = ds::forecast::inject_concept_errors(src, sub);
    const auto rb = ds::concepts::match_concepts(src, b.corrupted, &hashed);
    substituted.add(surfaces_of(rb.hallucinated), b.gt_fp);
    substituted.add(surfaces_of(rb.missing), b.gt_fn);
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "insert/delete P=%.2f%% R=%.2f%%; substitution P=%.2f%% R=%.2f%%",
                100 * exact.precision(), 100 * exact.recall(), 100 * substituted.precision(),
                100 * substituted.recall());
  const bool ok = exact.precision() == 1.0 && exact.recall() == 1.0 &&
                  substituted.precision() >= kSubstitutionRecoveryMin && substituted.recall() >= kSubstitutionRecoveryMin;
  return {ok, buf};
}

// ------------------------------------------------------------ topic flow

Outcome topic_flow_completeness() {
  const json raw = json::parse(ds::resources::get("ontology/ems_topic_flow.json"));
  std::set<std::pair<std::string, std::string>> declared;
  for (auto it = raw["edges"].begin(); it != raw["edges"].end(); ++it) {
    for (const auto& to : it.value()) declared.insert({it.key(), to.get<std::string>()});
  }
  std::vector<std::string> topics;
  for (const auto& t : raw["topics"]) topics.push_back(t["id"].get<std::string>());
  const auto& ont = ds::corpus::TopicOntology::ems_default();
  Failures f;
  std::size_t flagged = 0;
  for (const auto& a : topics) {
    for (const auto& b : topics) {
      const std::vector<std::string> seq{a, b};
      const auto report = ds::flow::validate_flow(seq, ont);
      const bool is_flagged = !report.passed();
      const bool should = declared.count({a, b}) == 0;
      flagged += is_flagged;
      if (is_flagged != should) f.fail(a + " -> " + b);
      if (is_flagged && (report.violations.size() != 1 ||
                         report.violations[0].kind != ds::flow::ViolationKind::transition_error)) {
        f.fail("unexpected violation shape for " + a + " -> " + b);
      }
    }
  }
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> seq{topics[rng() % topics.size()]};
    const std::size_t pos = rng() % 3;
    const std::string oov = "Topic-" + std::to_string(rng() % 100000);
    seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(std::min(pos, seq.size())), oov);
    const auto report = ds::flow::validate_flow(seq, ont);
    bool found = false;
    for (const auto& v : report.violations) {
      found = found || (v.kind == ds::flow::ViolationKind::hallucinated_topic && v.to_topic == oov);
    }
    if (!found) f.fail("no hallucinated-topic violation for " + oov);
  }
  return f.outcome(std::to_string(topics.size() * topics.size()) + " pairs, " + std::to_string(flagged) +
                   " flagged = complement of " + std::to_string(declared.size()) + " edges; 200 OOV probes");
}

// ------------------------------------------------------------ edit overheads

Outcome edit_overheads_oracle() {
  const std::vector<std::string> alphabet{"A", "B", "C"};
  Failures f;
  std::size_t cases = 0;
  std::vector<std::string> seq;
  std::function<void(std::size_t)> rec = [&](std::size_t len) {
    if (!seq.empty()) {
      for (const auto& g : alphabet) {
        const ds::forecast::LabelSet gt{g};
        ++cases;
        if (ds::forecast::edit_overheads(seq, gt) != oracles::edit_overheads(seq, gt)) {
          std::string s;
          for (const auto& y : seq) s += y;
          f.fail(s + " gt=" + g);
        }
      }
    }
    if (len == 5) return;
    for (const auto& a : alphabet) {
      seq.push_back(a);
      rec(len + 1);
      seq.pop_back();
    }
  };
  rec(0);
  return f.outcome(std::to_string(cases) + " (sequence, ground truth) cases, exact");
}

// ------------------------------------------------------------ trajectories

struct GridCheck {
  Failures failures;
  std::size_t cases = 0;

  void compare(const ds::forecast::PredictionTrajectory& tr, const std::vector<oracles::Turn>& turns,
               const ds::forecast::LabelSet& gt) {
    ++cases;
    const auto got = ds::forecast::evaluate_trajectory(tr, gt, {0.5});
    const auto want = oracles::evaluate(turns, gt, 0.5);
    auto near = [](double a, double b) { return std::fabs(a - b) <= kTrajectoryTol; };
    bool ok = got.committed == want.committed;
    if (ok && want.committed) {
      ok = got.first_label == want.first && got.last_label == want.last && near(*got.first_conf, want.first_conf) &&
           near(*got.last_conf, want.last_conf) && got.first_correct == want.first_correct &&
           got.last_correct == want.last_correct && near(got.earliness_first, want.early) &&
           near(got.earliness_first_correct, want.early_correct) && near(*got.edit_overhead, want.eo);
    }
    if (!ok) failures.fail("mismatch at case " + std::to_string(cases));
  }
};

Outcome trajectory_grid() {
  const std::vector<std::string> labels{"a", "b", "c"};
  std::vector<std::map<std::string, double>> grid;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      for (int k = 0; k < 5; ++k) grid.push_back({{"a", 0.25 * i}, {"b", 0.25 * j}, {"c", 0.25 * k}});
    }
  }
  GridCheck check;

  // Exhaustive over all raw probability vectors for T <= 3.
  ds::forecast::PredictionTrajectory tr;
  std::vector<oracles::Turn> turns;
  std::function<void(int, int)> rec = [&](int t, int T) {
    if (t > T) {
      for (const auto& g : labels) check.compare(tr, turns, {g});
      return;
    }
    for (const auto& p : grid) {
      tr.turns.push_back({t, p});
      turns.push_back({t, p});
      rec(t + 1, T);
      tr.turns.pop_back();
      turns.pop_back();
    }
  };
  for (int T = 1; T <= 3; ++T) rec(1, T);
  const std::size_t raw_cases = check.cases;

  // T = 4: one representative per distinct per-turn commit outcome, after
  // confirming that every grid vector in a class commits identically.
  std::map<std::pair<std::string, double>, std::map<std::string, double>> reps;
  for (const auto& p : grid) {
    const auto d = ds::forecast::commit({1, p}, {0.5});
    std::string top;
    double conf = 0;
    bool any = false;
    for (const auto& [l, v] : p) {
      if (v >= 0.5 && (!any || v > conf)) {
        top = l;
        conf = v;
        any = true;
      }
    }
    if (d.deferred() != !any || (any && (d.top_label != top || d.top_confidence != conf))) {
      check.failures.fail("commit disagrees on a grid vector");
    }
    reps.emplace(std::make_pair(top, conf), p);
  }
  std::vector<std::map<std::string, double>> classes;
  for (const auto& [key, p] : reps) classes.push_back(p);
  grid = classes;
  rec(1, 4);
  return check.failures.outcome(std::to_string(raw_cases) + " raw-grid cases (T<=3) + " +
                                std::to_string(check.cases - raw_cases) + " class-grid cases (T=4, " +
                                std::to_string(classes.size()) + " turn classes), tol 1e-12");
}

// ------------------------------------------------------------ closed forms

Outcome closed_forms() {
  const std::vector<int> ranks{1, 1, 2, 4};
  const double mrr = ds::intrinsic::mrr(ranks);
  const double e = ds::forecast::earliness(2, 10);
  char buf[120];
  std::snprintf(buf, sizeof buf, "MRR=%.17g earliness=%.17g", mrr, e);
  return {mrr == 0.6875 && e == 0.8, buf};
}

// ------------------------------------------------------------ self-bleu

Outcome self_bleu_sanity() {
  Failures f;
  ds::corpus::Dialogue d;
  d.dialogue_id = "dup";
  d.utterances = {{1, "Chief Complaint", "ask_chief_complaint", "EMT", "What is going on today?"},
                  {2, "Chief Complaint", "state_chief_complaint", "Patient", "My chest hurts and I feel sick."}};
  const std::vector<ds::corpus::Dialogue> dup{d, d, d, d};
  const double dup_score = ds::intrinsic::self_bleu(dup);
  if (dup_score != 100.0) f.fail("duplicated corpus scored " + std::to_string(dup_score));

  std::mt19937_64 rng(77);
  double worst = 0;
  for (int c = 0; c < 20; ++c) {
    std::vector<ds::kernels::Tokens> docs(3 + rng() % 8);
    for (auto& doc : docs) {
      const std::size_t len = rng() % 25;
      for (std::size_t i = 0; i < len; ++i) doc.push_back("t" + std::to_string(rng() % 9));
    }
    if (docs[0].empty()) docs[0].push_back("t0");
    const auto scores = ds::kernels::self_bleu_scores(docs);
    double mean = 0;
    for (double s : scores) mean += s;
    mean = 100.0 * mean / static_cast<double>(scores.size());
    const double diff = std::fabs(mean - oracles::self_bleu(docs));
    worst = std::max(worst, diff);
    if (diff > kBleuTol) f.fail("corpus " + std::to_string(c) + " differs by " + std::to_string(diff));
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "duplicate=%.1f, 20 random corpora max |diff|=%.3g", dup_score, worst);
  return f.outcome(buf);
}

// ------------------------------------------------------------ pipeline

struct Harness {
  std::shared_ptr<ds::llm::MockTransport> transport;
  std::shared_ptr<ds::llm::Gateway> gateway;
  ds::concepts::HashedNgramEmbedder embedder;
  ds::agents::PromptLibrary prompts = ds::agents::PromptLibrary::bundled();
  ds::agents::AgentDeps deps;

  explicit Harness(const json& script) {
    transport = ds::llm::MockTransport::from_script(script);
    ds::llm::BackendConfig cfg;
    cfg.endpoint = "mock://";
    gateway = std::make_shared<ds::llm::Gateway>(cfg, transport, [](std::chrono::milliseconds) {});
    deps.chat = gateway.get();
    deps.embedder = &embedder;
    deps.ontology = &ds::corpus::TopicOntology::ems_default();
    deps.lexicon = &ds::extract::Lexicon::ems_default();
    deps.prompts = &prompts;
    deps.rules = ds::resources::get("rules/ems_rules.txt");
    deps.exemplars = ds::resources::get("exemplars/chest_pain_exemplar.txt");
  }
};

Outcome pipeline_gating() {
  Failures f;
  const auto record = fixtures::record();
  Harness h(fixtures::pipeline_script());
  const auto result = ds::agents::run_record(record, h.deps);
  if (!result.dialogue) return {false, "no dialogue emitted: " + result.trace.status};
  const auto& trace = result.trace;
  if (trace.iterations("plan") != 2) f.fail("plan iterations " + std::to_string(trace.iterations("plan")));
  if (trace.iterations("generate") != 2) f.fail("generate iterations " + std::to_string(trace.iterations("generate")));
  if (trace.iterations("refine") != 3) f.fail("refine iterations " + std::to_string(trace.iterations("refine")));
  if (h.transport->calls() != 10) f.fail("backend calls " + std::to_string(h.transport->calls()));
  for (const auto& s : trace.stages) {
    if (s.stage == "refine" && s.style_approved != true) f.fail("style not approved");
  }

  // Independent re-check of the emitted dialogue.
  const auto lex = ds::extract::Lexicon::ems_default().with_record_terms(record);
  const auto src = ds::extract::extract_concepts(record, lex);
  const auto tgt = ds::extract::extract_concepts(*result.dialogue, lex);
  ds::concepts::HashedNgramEmbedder embedder;
  const auto report = ds::concepts::match_concepts(src, tgt, &embedder);
  if (!report.missing.empty() || !report.hallucinated.empty()) {
    f.fail("re-check FN=" + std::to_string(report.missing.size()) + " FP=" + std::to_string(report.hallucinated.size()));
  }
  const auto flow = ds::flow::validate_flow(result.dialogue->utterances, ds::corpus::TopicOntology::ems_default());
  if (!flow.passed()) f.fail("re-check flow violations " + std::to_string(flow.violations.size()));

  // A style checker that never approves must stop refine at its cap.
  json queue = {fixtures::plan_reply(true), fixtures::dialogue_reply(true)};
  for (int i = 1; i <= 7; ++i) {
    queue.push_back(fixtures::dialogue_reply(true));
    queue.push_back(fixtures::style_reply(false, i));
  }
  Harness capped(json{{"queue", queue}});
  const auto capped_result = ds::agents::run_record(record, capped.deps);
  const int refine = capped_result.trace.iterations("refine");
  if (refine > 5) f.fail("refine ran " + std::to_string(refine) + " iterations");
  if (capped.transport->calls() != 12) f.fail("capped run made " + std::to_string(capped.transport->calls()) + " calls");

  return f.outcome("plan=2 generate=2 refine=3 calls=10, re-check FN=FP=0 and 0 flow violations; capped refine=" +
                   std::to_string(refine));
}

// ------------------------------------------------------------ dynamic unrolling

ds::corpus::Dialogue random_dialogue(std::mt19937_64& rng, int T) {
  ds::corpus::Dialogue d;
  d.dialogue_id = "u";
  d.labels = {"Chest Pain: Cardiac Suspected"};
  for (int t = 1; t <= T; ++t) {
    std::string text = "utterance " + std::to_string(rng() % 1000) + " with words " + std::to_string(rng() % 97);
    d.utterances.push_back({t, "Vital Signs", "report_vitals", t % 2 ? "EMT" : "Patient", text});
  }
  return d;
}

Outcome dynamic_unrolling() {
  Failures f;
  std::mt19937_64 rng(12);
  const ds::forecast::UnrollConfig cfg{5};
  const auto twelve = ds::forecast::build_dynamic_examples(random_dialogue(rng, 12), cfg);
  if (twelve.size() != 5) f.fail("T=12 gave " + std::to_string(twelve.size()));
  const auto three = ds::forecast::build_dynamic_examples(random_dialogue(rng, 3), cfg);
  if (three.size() != 3) f.fail("T=3 gave " + std::to_string(three.size()));
  for (int rep = 0; rep < 100; ++rep) {
    const int T = 1 + static_cast<int>(rng() % 20);
    const auto d = random_dialogue(rng, T);
    const auto ex = ds::forecast::build_dynamic_examples(d, cfg);
    if (ex.size() != static_cast<std::size_t>(std::min(T, 5))) f.fail("wrong count for T=" + std::to_string(T));
    const std::string full = ds::corpus::serialize_utterances(d.utterances);
    for (std::size_t i = 0; i < ex.size(); ++i) {
      if (full.compare(0, ex[i].input.size(), ex[i].input) != 0) f.fail("example is not a byte prefix");
      if (i > 0 && (ex[i].input.size() >= ex[i - 1].input.size() ||
                    ex[i - 1].input.compare(0, ex[i].input.size(), ex[i].input) != 0)) {
        f.fail("prefix chain broken");
      }
      const auto prefix = std::span<const ds::corpus::Utterance>(d.utterances).first(d.utterances.size() - i);
      if (ex[i].input != ds::corpus::serialize_utterances(prefix)) f.fail("example is not u_{1:T-i}");
      if (ex[i].labels != d.labels) f.fail("labels not carried");
    }
  }
  return f.outcome("T=12 -> 5, T=3 -> 3, prefix chain on 100 random dialogues");
}

// ------------------------------------------------------------ format round trips

std::string random_phrase(std::mt19937_64& rng, std::string_view alphabet) {
  static const std::vector<std::string> extra{"é", "ü", "°"};
  const std::size_t len = 1 + rng() % 30;
  std::string s;
  for (std::size_t i = 0; i < len; ++i) {
    if (rng() % 20 == 0) {
      s += extra[rng() % extra.size()];
    } else {
      s.push_back(alphabet[rng() % alphabet.size()]);
    }
  }
  while (!s.empty() && s.back() == ' ') s.pop_back();
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  return s.empty() ? "x" : s;
}

Outcome format_round_trips() {
  Failures f;
  std::mt19937_64 rng(1000);
  const auto& topics = ds::corpus::TopicOntology::ems_default().topics();
  constexpr std::string_view rich = "abcdefghij KLMNO 0123456789.,;:!?'-()";
  constexpr std::string_view plain = "abcdefghij KLMNO 0123456789.,!?'-()";
  constexpr std::string_view word = "abcdefghijklmnop_";
  const std::vector<std::string> roles{"EMT", "Patient", "Bystander", "Dispatcher"};
  std::size_t mutants = 0;

  auto expect_rejected = [&](const std::string& input, auto parse, std::optional<std::size_t> offset,
                             const char* what) {
    ++mutants;
    try {
      parse(input);
      f.fail(std::string("accepted ") + what + ": " + input);
    } catch (const ds::ParseError& e) {
      if (e.offset() > input.size()) f.fail(std::string("offset out of range for ") + what);
      if (offset && e.offset() != *offset) {
        f.fail(std::string(what) + " located at " + std::to_string(e.offset()) + ", expected " +
               std::to_string(*offset));
      }
    }
  };
  auto parse_line = [](const std::string& s) { return ds::corpus::parse_dialogue_line(s); };
  auto parse_style = [](const std::string& s) { return ds::agents::parse_style_response(s); };

  for (int i = 0; i < 1000; ++i) {
    ds::corpus::Utterance u{1 + static_cast<int>(rng() % 500), topics[rng() % topics.size()],
                            random_phrase(rng, word), roles[rng() % roles.size()], random_phrase(rng, rich)};
    const std::string line = ds::corpus::format_dialogue_line(u);
    if (ds::corpus::parse_dialogue_line(line) != u) f.fail("line round trip: " + line);

    // Mutants are built from separator-free texts so each mutation is guaranteed malformed.
    u.text = random_phrase(rng, plain);
    const std::string base = ds::corpus::format_dialogue_line(u);
    const std::size_t digits = std::to_string(u.turn).size();
    const std::size_t first_semi = base.find(';');
    const std::size_t second_semi = base.find(';', first_semi + 1);
    const std::size_t colon = base.find(':', second_semi);
    expect_rejected("x" + base.substr(digits), parse_line, 0, "non-numeric turn");
    expect_rejected("0" + base, parse_line, 0, "leading zero");
    expect_rejected(base.substr(0, digits) + base.substr(digits + 1), parse_line, digits, "missing period");
    expect_rejected(base.substr(0, digits + 1) + base.substr(digits + 2), parse_line, digits + 1, "missing space");
    expect_rejected(base.substr(0, first_semi) + base.substr(first_semi + 1), parse_line, std::nullopt,
                    "missing first separator");
    expect_rejected(base.substr(0, second_semi) + base.substr(second_semi + 1), parse_line, std::nullopt,
                    "missing second separator");
    expect_rejected(base.substr(0, colon) + base.substr(colon + 1), parse_line, std::nullopt, "missing role colon");
    expect_rejected(base.substr(0, colon + 1), parse_line, colon + 1, "empty utterance");
    expect_rejected("", parse_line, std::nullopt, "empty line");

    ds::agents::StyleReport report;
    report.approved = rng() % 3 == 0;
    const std::size_t n = (report.approved ? 0 : 1) + rng() % 4;
    for (std::size_t k = 0; k < n; ++k) report.critiques.push_back(random_phrase(rng, rich));
    const std::string text = ds::agents::format_style_response(report);
    if (ds::agents::parse_style_response(text) != report) f.fail("style round trip: " + text);

    const std::size_t value = text.find('>') + 1;
    const std::size_t value_end = text.find("</approved>");
    expect_rejected(text.substr(0, value) + "maybe" + text.substr(value_end), parse_style, value, "bad approved value");
    const std::size_t close = text.find("</critique>");
    expect_rejected(text.substr(0, close), parse_style, std::nullopt, "unterminated critique");
    expect_rejected(text.substr(0, value_end) + text.substr(value_end + 11), parse_style, std::nullopt,
                    "unterminated approved");
    expect_rejected(text.substr(value_end + 11), parse_style, std::nullopt, "missing approved");
  }
  return f.outcome("1000 lines + 1000 style reports round-trip; " + std::to_string(mutants) +
                   " mutants rejected with located errors");
}

// ------------------------------------------------------------ agreement

Outcome agreement_metrics() {
  Failures f;
  const std::vector<double> x{1, 2, 3, 4, 5, 6}, rev{6, 5, 4, 3, 2, 1};
  if (ds::intrinsic::spearman(x, x) != 1.0) f.fail("identity is not 1");
  if (ds::intrinsic::spearman(x, rev) != -1.0) f.fail("reversal is not -1");

  std::mt19937_64 rng(314);
  for (int rep = 0; rep < 20; ++rep) {
    ds::intrinsic::RatingsMatrix m;
    const std::size_t raters = 2 + rng() % 3;
    const std::size_t items = 3 + rng() % 6;
    for (std::size_t i = 0; i < items; ++i) {
      const std::string value = i == 0 ? "yes" : (i == 1 ? "no" : (rng() % 2 ? "yes" : "no"));
      m.cells.emplace_back(raters, value);
    }
    if (ds::intrinsic::krippendorff_alpha(m) != 1.0) f.fail("perfect agreement is not 1");
  }

  int checked = 0;
  double worst = 0;
  while (checked < 50) {
    ds::intrinsic::RatingsMatrix m;
    const std::size_t raters = 2 + rng() % 4;
    const std::size_t items = 2 + rng() % 9;
    for (std::size_t i = 0; i < items; ++i) {
      std::vector<std::optional<std::string>> row;
      for (std::size_t r = 0; r < raters; ++r) {
        if (rng() % 6 == 0) row.emplace_back(std::nullopt);
        else row.emplace_back(std::string(1, static_cast<char>('p' + rng() % 4)));
      }
      m.cells.push_back(std::move(row));
    }
    double got = 0;
    try {
      got = ds::intrinsic::krippendorff_alpha(m);
    } catch (const ds::Error&) {
      continue;
    }
    const double diff = std::fabs(got - oracles::krippendorff(m.cells));
    worst = std::max(worst, diff);
    if (diff > kAlphaTol) f.fail("alpha differs by " + std::to_string(diff));
    ++checked;
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "spearman +/-1 exact; alpha=1 on 20 perfect matrices; 50 random max |diff|=%.3g",
                worst);
  return f.outcome(buf);
}

struct Criterion {
  const char* name;
  Outcome (*run)();
  double limit_seconds;  // 0 = none
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"checker-validation", checker_validation, kCheckerSeconds},
      {"topic-flow-completeness", topic_flow_completeness, kFlowSeconds},
      {"edit-overheads-oracle", edit_overheads_oracle, kEditOverheadSeconds},
      {"trajectory-metric-oracle", trajectory_grid, 0},
      {"mrr-earliness-closed-forms", closed_forms, 0},
      {"self-bleu-sanity", self_bleu_sanity, 0},
      {"pipeline-gating", pipeline_gating, kPipelineSeconds},
      {"dynamic-unrolling", dynamic_unrolling, 0},
      {"format-round-trips", format_round_trips, 0},
      {"agreement-metrics", agreement_metrics, 0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs >= c.limit_seconds) {
      o.ok = false;
      o.detail += " (over the " + std::to_string(c.limit_seconds) + " s limit)";
    }
    std::printf("%s %-28s %.3fs  %s\n", o.ok ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
    failed += o.ok ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
