#include "dialogsynth/cli/app.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <fstream>
#include <map>
#include <optional>
#include <set>

#include "dialogsynth/cli/config.hpp"
#include "dialogsynth/corpus/dialogue.hpp"
#include "dialogsynth/corpus/record.hpp"
#include "dialogsynth/forecast/forecast.hpp"
#include "dialogsynth/intrinsic/judge.hpp"
#include "dialogsynth/intrinsic/metrics.hpp"
#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/io.hpp"
#include "dialogsynth/util/resources.hpp"
#include "dialogsynth/util/text.hpp"
#include "dialogsynth/util/worker_pool.hpp"

namespace dialogsynth::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> seed;
  std::string out;
};

RunConfig resolve_config(const Common& common) {
  RunConfig cfg = common.config.empty() ? RunConfig{} : load_run_config(common.config);
  if (common.workers) cfg.workers = *common.workers;
  if (common.seed) cfg.seed = *common.seed;
  cfg.apply_env();
  cfg.validate();
  return cfg;
}

std::vector<corpus::Dialogue> read_dialogues(const fs::path& path) {
  std::vector<corpus::Dialogue> out;
  for (const auto& line : io::read_jsonl(path)) {
    try {
      out.push_back(corpus::parse_dialogue_record(line.text));
    } catch (const IngestError& e) {
      throw IngestError(path.string() + ":" + std::to_string(line.number) + ": " + e.field_path(), e.what());
    }
  }
  return out;
}

std::map<std::string, corpus::PatientCareRecord> read_records_by_id(const fs::path& path,
                                                                    const corpus::LabelUniverse& labels) {
  std::map<std::string, corpus::PatientCareRecord> out;
  for (const auto& line : io::read_jsonl(path)) {
    try {
      auto rec = corpus::parse_epcr(std::string_view(line.text), labels);
      const std::string id = rec.record_id;
      out.insert_or_assign(id, std::move(rec));
    } catch (const IngestError& e) {
      throw IngestError(path.string() + ":" + std::to_string(line.number) + ": " + e.field_path(), e.what());
    }
  }
  return out;
}

/// Writes to the file named by `path`, or to `fallback` when empty.
void emit(const std::string& path, const std::string& content, std::ostream& fallback) {
  if (path.empty()) {
    fallback << content;
  } else {
    io::write_file(path, content);
  }
}

std::ofstream open_output(const fs::path& path, bool append) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, append ? std::ios::app : std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  return f;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::string records;
  std::string rejects;
  std::string traces;
  bool resume = false;
};

int cmd_generate(const Common& common, const GenerateArgs& args, std::ostream& out, std::stop_token stop) {
  const RunConfig cfg = resolve_config(common);
  Services services(cfg);
  const agents::AgentDeps deps = services.agent_deps();

  const fs::path out_path = common.out;
  const fs::path rejects_path = args.rejects.empty() ? fs::path(common.out + ".rejects.jsonl") : fs::path(args.rejects);
  const fs::path traces_path = args.traces.empty() ? fs::path(common.out + ".traces.jsonl") : fs::path(args.traces);
  const fs::path marker_path = common.out + ".resume.json";

  std::set<std::string> done;
  bool appending = false;
  if (args.resume && fs::exists(marker_path)) {
    const json marker = json::parse(io::read_file(marker_path));
    for (const auto& id : marker.at("processed")) done.insert(id.get<std::string>());
    appending = true;
    spdlog::info("resuming: {} records already processed", done.size());
  }

  std::vector<corpus::PatientCareRecord> records;
  std::vector<json> invalid;
  for (const auto& line : io::read_jsonl(args.records)) {
    try {
      auto rec = corpus::parse_epcr(std::string_view(line.text), services.labels());
      if (!done.count(rec.record_id)) records.push_back(std::move(rec));
    } catch (const Error& e) {
      invalid.push_back({{"line", line.number}, {"status", "invalid"}, {"error", e.what()}});
    }
  }

  agents::PipelineOptions options;
  options.workers = cfg.workers;
  options.stop = stop;
  const auto results = agents::run_pipeline(records, deps, options);

  auto dialogues = open_output(out_path, appending);
  auto rejects = open_output(rejects_path, appending);
  auto traces = open_output(traces_path, appending);
  if (!appending) {
    for (const auto& r : invalid) rejects << r.dump() << '\n';
  }

  std::size_t accepted = 0, exhausted = 0, errors = 0, backend_failures = 0;
  double plan_it = 0, gen_it = 0, ref_it = 0;
  for (const auto& r : results) {
    done.insert(r.trace.record_id);
    traces << r.trace.to_json().dump() << '\n';
    plan_it += r.trace.iterations("plan");
    gen_it += r.trace.iterations("generate");
    ref_it += r.trace.iterations("refine");
    if (r.dialogue) {
      ++accepted;
      dialogues << corpus::to_json(*r.dialogue).dump() << '\n';
      continue;
    }
    json reject = {{"record_id", r.trace.record_id}, {"status", r.trace.status}};
    if (r.trace.error) reject["error"] = *r.trace.error;
    rejects << reject.dump() << '\n';
    if (r.trace.status == "error") ++errors;
    if (r.trace.status == "exhausted") ++exhausted;
    if (r.trace.backend_failure) ++backend_failures;
  }

  const bool interrupted = results.size() < records.size();
  if (interrupted) {
    io::write_file(marker_path, json{{"seed", cfg.seed}, {"processed", done}}.dump(2) + "\n");
  } else if (fs::exists(marker_path)) {
    fs::remove(marker_path);
  }

  const double n = results.empty() ? 1.0 : static_cast<double>(results.size());
  const json summary = {
      {"command", "generate"},
      {"seed", cfg.seed},
      {"records", records.size() + invalid.size()},
      {"processed", results.size()},
      {"invalid", invalid.size()},
      {"accepted", accepted},
      {"rejected", results.size() - accepted + invalid.size()},
      {"exhausted", exhausted},
      {"errors", errors},
      {"backend_failures", backend_failures},
      {"interrupted", interrupted},
      {"mean_iterations",
       {{"plan", plan_it / n}, {"generate", gen_it / n}, {"refine", ref_it / n}, {"plan_generate", (plan_it + gen_it) / n}}}};
  io::write_file(common.out + ".summary.json", summary.dump(2) + "\n");
  out << summary.dump(2) << '\n';
  if (interrupted) return exit_interrupted;
  return backend_failures > 0 ? exit_backend : exit_ok;
}

// ---------------------------------------------------------------- check

struct CheckArgs {
  std::string corpus;
  std::string records;
};

agents::AgentDeps check_deps(const Services& services) {
  agents::AgentDeps deps;
  deps.embedder = services.embedder();
  deps.ontology = &services.ontology();
  deps.lexicon = &services.lexicon();
  deps.match.similarity_threshold = services.config().similarity_threshold;
  deps.flow_options.strict_micro_intents = services.config().strict_micro_intents;
  return deps;
}

int cmd_check(const Common& common, const CheckArgs& args, std::ostream& out) {
  const RunConfig cfg = resolve_config(common);
  Services services(cfg);
  const auto deps = check_deps(services);
  const auto records = read_records_by_id(args.records, services.labels());
  const auto dialogues = read_dialogues(args.corpus);

  json rows = json::array();
  std::size_t passed = 0, unknown = 0, matched = 0, fp = 0, fn = 0;
  for (const auto& d : dialogues) {
    json row = {{"dialogue_id", d.dialogue_id}, {"source_record_id", d.source_record_id}};
    auto it = records.find(d.source_record_id);
    if (it == records.end()) {
      ++unknown;
      row["passed"] = false;
      row["error"] = "unknown record '" + d.source_record_id + "'";
      rows.push_back(std::move(row));
      continue;
    }
    const auto ctx = agents::make_context(it->second, deps);
    const auto check = agents::check_dialogue(ctx, d.utterances, deps);
    matched += check.concept_report.matched.size();
    fp += check.concept_report.hallucinated.size();
    fn += check.concept_report.missing.size();
    if (check.passed()) ++passed;
    const auto pr = concepts::factuality_pr(check.concept_report);
    row["passed"] = check.passed();
    row["precision"] = pr.precision;
    row["recall"] = pr.recall;
    row["check"] = check.to_json();
    rows.push_back(std::move(row));
  }
  const auto pr = concepts::factuality_pr(matched, fp, fn);
  const json report = {{"command", "check"},
                       {"seed", cfg.seed},
                       {"summary",
                        {{"dialogues", dialogues.size()},
                         {"passed", passed},
                         {"failed", dialogues.size() - passed},
                         {"unknown_records", unknown},
                         {"matched", matched},
                         {"hallucinated", fp},
                         {"missing", fn},
                         {"precision", pr.precision},
                         {"recall", pr.recall}}},
                       {"dialogues", rows}};
  emit(common.out, report.dump(2) + "\n", out);
  return passed == dialogues.size() ? exit_ok : exit_check_failed;
}

// ---------------------------------------------------------------- eval intrinsic

struct IntrinsicArgs {
  std::string corpus;
  std::vector<std::string> baselines;
  std::string records;
  std::vector<std::string> judges;
  std::string judge_log;
  bool self_bleu = false;
  bool stats = false;
};

std::uint64_t mix_seed(std::uint64_t root, std::uint64_t index) {
  std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int cmd_intrinsic(const Common& common, const IntrinsicArgs& args, std::ostream& out) {
  const RunConfig cfg = resolve_config(common);
  const auto dialogues = read_dialogues(args.corpus);
  json report = {{"command", "eval intrinsic"}, {"seed", cfg.seed}, {"dialogues", dialogues.size()}};
  if (args.stats) report["stats"] = intrinsic::corpus_stats(dialogues).to_json();
  if (args.self_bleu) report["self_bleu"] = intrinsic::self_bleu(dialogues);

  if (!args.judges.empty()) {
    Services services(cfg);
    intrinsic::JudgeSettings settings{&services.prompts(), {0.0, 1024}, cfg.judge->config.model_id};
    auto& chat = services.judge();
    std::ofstream log_file;
    std::ostream* log_stream = nullptr;
    if (!args.judge_log.empty()) {
      log_file = open_output(args.judge_log, false);
      log_stream = &log_file;
    }
    std::optional<intrinsic::JudgmentLog> log;
    if (log_stream) log.emplace(*log_stream);

    std::map<std::string, corpus::PatientCareRecord> records;
    if (!args.records.empty()) records = read_records_by_id(args.records, services.labels());

    json judged = json::object();
    for (const auto& name : args.judges) {
      const auto metric = intrinsic::parse_judge_metric(name);
      std::vector<std::vector<intrinsic::JudgeVerdict>> per_item(dialogues.size());

      if (metric == intrinsic::JudgeMetric::ranking) {
        std::vector<std::map<std::string, corpus::Dialogue>> others;
        for (const auto& b : args.baselines) {
          std::map<std::string, corpus::Dialogue> by_record;
          for (auto& d : read_dialogues(b)) by_record.emplace(d.source_record_id, std::move(d));
          others.push_back(std::move(by_record));
        }
        if (others.empty()) throw ConfigError("ranking needs at least one --baseline corpus");
        run_indexed(dialogues.size(), cfg.workers, [&](std::size_t i) {
          std::vector<corpus::Dialogue> candidates{dialogues[i]};
          for (const auto& o : others) {
            auto it = o.find(dialogues[i].source_record_id);
            if (it == o.end()) return;
            candidates.push_back(it->second);
          }
          per_item[i].push_back(intrinsic::judge_ranking(candidates, mix_seed(cfg.seed, i), chat, settings));
        });
        std::vector<int> ranks;
        for (const auto& items : per_item) {
          for (const auto& v : items) {
            const auto pos = std::find(v.ranking.begin(), v.ranking.end(), 1) - v.ranking.begin();
            ranks.push_back(static_cast<int>(pos) + 1);
            if (log) log->write(v);
          }
        }
        judged["ranking"] = {{"cases", ranks.size()}, {"mrr", ranks.empty() ? json(nullptr) : json(intrinsic::mrr(ranks))}};
        continue;
      }

      if (metric == intrinsic::JudgeMetric::logic) {
        run_indexed(dialogues.size(), cfg.workers, [&](std::size_t i) {
          per_item[i].push_back(intrinsic::judge_conversation(dialogues[i], chat, settings));
        });
        double total = 0;
        for (const auto& items : per_item) {
          for (const auto& v : items) {
            total += v.score;
            if (log) log->write(v);
          }
        }
        judged["logic"] = {{"mean_score", dialogues.empty() ? json(nullptr) : json(total / static_cast<double>(dialogues.size()))}};
        continue;
      }

      if (metric == intrinsic::JudgeMetric::groundedness && records.empty()) {
        throw ConfigError("groundedness needs --records");
      }
      run_indexed(dialogues.size(), cfg.workers, [&](std::size_t i) {
        const auto& d = dialogues[i];
        intrinsic::UtteranceContext ctx;
        ctx.rubric = std::string(resources::get("rules/realism_rubric.txt"));
        ctx.protocol_text = std::string(resources::get("rules/protocol_guidelines.txt"));
        ctx.role_exemplar = services.exemplars();
        ctx.full_dialogue_text = corpus::serialize_utterances(d.utterances);
        if (metric == intrinsic::JudgeMetric::groundedness) {
          auto it = records.find(d.source_record_id);
          if (it == records.end()) throw IngestError(d.dialogue_id, "unknown record '" + d.source_record_id + "'");
          ctx.epcr_text = corpus::render_epcr(it->second);
        }
        for (const auto& u : d.utterances) {
          auto v = intrinsic::judge_utterance(u, metric, ctx, chat, settings);
          v.item_id = d.dialogue_id + "#" + std::to_string(u.turn);
          per_item[i].push_back(std::move(v));
        }
      });
      std::size_t count = 0;
      for (const auto& items : per_item) count += items.size();
      auto yes = std::make_unique<bool[]>(count);
      std::size_t k = 0;
      for (const auto& items : per_item) {
        for (const auto& v : items) {
          yes[k++] = v.yes;
          if (log) log->write(v);
        }
      }
      judged[name] = {{"utterances", count},
                      {"yes_rate", count == 0 ? json(nullptr)
                                              : json(intrinsic::yes_rate(std::span<const bool>(yes.get(), count)))}};
    }
    report["judges"] = judged;
  }
  emit(common.out, report.dump(2) + "\n", out);
  return exit_ok;
}

// ---------------------------------------------------------------- eval forecast

struct ForecastArgs {
  std::string trajectories;
  std::string labels;
  double tau = 0.5;
};

int cmd_forecast(const Common& common, const ForecastArgs& args, std::ostream& out) {
  forecast::CommitPolicy policy{args.tau};
  policy.validate();
  const auto trajs = forecast::parse_trajectories(io::read_file(args.trajectories));
  std::map<std::string, forecast::LabelSet> gold;
  for (const auto& line : io::read_jsonl(args.labels)) {
    json j;
    try {
      j = json::parse(line.text);
    } catch (const json::parse_error& e) {
      throw IngestError(args.labels + ":" + std::to_string(line.number), std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("dialogue_id") || !j["dialogue_id"].is_string() || !j.contains("labels") ||
        !j["labels"].is_array()) {
      throw IngestError(args.labels + ":" + std::to_string(line.number), "expected {dialogue_id, labels:[...]}");
    }
    forecast::LabelSet set;
    for (const auto& l : j["labels"]) {
      if (!l.is_string()) throw IngestError(args.labels + ":" + std::to_string(line.number), "labels must be strings");
      set.insert(text::normalize_label(l.get<std::string>()));
    }
    gold[j["dialogue_id"].get<std::string>()] = std::move(set);
  }
  std::vector<forecast::LabelSet> gts;
  for (const auto& t : trajs) {
    auto it = gold.find(t.dialogue_id);
    if (it == gold.end()) throw IngestError(t.dialogue_id, "no ground-truth labels for this trajectory");
    gts.push_back(it->second);
  }
  const auto metrics = forecast::evaluate_trajectories(trajs, gts, policy);
  json rows = json::array();
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    json row = forecast::to_json(metrics[i]);
    row["dialogue_id"] = trajs[i].dialogue_id;
    rows.push_back(std::move(row));
  }
  json report = {{"command", "eval forecast"}, {"tau", args.tau}, {"dialogues", rows}};
  report["summary"] = metrics.empty() ? json(nullptr) : forecast::aggregate(metrics).to_json();
  emit(common.out, report.dump(2) + "\n", out);
  return exit_ok;
}

// ---------------------------------------------------------------- eval build-train

struct BuildTrainArgs {
  std::string corpus;
  std::string mode = "static";
  int k = 5;
};

int cmd_build_train(const Common& common, const BuildTrainArgs& args, std::ostream& out) {
  forecast::UnrollConfig unroll{args.k};
  unroll.validate();
  std::string body;
  for (const auto& d : read_dialogues(args.corpus)) {
    if (args.mode == "static") {
      body += forecast::build_static_example(d).to_json().dump() + "\n";
    } else {
      for (const auto& ex : forecast::build_dynamic_examples(d, unroll)) body += ex.to_json().dump() + "\n";
    }
  }
  emit(common.out, body, out);
  return exit_ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, std::stop_token stop) {
  CLI::App app{"Grounded clinical dialogue synthesis and evaluation", "dialogsynth"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")->capture_default_str();

  Common common;
  auto add_common = [&](CLI::App* sub, bool out_required) {
    sub->add_option("--config", common.config, "YAML run configuration")->check(CLI::ExistingFile);
    sub->add_option("--workers", common.workers, "parallel records")->check(CLI::PositiveNumber);
    sub->add_option("--seed", common.seed, "root seed");
    auto* o = sub->add_option("--out", common.out, "output path (stdout when omitted)");
    if (out_required) o->required();
  };

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "run the plan/generate/refine pipeline over records");
  generate->add_option("--records", gen.records, "newline-delimited records")->required()->check(CLI::ExistingFile);
  generate->add_option("--rejects", gen.rejects, "rejected records (default <out>.rejects.jsonl)");
  generate->add_option("--traces", gen.traces, "per-record traces (default <out>.traces.jsonl)");
  generate->add_flag("--resume", gen.resume, "skip records listed in <out>.resume.json");
  add_common(generate, true);

  CheckArgs chk;
  auto* check = app.add_subcommand("check", "audit a corpus against its records");
  check->add_option("--corpus", chk.corpus, "newline-delimited dialogues")->required()->check(CLI::ExistingFile);
  check->add_option("--records", chk.records, "newline-delimited records")->required()->check(CLI::ExistingFile);
  add_common(check, false);

  auto* eval = app.add_subcommand("eval", "evaluation harnesses");
  eval->require_subcommand(1);

  IntrinsicArgs intr;
  auto* intrinsic_cmd = eval->add_subcommand("intrinsic", "corpus diversity and judge metrics");
  intrinsic_cmd->add_option("--corpus", intr.corpus)->required()->check(CLI::ExistingFile);
  intrinsic_cmd->add_flag("--self-bleu", intr.self_bleu);
  intrinsic_cmd->add_flag("--stats", intr.stats);
  intrinsic_cmd->add_option("--judge", intr.judges, "logic|ranking|realism|safety|role|groundedness")
      ->check(CLI::IsMember({"logic", "ranking", "realism", "safety", "role", "groundedness"}));
  intrinsic_cmd->add_option("--baseline", intr.baselines, "competing corpora for ranking")->check(CLI::ExistingFile);
  intrinsic_cmd->add_option("--records", intr.records, "records for groundedness")->check(CLI::ExistingFile);
  intrinsic_cmd->add_option("--judge-log", intr.judge_log, "newline-delimited verdict log");
  add_common(intrinsic_cmd, false);

  ForecastArgs fc;
  auto* forecast_cmd = eval->add_subcommand("forecast", "score prediction trajectories");
  forecast_cmd->add_option("--trajectories", fc.trajectories)->required()->check(CLI::ExistingFile);
  forecast_cmd->add_option("--labels", fc.labels)->required()->check(CLI::ExistingFile);
  forecast_cmd->add_option("--tau", fc.tau)->capture_default_str();
  add_common(forecast_cmd, false);

  BuildTrainArgs bt;
  auto* build = eval->add_subcommand("build-train", "emit training examples");
  build->add_option("--corpus", bt.corpus)->required()->check(CLI::ExistingFile);
  build->add_option("--mode", bt.mode)->check(CLI::IsMember({"static", "dynamic"}))->capture_default_str();
  build->add_option("--k", bt.k)->capture_default_str();
  add_common(build, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return exit_usage;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (generate->parsed()) return cmd_generate(common, gen, out, stop);
    if (check->parsed()) return cmd_check(common, chk, out);
    if (intrinsic_cmd->parsed()) return cmd_intrinsic(common, intr, out);
    if (forecast_cmd->parsed()) return cmd_forecast(common, fc, out);
    if (build->parsed()) return cmd_build_train(common, bt, out);
  } catch (const BackendError& e) {
    err << "error: " << e.what() << '\n';
    return exit_backend;
  } catch (const RequestError& e) {
    err << "error: " << e.what() << '\n';
    return exit_backend;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const IngestError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const LabelUniverseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_check_failed;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }
  return exit_usage;
}

}  // namespace dialogsynth::cli
