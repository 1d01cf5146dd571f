// sva-gauntlet: assembles LLM prompts for hardware security assertions,
// collects completions, repairs and compiles the candidates against a
// restricted SVA grammar, evaluates them over an exhaustive stimulus, and
// scores them against each benchmark's golden reference assertion.

#include "svag/pipeline.hpp"
#include "svag/remote.hpp"
#include "svag/simlog.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ProviderOpts {
  std::string kind = "replay";  // remote | replay | record
  std::string fixtures = "fixtures";
  std::string config_path;  // JSON with base_url/model, remote + record only
};

void add_provider_options(CLI::App* cmd, ProviderOpts& opts) {
  cmd->add_option("--provider", opts.kind, "Completion provider")
      ->check(CLI::IsMember({"remote", "replay", "record"}))
      ->capture_default_str();
  cmd->add_option("--fixtures", opts.fixtures,
                  "Fixture directory (read by replay, written by record)")
      ->capture_default_str();
  cmd->add_option("--provider-config", opts.config_path,
                  "JSON file with base_url and model for the remote service");
}

std::shared_ptr<svag::Provider> make_provider(const ProviderOpts& opts) {
  if (opts.kind == "replay") return std::make_shared<svag::ReplayProvider>(opts.fixtures);
  if (opts.config_path.empty())
    throw svag::ProviderError(svag::ProviderError::Kind::Auth,
                              "--provider-config is required for the " + opts.kind + " provider");
  svag::RemoteConfig rc = svag::parse_remote_config(svag::read_file(opts.config_path));
  std::shared_ptr<svag::Provider> remote = svag::RemoteProvider::from_env(rc);
  if (opts.kind == "record")
    return std::make_shared<svag::RecordingProvider>(remote, opts.fixtures);
  return remote;
}

// Loads prompts.jsonl, regenerating it from the manifest when absent so the
// staged subcommands compose in any order after `generate-prompts`.
std::vector<svag::PromptInstance> load_or_generate_prompts(const svag::BenchmarkManifest& m,
                                                           const fs::path& bench_dir) {
  fs::path path = bench_dir / "prompts.jsonl";
  if (fs::exists(path)) {
    std::vector<svag::PromptInstance> prompts;
    for (const auto& j : svag::read_jsonl(path)) prompts.push_back(svag::prompt_from_json(j));
    return prompts;
  }
  fs::create_directories(bench_dir);
  std::vector<svag::PromptInstance> prompts = svag::generate_prompts(m);
  svag::JsonlWriter w(path);
  for (const auto& p : prompts) w.write(svag::to_json(p));
  return prompts;
}

std::vector<svag::CompletionBatch> load_batches(const fs::path& bench_dir) {
  std::vector<svag::CompletionBatch> batches;
  for (const auto& j : svag::read_jsonl(bench_dir / "batches.jsonl"))
    batches.push_back(svag::batch_from_json(j));
  return batches;
}

std::vector<svag::CandidateText> load_candidates(const fs::path& bench_dir) {
  std::vector<svag::CandidateText> candidates;
  for (const auto& j : svag::read_jsonl(bench_dir / "candidates.jsonl"))
    candidates.push_back(svag::candidate_from_json(j));
  return candidates;
}

void print_metrics_row(const svag::MetricsRow& row) {
  std::printf("%-8s generated=%llu processed=%llu/%llu compiled=%s%% simulated=%s%% correct=%s%%\n",
              row.scope.c_str(), static_cast<unsigned long long>(row.generated),
              static_cast<unsigned long long>(row.all.processed),
              static_cast<unsigned long long>(row.unique.processed),
              row.pct_compiled().render().c_str(), row.pct_simulated().render().c_str(),
              row.pct_correct().render().c_str());
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Evaluates LLM-generated SystemVerilog security assertions against "
               "golden references over exhaustive testbench stimuli."};
  app.require_subcommand(1);

  std::string benchmark = "BM1";
  std::vector<std::string> benchmarks;
  std::string out = "out";
  svag::RunConfig cfg;
  ProviderOpts provider_opts;
  uint64_t budget = svag::kDefaultEvalBudget;

  auto add_benchmark = [&](CLI::App* cmd) {
    cmd->add_option("--benchmark", benchmark, "Bundled benchmark id or manifest directory")
        ->capture_default_str();
  };
  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", out, "Run directory for records and reports")
        ->capture_default_str();
  };

  // generate-prompts ---------------------------------------------------------
  auto* cmd_prompts = app.add_subcommand(
      "generate-prompts", "Assemble all 378 prompt configurations for a benchmark");
  add_benchmark(cmd_prompts);
  add_out(cmd_prompts);
  cmd_prompts->callback([&] {
    svag::BenchmarkManifest m = svag::resolve_benchmark(benchmark);
    std::vector<svag::PromptInstance> prompts = svag::generate_prompts(m);
    fs::path bench_dir = fs::path(out) / m.id;
    fs::create_directories(bench_dir);
    svag::JsonlWriter w(bench_dir / "prompts.jsonl");
    for (const auto& p : prompts) w.write(svag::to_json(p));
    std::printf("%zu prompts -> %s\n", prompts.size(), (bench_dir / "prompts.jsonl").c_str());
  });

  // query --------------------------------------------------------------------
  auto* cmd_query =
      app.add_subcommand("query", "Fetch completions for every (prompt, params) key");
  add_benchmark(cmd_query);
  add_out(cmd_query);
  add_provider_options(cmd_query, provider_opts);
  cmd_query->add_option("--temps", cfg.temperatures, "Temperature grid")
      ->capture_default_str();
  cmd_query->add_option("--freq-penalties", cfg.frequency_penalties, "Frequency penalty grid")
      ->capture_default_str();
  cmd_query->add_option("--n", cfg.base_params.n, "Completions per query")
      ->capture_default_str();
  cmd_query->add_option("--max-tokens", cfg.base_params.max_tokens, "Token budget per completion")
      ->capture_default_str();
  cmd_query->add_option("--workers", cfg.workers, "Concurrent outstanding requests")
      ->capture_default_str();
  cmd_query->add_flag("--resume", cfg.resume, "Skip keys with completion markers");
  int query_exit = 0;
  cmd_query->callback([&] {
    svag::BenchmarkManifest m = svag::resolve_benchmark(benchmark);
    fs::path bench_dir = fs::path(out) / m.id;
    std::vector<svag::PromptInstance> prompts = load_or_generate_prompts(m, bench_dir);
    std::vector<svag::GenerationParams> grid =
        svag::enumerate_param_grid(cfg.temperatures, cfg.frequency_penalties, cfg.base_params);
    std::shared_ptr<svag::Provider> provider = make_provider(provider_opts);
    cfg.out_dir = out;
    uint64_t calls = 0;
    std::vector<svag::CompletionBatch> batches =
        svag::run_query_stage(prompts, grid, *provider, bench_dir, cfg, &calls);
    uint64_t failed = 0;
    for (const auto& b : batches)
      if (b.failed()) ++failed;
    std::printf("%zu keys, %llu provider calls, %llu failed batches, %llu completions\n",
                batches.size(), static_cast<unsigned long long>(calls),
                static_cast<unsigned long long>(failed),
                static_cast<unsigned long long>(svag::count_generated(batches)));
    if (failed > 0) query_exit = 2;
  });

  // repair -------------------------------------------------------------------
  auto* cmd_repair = app.add_subcommand(
      "repair", "Expand completions into candidates with the lexical fixes applied");
  add_benchmark(cmd_repair);
  add_out(cmd_repair);
  cmd_repair->callback([&] {
    svag::BenchmarkManifest m = svag::resolve_benchmark(benchmark);
    fs::path bench_dir = fs::path(out) / m.id;
    std::vector<svag::PromptInstance> prompts = load_or_generate_prompts(m, bench_dir);
    std::vector<svag::CompletionBatch> batches = load_batches(bench_dir);
    std::vector<svag::CandidateText> candidates = svag::run_repair_stage(prompts, m, batches);
    svag::JsonlWriter w(bench_dir / "candidates.jsonl");
    for (const auto& c : candidates) w.write(svag::to_json(c));
    std::printf("%llu completions -> %zu candidates\n",
                static_cast<unsigned long long>(svag::count_generated(batches)),
                candidates.size());
  });

  // compile-check ------------------------------------------------------------
  auto* cmd_compile =
      app.add_subcommand("compile-check", "Parse and interface-check every candidate");
  add_benchmark(cmd_compile);
  add_out(cmd_compile);
  cmd_compile->callback([&] {
    svag::BenchmarkManifest m = svag::resolve_benchmark(benchmark);
    fs::path bench_dir = fs::path(out) / m.id;
    std::vector<svag::CandidateText> candidates = load_candidates(bench_dir);
    svag::SignalTable table = svag::signal_table(m);
    svag::JsonlWriter w(bench_dir / "verdicts.jsonl");
    size_t compiled = 0;
    for (const auto& c : candidates) {
      json j = svag::to_json(c);
      j.erase("text");
      auto parsed = svag::parse(c.text);
      std::optional<svag::CompileError> err;
      if (!parsed.ok()) {
        err = parsed.error();
      } else {
        svag::SvaFile file = parsed.take();
        err = svag::check(file, table);
      }
      j["compiled"] = !err.has_value();
      if (err) {
        j["error_kind"] = svag::to_string(err->kind);
        j["detail"] = err->detail;
      } else {
        ++compiled;
      }
      w.write(j);
    }
    std::printf("%zu candidates, %zu compiled\n", candidates.size(), compiled);
  });

  // evaluate -----------------------------------------------------------------
  auto* cmd_eval = app.add_subcommand(
      "evaluate", "Classify every candidate against the golden violation set");
  add_benchmark(cmd_eval);
  add_out(cmd_eval);
  cmd_eval->add_option("--budget", budget, "Expression evaluation step budget per candidate")
      ->capture_default_str();
  cmd_eval->callback([&] {
    svag::BenchmarkManifest m = svag::resolve_benchmark(benchmark);
    fs::path bench_dir = fs::path(out) / m.id;
    std::vector<svag::CandidateText> candidates = load_candidates(bench_dir);
    svag::StimulusSpec spec = svag::build_stimulus(m);
    svag::SignalTable table = svag::signal_table(m);
    svag::ClassifyCache cache(table, spec, svag::golden_violations(m, spec, budget), budget);
    std::vector<svag::Outcome> outcomes = svag::run_classify_stage(candidates, cache);
    svag::JsonlWriter w(bench_dir / "outcomes.jsonl");
    size_t correct = 0;
    for (size_t i = 0; i < outcomes.size(); ++i) {
      json j = svag::to_json(candidates[i]);
      j.erase("text");
      j.update(svag::to_json(outcomes[i]));
      w.write(j);
      if (outcomes[i].stage == svag::Outcome::Stage::Simulated && outcomes[i].correct) ++correct;
    }
    std::printf("%zu candidates (%zu unique texts), %zu correct\n", candidates.size(),
                cache.unique_texts(), correct);
  });

  // score / report -----------------------------------------------------------
  auto add_score_body = [&](bool with_summary) {
    return [&, with_summary] {
      if (benchmarks.empty()) benchmarks.push_back(benchmark);
      std::vector<svag::MetricsRow> metrics;
      std::vector<svag::ScoredCandidate> all_scored;
      json summary;
      for (const std::string& name : benchmarks) {
        svag::BenchmarkManifest m = svag::resolve_benchmark(name);
        fs::path bench_dir = fs::path(out) / m.id;
        std::vector<svag::PromptInstance> prompts = load_or_generate_prompts(m, bench_dir);
        std::vector<svag::CompletionBatch> batches = load_batches(bench_dir);
        std::vector<svag::CandidateText> candidates = load_candidates(bench_dir);
        std::vector<svag::Outcome> outcomes;
        for (const auto& j : svag::read_jsonl(bench_dir / "outcomes.jsonl"))
          outcomes.push_back(svag::outcome_from_json(j));
        std::vector<svag::ScoredCandidate> scored =
            svag::join_scored(m, prompts, batches, candidates, outcomes);
        std::vector<const svag::ScoredCandidate*> refs;
        for (const auto& sc : scored) refs.push_back(&sc);
        metrics.push_back(svag::aggregate(m.id, refs, svag::count_generated(batches)));
        print_metrics_row(metrics.back());
        uint64_t failed = 0;
        for (const auto& b : batches)
          if (b.failed()) ++failed;
        summary["benchmarks"][m.id] = {{"generated", metrics.back().generated},
                                       {"processed", metrics.back().all.processed},
                                       {"failed_batches", failed}};
        for (auto& sc : scored) all_scored.push_back(std::move(sc));
      }
      svag::Report report;
      report.metrics = metrics;
      report.ranking = svag::rank_configs(all_scored);
      report.breakdowns = svag::component_breakdowns(all_scored);
      fs::path report_dir = fs::path(out) / "report";
      svag::write_report(report, report_dir);
      if (with_summary) {
        summary["report_dir"] = report_dir.string();
        svag::write_file((report_dir / "run_summary.json").string(), summary.dump(2) + "\n");
      }
      std::printf("report -> %s\n", report_dir.c_str());
    };
  };
  auto* cmd_score =
      app.add_subcommand("score", "Aggregate outcome records into metrics and rankings");
  cmd_score->add_option("--benchmark", benchmarks, "Benchmarks to score (repeatable)");
  add_out(cmd_score);
  cmd_score->callback(add_score_body(false));

  auto* cmd_report = app.add_subcommand(
      "report", "Like score, plus a run_summary.json with batch failure counts");
  cmd_report->add_option("--benchmark", benchmarks, "Benchmarks to report (repeatable)");
  add_out(cmd_report);
  cmd_report->callback(add_score_body(true));

  // run ----------------------------------------------------------------------
  auto* cmd_run = app.add_subcommand("run", "Full pipeline: prompts through report");
  cmd_run->add_option("--benchmark", benchmarks, "Benchmarks to run (repeatable)");
  add_out(cmd_run);
  add_provider_options(cmd_run, provider_opts);
  cmd_run->add_option("--temps", cfg.temperatures, "Temperature grid")->capture_default_str();
  cmd_run->add_option("--freq-penalties", cfg.frequency_penalties, "Frequency penalty grid")
      ->capture_default_str();
  cmd_run->add_option("--n", cfg.base_params.n, "Completions per query")->capture_default_str();
  cmd_run->add_option("--max-tokens", cfg.base_params.max_tokens, "Token budget per completion")
      ->capture_default_str();
  cmd_run->add_option("--budget", cfg.budget, "Evaluation step budget per candidate")
      ->capture_default_str();
  cmd_run->add_option("--workers", cfg.workers, "Concurrent outstanding requests")
      ->capture_default_str();
  cmd_run->add_option("--seed", cfg.seed, "Seed recorded for fixture tooling");
  cmd_run->add_flag("--resume", cfg.resume, "Reuse completed (prompt, params) keys");
  int run_exit = 0;
  cmd_run->callback([&] {
    if (benchmarks.empty()) benchmarks.push_back(benchmark);
    cfg.benchmarks = benchmarks;
    cfg.out_dir = out;
    std::shared_ptr<svag::Provider> provider = make_provider(provider_opts);
    svag::RunResult result = svag::run_pipeline(cfg, *provider);
    for (const auto& row : result.per_benchmark) print_metrics_row(row);
    for (const auto& f : result.recorded_failures)
      std::fprintf(stderr, "recorded failure at %s: %s\n", f.where.c_str(), f.detail.c_str());
    std::printf("report -> %s\n", (cfg.out_dir / "report").c_str());
    run_exit = result.exit_code();
  });

  // parse-simlog ---------------------------------------------------------------
  std::string log_path;
  auto* cmd_simlog = app.add_subcommand(
      "parse-simlog", "Extract violation times from an external simulator transcript");
  cmd_simlog->add_option("log", log_path, "Transcript file")->required();
  cmd_simlog->callback([&] {
    svag::SimLog log = svag::parse_simulator_log(svag::read_file(log_path));
    json j;
    j["golden_times"] = log.golden_times;
    j["generated_times"] = log.generated_times;
    j["finished"] = log.finished;
    if (log.reported_inputs) j["reported_inputs"] = *log.reported_inputs;
    json cycles = json::array();
    bool all_posedge = true;
    for (long t : log.golden_times) {
      auto c = svag::ns_to_cycle(t);
      if (c)
        cycles.push_back(*c);
      else
        all_posedge = false;
    }
    j["golden_cycles"] = cycles;
    j["all_times_on_posedge"] = all_posedge;
    if (!log.malformed_lines.empty()) j["malformed_lines"] = log.malformed_lines;
    std::printf("%s\n", j.dump(2).c_str());
  });

  // export-benchmark -----------------------------------------------------------
  std::string dest;
  auto* cmd_export = app.add_subcommand(
      "export-benchmark", "Write a bundled benchmark's files to a directory");
  add_benchmark(cmd_export);
  cmd_export->add_option("--dest", dest, "Destination directory")->required();
  cmd_export->callback([&] {
    svag::materialize_bundled(benchmark, dest);
    std::printf("%s -> %s\n", benchmark.c_str(), dest.c_str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // prints the message or help text
    return code == 0 ? 0 : 1;
  }
  if (run_exit != 0) return run_exit;
  if (query_exit != 0) return query_exit;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const svag::ProviderError& e) {
    std::fprintf(stderr, "provider error: %s\n", e.what());
    return 1;
  } catch (const svag::ManifestError& e) {
    std::fprintf(stderr, "benchmark error: %s\n", e.what());
    return 1;
  } catch (const svag::RecordError& e) {
    std::fprintf(stderr, "record error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
