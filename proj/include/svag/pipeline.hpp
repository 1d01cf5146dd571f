#pragma once

#include "svag/benchmark.hpp"
#include "svag/bundled.hpp"
#include "svag/eval.hpp"
#include "svag/llm.hpp"
#include "svag/prompt.hpp"
#include "svag/records.hpp"
#include "svag/repair.hpp"
#include "svag/report.hpp"
#include "svag/scoreboard.hpp"
#include "svag/stimulus.hpp"

#include <atomic>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace svag {

struct RunConfig {
  std::vector<std::string> benchmarks;  // bundled ids or manifest directories
  std::vector<double> temperatures = {0.4, 0.9};
  std::vector<double> frequency_penalties = {0.0, 0.5, 1.0};
  GenerationParams base_params;  // n / max_tokens / stop knobs
  uint64_t budget = kDefaultEvalBudget;
  std::filesystem::path out_dir = "out";
  bool resume = false;
  uint64_t seed = 0;  // consumed by fixture tooling only, never by scoring
  int workers = 1;    // concurrent outstanding provider requests
  RetryPolicy retry;
};

// A non-fatal problem the run recorded and skipped past (failed batch, ...).
struct StageFailure {
  std::string where;
  std::string detail;
};

struct RunResult {
  Report report;
  std::vector<MetricsRow> per_benchmark;
  std::vector<StageFailure> recorded_failures;
  uint64_t provider_calls = 0;

  int exit_code() const { return recorded_failures.empty() ? 0 : 2; }
};

// Resolves a --benchmark argument: a bundled id or a manifest directory.
inline BenchmarkManifest resolve_benchmark(const std::string& name) {
  if (is_bundled_benchmark(name)) return load_bundled(name);
  return load_manifest(name);
}

namespace detail {

// Index-based parallel map; results land by index so output order never
// depends on scheduling. The first exception wins and is rethrown.
template <typename Fn>
void parallel_for(size_t count, int workers, Fn fn) {
  if (workers <= 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= count) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) return;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int n = std::min<int>(workers, static_cast<int>(count));
  pool.reserve(n);
  for (int w = 0; w < n; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

//===----------------------------------------------------------------------===//
// Stage: prompts
//===----------------------------------------------------------------------===//

// All 378 instances in canonical config order, with digest sanity checks: a
// digest collision between different texts would corrupt every downstream
// key, so it stops the run before any provider is contacted.
inline std::vector<PromptInstance> generate_prompts(const BenchmarkManifest& m) {
  std::vector<PromptInstance> out;
  out.reserve(378);
  std::unordered_map<std::string, std::string> text_by_hash;
  std::unordered_set<std::string> texts;
  for (const PromptConfig& c : enumerate_configs()) {
    PromptInstance p = assemble_prompt(m, c);
    if (!texts.insert(p.text).second)
      throw RecordError(m.id + ": two configs assemble the same prompt text (" +
                        config_label(c) + "); prompt_data strings must differ per axis");
    auto [it, inserted] = text_by_hash.emplace(p.prompt_hash, p.text);
    if (!inserted && it->second != p.text)
      throw RecordError(m.id + ": prompt digest collision on " + p.prompt_hash);
    out.push_back(std::move(p));
  }
  return out;
}

//===----------------------------------------------------------------------===//
// Stage: query
//===----------------------------------------------------------------------===//

// Fetches one batch per (prompt, params) key, in canonical order. Keys whose
// completion marker is already present are served from the existing batch
// file and never re-queried. Fetches overlap up to cfg.workers requests, but
// batches.jsonl is written strictly in key order, chunk by chunk, so resumed
// and fresh runs produce identical files.
inline std::vector<CompletionBatch> run_query_stage(const std::vector<PromptInstance>& prompts,
                                                    const std::vector<GenerationParams>& grid,
                                                    Provider& provider,
                                                    const std::filesystem::path& bench_dir,
                                                    const RunConfig& cfg,
                                                    uint64_t* provider_calls = nullptr) {
  std::filesystem::create_directories(bench_dir);
  std::filesystem::path batches_path = bench_dir / "batches.jsonl";
  std::filesystem::path markers_path = bench_dir / "completed.markers";

  std::map<std::pair<std::string, std::string>, CompletionBatch> stored;
  if (cfg.resume && std::filesystem::exists(batches_path)) {
    for (const auto& j : read_jsonl(batches_path)) {
      CompletionBatch b = batch_from_json(j);
      stored[{b.prompt_hash, params_digest(b.params)}] = std::move(b);
    }
  }
  MarkerLedger ledger(markers_path);
  if (!cfg.resume) {
    // Fresh run: start both files over.
    JsonlWriter truncate_batches(batches_path);
    std::filesystem::remove(markers_path);
    ledger = MarkerLedger(markers_path);
    stored.clear();
  }

  struct Key {
    const PromptInstance* prompt;
    const GenerationParams* params;
    std::string digest;
  };
  std::vector<Key> keys;
  keys.reserve(prompts.size() * grid.size());
  for (const PromptInstance& p : prompts)
    for (const GenerationParams& g : grid) keys.push_back({&p, &g, params_digest(g)});

  std::vector<CompletionBatch> out(keys.size());
  JsonlWriter writer(batches_path, /*append=*/true);
  size_t chunk = static_cast<size_t>(std::max(1, cfg.workers)) * 4;
  for (size_t base = 0; base < keys.size(); base += chunk) {
    size_t end = std::min(keys.size(), base + chunk);
    detail::parallel_for(end - base, cfg.workers, [&](size_t off) {
      const Key& k = keys[base + off];
      if (ledger.completed(k.prompt->prompt_hash, k.digest)) {
        auto it = stored.find({k.prompt->prompt_hash, k.digest});
        if (it != stored.end()) {
          out[base + off] = it->second;
          return;
        }
        // Marker without a persisted batch: fall through and re-query.
      }
      if (provider_calls) ++*provider_calls;
      out[base + off] = complete(provider, *k.prompt, *k.params, cfg.retry);
    });
    for (size_t i = base; i < end; ++i) {
      const Key& k = keys[i];
      if (ledger.completed(k.prompt->prompt_hash, k.digest) &&
          stored.count({k.prompt->prompt_hash, k.digest}))
        continue;  // already persisted by the interrupted run
      writer.write(to_json(out[i]));
      writer.flush();
      ledger.mark(k.prompt->prompt_hash, k.digest);
    }
  }
  return out;
}

//===----------------------------------------------------------------------===//
// Stage: repair
//===----------------------------------------------------------------------===//

// Expands batches into candidates. The prompt's beginning string primed the
// completion, so it is prepended to every completion of that prompt before
// the fixes run. Failed batches contribute nothing.
inline std::vector<CandidateText> run_repair_stage(const std::vector<PromptInstance>& prompts,
                                                   const BenchmarkManifest& m,
                                                   const std::vector<CompletionBatch>& batches) {
  std::unordered_map<std::string, const PromptInstance*> by_hash;
  for (const PromptInstance& p : prompts) by_hash[p.prompt_hash] = &p;
  std::vector<CandidateText> out;
  for (const CompletionBatch& b : batches) {
    if (b.failed()) continue;
    auto it = by_hash.find(b.prompt_hash);
    if (it == by_hash.end())
      throw RecordError("batch references unknown prompt " + b.prompt_hash);
    const std::string& beginning =
        m.prompt_data.beginnings.at(it->second->config.beginning);
    std::vector<CandidateText> cands =
        process_batch(b.completions, beginning, b.prompt_hash, params_digest(b.params));
    for (auto& c : cands) out.push_back(std::move(c));
  }
  return out;
}

//===----------------------------------------------------------------------===//
// Stage: classify
//===----------------------------------------------------------------------===//

// Golden violation set for a benchmark: evaluate the golden assertion file
// under the benchmark's own stimulus. Manifest validation guarantees it
// parses and checks; its evaluation must complete within the budget.
inline std::vector<uint64_t> golden_violations(const BenchmarkManifest& m,
                                               const StimulusSpec& spec,
                                               uint64_t budget = kDefaultEvalBudget) {
  auto parsed = parse(golden_assertion_text(m));
  if (!parsed.ok())
    throw ManifestError(ManifestError::Kind::InvariantViolation, "golden.sva",
                        "golden assertion does not parse: " + parsed.error().detail);
  SvaFile file = parsed.take();
  SignalTable table = signal_table(m);
  if (auto err = check(file, table))
    throw ManifestError(ManifestError::Kind::InvariantViolation, "golden.sva",
                        "golden assertion does not check: " + err->detail);
  EvalResult r = evaluate(file, table, spec, budget);
  if (r.status != EvalResult::Status::Completed)
    throw ManifestError(ManifestError::Kind::InvariantViolation, "golden.sva",
                        "golden assertion exceeds the evaluation budget");
  return r.violations.file_union;
}

inline std::vector<Outcome> run_classify_stage(const std::vector<CandidateText>& candidates,
                                               ClassifyCache& cache) {
  std::vector<Outcome> out;
  out.reserve(candidates.size());
  for (const CandidateText& c : candidates) out.push_back(cache.classify_text(c.text));
  return out;
}

//===----------------------------------------------------------------------===//
// Stage: score
//===----------------------------------------------------------------------===//

// Joins candidates with their prompt coordinates and sampling parameters.
inline std::vector<ScoredCandidate> join_scored(const BenchmarkManifest& m,
                                                const std::vector<PromptInstance>& prompts,
                                                const std::vector<CompletionBatch>& batches,
                                                const std::vector<CandidateText>& candidates,
                                                const std::vector<Outcome>& outcomes) {
  if (candidates.size() != outcomes.size())
    throw RecordError(m.id + ": " + std::to_string(candidates.size()) + " candidates but " +
                      std::to_string(outcomes.size()) + " outcomes");
  std::unordered_map<std::string, const PromptInstance*> prompt_by_hash;
  for (const PromptInstance& p : prompts) prompt_by_hash[p.prompt_hash] = &p;
  std::unordered_map<std::string, const GenerationParams*> params_by_digest;
  for (const CompletionBatch& b : batches)
    params_by_digest.emplace(params_digest(b.params), &b.params);

  std::vector<ScoredCandidate> out;
  out.reserve(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    const CandidateText& c = candidates[i];
    auto pit = prompt_by_hash.find(c.batch_ref.prompt_hash);
    if (pit == prompt_by_hash.end())
      throw RecordError(m.id + ": candidate references unknown prompt " +
                        c.batch_ref.prompt_hash);
    auto dit = params_by_digest.find(c.batch_ref.params_digest);
    if (dit == params_by_digest.end())
      throw RecordError(m.id + ": candidate references unknown params " +
                        c.batch_ref.params_digest);
    ScoredCandidate sc;
    sc.benchmark_id = m.id;
    sc.config = pit->second->config;
    sc.temperature = dit->second->temperature;
    sc.frequency_penalty = dit->second->frequency_penalty;
    sc.candidate = c;
    sc.outcome = outcomes[i];
    out.push_back(std::move(sc));
  }
  return out;
}

inline uint64_t count_generated(const std::vector<CompletionBatch>& batches) {
  uint64_t n = 0;
  for (const CompletionBatch& b : batches) n += b.completions.size();
  return n;
}

//===----------------------------------------------------------------------===//
// End to end
//===----------------------------------------------------------------------===//

inline RunResult run_pipeline(const RunConfig& cfg, Provider& provider) {
  RunResult result;
  std::vector<GenerationParams> grid =
      enumerate_param_grid(cfg.temperatures, cfg.frequency_penalties, cfg.base_params);

  std::vector<ScoredCandidate> all_scored;
  for (const std::string& name : cfg.benchmarks) {
    BenchmarkManifest m = resolve_benchmark(name);
    std::filesystem::path bench_dir = cfg.out_dir / m.id;
    std::filesystem::create_directories(bench_dir);

    std::vector<PromptInstance> prompts = generate_prompts(m);
    {
      JsonlWriter w(bench_dir / "prompts.jsonl");
      for (const PromptInstance& p : prompts) w.write(to_json(p));
    }

    std::vector<CompletionBatch> batches =
        run_query_stage(prompts, grid, provider, bench_dir, cfg, &result.provider_calls);
    for (const CompletionBatch& b : batches)
      if (b.failed())
        result.recorded_failures.push_back(
            {m.id + "/" + b.prompt_hash + "/" + params_digest(b.params), b.failure});

    std::vector<CandidateText> candidates = run_repair_stage(prompts, m, batches);
    {
      JsonlWriter w(bench_dir / "candidates.jsonl");
      for (const CandidateText& c : candidates) w.write(to_json(c));
    }

    StimulusSpec spec = build_stimulus(m);
    SignalTable table = signal_table(m);
    ClassifyCache cache(table, spec, golden_violations(m, spec, cfg.budget), cfg.budget);
    std::vector<Outcome> outcomes = run_classify_stage(candidates, cache);
    {
      JsonlWriter w(bench_dir / "outcomes.jsonl");
      for (size_t i = 0; i < outcomes.size(); ++i) {
        nlohmann::json j = to_json(candidates[i]);
        j.erase("text");
        j.update(to_json(outcomes[i]));
        w.write(j);
      }
    }

    std::vector<ScoredCandidate> scored =
        join_scored(m, prompts, batches, candidates, outcomes);
    std::vector<const ScoredCandidate*> refs;
    refs.reserve(scored.size());
    for (const ScoredCandidate& sc : scored) refs.push_back(&sc);
    result.per_benchmark.push_back(aggregate(m.id, refs, count_generated(batches)));
    for (auto& sc : scored) all_scored.push_back(std::move(sc));
  }

  result.report.metrics = result.per_benchmark;
  result.report.ranking = rank_configs(all_scored);
  result.report.breakdowns = component_breakdowns(all_scored);
  write_report(result.report, cfg.out_dir / "report");
  return result;
}

}  // namespace svag
