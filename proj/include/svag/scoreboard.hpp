#pragma once

#include "svag/checker.hpp"
#include "svag/eval.hpp"
#include "svag/llm.hpp"
#include "svag/parser.hpp"
#include "svag/prompt.hpp"
#include "svag/repair.hpp"
#include "svag/stimulus.hpp"
#include "svag/text.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace svag {

// Where a candidate's run ended. SimFailed means it compiled but evaluation
// did not complete (budget blown); Simulated carries the verdict.
struct Outcome {
  enum class Stage { CompileFailed, SimFailed, Simulated };

  Stage stage = Stage::CompileFailed;
  std::optional<CompileErrorKind> error_kind;  // set when CompileFailed
  std::string detail;                          // error text or failure note
  bool correct = false;                        // set when Simulated
  std::vector<uint64_t> violations;            // file-level union when Simulated

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

inline const char* to_string(Outcome::Stage s) {
  switch (s) {
    case Outcome::Stage::CompileFailed: return "compile_failed";
    case Outcome::Stage::SimFailed: return "sim_failed";
    case Outcome::Stage::Simulated: return "simulated";
  }
  return "?";
}

// Runs one candidate through the full gate: parse, interface check, exhaustive
// evaluation, and comparison against the golden violation set. Correct means
// the file-level union of violation cycles equals the golden's exactly.
inline Outcome classify(const std::string& text, const SignalTable& table,
                        const StimulusSpec& spec, const std::vector<uint64_t>& golden_union,
                        uint64_t budget = kDefaultEvalBudget) {
  Outcome out;
  auto parsed = parse(text);
  if (!parsed.ok()) {
    out.stage = Outcome::Stage::CompileFailed;
    out.error_kind = parsed.error().kind;
    out.detail = parsed.error().detail;
    return out;
  }
  SvaFile file = parsed.take();
  if (auto err = check(file, table)) {
    out.stage = Outcome::Stage::CompileFailed;
    out.error_kind = err->kind;
    out.detail = err->detail;
    return out;
  }
  EvalResult r = evaluate(file, table, spec, budget);
  if (r.status == EvalResult::Status::BudgetExceeded) {
    out.stage = Outcome::Stage::SimFailed;
    out.detail = "evaluation budget exceeded after " + std::to_string(r.steps_used) + " steps";
    return out;
  }
  out.stage = Outcome::Stage::Simulated;
  out.violations = r.violations.file_union;
  out.correct = out.violations == golden_union;
  return out;
}

// Classification cache keyed by whitespace-normalized text. Whitespace never
// changes the token stream in this grammar, so equal keys share one verdict;
// the first candidate seen for a key is classified and the rest reuse it.
// This is also what makes the Unique metrics cheap: one evaluation per key.
class ClassifyCache {
 public:
  ClassifyCache(const SignalTable& table, const StimulusSpec& spec,
                std::vector<uint64_t> golden_union, uint64_t budget = kDefaultEvalBudget)
      : table_(table), spec_(spec), golden_union_(std::move(golden_union)), budget_(budget) {}

  const Outcome& classify_text(const std::string& text) {
    std::string key = normalize_whitespace(text);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Outcome out = classify(text, table_, spec_, golden_union_, budget_);
    return memo_.emplace(std::move(key), std::move(out)).first->second;
  }

  size_t unique_texts() const { return memo_.size(); }
  const std::vector<uint64_t>& golden_union() const { return golden_union_; }

 private:
  const SignalTable& table_;
  const StimulusSpec& spec_;
  std::vector<uint64_t> golden_union_;
  uint64_t budget_;
  std::unordered_map<std::string, Outcome> memo_;
};

//===----------------------------------------------------------------------===//
// Aggregation
//===----------------------------------------------------------------------===//

struct StageCounts {
  uint64_t processed = 0;
  uint64_t compiled = 0;
  uint64_t simulated = 0;
  uint64_t correct = 0;

  void add(const Outcome& o) {
    ++processed;
    if (o.stage != Outcome::Stage::CompileFailed) ++compiled;
    if (o.stage == Outcome::Stage::Simulated) ++simulated;
    if (o.stage == Outcome::Stage::Simulated && o.correct) ++correct;
  }
  void merge(const StageCounts& o) {
    processed += o.processed;
    compiled += o.compiled;
    simulated += o.simulated;
    correct += o.correct;
  }
  bool monotone() const {
    return correct <= simulated && simulated <= compiled && compiled <= processed;
  }
};

// A percentage with an explicit empty-denominator flag: 0/0 renders "0.00"
// but is marked n/a so reports can distinguish it from a true zero.
struct Rate {
  double value = 0.0;
  bool na = false;

  std::string render() const { return format_pct(value); }
};

inline Rate pct(uint64_t num, uint64_t den) {
  if (den == 0) return {0.0, true};
  return {100.0 * static_cast<double>(num) / static_cast<double>(den), false};
}

// One row of the metrics table. Rates are derived, not stored:
//   pct_compiled  = compiled  / processed
//   pct_simulated = simulated / compiled
//   pct_correct   = correct   / simulated
// in both All (every candidate) and Unique (per normalized text) variants.
struct MetricsRow {
  std::string scope;       // benchmark id, config label, or "Total"
  uint64_t generated = 0;  // raw completions returned by the provider
  StageCounts all;
  StageCounts unique;

  Rate pct_compiled(bool uniq = false) const {
    const StageCounts& c = uniq ? unique : all;
    return pct(c.compiled, c.processed);
  }
  Rate pct_simulated(bool uniq = false) const {
    const StageCounts& c = uniq ? unique : all;
    return pct(c.simulated, c.compiled);
  }
  Rate pct_correct(bool uniq = false) const {
    const StageCounts& c = uniq ? unique : all;
    return pct(c.correct, c.simulated);
  }
};

// A fully-scored candidate: prompt coordinates, sampling parameters, the
// candidate text with provenance, and the classification verdict.
struct ScoredCandidate {
  std::string benchmark_id;
  PromptConfig config;
  double temperature = 0.0;
  double frequency_penalty = 0.0;
  CandidateText candidate;
  Outcome outcome;
};

// Counts one scope's candidates. Unique counting keys on the normalized text;
// each key contributes once, using its first candidate's outcome.
inline MetricsRow aggregate(const std::string& scope,
                            const std::vector<const ScoredCandidate*>& group, uint64_t generated) {
  MetricsRow row;
  row.scope = scope;
  row.generated = generated;
  std::unordered_map<std::string, const Outcome*> uniq;
  for (const ScoredCandidate* sc : group) {
    row.all.add(sc->outcome);
    uniq.emplace(normalize_whitespace(sc->candidate.text), &sc->outcome);
  }
  for (const auto& [key, outcome] : uniq) row.unique.add(*outcome);
  return row;
}

//===----------------------------------------------------------------------===//
// Config ranking and component breakdowns
//===----------------------------------------------------------------------===//

struct ConfigKey {
  PromptConfig config;
  double temperature = 0.0;
  double frequency_penalty = 0.0;

  friend bool operator==(const ConfigKey&, const ConfigKey&) = default;
  // Canonical order: config axes first, then the sampling grid axes.
  friend auto operator<=>(const ConfigKey&, const ConfigKey&) = default;
};

struct RankedConfig {
  ConfigKey key;
  double accuracy = 0.0;  // macro-average over benchmarks of pct_correct (All)
  StageCounts totals;     // summed across benchmarks, All variant
};

// Ranks every (prompt config, sampling params) coordinate by accuracy.
// Accuracy is the across-benchmark mean of each benchmark's correct/simulated
// percentage (a benchmark with nothing simulated for the key contributes 0).
// Ties keep canonical key order, so the ranking is fully deterministic.
inline std::vector<RankedConfig> rank_configs(const std::vector<ScoredCandidate>& scored) {
  std::map<ConfigKey, std::map<std::string, StageCounts>> per_key;
  for (const ScoredCandidate& sc : scored) {
    ConfigKey key{sc.config, sc.temperature, sc.frequency_penalty};
    per_key[key][sc.benchmark_id].add(sc.outcome);
  }
  std::vector<RankedConfig> out;
  out.reserve(per_key.size());
  for (const auto& [key, benches] : per_key) {
    RankedConfig rc;
    rc.key = key;
    double sum = 0.0;
    for (const auto& [bench, counts] : benches) {
      sum += pct(counts.correct, counts.simulated).value;
      rc.totals.merge(counts);
    }
    rc.accuracy = benches.empty() ? 0.0 : sum / static_cast<double>(benches.size());
    out.push_back(std::move(rc));
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedConfig& a, const RankedConfig& b) {
    if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
    return a.key < b.key;
  });
  return out;
}

// One prompt-component axis collapsed to (value label -> counts), used for
// the per-component comparison tables. Labels appear in canonical axis order.
struct BreakdownRow {
  std::string value;
  StageCounts counts;
};

inline std::vector<BreakdownRow> breakdown(
    const std::vector<ScoredCandidate>& scored,
    const std::function<std::string(const ScoredCandidate&)>& axis_value) {
  std::vector<BreakdownRow> rows;
  std::map<std::string, size_t> index;
  for (const ScoredCandidate& sc : scored) {
    std::string value = axis_value(sc);
    auto [it, inserted] = index.emplace(value, rows.size());
    if (inserted) rows.push_back({value, {}});
    rows[it->second].counts.add(sc.outcome);
  }
  return rows;
}

// Axis label helpers shared by reports and tests.
inline std::string example_variant_label(const PromptConfig& c) {
  std::string s = to_string(c.example);
  if (c.example != ExampleKind::NoExample) {
    s += '-';
    s += to_string(c.example_synonym);
  }
  return s;
}
inline std::string comment_variant_label(const PromptConfig& c) {
  return std::string(to_string(c.comment)) + "-" + to_string(c.comment_synonym);
}

}  // namespace svag
