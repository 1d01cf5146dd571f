// Tests for the experiment pipeline: prompt assembly, completion providers,
// lexical repair, persistence records, scoring aggregation, report rendering,
// and the end-to-end run (including resume and determinism).

#include <catch2/catch_amalgamated.hpp>

#include "svag/benchmark.hpp"
#include "svag/bundled.hpp"
#include "svag/llm.hpp"
#include "svag/pipeline.hpp"
#include "svag/prompt.hpp"
#include "svag/records.hpp"
#include "svag/repair.hpp"
#include "svag/report.hpp"
#include "svag/scoreboard.hpp"

#include "generators.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

using namespace svag;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "svag-unit" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Candidate bodies compatible with every stored beginning string: they start
// with "assert property (@(posedge clk) " and reference only BM1's interface.
const std::string kCorrectBody =
    "assert property (@(posedge clk) ($past(lock) == 1) |-> ($stable(data) == 1));";
const std::string kWrongBody =
    "assert property (@(posedge clk) (lock == 1) |-> (data == data));";
const std::string kBrokenBody =
    "assert property (@(posedge clk) (w_en == 0) |-> (data == $past(data)));";

// Writes one replay fixture per (prompt, params) key whose completions are
// the given bodies minus the prompt's beginning string.
void plant_fixtures(const fs::path& dir, const BenchmarkManifest& m,
                    const std::vector<PromptInstance>& prompts,
                    const std::vector<GenerationParams>& grid,
                    const std::vector<std::string>& bodies) {
  fs::create_directories(dir);
  for (const auto& p : prompts) {
    const std::string& beginning = m.prompt_data.beginnings.at(p.config.beginning);
    nlohmann::json j;
    auto& arr = j["completions"] = nlohmann::json::array();
    for (const std::string& body : bodies) {
      REQUIRE(body.rfind(beginning, 0) == 0);
      arr.push_back(body.substr(beginning.size()));
    }
    for (const auto& params : grid)
      write_file(detail::fixture_path(dir, p.prompt_hash, params).string(), j.dump());
  }
}

std::string slurp(const fs::path& p) { return read_file(p.string()); }

// Provider stubs for retry and recording tests.
class ScriptedProvider : public Provider {
 public:
  ScriptedProvider(std::vector<std::string> completions, int failures_before_success,
                   ProviderError::Kind kind, bool is_deterministic = false)
      : completions_(std::move(completions)),
        failures_left_(failures_before_success),
        kind_(kind),
        deterministic_(is_deterministic) {}

  std::string id() const override { return "scripted"; }
  bool deterministic() const override { return deterministic_; }
  int calls = 0;

  std::vector<std::string> fetch(const PromptInstance&, const GenerationParams&) override {
    ++calls;
    if (failures_left_ != 0) {
      if (failures_left_ > 0) --failures_left_;
      throw ProviderError(kind_, "scripted failure");
    }
    return completions_;
  }

 private:
  std::vector<std::string> completions_;
  int failures_left_;  // -1 means always fail
  ProviderError::Kind kind_;
  bool deterministic_;
};

class MustNotCallProvider : public Provider {
 public:
  std::string id() const override { return "must-not-call"; }
  bool deterministic() const override { return true; }
  std::vector<std::string> fetch(const PromptInstance&, const GenerationParams&) override {
    FAIL("provider was queried although every key was resumable");
    return {};
  }
};

}  // namespace

TEST_CASE("config enumeration is complete, distinct, and canonically ordered") {
  auto configs = enumerate_configs();
  REQUIRE(configs.size() == 378);
  CHECK(std::is_sorted(configs.begin(), configs.end()));
  CHECK(std::adjacent_find(configs.begin(), configs.end()) == configs.end());
  for (const auto& c : configs) CHECK(is_valid(c));

  auto no_example = std::count_if(configs.begin(), configs.end(), [](const PromptConfig& c) {
    return c.example == ExampleKind::NoExample;
  });
  CHECK(no_example == 54);

  PromptConfig c{DesignSourceKind::Golden, ExampleKind::Trivial, Synonym::AT,
                 CommentKind::Detailed,    Synonym::PC,          BeginningKind::Short};
  CHECK(config_label(c) == "GoldenDUT.TrivialEx-AT.DetailedCom-PC.ShortBeg");
  PromptConfig n{DesignSourceKind::Empty, ExampleKind::NoExample, Synonym::None,
                 CommentKind::Brief,      Synonym::AT,            BeginningKind::Empty};
  CHECK(config_label(n) == "EmptyDUT.NoEx.BriefCom-AT.EmptyBeg");
}

TEST_CASE("synonym substitution touches only the leading phrase") {
  CHECK(apply_synonym("assert that the data is not changed if the lock is set\n", Synonym::PC) ==
        "property to check that the data is not changed if the lock is set\n");
  CHECK(apply_synonym("assert that X", Synonym::AT) == "assert that X");
  CHECK(apply_synonym("assert that we assert that twice", Synonym::PC) ==
        "property to check that we assert that twice");
  CHECK_THROWS_AS(apply_synonym("the data is unchanged", Synonym::PC), PrefixMissing);
  CHECK_THROWS_AS(apply_synonym("Assert that X", Synonym::AT), PrefixMissing);
}

TEST_CASE("prompt assembly follows the documented template") {
  BenchmarkManifest m = load_bundled("BM1");

  PromptConfig no_example{DesignSourceKind::Empty, ExampleKind::NoExample, Synonym::None,
                          CommentKind::Brief,      Synonym::AT,            BeginningKind::Empty};
  PromptInstance p = assemble_prompt(m, no_example);
  CHECK(p.text == extract_module_part(m) + "\n\n" +
                      "// assert that the data is not changed if the lock is set\n");

  // Beginnings append verbatim and are the only difference between configs
  // that share the other coordinates.
  PromptConfig with_short = no_example;
  with_short.beginning = BeginningKind::Short;
  CHECK(assemble_prompt(m, with_short).text == p.text + "assert");

  // All 378 texts are unique and contain neither the golden assertion nor a
  // second comment block.
  std::set<std::string> texts;
  std::string golden = golden_assertion_text(m);
  for (const auto& c : enumerate_configs()) {
    PromptInstance inst = assemble_prompt(m, c);
    texts.insert(inst.text);
    CHECK(inst.text.find(golden) == std::string::npos);
    CHECK(inst.prompt_hash == prompt_digest(m.id, inst.text));
  }
  CHECK(texts.size() == 378);
}

TEST_CASE("prompt digests are stable and keyed by benchmark") {
  CHECK(prompt_digest("BM1", "abc") == prompt_digest("BM1", "abc"));
  CHECK(prompt_digest("BM1", "abc") != prompt_digest("BM2", "abc"));
  CHECK(prompt_digest("BM1", "abc") != prompt_digest("BM1", "abd"));
  CHECK(prompt_digest("BM1", "abc").size() == 16);
}

TEST_CASE("repair: unconditional fixes and rule copies") {
  // Non-ASCII bytes are stripped; a missing endmodule is appended.
  CHECK(apply_inplace_fixes("assert \xc3\xa9 x;") == "assert  x;\nendmodule");
  CHECK(apply_inplace_fixes("foo\nendmodule") == "foo\nendmodule");
  CHECK(apply_inplace_fixes("") == "\nendmodule");

  // R2 truncates after the first endmodule.
  CandidateText tail{apply_inplace_fixes("a;\nendmodule\nmodule extra; x;"), true, {}, {}};
  auto copies = derive_repaired_copies(tail);
  REQUIRE(copies.size() == 1);
  CHECK(copies[0].applied == std::vector<RepairRule>{RepairRule::R2});
  CHECK(copies[0].text == "a;\nendmodule");
  CHECK_FALSE(copies[0].original);

  // R3 deletes triple-quoted regions, pairing like with like; the combined
  // R3-then-R2 variant appears only when it differs from both.
  CandidateText quoted{apply_inplace_fixes("x \"\"\"doc ''' string\"\"\" y;"), true, {}, {}};
  copies = derive_repaired_copies(quoted);
  REQUIRE(copies.size() == 1);
  CHECK(copies[0].applied == std::vector<RepairRule>{RepairRule::R3});
  CHECK(copies[0].text == "x  y;\nendmodule");

  CandidateText both{apply_inplace_fixes("p;\n'''q'''\nendmodule\ntrailing"), true, {}, {}};
  copies = derive_repaired_copies(both);
  REQUIRE(copies.size() == 3);
  CHECK(copies[0].applied == std::vector<RepairRule>{RepairRule::R2});
  CHECK(copies[0].text == "p;\n'''q'''\nendmodule");
  CHECK(copies[1].applied == std::vector<RepairRule>{RepairRule::R3});
  CHECK(copies[1].text == "p;\n\nendmodule\ntrailing");
  CHECK(copies[2].applied == std::vector<RepairRule>{RepairRule::R2, RepairRule::R3});
  CHECK(copies[2].text == "p;\n\nendmodule");

  // An unmatched opener deletes through the end; the closing endmodule is
  // restored by the re-fix.
  CandidateText unmatched{apply_inplace_fixes("ok;\n\"\"\"lost tail"), true, {}, {}};
  copies = derive_repaired_copies(unmatched);
  REQUIRE(copies.size() == 1);
  CHECK(copies[0].text == "ok;\n\nendmodule");
}

TEST_CASE("property: repair invariants over random completions") {
  gen::Rng rng(0x5eed);
  for (int i = 0; i < 2000; ++i) {
    std::string raw = gen::random_completion(rng);
    std::string fixed = apply_inplace_fixes(raw);
    INFO("raw bytes: " << raw.size());
    CHECK(apply_inplace_fixes(fixed) == fixed);
    CHECK(std::all_of(fixed.begin(), fixed.end(),
                      [](char c) { return static_cast<unsigned char>(c) < 0x80; }));
    CHECK(fixed.find("endmodule") != std::string::npos);
  }

  for (int i = 0; i < 500; ++i) {
    std::vector<std::string> completions;
    int n = gen::pick(rng, 1, 4);
    for (int k = 0; k < n; ++k) completions.push_back(gen::random_completion(rng));
    auto candidates = process_batch(completions, "assert", "hash", "digest");

    REQUIRE(candidates.size() >= completions.size());
    int originals = 0;
    std::set<std::string> texts_in_group;
    for (size_t k = 0; k < candidates.size(); ++k) {
      const CandidateText& c = candidates[k];
      if (c.original) {
        // Originals carry exactly the unconditional fixes, in batch order.
        CHECK(c.text == apply_inplace_fixes("assert" + completions[static_cast<size_t>(
                                                           c.batch_ref.index)]));
        CHECK(c.batch_ref.index == originals);
        CHECK(c.applied.empty());
        ++originals;
        texts_in_group.clear();
      } else {
        CHECK_FALSE(c.applied.empty());
      }
      // Final texts within one original's group never repeat.
      CHECK(texts_in_group.insert(c.text).second);
    }
    CHECK(originals == n);
  }
}

TEST_CASE("generation parameter digests and the default grid") {
  GenerationParams p;
  CHECK(params_digest(p) == "t0.4_f0_n10_mt256_tp1_pp0");
  p.temperature = 0.9;
  p.frequency_penalty = 0.5;
  p.n = 2;
  CHECK(params_digest(p) == "t0.9_f0.5_n2_mt256_tp1_pp0");

  auto grid = enumerate_param_grid({0.4, 0.9}, {0.0, 0.5, 1.0}, GenerationParams{});
  REQUIRE(grid.size() == 6);
  CHECK(grid[0].temperature == 0.4);
  CHECK(grid[0].frequency_penalty == 0.0);
  CHECK(grid[2].temperature == 0.4);
  CHECK(grid[2].frequency_penalty == 1.0);
  CHECK(grid[3].temperature == 0.9);

  CHECK(enumerate_configs().size() * grid.size() == 2268);
  CHECK(2268 * GenerationParams{}.n == 22680);
}

TEST_CASE("completion retry policy and provider contract") {
  BenchmarkManifest m = load_bundled("BM1");
  PromptInstance prompt = assemble_prompt(m, enumerate_configs().front());
  GenerationParams params;
  params.n = 1;
  RetryPolicy fast{5, 0, 1};

  SECTION("transient failures are retried until success") {
    ScriptedProvider flaky({" ok"}, 2, ProviderError::Kind::RateLimited);
    CompletionBatch b = complete(flaky, prompt, params, fast);
    CHECK_FALSE(b.failed());
    CHECK(flaky.calls == 3);
    CHECK(b.completions == std::vector<std::string>{" ok"});
  }
  SECTION("exhausted retries record the failure on the batch") {
    ScriptedProvider dead({}, -1, ProviderError::Kind::Timeout);
    CompletionBatch b = complete(dead, prompt, params, fast);
    CHECK(b.failed());
    CHECK(dead.calls == 5);
  }
  SECTION("deterministic providers are never retried") {
    ScriptedProvider fixture({}, -1, ProviderError::Kind::Unavailable, true);
    CompletionBatch b = complete(fixture, prompt, params, fast);
    CHECK(b.failed());
    CHECK(fixture.calls == 1);
    CHECK(b.retrieved_at == kEpochTimestamp);
  }
  SECTION("auth errors abort instead of retrying") {
    ScriptedProvider locked({}, -1, ProviderError::Kind::Auth);
    CHECK_THROWS_AS(complete(locked, prompt, params, fast), ProviderError);
    CHECK(locked.calls == 1);
  }
  SECTION("completions containing the stop string violate the contract") {
    ScriptedProvider chatty({" x;\nendmodule\nmodule t;"}, 0, ProviderError::Kind::Timeout);
    try {
      complete(chatty, prompt, params, fast);
      FAIL("expected a contract violation");
    } catch (const ProviderError& e) {
      CHECK(e.kind == ProviderError::Kind::Contract);
      CHECK_FALSE(e.retryable());
    }
  }
}

TEST_CASE("recording and replaying completions round-trips") {
  fs::path dir = fresh_dir("record-replay");
  BenchmarkManifest m = load_bundled("BM1");
  PromptInstance prompt = assemble_prompt(m, enumerate_configs().front());
  GenerationParams params;
  params.n = 2;

  auto inner = std::make_shared<ScriptedProvider>(
      std::vector<std::string>{" first;", " second;"}, 0, ProviderError::Kind::Timeout);
  RecordingProvider recorder(inner, dir);
  CHECK(recorder.id() == "record(scripted)");
  CHECK_FALSE(recorder.deterministic());

  CompletionBatch live = complete(recorder, prompt, params, RetryPolicy{3, 0, 1});
  REQUIRE_FALSE(live.failed());

  ReplayProvider replay(dir);
  CompletionBatch replayed = complete(replay, prompt, params, RetryPolicy{3, 0, 1});
  REQUIRE_FALSE(replayed.failed());
  CHECK(replayed.completions == live.completions);
  CHECK(replayed.retrieved_at == kEpochTimestamp);
  CHECK(replayed.provider_id == "replay");

  GenerationParams other = params;
  other.temperature = 0.9;
  CompletionBatch missing = complete(replay, prompt, other, RetryPolicy{3, 0, 1});
  CHECK(missing.failed());
}

TEST_CASE("record serialization round-trips") {
  BenchmarkManifest m = load_bundled("BM2");
  PromptConfig config = enumerate_configs()[100];
  PromptInstance p = assemble_prompt(m, config);
  PromptInstance p2 = prompt_from_json(to_json(p));
  CHECK(p2.benchmark_id == p.benchmark_id);
  CHECK(p2.config == p.config);
  CHECK(p2.prompt_hash == p.prompt_hash);
  CHECK(p2.text == p.text);

  GenerationParams params;
  params.temperature = 0.9;
  CHECK(params_from_json(to_json(params)) == params);

  CompletionBatch b;
  b.prompt_hash = p.prompt_hash;
  b.params = params;
  b.completions = {" a;", " b;"};
  b.provider_id = "replay";
  b.retrieved_at = kEpochTimestamp;
  CompletionBatch b2 = batch_from_json(to_json(b));
  CHECK(b2.prompt_hash == b.prompt_hash);
  CHECK(b2.params == b.params);
  CHECK(b2.completions == b.completions);
  CHECK_FALSE(b2.failed());

  CompletionBatch failed = b;
  failed.completions.clear();
  failed.failure = "no fixture";
  CHECK(batch_from_json(to_json(failed)).failed());

  CandidateText c{"assert x;\nendmodule", false, {RepairRule::R2, RepairRule::R3},
                  {p.prompt_hash, params_digest(params), 4}};
  CandidateText c2 = candidate_from_json(to_json(c));
  CHECK(c2.text == c.text);
  CHECK(c2.original == c.original);
  CHECK(c2.applied == c.applied);
  CHECK(c2.batch_ref == c.batch_ref);

  Outcome sim;
  sim.stage = Outcome::Stage::Simulated;
  sim.correct = true;
  sim.violations = {9, 14, 16};
  CHECK(outcome_from_json(to_json(sim)) == sim);

  Outcome bad;
  bad.stage = Outcome::Stage::CompileFailed;
  bad.error_kind = CompileErrorKind::UnknownIdentifier;
  bad.detail = "'w_en' is not a signal or constant of this benchmark";
  CHECK(outcome_from_json(to_json(bad)) == bad);
}

TEST_CASE("jsonl files and the resume ledger") {
  fs::path dir = fresh_dir("records");

  JsonlWriter w(dir / "rows.jsonl");
  w.write({{"k", 1}});
  w.write({{"k", 2}});
  w.flush();
  std::ofstream(dir / "rows.jsonl", std::ios::app) << "\n";  // stray blank line
  auto rows = read_jsonl(dir / "rows.jsonl");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1]["k"] == 2);

  write_file((dir / "broken.jsonl").string(), "{\"k\":1}\nnot json\n");
  try {
    read_jsonl(dir / "broken.jsonl");
    FAIL("expected a parse error");
  } catch (const RecordError& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }

  MarkerLedger ledger(dir / "completed.markers");
  CHECK_FALSE(ledger.completed("h1", "d1"));
  ledger.mark("h1", "d1");
  ledger.mark("h1", "d1");  // idempotent
  ledger.mark("h2", "d1");
  CHECK(ledger.size() == 2);

  MarkerLedger reloaded(dir / "completed.markers");
  CHECK(reloaded.completed("h1", "d1"));
  CHECK(reloaded.completed("h2", "d1"));
  CHECK_FALSE(reloaded.completed("h2", "d2"));
}

TEST_CASE("aggregation counts stages and deduplicates by normalized text") {
  auto outcome = [](Outcome::Stage s, bool correct) {
    Outcome o;
    o.stage = s;
    o.correct = correct;
    return o;
  };
  PromptConfig config = enumerate_configs().front();
  std::vector<ScoredCandidate> scored;
  auto add = [&](const std::string& text, Outcome o) {
    ScoredCandidate sc;
    sc.benchmark_id = "BM1";
    sc.config = config;
    sc.temperature = 0.4;
    sc.candidate.text = text;
    sc.outcome = std::move(o);
    scored.push_back(std::move(sc));
  };
  add("assert a;", outcome(Outcome::Stage::Simulated, true));
  add("assert  a;", outcome(Outcome::Stage::Simulated, true));  // same modulo whitespace
  add("assert b;", outcome(Outcome::Stage::Simulated, false));
  add("assert c;", outcome(Outcome::Stage::CompileFailed, false));
  add("assert d;", outcome(Outcome::Stage::SimFailed, false));

  std::vector<const ScoredCandidate*> view;
  for (const auto& s : scored) view.push_back(&s);
  MetricsRow row = aggregate("BM1", view, 99);

  CHECK(row.generated == 99);
  CHECK(row.all.processed == 5);
  CHECK(row.all.compiled == 4);  // the budget-exceeded candidate still compiled
  CHECK(row.all.simulated == 3);
  CHECK(row.all.correct == 2);
  CHECK(row.all.monotone());
  CHECK(row.unique.processed == 4);
  CHECK(row.unique.compiled == 3);
  CHECK(row.unique.simulated == 2);
  CHECK(row.unique.correct == 1);
  CHECK(row.pct_compiled().render() == "80.00");
  CHECK(row.pct_simulated().render() == "75.00");
  CHECK(row.pct_correct().render() == "66.67");
  CHECK(row.pct_correct(true).render() == "50.00");

  MetricsRow empty = aggregate("none", {}, 0);
  CHECK(empty.pct_compiled().na);
  CHECK(empty.pct_compiled().render() == "0.00");
}

TEST_CASE("config ranking orders by accuracy with deterministic ties") {
  auto configs = enumerate_configs();
  std::vector<ScoredCandidate> scored;
  auto add_key = [&](const PromptConfig& c, double temp, int correct, int incorrect) {
    for (int i = 0; i < correct + incorrect; ++i) {
      ScoredCandidate sc;
      sc.benchmark_id = "BM1";
      sc.config = c;
      sc.temperature = temp;
      sc.frequency_penalty = 0.0;
      sc.candidate.text = "t" + std::to_string(scored.size());
      sc.outcome.stage = Outcome::Stage::Simulated;
      sc.outcome.correct = i < correct;
      scored.push_back(std::move(sc));
    }
  };
  add_key(configs[0], 0.4, 1, 3);  // 25%
  add_key(configs[1], 0.4, 3, 1);  // 75%
  add_key(configs[2], 0.4, 1, 3);  // 25%, tie with configs[0]
  add_key(configs[0], 0.9, 0, 0);  // never simulated: accuracy treated as 0

  ScoredCandidate never;
  never.benchmark_id = "BM1";
  never.config = configs[0];
  never.temperature = 0.9;
  never.candidate.text = "x";
  never.outcome.stage = Outcome::Stage::CompileFailed;
  scored.push_back(never);

  auto ranking = rank_configs(scored);
  REQUIRE(ranking.size() == 4);
  CHECK(ranking[0].key.config == configs[1]);
  CHECK(ranking[0].accuracy == 75.0);
  CHECK(ranking[1].key.config == configs[0]);  // tie broken by canonical order
  CHECK(ranking[2].key.config == configs[2]);
  CHECK(ranking[3].key.temperature == 0.9);
  CHECK(ranking[3].accuracy == 0.0);
}

TEST_CASE("breakdowns partition the candidate set") {
  gen::Rng rng(0xabc);
  auto configs = enumerate_configs();
  std::vector<ScoredCandidate> scored;
  for (int i = 0; i < 300; ++i) {
    ScoredCandidate sc;
    sc.benchmark_id = "BM1";
    sc.config = configs[static_cast<size_t>(gen::pick(rng, 0, 377))];
    sc.temperature = gen::chance(rng, 0.5) ? 0.4 : 0.9;
    sc.candidate.text = "t" + std::to_string(i);
    int roll = gen::pick(rng, 0, 2);
    sc.outcome.stage = roll == 0 ? Outcome::Stage::CompileFailed : Outcome::Stage::Simulated;
    sc.outcome.correct = roll == 2;
    scored.push_back(std::move(sc));
  }
  auto rows = breakdown(scored, [](const ScoredCandidate& s) {
    return std::string(to_string(s.config.design));
  });
  uint64_t processed = 0, correct = 0;
  for (const auto& r : rows) {
    processed += r.counts.processed;
    correct += r.counts.correct;
  }
  CHECK(processed == scored.size());
  CHECK(correct == static_cast<uint64_t>(std::count_if(
                       scored.begin(), scored.end(),
                       [](const ScoredCandidate& s) { return s.outcome.correct; })));

  auto axes = component_breakdowns(scored);
  REQUIRE(axes.size() == 6);
  CHECK(axes[0].first == "design");
  CHECK(axes[5].first == "frequency_penalty");
  for (const auto& [axis, axis_rows] : axes) {
    uint64_t total = 0;
    for (const auto& r : axis_rows) total += r.counts.processed;
    CHECK(total == scored.size());
  }
}

TEST_CASE("report rendering locks the table schemas") {
  MetricsRow row;
  row.scope = "BM1";
  row.generated = 10;
  row.all = {10, 8, 6, 3};
  row.unique = {4, 3, 2, 1};

  std::string csv = render_metrics_csv({row, total_row({row})});
  auto header_pos = csv.find("scope,");
  REQUIRE(header_pos != std::string::npos);
  std::string header = csv.substr(header_pos, csv.find('\n', header_pos) - header_pos);
  CHECK(header ==
        "scope,generated,processed_all,compiled_all,simulated_all,correct_all,"
        "pct_compiled_all,pct_simulated_all,pct_correct_all,processed_unique,"
        "compiled_unique,simulated_unique,correct_unique,pct_compiled_unique,"
        "pct_simulated_unique,pct_correct_unique,flags");
  CHECK(csv.find("BM1,10,10,8,6,3,80.00,75.00,50.00,4,3,2,1,75.00,66.67,50.00,") !=
        std::string::npos);
  CHECK(csv.find("Total,10,10,8,6,3,") != std::string::npos);

  MetricsRow none;
  none.scope = "empty,scope\"x\"";
  std::string with_na = render_metrics_csv({none});
  CHECK(with_na.find("\"empty,scope\"\"x\"\"\"") != std::string::npos);
  CHECK(with_na.find("pct_compiled_all=n/a") != std::string::npos);

  RankedConfig rc;
  rc.key.config = enumerate_configs().front();
  rc.key.temperature = 0.4;
  rc.accuracy = 50.0;
  rc.totals = {4, 4, 4, 2};
  std::string ranking = render_ranking_csv({rc});
  CHECK(ranking.find("rank,design,example,example_synonym,comment,comment_synonym,"
                     "beginning,temperature,frequency_penalty,accuracy,processed,"
                     "compiled,simulated,correct") != std::string::npos);
  CHECK(ranking.find("1,EmptyDUT,NoEx,None,VeryBriefCom,AT,EmptyBeg,0.4,0,50.00,4,4,4,2") !=
        std::string::npos);
}

TEST_CASE("end-to-end run over planted fixtures, with resume and determinism") {
  fs::path base = fresh_dir("pipeline");
  BenchmarkManifest m = load_bundled("BM1");
  auto prompts = generate_prompts(m);
  REQUIRE(prompts.size() == 378);

  RunConfig cfg;
  cfg.benchmarks = {"BM1"};
  cfg.temperatures = {0.4};
  cfg.frequency_penalties = {0.0};
  cfg.base_params.n = 2;
  cfg.retry = RetryPolicy{2, 0, 1};

  auto grid = enumerate_param_grid(cfg.temperatures, cfg.frequency_penalties, cfg.base_params);
  fs::path fixtures = base / "fixtures";
  plant_fixtures(fixtures, m, prompts, grid, {kCorrectBody, kWrongBody});

  cfg.out_dir = base / "run_a";
  ReplayProvider provider(fixtures);
  RunResult a = run_pipeline(cfg, provider);
  CHECK(a.exit_code() == 0);
  CHECK(a.provider_calls == 378);
  REQUIRE(a.per_benchmark.size() == 1);
  CHECK(a.per_benchmark[0].generated == 756);
  CHECK(a.per_benchmark[0].all.processed == 756);
  CHECK(a.per_benchmark[0].all.compiled == 756);
  CHECK(a.per_benchmark[0].all.correct == 378);
  CHECK(a.per_benchmark[0].unique.processed == 2);
  CHECK(a.report.ranking.size() == 378);

  // Same fixtures, fresh output directory: byte-identical artifacts.
  cfg.out_dir = base / "run_b";
  RunResult b = run_pipeline(cfg, provider);
  CHECK(b.exit_code() == 0);
  for (const char* name : {"metrics.csv", "ranking.csv", "breakdown_design.csv",
                           "breakdown_example.csv", "breakdown_comment.csv",
                           "breakdown_beginning.csv", "breakdown_temperature.csv",
                           "breakdown_frequency_penalty.csv"}) {
    INFO(name);
    CHECK(slurp(base / "run_a" / "report" / name) == slurp(base / "run_b" / "report" / name));
  }
  CHECK(slurp(base / "run_a" / "BM1" / "batches.jsonl") ==
        slurp(base / "run_b" / "BM1" / "batches.jsonl"));

  // Resume re-serves every key from the ledger without touching the provider.
  cfg.out_dir = base / "run_a";
  cfg.resume = true;
  std::string batches_before = slurp(base / "run_a" / "BM1" / "batches.jsonl");
  MustNotCallProvider silent;
  RunResult resumed = run_pipeline(cfg, silent);
  CHECK(resumed.exit_code() == 0);
  CHECK(resumed.provider_calls == 0);
  CHECK(slurp(base / "run_a" / "BM1" / "batches.jsonl") == batches_before);
  CHECK(resumed.per_benchmark[0].all.processed == 756);

  // A missing fixture is a recorded failure and exit code 2, not an abort.
  fs::remove(detail::fixture_path(fixtures, prompts[5].prompt_hash, grid[0]));
  cfg.out_dir = base / "run_c";
  cfg.resume = false;
  RunResult c = run_pipeline(cfg, provider);
  CHECK(c.exit_code() == 2);
  REQUIRE(c.recorded_failures.size() == 1);
  CHECK(c.per_benchmark[0].generated == 754);
}
