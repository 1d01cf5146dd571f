#pragma once

// Line-delimited JSON persistence for every pipeline stage. One record per
// line keeps the files streamable, diffable, and appendable for resume.

#include "svag/llm.hpp"
#include "svag/prompt.hpp"
#include "svag/repair.hpp"
#include "svag/scoreboard.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace svag {

struct RecordError : std::runtime_error {
  explicit RecordError(const std::string& what) : std::runtime_error(what) {}
};

//===----------------------------------------------------------------------===//
// Enum round-trips
//===----------------------------------------------------------------------===//

namespace detail {

template <typename Kind, size_t N>
Kind enum_from_string(const std::string& s, const Kind (&values)[N], const char* what) {
  for (Kind v : values)
    if (s == to_string(v)) return v;
  throw RecordError(std::string("unknown ") + what + " '" + s + "'");
}

}  // namespace detail

inline DesignSourceKind design_from_string(const std::string& s) {
  static constexpr DesignSourceKind values[] = {DesignSourceKind::Empty, DesignSourceKind::Golden,
                                                DesignSourceKind::Buggy};
  return detail::enum_from_string(s, values, "design source");
}
inline ExampleKind example_from_string(const std::string& s) {
  static constexpr ExampleKind values[] = {ExampleKind::NoExample, ExampleKind::Trivial,
                                           ExampleKind::Basic, ExampleKind::Detailed};
  return detail::enum_from_string(s, values, "example kind");
}
inline CommentKind comment_from_string(const std::string& s) {
  static constexpr CommentKind values[] = {CommentKind::VeryBrief, CommentKind::Brief,
                                           CommentKind::Detailed};
  return detail::enum_from_string(s, values, "comment kind");
}
inline BeginningKind beginning_from_string(const std::string& s) {
  static constexpr BeginningKind values[] = {BeginningKind::Empty, BeginningKind::Short,
                                             BeginningKind::Normal};
  return detail::enum_from_string(s, values, "beginning kind");
}
inline Synonym synonym_from_string(const std::string& s) {
  static constexpr Synonym values[] = {Synonym::AT, Synonym::PC, Synonym::None};
  return detail::enum_from_string(s, values, "synonym");
}
inline RepairRule rule_from_string(const std::string& s) {
  static constexpr RepairRule values[] = {RepairRule::R2, RepairRule::R3};
  return detail::enum_from_string(s, values, "repair rule");
}
inline Outcome::Stage stage_from_string(const std::string& s) {
  static constexpr Outcome::Stage values[] = {Outcome::Stage::CompileFailed,
                                              Outcome::Stage::SimFailed,
                                              Outcome::Stage::Simulated};
  return detail::enum_from_string(s, values, "outcome stage");
}
inline CompileErrorKind error_kind_from_string(const std::string& s) {
  static constexpr CompileErrorKind values[] = {
      CompileErrorKind::SyntaxError, CompileErrorKind::UnknownIdentifier,
      CompileErrorKind::UnsupportedConstruct, CompileErrorKind::OutOfRangeSelect};
  return detail::enum_from_string(s, values, "compile error kind");
}

//===----------------------------------------------------------------------===//
// JSON shapes
//===----------------------------------------------------------------------===//

inline nlohmann::json to_json(const PromptConfig& c) {
  return {{"design", to_string(c.design)},
          {"example", to_string(c.example)},
          {"example_synonym", to_string(c.example_synonym)},
          {"comment", to_string(c.comment)},
          {"comment_synonym", to_string(c.comment_synonym)},
          {"beginning", to_string(c.beginning)}};
}

inline PromptConfig config_from_json(const nlohmann::json& j) {
  PromptConfig c;
  c.design = design_from_string(j.at("design").get<std::string>());
  c.example = example_from_string(j.at("example").get<std::string>());
  c.example_synonym = synonym_from_string(j.at("example_synonym").get<std::string>());
  c.comment = comment_from_string(j.at("comment").get<std::string>());
  c.comment_synonym = synonym_from_string(j.at("comment_synonym").get<std::string>());
  c.beginning = beginning_from_string(j.at("beginning").get<std::string>());
  if (!is_valid(c)) throw RecordError("invalid prompt config " + to_json(c).dump());
  return c;
}

inline nlohmann::json to_json(const GenerationParams& p) {
  return {{"temperature", p.temperature},
          {"frequency_penalty", p.frequency_penalty},
          {"n", p.n},
          {"max_tokens", p.max_tokens},
          {"stop", p.stop},
          {"top_p", p.top_p},
          {"presence_penalty", p.presence_penalty}};
}

inline GenerationParams params_from_json(const nlohmann::json& j) {
  GenerationParams p;
  p.temperature = j.at("temperature").get<double>();
  p.frequency_penalty = j.at("frequency_penalty").get<double>();
  p.n = j.at("n").get<int>();
  p.max_tokens = j.at("max_tokens").get<int>();
  p.stop = j.at("stop").get<std::vector<std::string>>();
  p.top_p = j.at("top_p").get<double>();
  p.presence_penalty = j.at("presence_penalty").get<double>();
  return p;
}

inline nlohmann::json to_json(const PromptInstance& p) {
  nlohmann::json j = to_json(p.config);
  j["benchmark"] = p.benchmark_id;
  j["prompt_hash"] = p.prompt_hash;
  j["text"] = p.text;
  return j;
}

inline PromptInstance prompt_from_json(const nlohmann::json& j) {
  PromptInstance p;
  p.benchmark_id = j.at("benchmark").get<std::string>();
  p.config = config_from_json(j);
  p.prompt_hash = j.at("prompt_hash").get<std::string>();
  p.text = j.at("text").get<std::string>();
  return p;
}

inline nlohmann::json to_json(const CompletionBatch& b) {
  nlohmann::json j;
  j["prompt_hash"] = b.prompt_hash;
  j["params"] = to_json(b.params);
  j["params_digest"] = params_digest(b.params);
  j["provider"] = b.provider_id;
  j["retrieved_at"] = b.retrieved_at;
  if (b.failed())
    j["failure"] = b.failure;
  else
    j["completions"] = b.completions;
  return j;
}

inline CompletionBatch batch_from_json(const nlohmann::json& j) {
  CompletionBatch b;
  b.prompt_hash = j.at("prompt_hash").get<std::string>();
  b.params = params_from_json(j.at("params"));
  b.provider_id = j.at("provider").get<std::string>();
  b.retrieved_at = j.at("retrieved_at").get<std::string>();
  if (j.contains("failure"))
    b.failure = j.at("failure").get<std::string>();
  else
    b.completions = j.at("completions").get<std::vector<std::string>>();
  return b;
}

inline nlohmann::json to_json(const CandidateText& c) {
  nlohmann::json j;
  j["prompt_hash"] = c.batch_ref.prompt_hash;
  j["params_digest"] = c.batch_ref.params_digest;
  j["index"] = c.batch_ref.index;
  j["provenance"] = c.original ? "original" : "repaired";
  if (!c.original) {
    std::vector<std::string> rules;
    for (RepairRule r : c.applied) rules.emplace_back(to_string(r));
    j["rules"] = rules;
  }
  j["text"] = c.text;
  return j;
}

inline CandidateText candidate_from_json(const nlohmann::json& j) {
  CandidateText c;
  c.batch_ref.prompt_hash = j.at("prompt_hash").get<std::string>();
  c.batch_ref.params_digest = j.at("params_digest").get<std::string>();
  c.batch_ref.index = j.at("index").get<int>();
  std::string prov = j.at("provenance").get<std::string>();
  if (prov == "original") {
    c.original = true;
  } else if (prov == "repaired") {
    c.original = false;
    for (const auto& r : j.at("rules")) c.applied.push_back(rule_from_string(r.get<std::string>()));
    if (c.applied.empty()) throw RecordError("repaired candidate lists no rules");
  } else {
    throw RecordError("unknown provenance '" + prov + "'");
  }
  c.text = j.at("text").get<std::string>();
  return c;
}

inline nlohmann::json to_json(const Outcome& o) {
  nlohmann::json j;
  j["stage"] = to_string(o.stage);
  if (o.error_kind) j["error_kind"] = to_string(*o.error_kind);
  if (!o.detail.empty()) j["detail"] = o.detail;
  if (o.stage == Outcome::Stage::Simulated) {
    j["correct"] = o.correct;
    j["violations"] = o.violations;
  }
  return j;
}

inline Outcome outcome_from_json(const nlohmann::json& j) {
  Outcome o;
  o.stage = stage_from_string(j.at("stage").get<std::string>());
  if (j.contains("error_kind"))
    o.error_kind = error_kind_from_string(j.at("error_kind").get<std::string>());
  if (j.contains("detail")) o.detail = j.at("detail").get<std::string>();
  if (o.stage == Outcome::Stage::Simulated) {
    o.correct = j.at("correct").get<bool>();
    o.violations = j.at("violations").get<std::vector<uint64_t>>();
  }
  return o;
}

//===----------------------------------------------------------------------===//
// JSONL files
//===----------------------------------------------------------------------===//

class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path, bool append = false)
      : path_(path.string()),
        out_(path, append ? std::ios::app : std::ios::trunc) {
    if (!out_) throw RecordError("cannot open " + path_ + " for writing");
  }

  void write(const nlohmann::json& j) {
    out_ << j.dump() << '\n';
    if (!out_) throw RecordError("write failed on " + path_);
  }

  void flush() { out_.flush(); }

 private:
  std::string path_;
  std::ofstream out_;
};

inline std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RecordError("cannot open " + path.string());
  std::vector<nlohmann::json> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw RecordError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

//===----------------------------------------------------------------------===//
// Completion markers (resume ledger)
//===----------------------------------------------------------------------===//

// One "<prompt_hash> <params_digest>" line per fully persisted batch. On
// resume, marked keys are served from batches.jsonl and never re-queried.
class MarkerLedger {
 public:
  explicit MarkerLedger(std::filesystem::path path) : path_(std::move(path)) {
    if (std::filesystem::exists(path_)) {
      std::ifstream in(path_);
      std::string line;
      while (std::getline(in, line)) {
        std::string t = trim(line);
        if (!t.empty()) completed_.insert(t);
      }
    }
  }

  bool completed(const std::string& prompt_hash, const std::string& digest) const {
    return completed_.count(prompt_hash + " " + digest) != 0;
  }

  void mark(const std::string& prompt_hash, const std::string& digest) {
    std::string key = prompt_hash + " " + digest;
    if (!completed_.insert(key).second) return;
    std::ofstream out(path_, std::ios::app);
    if (!out) throw RecordError("cannot append to " + path_.string());
    out << key << '\n';
  }

  size_t size() const { return completed_.size(); }

 private:
  std::filesystem::path path_;
  std::set<std::string> completed_;
};

}  // namespace svag
