#pragma once

#include "svag/benchmark.hpp"
#include "svag/hash.hpp"
#include "svag/text.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace svag {

// Lead-in phrasing for comment and example clues. Every stored clue begins
// with the default "assert that"; PC swaps that prefix at assembly time.
// None is the placeholder synonym carried by the example-free configuration.
enum class Synonym { AT, PC, None };

inline const char* to_string(Synonym s) {
  switch (s) {
    case Synonym::AT: return "AT";
    case Synonym::PC: return "PC";
    case Synonym::None: return "None";
  }
  return "?";
}

inline constexpr std::string_view kAssertThatPhrase = "assert that";
inline constexpr std::string_view kPropertyToCheckPhrase = "property to check that";

inline std::string_view synonym_phrase(Synonym s) {
  return s == Synonym::PC ? kPropertyToCheckPhrase : kAssertThatPhrase;
}

struct PrefixMissing : std::runtime_error {
  explicit PrefixMissing(const std::string& head)
      : std::runtime_error("comment does not begin with \"assert that\": \"" + head + "...\"") {}
};

// Replaces the leading "assert that" with the chosen phrasing (AT keeps the
// text untouched). The lead-in must be present; manifests guarantee it.
inline std::string apply_synonym(std::string_view comment, Synonym s) {
  if (comment.substr(0, kAssertThatPhrase.size()) != kAssertThatPhrase)
    throw PrefixMissing(std::string(comment.substr(0, 24)));
  if (s != Synonym::PC) return std::string(comment);
  std::string out(kPropertyToCheckPhrase);
  out += comment.substr(kAssertThatPhrase.size());
  return out;
}

// One point in the prompt grid. Six axes; the example synonym is None exactly
// when the configuration carries no example.
struct PromptConfig {
  DesignSourceKind design = DesignSourceKind::Empty;
  ExampleKind example = ExampleKind::NoExample;
  Synonym example_synonym = Synonym::None;
  CommentKind comment = CommentKind::VeryBrief;
  Synonym comment_synonym = Synonym::AT;
  BeginningKind beginning = BeginningKind::Empty;

  friend bool operator==(const PromptConfig&, const PromptConfig&) = default;
  friend auto operator<=>(const PromptConfig&, const PromptConfig&) = default;
};

inline bool is_valid(const PromptConfig& c) {
  bool none_ok = (c.example == ExampleKind::NoExample) == (c.example_synonym == Synonym::None);
  return none_ok && c.comment_synonym != Synonym::None;
}

// Short dotted form used in rankings and log lines, e.g.
// "GoldenDUT.TrivialEx-AT.DetailedCom-PC.ShortBeg" (NoEx carries no synonym).
inline std::string config_label(const PromptConfig& c) {
  std::string out = to_string(c.design);
  out += '.';
  out += to_string(c.example);
  if (c.example != ExampleKind::NoExample) {
    out += '-';
    out += to_string(c.example_synonym);
  }
  out += '.';
  out += to_string(c.comment);
  out += '-';
  out += to_string(c.comment_synonym);
  out += '.';
  out += to_string(c.beginning);
  return out;
}

// All 378 configurations in canonical order: design, example kind, example
// synonym, comment kind, comment synonym, beginning — each axis in declaration
// order. Resumable runs and rank tie-breaking rely on this order being stable.
inline std::vector<PromptConfig> enumerate_configs() {
  std::vector<PromptConfig> out;
  out.reserve(378);
  auto push_examples = [&](DesignSourceKind d, ExampleKind e, Synonym es) {
    for (CommentKind cm : {CommentKind::VeryBrief, CommentKind::Brief, CommentKind::Detailed})
      for (Synonym cs : {Synonym::AT, Synonym::PC})
        for (BeginningKind b : {BeginningKind::Empty, BeginningKind::Short, BeginningKind::Normal})
          out.push_back({d, e, es, cm, cs, b});
  };
  for (DesignSourceKind d :
       {DesignSourceKind::Empty, DesignSourceKind::Golden, DesignSourceKind::Buggy})
    for (ExampleKind e : {ExampleKind::NoExample, ExampleKind::Trivial, ExampleKind::Basic,
                          ExampleKind::Detailed}) {
      if (e == ExampleKind::NoExample)
        push_examples(d, e, Synonym::None);
      else
        for (Synonym es : {Synonym::AT, Synonym::PC}) push_examples(d, e, es);
    }
  return out;
}

struct PromptInstance {
  std::string benchmark_id;
  PromptConfig config;
  std::string text;
  std::string prompt_hash;
};

// Concatenates the template sections:
//
//   [design source + blank line]   omitted entirely for the empty source
//   module part                    ends with exactly one newline
//   example block                  "\n// <synonym><body>" or the bare "\n\n"
//   comment block                  "// " + synonym-adjusted comment
//   beginning                      appended verbatim, no trailing newline
//
// Example bodies carry their own leading separator space and trailing blank
// line, so the blocks chain into the familiar prompt layout byte-for-byte.
inline std::string assemble_text(const BenchmarkManifest& m, const PromptConfig& c) {
  std::string out;
  const std::string& ds = m.design_sources.at(c.design);
  if (!rtrim(ds).empty()) {
    out += rtrim(ds);
    out += "\n\n";
  }
  out += extract_module_part(m);
  const std::string& body = m.prompt_data.examples.at(c.example);
  if (c.example == ExampleKind::NoExample) {
    out += body;  // the stored "\n\n"
  } else {
    out += "\n// ";
    out += synonym_phrase(c.example_synonym);
    out += body;
  }
  out += "// ";
  out += apply_synonym(m.prompt_data.comments.at(c.comment), c.comment_synonym);
  out += m.prompt_data.beginnings.at(c.beginning);
  return out;
}

inline PromptInstance assemble_prompt(const BenchmarkManifest& m, const PromptConfig& c) {
  PromptInstance p;
  p.benchmark_id = m.id;
  p.config = c;
  p.text = assemble_text(m, c);
  p.prompt_hash = prompt_digest(m.id, p.text);
  return p;
}

}  // namespace svag
