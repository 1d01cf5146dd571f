#pragma once

#include "svag/checker.hpp"
#include "svag/parser.hpp"
#include "svag/text.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace svag {

// The exact line that separates the reusable module header of a golden
// assertion file from the golden assertion itself.
inline constexpr std::string_view kGoldenMarker = "// golden assertion";

enum class DesignSourceKind { Empty, Golden, Buggy };
enum class ExampleKind { NoExample, Trivial, Basic, Detailed };
enum class CommentKind { VeryBrief, Brief, Detailed };
enum class BeginningKind { Empty, Short, Normal };

inline const char* to_string(DesignSourceKind k) {
  switch (k) {
    case DesignSourceKind::Empty: return "EmptyDUT";
    case DesignSourceKind::Golden: return "GoldenDUT";
    case DesignSourceKind::Buggy: return "BuggyDUT";
  }
  return "?";
}
inline const char* to_string(ExampleKind k) {
  switch (k) {
    case ExampleKind::NoExample: return "NoEx";
    case ExampleKind::Trivial: return "TrivialEx";
    case ExampleKind::Basic: return "BasicEx";
    case ExampleKind::Detailed: return "DetailedEx";
  }
  return "?";
}
inline const char* to_string(CommentKind k) {
  switch (k) {
    case CommentKind::VeryBrief: return "VeryBriefCom";
    case CommentKind::Brief: return "BriefCom";
    case CommentKind::Detailed: return "DetailedCom";
  }
  return "?";
}
inline const char* to_string(BeginningKind k) {
  switch (k) {
    case BeginningKind::Empty: return "EmptyBeg";
    case BeginningKind::Short: return "ShortBeg";
    case BeginningKind::Normal: return "NormalBeg";
  }
  return "?";
}

struct PortDecl {
  std::string name;
  int width = 1;
};

// Prompt building blocks, keyed the same way the on-disk prompt_data file is.
// Comment strings are stored with their default "assert that" lead-in; the
// NoExample body is exactly "\n\n".
struct PromptData {
  std::map<CommentKind, std::string> comments;
  std::map<ExampleKind, std::string> examples;
  std::map<BeginningKind, std::string> beginnings;
};

// How the exhaustive testbench drives this benchmark.
struct TestbenchSpec {
  std::vector<PortDecl> driven_signals;  // effective widths, counter slice order
  int no_clocks = 2;                     // power of two
  int reset_cycles = 2;
  std::map<std::string, int> width_overrides;  // declared -> reduced width
};

struct BenchmarkManifest {
  std::string id;
  std::string title;
  std::vector<PortDecl> interface;
  std::string clock_name;
  std::string reset_name;
  std::map<std::string, SignalTable::Constant> named_constants;
  std::string golden_file_text;
  std::map<DesignSourceKind, std::string> design_sources;
  PromptData prompt_data;
  TestbenchSpec testbench;

  int effective_width(const std::string& port) const {
    auto ov = testbench.width_overrides.find(port);
    if (ov != testbench.width_overrides.end()) return ov->second;
    for (const auto& p : interface)
      if (p.name == port) return p.width;
    return 0;
  }

  bool has_port(const std::string& name) const {
    for (const auto& p : interface)
      if (p.name == name) return true;
    return false;
  }
};

struct ManifestError : std::runtime_error {
  enum class Kind { MissingFile, MarkerNotFound, InvariantViolation };
  Kind kind;
  std::string field;  // dotted path of the offending field, or file name

  ManifestError(Kind kind, std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what),
        kind(kind),
        field(std::move(field)) {}
};

//===----------------------------------------------------------------------===//
// Derived views
//===----------------------------------------------------------------------===//

namespace detail {

// Finds the golden marker as a whole line. Returns (line start offset, offset
// past the line's newline), or nothing if absent; `count` reports duplicates.
inline std::optional<std::pair<size_t, size_t>> find_marker_line(std::string_view text,
                                                                 int* count = nullptr) {
  std::optional<std::pair<size_t, size_t>> found;
  int n = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    size_t end = eol == std::string_view::npos ? text.size() : eol;
    if (trim(text.substr(pos, end - pos)) == kGoldenMarker) {
      ++n;
      if (!found) found = {pos, eol == std::string_view::npos ? end : eol + 1};
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  if (count) *count = n;
  return found;
}

}  // namespace detail

// The golden file up to (but excluding) the marker line, with trailing
// whitespace normalized to a single newline. This is the "module part" every
// prompt embeds.
inline std::string extract_module_part(const BenchmarkManifest& m) {
  auto span = detail::find_marker_line(m.golden_file_text);
  if (!span)
    throw ManifestError(ManifestError::Kind::MarkerNotFound, "golden.sva",
                        "golden marker not found");
  return rtrim(std::string_view(m.golden_file_text).substr(0, span->first)) + "\n";
}

// Everything after the marker line: the golden assertion plus its endmodule.
inline std::string golden_assertion_text(const BenchmarkManifest& m) {
  auto span = detail::find_marker_line(m.golden_file_text);
  if (!span)
    throw ManifestError(ManifestError::Kind::MarkerNotFound, "golden.sva",
                        "golden marker not found");
  return m.golden_file_text.substr(span->second);
}

// Name environment candidates are checked against (effective widths).
inline SignalTable signal_table(const BenchmarkManifest& m) {
  SignalTable table;
  for (const auto& p : m.interface) table.signal_widths[p.name] = m.effective_width(p.name);
  table.constants = m.named_constants;
  table.clock_name = m.clock_name;
  return table;
}

//===----------------------------------------------------------------------===//
// Directory loading
//===----------------------------------------------------------------------===//

namespace detail {

inline void require(bool cond, const std::string& field, const std::string& what) {
  if (!cond) throw ManifestError(ManifestError::Kind::InvariantViolation, field, what);
}

inline PromptData parse_prompt_data(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError(ManifestError::Kind::InvariantViolation, "prompt_data", e.what());
  }
  PromptData data;
  auto str_field = [&](const char* section, const char* key) -> std::string {
    if (!j.contains(section) || !j[section].contains(key))
      throw ManifestError(ManifestError::Kind::InvariantViolation,
                          std::string("prompt_data.") + section + "." + key, "missing");
    const auto& v = j[section][key];
    if (v.is_string()) return v.get<std::string>();
    // example bodies are stored as one-element lists, mirroring the source
    if (v.is_array() && v.size() == 1 && v[0].is_string()) return v[0].get<std::string>();
    throw ManifestError(ManifestError::Kind::InvariantViolation,
                        std::string("prompt_data.") + section + "." + key,
                        "expected a string (or one-element list of strings)");
  };
  for (CommentKind k : {CommentKind::VeryBrief, CommentKind::Brief, CommentKind::Detailed})
    data.comments[k] = str_field("commentStrings", to_string(k));
  for (ExampleKind k :
       {ExampleKind::NoExample, ExampleKind::Trivial, ExampleKind::Basic, ExampleKind::Detailed})
    data.examples[k] = str_field("examples", to_string(k));
  for (BeginningKind k : {BeginningKind::Empty, BeginningKind::Short, BeginningKind::Normal})
    data.beginnings[k] = str_field("assertionBeginning", to_string(k));
  return data;
}

inline void validate(const BenchmarkManifest& m) {
  require(!m.id.empty(), "id", "must not be empty");
  for (char c : m.id)
    require(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-', "id",
            "may only contain letters, digits, '_' and '-'");
  require(!m.interface.empty(), "interface", "at least one port required");
  for (const auto& p : m.interface) {
    require(!p.name.empty(), "interface", "port with empty name");
    require(p.width >= 1, "interface." + p.name, "width must be >= 1");
    require(m.effective_width(p.name) >= 1, "interface." + p.name,
            "effective width must be >= 1");
  }
  require(m.has_port(m.clock_name), "clock", "'" + m.clock_name + "' is not an interface port");
  require(m.has_port(m.reset_name), "reset", "'" + m.reset_name + "' is not an interface port");

  require(!m.testbench.driven_signals.empty(), "driven", "at least one driven signal required");
  for (const auto& d : m.testbench.driven_signals) {
    require(m.has_port(d.name), "driven", "'" + d.name + "' is not an interface port");
    require(d.name != m.clock_name && d.name != m.reset_name, "driven",
            "'" + d.name + "' is the clock or reset and cannot be driven");
    require(d.width == m.effective_width(d.name), "driven",
            "'" + d.name + "' width disagrees with its effective width");
  }
  int nc = m.testbench.no_clocks;
  require(nc >= 1 && (nc & (nc - 1)) == 0, "no_clocks", "must be a power of two");
  require(m.testbench.reset_cycles >= 0, "reset_cycles", "must be >= 0");

  for (DesignSourceKind k :
       {DesignSourceKind::Empty, DesignSourceKind::Golden, DesignSourceKind::Buggy})
    require(m.design_sources.count(k) != 0, "design_sources",
            std::string("missing ") + to_string(k));

  int marker_count = 0;
  detail::find_marker_line(m.golden_file_text, &marker_count);
  if (marker_count == 0)
    throw ManifestError(ManifestError::Kind::MarkerNotFound, "golden.sva",
                        "golden marker not found");
  require(marker_count == 1, "golden.sva", "golden marker must appear exactly once");

  for (const auto& [kind, text] : m.prompt_data.comments) {
    require(!text.empty(), std::string("prompt_data.commentStrings.") + to_string(kind),
            "must not be empty");
    require(text.rfind("assert that", 0) == 0,
            std::string("prompt_data.commentStrings.") + to_string(kind),
            "must begin with the default lead-in \"assert that\"");
  }
  require(m.prompt_data.examples.at(ExampleKind::NoExample) == "\n\n",
          "prompt_data.examples.NoEx", "must be exactly two newlines");
  require(m.prompt_data.beginnings.at(BeginningKind::Empty).empty(),
          "prompt_data.assertionBeginning.EmptyBeg", "must be empty");

  // The golden assertion itself must compile under the restricted grammar.
  auto parsed = parse(golden_assertion_text(m));
  if (!parsed.ok())
    throw ManifestError(ManifestError::Kind::InvariantViolation, "golden.sva",
                        std::string("golden assertion does not parse: ") + parsed.error().detail);
  require(!parsed.value().items.empty(), "golden.sva", "no assertion after the golden marker");
  SvaFile golden = parsed.take();
  if (auto err = check(golden, signal_table(m)))
    throw ManifestError(ManifestError::Kind::InvariantViolation, "golden.sva",
                        std::string("golden assertion does not check: ") + err->detail);
}

}  // namespace detail

// Assembles a benchmark from already-read file contents, keyed by file name:
//   manifest      structured key/value text (one "key: value" per line)
//   dut_empty.sv / dut_golden.sv / dut_buggy.sv   opaque design sources
//   golden.sva    module header + marker line + golden assertion
//   prompt_data   JSON comment/example/beginning strings
// `where` names the source (a directory, "bundled:BM1", ...) for error text.
inline BenchmarkManifest load_manifest_from_texts(const std::map<std::string, std::string>& files,
                                                  const std::string& where) {
  auto need_file = [&](const char* name) -> const std::string& {
    auto it = files.find(name);
    if (it == files.end())
      throw ManifestError(ManifestError::Kind::MissingFile, name, "file not found in " + where);
    return it->second;
  };

  BenchmarkManifest m;
  const std::string& manifest_text = need_file("manifest");

  int lineno = 0;
  for (const std::string& raw : split_lines(manifest_text)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    size_t colon = line.find(':');
    detail::require(colon != std::string::npos, "manifest",
                    "line " + std::to_string(lineno) + ": expected 'key: value'");
    std::string key = trim(line.substr(0, colon));
    std::string value = trim(line.substr(colon + 1));
    std::vector<std::string> words;
    {
      std::istringstream ss(value);
      std::string w;
      while (ss >> w) words.push_back(w);
    }
    auto want_words = [&](size_t n) {
      detail::require(words.size() == n, "manifest",
                      "line " + std::to_string(lineno) + ": '" + key + "' expects " +
                          std::to_string(n) + " value(s)");
    };
    auto to_int = [&](const std::string& s) {
      try {
        size_t used = 0;
        int v = std::stoi(s, &used);
        detail::require(used == s.size(), "manifest",
                        "line " + std::to_string(lineno) + ": bad integer '" + s + "'");
        return v;
      } catch (const std::exception&) {
        throw ManifestError(ManifestError::Kind::InvariantViolation, "manifest",
                            "line " + std::to_string(lineno) + ": bad integer '" + s + "'");
      }
    };

    if (key == "id") {
      m.id = value;
    } else if (key == "title") {
      m.title = value;
    } else if (key == "clock") {
      want_words(1);
      m.clock_name = value;
    } else if (key == "reset") {
      want_words(1);
      m.reset_name = value;
    } else if (key == "port") {
      want_words(2);
      m.interface.push_back({words[0], to_int(words[1])});
    } else if (key == "driven") {
      for (const auto& w : words) m.testbench.driven_signals.push_back({w, 0});
    } else if (key == "no_clocks") {
      want_words(1);
      m.testbench.no_clocks = to_int(words[0]);
    } else if (key == "reset_cycles") {
      want_words(1);
      m.testbench.reset_cycles = to_int(words[0]);
    } else if (key == "constant") {
      want_words(3);
      m.named_constants[words[0]] = {static_cast<uint64_t>(std::stoull(words[1])),
                                     to_int(words[2])};
    } else if (key == "width_override") {
      want_words(2);
      m.testbench.width_overrides[words[0]] = to_int(words[1]);
    } else {
      throw ManifestError(ManifestError::Kind::InvariantViolation, "manifest",
                          "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }

  m.design_sources[DesignSourceKind::Empty] = need_file("dut_empty.sv");
  m.design_sources[DesignSourceKind::Golden] = need_file("dut_golden.sv");
  m.design_sources[DesignSourceKind::Buggy] = need_file("dut_buggy.sv");
  m.golden_file_text = need_file("golden.sva");
  m.prompt_data = detail::parse_prompt_data(need_file("prompt_data"));

  // Fill driven-signal effective widths now that ports are known.
  for (auto& d : m.testbench.driven_signals) d.width = m.effective_width(d.name);

  detail::validate(m);
  return m;
}

inline constexpr const char* kManifestFileNames[] = {
    "manifest", "dut_empty.sv", "dut_golden.sv", "dut_buggy.sv", "golden.sva", "prompt_data"};

// Loads a benchmark directory (see load_manifest_from_texts for the layout).
inline BenchmarkManifest load_manifest(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::map<std::string, std::string> files;
  for (const char* name : kManifestFileNames) {
    fs::path p = dir / name;
    if (fs::exists(p)) files[name] = read_file(p.string());
  }
  return load_manifest_from_texts(files, dir.string());
}

}  // namespace svag
