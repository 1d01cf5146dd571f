#pragma once

// Extracts assertion-violation times from a Modelsim-style transcript. The
// engine never shells out to a simulator; this exists so results from an
// external simulator run can be cross-checked against engine violation sets.

#include "svag/text.hpp"

#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace svag {

struct SimLog {
  std::set<long> golden_times;     // ns values from "GOLDEN: FAIL, time=..."
  std::set<long> generated_times;  // ns values from assertion-error blocks
  bool finished = false;           // saw "Testing done"
  std::optional<long> reported_inputs;  // from "no inputs=..."
  std::vector<int> malformed_lines;     // 1-based lines that matched a cue but not its number
};

namespace detail {

// Parses the first decimal integer at or after `pos`, skipping blanks.
inline std::optional<long> parse_long_after(const std::string& line, size_t pos) {
  while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
  if (pos >= line.size() || !std::isdigit(static_cast<unsigned char>(line[pos])))
    return std::nullopt;
  long v = 0;
  while (pos < line.size() && std::isdigit(static_cast<unsigned char>(line[pos])))
    v = v * 10 + (line[pos++] - '0');
  return v;
}

}  // namespace detail

// The transcript cues, verbatim:
//   # ** Error: Assertion error.
//   #   Time: 95 ns Started: 95 ns Scope: ...     <- belongs to the error above
//   # GOLDEN: FAIL, time=  95, data=0, ...
//   # Testing done, no inputs= 32
// A "Time:" line is only meaningful directly under an assertion-error line;
// unrelated "Time:" lines elsewhere in a transcript are ignored.
inline SimLog parse_simulator_log(const std::string& text) {
  SimLog log;
  bool pending_error = false;
  int lineno = 0;
  for (const std::string& line : split_lines(text)) {
    ++lineno;
    if (size_t p = line.find("GOLDEN: FAIL, time="); p != std::string::npos) {
      auto v = detail::parse_long_after(line, p + 19);
      if (v)
        log.golden_times.insert(*v);
      else
        log.malformed_lines.push_back(lineno);
    }
    if (line.find("** Error: Assertion error.") != std::string::npos) {
      pending_error = true;
      continue;
    }
    if (pending_error) {
      if (size_t p = line.find("Time:"); p != std::string::npos) {
        auto v = detail::parse_long_after(line, p + 5);
        if (v)
          log.generated_times.insert(*v);
        else
          log.malformed_lines.push_back(lineno);
        pending_error = false;
      }
    }
    if (line.find("Testing done") != std::string::npos) log.finished = true;
    if (size_t p = line.find("no inputs="); p != std::string::npos) {
      auto v = detail::parse_long_after(line, p + 10);
      if (v)
        log.reported_inputs = *v;
      else
        log.malformed_lines.push_back(lineno);
    }
  }
  return log;
}

// The testbench clocks every 10 ns with the first posedge at 5 ns, so a
// violation reported at time t ns completed its check on cycle (t-5)/10.
// Returns nothing when t is not a posedge instant.
inline std::optional<long> ns_to_cycle(long ns) {
  if (ns < 5 || (ns - 5) % 10 != 0) return std::nullopt;
  return (ns - 5) / 10;
}

}  // namespace svag
