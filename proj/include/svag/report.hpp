#pragma once

#include "svag/scoreboard.hpp"
#include "svag/text.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace svag {

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void append_rate(std::string& line, std::string& flags, const Rate& r, const char* name) {
  line += ',';
  line += r.render();
  if (r.na) {
    if (!flags.empty()) flags += ';';
    flags += name;
    flags += "=n/a";
  }
}

}  // namespace detail

// The main metrics table, one row per scope plus a Total row appended by the
// caller. The header comment spells out every denominator so the numbers are
// interpretable without reading the code.
inline std::string render_metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out =
      "# Stage rates use the processed candidate pool as the base population:\n"
      "#   pct_compiled  = compiled  / processed  (parsed and interface-checked)\n"
      "#   pct_simulated = simulated / compiled   (evaluation ran to completion)\n"
      "#   pct_correct   = correct   / simulated  (violation set equals the golden's)\n"
      "# All columns count every processed candidate; Unique columns count each\n"
      "# whitespace-normalized candidate text once. A rate whose denominator is\n"
      "# zero renders as 0.00 and is named in the flags column.\n"
      "scope,generated,"
      "processed_all,compiled_all,simulated_all,correct_all,"
      "pct_compiled_all,pct_simulated_all,pct_correct_all,"
      "processed_unique,compiled_unique,simulated_unique,correct_unique,"
      "pct_compiled_unique,pct_simulated_unique,pct_correct_unique,flags\n";
  for (const MetricsRow& row : rows) {
    std::string line = detail::csv_field(row.scope);
    std::string flags;
    line += ',' + std::to_string(row.generated);
    line += ',' + std::to_string(row.all.processed);
    line += ',' + std::to_string(row.all.compiled);
    line += ',' + std::to_string(row.all.simulated);
    line += ',' + std::to_string(row.all.correct);
    detail::append_rate(line, flags, row.pct_compiled(false), "pct_compiled_all");
    detail::append_rate(line, flags, row.pct_simulated(false), "pct_simulated_all");
    detail::append_rate(line, flags, row.pct_correct(false), "pct_correct_all");
    line += ',' + std::to_string(row.unique.processed);
    line += ',' + std::to_string(row.unique.compiled);
    line += ',' + std::to_string(row.unique.simulated);
    line += ',' + std::to_string(row.unique.correct);
    detail::append_rate(line, flags, row.pct_compiled(true), "pct_compiled_unique");
    detail::append_rate(line, flags, row.pct_simulated(true), "pct_simulated_unique");
    detail::append_rate(line, flags, row.pct_correct(true), "pct_correct_unique");
    out += line + ',' + flags + '\n';
  }
  return out;
}

// Sums per-benchmark rows into the Total row (Unique stays per-benchmark
// unique; texts are never deduplicated across benchmarks).
inline MetricsRow total_row(const std::vector<MetricsRow>& rows) {
  MetricsRow total;
  total.scope = "Total";
  for (const MetricsRow& r : rows) {
    total.generated += r.generated;
    total.all.merge(r.all);
    total.unique.merge(r.unique);
  }
  return total;
}

inline std::string render_ranking_csv(const std::vector<RankedConfig>& ranking) {
  std::string out =
      "# Accuracy is the across-benchmark mean of correct/simulated (All variant)\n"
      "# for the coordinate; ties keep canonical coordinate order.\n"
      "rank,design,example,example_synonym,comment,comment_synonym,beginning,"
      "temperature,frequency_penalty,accuracy,processed,compiled,simulated,correct\n";
  int rank = 1;
  for (const RankedConfig& rc : ranking) {
    const PromptConfig& c = rc.key.config;
    out += std::to_string(rank++);
    out += ',';
    out += to_string(c.design);
    out += ',';
    out += to_string(c.example);
    out += ',';
    out += to_string(c.example_synonym);
    out += ',';
    out += to_string(c.comment);
    out += ',';
    out += to_string(c.comment_synonym);
    out += ',';
    out += to_string(c.beginning);
    out += ',';
    out += detail::format_real(rc.key.temperature);
    out += ',';
    out += detail::format_real(rc.key.frequency_penalty);
    out += ',';
    out += format_pct(rc.accuracy);
    out += ',' + std::to_string(rc.totals.processed);
    out += ',' + std::to_string(rc.totals.compiled);
    out += ',' + std::to_string(rc.totals.simulated);
    out += ',' + std::to_string(rc.totals.correct);
    out += '\n';
  }
  return out;
}

inline std::string render_breakdown_csv(const std::vector<BreakdownRow>& rows) {
  std::string out = "value,processed,compiled,simulated,correct,pct_correct,flags\n";
  for (const BreakdownRow& r : rows) {
    Rate rate = pct(r.counts.correct, r.counts.simulated);
    out += detail::csv_field(r.value);
    out += ',' + std::to_string(r.counts.processed);
    out += ',' + std::to_string(r.counts.compiled);
    out += ',' + std::to_string(r.counts.simulated);
    out += ',' + std::to_string(r.counts.correct);
    out += ',' + rate.render();
    out += ',';
    if (rate.na) out += "pct_correct=n/a";
    out += '\n';
  }
  return out;
}

// Computes all six per-component breakdowns in a fixed order.
inline std::vector<std::pair<std::string, std::vector<BreakdownRow>>> component_breakdowns(
    const std::vector<ScoredCandidate>& scored) {
  std::vector<std::pair<std::string, std::vector<BreakdownRow>>> out;
  out.emplace_back("design", breakdown(scored, [](const ScoredCandidate& s) {
                     return std::string(to_string(s.config.design));
                   }));
  out.emplace_back("example", breakdown(scored, [](const ScoredCandidate& s) {
                     return example_variant_label(s.config);
                   }));
  out.emplace_back("comment", breakdown(scored, [](const ScoredCandidate& s) {
                     return comment_variant_label(s.config);
                   }));
  out.emplace_back("beginning", breakdown(scored, [](const ScoredCandidate& s) {
                     return std::string(to_string(s.config.beginning));
                   }));
  out.emplace_back("temperature", breakdown(scored, [](const ScoredCandidate& s) {
                     return detail::format_real(s.temperature);
                   }));
  out.emplace_back("frequency_penalty", breakdown(scored, [](const ScoredCandidate& s) {
                     return detail::format_real(s.frequency_penalty);
                   }));
  return out;
}

struct Report {
  std::vector<MetricsRow> metrics;  // per benchmark, Total appended at render
  std::vector<RankedConfig> ranking;
  std::vector<std::pair<std::string, std::vector<BreakdownRow>>> breakdowns;
};

inline void write_report(const Report& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<MetricsRow> rows = report.metrics;
  rows.push_back(total_row(report.metrics));
  write_file((dir / "metrics.csv").string(), render_metrics_csv(rows));
  write_file((dir / "ranking.csv").string(), render_ranking_csv(report.ranking));
  for (const auto& [axis, rows2] : report.breakdowns)
    write_file((dir / ("breakdown_" + axis + ".csv")).string(), render_breakdown_csv(rows2));
}

}  // namespace svag
