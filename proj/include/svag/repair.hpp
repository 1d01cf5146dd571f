#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace svag {

inline constexpr std::string_view kEndmodule = "endmodule";

enum class RepairRule { R2, R3 };

inline const char* to_string(RepairRule r) { return r == RepairRule::R2 ? "R2" : "R3"; }

struct BatchRef {
  std::string prompt_hash;
  std::string params_digest;
  int index = 0;  // completion index within the batch

  friend bool operator==(const BatchRef&, const BatchRef&) = default;
};

// A candidate assertion file body. Originals get the unconditional fixes
// (strip non-ASCII, ensure a closing endmodule); repaired copies additionally
// record which optional rules produced them. Every candidate ends up
// ASCII-only with at least one "endmodule".
struct CandidateText {
  std::string text;
  bool original = true;
  std::vector<RepairRule> applied;  // empty iff original
  BatchRef batch_ref;
};

// Drops every non-ASCII byte, then appends "\nendmodule" when the keyword is
// missing anywhere in the text. Idempotent.
inline std::string apply_inplace_fixes(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char ch : raw)
    if (static_cast<unsigned char>(ch) < 0x80) out += ch;
  if (out.find(kEndmodule) == std::string::npos) {
    out += '\n';
    out += kEndmodule;
  }
  return out;
}

namespace detail {

// Truncates right after the first "endmodule", keeping the keyword. Stray
// logic after the assertion file body is the most common completion tail.
inline std::string truncate_after_endmodule(std::string_view text) {
  size_t pos = text.find(kEndmodule);
  if (pos == std::string_view::npos) return std::string(text);
  return std::string(text.substr(0, pos + kEndmodule.size()));
}

// Deletes every region delimited by a pair of triple-quote markers (""" or
// '''), delimiters included — stray Python-style comment blocks. A region
// closes only on the same marker that opened it; an unmatched opener deletes
// through the end of the text.
inline std::string remove_triple_quoted(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  size_t pos = 0;
  while (pos < text.size()) {
    size_t dq = text.find("\"\"\"", pos);
    size_t sq = text.find("'''", pos);
    size_t open = std::min(dq, sq);
    if (open == std::string_view::npos) {
      out += text.substr(pos);
      break;
    }
    std::string_view marker = text.substr(open, 3);
    out += text.substr(pos, open - pos);
    size_t close = text.find(marker, open + 3);
    if (close == std::string_view::npos) break;
    pos = close + 3;
  }
  return out;
}

}  // namespace detail

// Emits the optional-rule variants of an already-fixed original: R2, R3, and
// R3-then-R2, in that order. Each variant is re-run through the unconditional
// fixes, and is kept only when its final text differs from the original and
// from the variants emitted before it. The original itself is never touched.
inline std::vector<CandidateText> derive_repaired_copies(const CandidateText& original) {
  std::vector<CandidateText> copies;
  auto consider = [&](std::string text, std::vector<RepairRule> rules) {
    text = apply_inplace_fixes(text);
    if (text == original.text) return;
    for (const CandidateText& c : copies)
      if (c.text == text) return;
    copies.push_back({std::move(text), false, std::move(rules), original.batch_ref});
  };
  consider(detail::truncate_after_endmodule(original.text), {RepairRule::R2});
  consider(detail::remove_triple_quoted(original.text), {RepairRule::R3});
  consider(detail::truncate_after_endmodule(detail::remove_triple_quoted(original.text)),
           {RepairRule::R2, RepairRule::R3});
  return copies;
}

// Turns one batch of raw completions into candidates. The prompt's beginning
// string is what primed the model, so it is stitched back in front of each
// completion before any fixes run. Each original is followed immediately by
// its repaired copies; originals appear in batch order.
inline std::vector<CandidateText> process_batch(const std::vector<std::string>& completions,
                                                std::string_view assertion_prefix,
                                                const std::string& prompt_hash,
                                                const std::string& params_digest) {
  std::vector<CandidateText> out;
  out.reserve(completions.size());
  for (size_t i = 0; i < completions.size(); ++i) {
    std::string raw = std::string(assertion_prefix) + completions[i];
    CandidateText original{apply_inplace_fixes(raw),
                           true,
                           {},
                           {prompt_hash, params_digest, static_cast<int>(i)}};
    std::vector<CandidateText> copies = derive_repaired_copies(original);
    out.push_back(std::move(original));
    for (auto& c : copies) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace svag
