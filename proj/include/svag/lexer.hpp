#pragma once

#include "svag/ast.hpp"

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace svag {

enum class TokenKind {
  // literals and names
  Number,
  Ident,
  SysIdent,  // $past, $display, ... (text stores the name without '$')
  String,
  Comment,  // retained so tools can inspect trivia; the parser skips these

  // keywords the grammar reacts to
  KwAssert,
  KwProperty,
  KwAlways,
  KwIf,
  KwElse,
  KwPosedge,
  KwNegedge,
  KwEndmodule,
  KwDisable,
  KwIff,

  // punctuation and operators
  LParen,
  RParen,
  LBracket,
  RBracket,
  Semi,
  Comma,
  Colon,
  At,
  Hash,        // #
  DoubleHash,  // ##
  Bang,
  Tilde,
  Caret,
  Amp,
  AmpAmp,
  Pipe,
  PipePipe,
  EqEq,
  BangEq,
  OverlapImpl,     // |->
  NonOverlapImpl,  // |=>
  // Tokens the grammar never accepts but that should produce a parse error
  // with a position rather than a lex failure.
  Assign,  // =
  Lt,
  Gt,
  Le,
  Ge,
  Star,
  Plus,
  Minus,
  Slash,
  Percent,
  Dot,
  Question,
  LBrace,
  RBrace,

  EndOfFile,
};

struct Token {
  TokenKind kind = TokenKind::EndOfFile;
  std::string text;  // identifier name, comment body, raw string, ...
  SourcePos pos;
  size_t offset = 0;  // byte offset in the source, for verbatim slices
  // Only meaningful for Number tokens.
  uint64_t value = 0;
  int width = 32;
  bool sized = false;
};

namespace detail {

inline TokenKind keyword_kind(std::string_view word) {
  if (word == "assert") return TokenKind::KwAssert;
  if (word == "property") return TokenKind::KwProperty;
  if (word == "always") return TokenKind::KwAlways;
  if (word == "if") return TokenKind::KwIf;
  if (word == "else") return TokenKind::KwElse;
  if (word == "posedge") return TokenKind::KwPosedge;
  if (word == "negedge") return TokenKind::KwNegedge;
  if (word == "endmodule") return TokenKind::KwEndmodule;
  if (word == "disable") return TokenKind::KwDisable;
  if (word == "iff") return TokenKind::KwIff;
  return TokenKind::Ident;
}

}  // namespace detail

// Tokenizes one assertion file. Comments are kept in the stream; the first
// unlexable byte aborts with a SyntaxError.
inline CompileResult<std::vector<Token>> lex(std::string_view src) {
  std::vector<Token> tokens;
  size_t i = 0;
  int line = 1, col = 1;

  auto pos_here = [&] { return SourcePos{line, col}; };
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (i < src.size() && src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto error = [&](std::string detail) {
    return CompileError{CompileErrorKind::SyntaxError, pos_here(), std::move(detail)};
  };
  auto push = [&](TokenKind kind, SourcePos at, std::string text = {}) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.pos = at;
    t.offset = i;
    tokens.push_back(std::move(t));
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f') {
      advance(1);
      continue;
    }
    SourcePos at = pos_here();

    // comments
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      size_t end = src.find('\n', i);
      if (end == std::string_view::npos) end = src.size();
      push(TokenKind::Comment, at, std::string(src.substr(i, end - i)));
      advance(end - i);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      size_t end = src.find("*/", i + 2);
      if (end == std::string_view::npos) return error("unterminated block comment");
      push(TokenKind::Comment, at, std::string(src.substr(i, end + 2 - i)));
      advance(end + 2 - i);
      continue;
    }

    // identifiers and keywords
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '$'))
        ++j;
      std::string word(src.substr(i, j - i));
      push(detail::keyword_kind(word), at, word);
      advance(j - i);
      continue;
    }

    // system identifiers
    if (c == '$') {
      size_t j = i + 1;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      if (j == i + 1) return error("stray '$'");
      push(TokenKind::SysIdent, at, std::string(src.substr(i + 1, j - i - 1)));
      advance(j - i);
      continue;
    }

    // numeric literals: 123, 4'b1010, 'hff, with optional _ separators
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
      uint64_t size_part = 0;
      bool have_size = false;
      size_t j = i;
      while (j < src.size() &&
             (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        if (src[j] != '_') {
          size_part = size_part * 10 + static_cast<uint64_t>(src[j] - '0');
          have_size = true;
        }
        ++j;
      }
      Token t;
      t.kind = TokenKind::Number;
      t.pos = at;
      t.offset = i;
      if (j < src.size() && src[j] == '\'') {
        ++j;
        if (j >= src.size()) return error("truncated based literal");
        char base = static_cast<char>(std::tolower(static_cast<unsigned char>(src[j])));
        int radix = base == 'b' ? 2 : base == 'd' ? 10 : base == 'h' ? 16 : 0;
        if (radix == 0) return error(std::string("unsupported literal base '") + src[j] + "'");
        ++j;
        uint64_t value = 0;
        size_t digits = 0;
        while (j < src.size()) {
          char d = static_cast<char>(std::tolower(static_cast<unsigned char>(src[j])));
          int dv;
          if (d == '_') {
            ++j;
            continue;
          } else if (d >= '0' && d <= '9') {
            dv = d - '0';
          } else if (d >= 'a' && d <= 'f') {
            dv = d - 'a' + 10;
          } else if (d == 'x' || d == 'z' || d == '?') {
            return error("four-state literal digits are not supported");
          } else {
            break;
          }
          if (dv >= radix) return error("digit out of range for literal base");
          value = value * static_cast<uint64_t>(radix) + static_cast<uint64_t>(dv);
          ++digits;
          ++j;
        }
        if (digits == 0) return error("based literal without digits");
        t.sized = have_size;
        t.width = have_size ? static_cast<int>(size_part) : 32;
        if (t.width < 1 || t.width > 64) return error("literal width out of range");
        t.value = t.width == 64 ? value : (value & ((1ull << t.width) - 1));
      } else {
        if (!have_size) return error("stray '''");
        t.value = size_part;
        t.width = 32;
        t.sized = false;
      }
      t.text = std::string(src.substr(i, j - i));
      tokens.push_back(std::move(t));
      advance(j - i);
      continue;
    }

    // string literals (only legal inside action blocks; captured raw)
    if (c == '"') {
      size_t j = i + 1;
      while (j < src.size() && src[j] != '"') {
        if (src[j] == '\\' && j + 1 < src.size()) ++j;
        ++j;
      }
      if (j >= src.size()) return error("unterminated string literal");
      push(TokenKind::String, at, std::string(src.substr(i, j + 1 - i)));
      advance(j + 1 - i);
      continue;
    }

    // multi-char operators, longest match first
    auto starts = [&](std::string_view op) { return src.substr(i).substr(0, op.size()) == op; };
    struct OpEntry {
      std::string_view text;
      TokenKind kind;
    };
    static constexpr OpEntry ops[] = {
        {"|->", TokenKind::OverlapImpl}, {"|=>", TokenKind::NonOverlapImpl},
        {"||", TokenKind::PipePipe},     {"&&", TokenKind::AmpAmp},
        {"==", TokenKind::EqEq},         {"!=", TokenKind::BangEq},
        {"##", TokenKind::DoubleHash},   {"<=", TokenKind::Le},
        {">=", TokenKind::Ge},           {"(", TokenKind::LParen},
        {")", TokenKind::RParen},        {"[", TokenKind::LBracket},
        {"]", TokenKind::RBracket},      {";", TokenKind::Semi},
        {",", TokenKind::Comma},         {":", TokenKind::Colon},
        {"@", TokenKind::At},            {"#", TokenKind::Hash},
        {"!", TokenKind::Bang},          {"~", TokenKind::Tilde},
        {"^", TokenKind::Caret},         {"&", TokenKind::Amp},
        {"|", TokenKind::Pipe},          {"=", TokenKind::Assign},
        {"<", TokenKind::Lt},            {">", TokenKind::Gt},
        {"*", TokenKind::Star},          {"+", TokenKind::Plus},
        {"-", TokenKind::Minus},         {"/", TokenKind::Slash},
        {"%", TokenKind::Percent},       {".", TokenKind::Dot},
        {"?", TokenKind::Question},      {"{", TokenKind::LBrace},
        {"}", TokenKind::RBrace},
    };
    bool matched = false;
    for (const auto& op : ops) {
      if (starts(op.text)) {
        push(op.kind, at, std::string(op.text));
        advance(op.text.size());
        matched = true;
        break;
      }
    }
    if (matched) continue;

    if (c == '`') return error("compiler directives are not supported in assertion files");
    return error(std::string("unexpected character '") + c + "'");
  }

  Token eof;
  eof.kind = TokenKind::EndOfFile;
  eof.pos = pos_here();
  eof.offset = src.size();
  tokens.push_back(std::move(eof));
  return tokens;
}

}  // namespace svag
