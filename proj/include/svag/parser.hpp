#pragma once

#include "svag/ast.hpp"
#include "svag/lexer.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace svag {

namespace detail {

// Recursive-descent parser over the restricted assertion grammar:
//
//   file        ::= { item } "endmodule"
//   item        ::= "assert" "property" "(" clocking property ")" [action] ";"
//                 | "always" clocking ["if" "(" expr ")"] "assert" "(" expr ")" [action] ";"
//   clocking    ::= "@" "(" "posedge" IDENT ")"
//   property    ::= expr [ ("|->" | "|=>") ["##" NUMBER] expr ]
//   action      ::= "else" SYSTASK "(" ... ")"
//   expr        ::= the usual boolean/bitwise precedence ladder down to
//                   primaries: literals, identifiers with constant selects,
//                   $past/$stable/$rose/$fell calls, parenthesized exprs.
//
// Implications never nest: a property is at most one implication whose sides
// are plain boolean expressions.
class Parser {
 public:
  Parser(const std::vector<Token>& tokens, std::string_view src) : tokens_(tokens), src_(src) {}

  CompileResult<SvaFile> parse_file() {
    SvaFile file;
    while (true) {
      skip_trivia();
      const Token& t = peek();
      if (t.kind == TokenKind::KwEndmodule) {
        get();
        break;
      }
      if (t.kind == TokenKind::EndOfFile)
        return fail(t.pos, "missing 'endmodule'");
      auto item = parse_item();
      if (!item.ok()) return item.error();
      file.items.push_back(item.take());
    }
    // Only trivia may follow the endmodule; anything else is the "assertion
    // spans across modules" failure mode that repair rule R2 exists to fix.
    skip_trivia();
    if (peek().kind != TokenKind::EndOfFile)
      return fail(peek().pos, "content after 'endmodule'");
    file.referenced_identifiers = std::move(referenced_);
    return file;
  }

 private:
  const std::vector<Token>& tokens_;
  std::string_view src_;
  size_t idx_ = 0;
  std::set<std::string> referenced_;
  int depth_ = 0;

  static constexpr int kMaxExprDepth = 256;

  const Token& peek(size_t ahead = 0) const {
    size_t i = idx_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token& get() { return tokens_[idx_ < tokens_.size() - 1 ? idx_++ : idx_]; }
  void skip_trivia() {
    while (peek().kind == TokenKind::Comment) get();
  }

  CompileError fail(SourcePos pos, std::string detail,
                    CompileErrorKind kind = CompileErrorKind::SyntaxError) {
    return CompileError{kind, pos, std::move(detail)};
  }

  CompileResult<Token> expect(TokenKind kind, const char* what) {
    skip_trivia();
    const Token& t = peek();
    if (t.kind != kind) return fail(t.pos, std::string("expected ") + what);
    return get();
  }

  // ---- items ----

  CompileResult<AssertionItem> parse_item() {
    skip_trivia();
    const Token& t = peek();
    if (t.kind == TokenKind::KwAssert) return parse_concurrent();
    if (t.kind == TokenKind::KwAlways) return parse_immediate_always();
    if (t.kind == TokenKind::Ident &&
        (t.text == "sequence" || t.text == "generate" || t.text == "genvar" ||
         t.text == "initial" || t.text == "begin" || t.text == "bind" || t.text == "module"))
      return fail(t.pos, "'" + t.text + "' is outside the supported assertion subset",
                  CompileErrorKind::UnsupportedConstruct);
    return fail(t.pos, "expected an assertion");
  }

  CompileResult<std::string> parse_clocking() {
    if (auto r = expect(TokenKind::At, "'@'"); !r.ok()) return r.error();
    if (auto r = expect(TokenKind::LParen, "'('"); !r.ok()) return r.error();
    skip_trivia();
    if (peek().kind == TokenKind::KwNegedge)
      return fail(peek().pos, "only posedge clocking is supported",
                  CompileErrorKind::UnsupportedConstruct);
    if (auto r = expect(TokenKind::KwPosedge, "'posedge'"); !r.ok()) return r.error();
    auto name = expect(TokenKind::Ident, "clock name");
    if (!name.ok()) return name.error();
    if (auto r = expect(TokenKind::RParen, "')'"); !r.ok()) return r.error();
    referenced_.insert(name.value().text);
    return name.value().text;
  }

  CompileResult<AssertionItem> parse_concurrent() {
    SourcePos at = peek().pos;
    get();  // assert
    if (auto r = expect(TokenKind::KwProperty, "'property'"); !r.ok()) return r.error();
    if (auto r = expect(TokenKind::LParen, "'('"); !r.ok()) return r.error();
    auto clock = parse_clocking();
    if (!clock.ok()) return clock.error();

    skip_trivia();
    if (peek().kind == TokenKind::KwDisable)
      return fail(peek().pos, "'disable iff' is outside the supported assertion subset",
                  CompileErrorKind::UnsupportedConstruct);

    auto prop = parse_property();
    if (!prop.ok()) return prop.error();
    if (auto r = expect(TokenKind::RParen, "')'"); !r.ok()) return r.error();

    auto action = parse_optional_action();
    if (!action.ok()) return action.error();
    if (auto r = expect(TokenKind::Semi, "';'"); !r.ok()) return r.error();

    ConcurrentAssertion item;
    item.clock = clock.take();
    item.prop = prop.take();
    item.action = action.take();
    AssertionItem out;
    out.body = std::move(item);
    out.pos = at;
    return out;
  }

  CompileResult<AssertionItem> parse_immediate_always() {
    SourcePos at = peek().pos;
    get();  // always
    auto clock = parse_clocking();
    if (!clock.ok()) return clock.error();

    skip_trivia();
    if (peek().kind == TokenKind::Ident && peek().text == "begin")
      return fail(peek().pos, "procedural blocks are outside the supported assertion subset",
                  CompileErrorKind::UnsupportedConstruct);

    ExprPtr guard;
    if (peek().kind == TokenKind::KwIf) {
      get();
      if (auto r = expect(TokenKind::LParen, "'('"); !r.ok()) return r.error();
      auto g = parse_expr();
      if (!g.ok()) return g.error();
      guard = g.take();
      if (auto r = expect(TokenKind::RParen, "')'"); !r.ok()) return r.error();
    }

    skip_trivia();
    if (peek().kind != TokenKind::KwAssert) return fail(peek().pos, "expected 'assert'");
    get();
    skip_trivia();
    if (peek().kind == TokenKind::KwProperty)
      return fail(peek().pos, "concurrent assertions inside always blocks are not supported",
                  CompileErrorKind::UnsupportedConstruct);
    if (auto r = expect(TokenKind::LParen, "'('"); !r.ok()) return r.error();
    auto check = parse_expr();
    if (!check.ok()) return check.error();
    if (auto r = expect(TokenKind::RParen, "')'"); !r.ok()) return r.error();

    auto action = parse_optional_action();
    if (!action.ok()) return action.error();
    if (auto r = expect(TokenKind::Semi, "';'"); !r.ok()) return r.error();

    ImmediateAlwaysAssertion item;
    item.clock = clock.take();
    item.guard = std::move(guard);
    item.check = check.take();
    item.action = action.take();
    AssertionItem out;
    out.body = std::move(item);
    out.pos = at;
    return out;
  }

  // ---- properties ----

  CompileResult<Property> parse_property() {
    auto lhs = parse_expr();
    if (!lhs.ok()) return lhs.error();
    skip_trivia();
    const Token& t = peek();
    if (t.kind != TokenKind::OverlapImpl && t.kind != TokenKind::NonOverlapImpl) {
      Property p;
      p.body = lhs.take();
      return p;
    }
    ImplOp op = t.kind == TokenKind::OverlapImpl ? ImplOp::Overlapping : ImplOp::NonOverlapping;
    get();

    int delay = 0;
    skip_trivia();
    if (peek().kind == TokenKind::DoubleHash) {
      get();
      auto n = expect(TokenKind::Number, "delay cycle count");
      if (!n.ok()) return n.error();
      if (n.value().value > 1024)
        return fail(n.value().pos, "delay is unreasonably large");
      delay = static_cast<int>(n.value().value);
    }

    auto rhs = parse_expr();
    if (!rhs.ok()) return rhs.error();
    skip_trivia();
    if (peek().kind == TokenKind::OverlapImpl || peek().kind == TokenKind::NonOverlapImpl)
      return fail(peek().pos, "a property may contain at most one implication");

    Implication impl;
    impl.antecedent = lhs.take();
    impl.op = op;
    impl.delay = delay;
    impl.consequent = rhs.take();
    Property p;
    p.body = std::move(impl);
    return p;
  }

  // ---- actions ----

  // Captures "else $display(...)" verbatim from the source; the action is
  // semantically inert but kept for faithful reprinting.
  CompileResult<std::string> parse_optional_action() {
    skip_trivia();
    if (peek().kind != TokenKind::KwElse) return std::string();
    get();
    skip_trivia();
    const Token& task = peek();
    if (task.kind != TokenKind::SysIdent)
      return fail(task.pos, "expected a system task after 'else'");
    if (task.text == "stop" || task.text == "finish")
      return fail(task.pos, "'$" + task.text + "' is outside the supported assertion subset",
                  CompileErrorKind::UnsupportedConstruct);
    if (task.text != "display" && task.text != "error" && task.text != "warning" &&
        task.text != "info" && task.text != "fatal")
      return fail(task.pos, "unknown system task '$" + task.text + "'");
    size_t start = task.offset;
    get();
    if (auto r = expect(TokenKind::LParen, "'('"); !r.ok()) return r.error();
    int depth = 1;
    while (depth > 0) {
      const Token& t = get();
      if (t.kind == TokenKind::EndOfFile)
        return fail(t.pos, "unterminated action block");
      if (t.kind == TokenKind::LParen) ++depth;
      if (t.kind == TokenKind::RParen) --depth;
    }
    const Token& after = peek();  // first token past the closing paren
    return std::string(src_.substr(start, after.offset - start > 0
                                              ? rtrim_len(start, after.offset)
                                              : 0));
  }

  // Length of src_[start..end) with trailing whitespace dropped.
  size_t rtrim_len(size_t start, size_t end) const {
    while (end > start && std::isspace(static_cast<unsigned char>(src_[end - 1]))) --end;
    return end - start;
  }

  // ---- expressions ----

  CompileResult<ExprPtr> parse_expr() { return parse_binary(0); }

  CompileResult<ExprPtr> parse_binary(int min_level) {
    if (++depth_ > kMaxExprDepth) return fail(peek().pos, "expression too deeply nested");
    auto lhs = parse_unary();
    --depth_;
    if (!lhs.ok()) return lhs.error();
    ExprPtr expr = lhs.take();
    while (true) {
      skip_trivia();
      const Token& t = peek();
      BinOp op;
      switch (t.kind) {
        case TokenKind::PipePipe: op = BinOp::LogicalOr; break;
        case TokenKind::AmpAmp: op = BinOp::LogicalAnd; break;
        case TokenKind::Pipe: op = BinOp::BitOr; break;
        case TokenKind::Caret: op = BinOp::BitXor; break;
        case TokenKind::Amp: op = BinOp::BitAnd; break;
        case TokenKind::EqEq: op = BinOp::Eq; break;
        case TokenKind::BangEq: op = BinOp::Ne; break;
        default: return expr;
      }
      int level = precedence(op);
      if (level < min_level) return expr;
      SourcePos at = t.pos;
      get();
      ++depth_;
      auto rhs = parse_binary(level + 1);  // all these operators are left-associative
      --depth_;
      if (!rhs.ok()) return rhs.error();
      Binary bin;
      bin.op = op;
      bin.lhs = std::move(expr);
      bin.rhs = rhs.take();
      expr = make_expr(std::move(bin), at);
    }
  }

  CompileResult<ExprPtr> parse_unary() {
    skip_trivia();
    const Token& t = peek();
    if (t.kind == TokenKind::Bang || t.kind == TokenKind::Tilde) {
      SourcePos at = t.pos;
      char op = t.kind == TokenKind::Bang ? '!' : '~';
      get();
      if (++depth_ > kMaxExprDepth) return fail(peek().pos, "expression too deeply nested");
      auto operand = parse_unary();
      --depth_;
      if (!operand.ok()) return operand.error();
      Unary u;
      u.op = op;
      u.operand = operand.take();
      return make_expr(std::move(u), at);
    }
    return parse_primary();
  }

  CompileResult<ExprPtr> parse_primary() {
    skip_trivia();
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Number: {
        get();
        Literal lit;
        lit.value = t.value;
        lit.width = t.width;
        lit.sized = t.sized;
        return make_expr(lit, t.pos);
      }
      case TokenKind::Ident: {
        get();
        referenced_.insert(t.text);
        Ident id;
        id.name = t.text;
        ExprPtr base = make_expr(std::move(id), t.pos);
        return parse_optional_select(std::move(base));
      }
      case TokenKind::SysIdent:
        return parse_sampled_call();
      case TokenKind::LParen: {
        get();
        auto inner = parse_expr();
        if (!inner.ok()) return inner.error();
        skip_trivia();
        if (peek().kind == TokenKind::OverlapImpl || peek().kind == TokenKind::NonOverlapImpl)
          return fail(peek().pos, "implication is only allowed at the top level of a property");
        if (auto r = expect(TokenKind::RParen, "')'"); !r.ok()) return r.error();
        return inner;
      }
      case TokenKind::String:
        return fail(t.pos, "string literal outside an action block");
      case TokenKind::Hash:
      case TokenKind::DoubleHash:
        return fail(t.pos, "delays are not allowed inside boolean expressions");
      case TokenKind::KwDisable:
        return fail(t.pos, "'disable iff' is outside the supported assertion subset",
                    CompileErrorKind::UnsupportedConstruct);
      default:
        return fail(t.pos, "expected an expression");
    }
  }

  CompileResult<ExprPtr> parse_optional_select(ExprPtr base) {
    skip_trivia();
    if (peek().kind != TokenKind::LBracket) return base;
    SourcePos at = get().pos;
    skip_trivia();
    if (peek().kind != TokenKind::Number)
      return fail(peek().pos, "select index must be a constant");
    Token first = get();
    if (first.value > 100000) return fail(first.pos, "select index is unreasonably large");
    skip_trivia();
    if (peek().kind == TokenKind::Colon) {
      get();
      skip_trivia();
      if (peek().kind != TokenKind::Number)
        return fail(peek().pos, "select index must be a constant");
      Token second = get();
      if (second.value > 100000) return fail(second.pos, "select index is unreasonably large");
      if (auto r = expect(TokenKind::RBracket, "']'"); !r.ok()) return r.error();
      PartSelect sel;
      sel.base = std::move(base);
      sel.msb = static_cast<int>(first.value);
      sel.lsb = static_cast<int>(second.value);
      return make_expr(std::move(sel), at);
    }
    if (auto r = expect(TokenKind::RBracket, "']'"); !r.ok()) return r.error();
    BitSelect sel;
    sel.base = std::move(base);
    sel.index = static_cast<int>(first.value);
    return make_expr(std::move(sel), at);
  }

  CompileResult<ExprPtr> parse_sampled_call() {
    Token t = get();
    SampledFn fn;
    if (t.text == "past")
      fn = SampledFn::Past;
    else if (t.text == "stable")
      fn = SampledFn::Stable;
    else if (t.text == "rose")
      fn = SampledFn::Rose;
    else if (t.text == "fell")
      fn = SampledFn::Fell;
    else
      return fail(t.pos, "unknown system function '$" + t.text + "'");

    if (auto r = expect(TokenKind::LParen, "'('"); !r.ok()) return r.error();
    auto arg = parse_expr();
    if (!arg.ok()) return arg.error();

    int depth = 1;
    skip_trivia();
    if (peek().kind == TokenKind::Comma) {
      if (fn != SampledFn::Past)
        return fail(peek().pos, "only $past takes a cycle-count argument");
      get();
      auto n = expect(TokenKind::Number, "cycle count");
      if (!n.ok()) return n.error();
      if (n.value().value < 1 || n.value().value > 1024)
        return fail(n.value().pos, "$past cycle count must be a positive constant");
      depth = static_cast<int>(n.value().value);
    }
    if (auto r = expect(TokenKind::RParen, "')'"); !r.ok()) return r.error();

    Sampled call;
    call.fn = fn;
    call.arg = arg.take();
    call.depth = depth;
    return make_expr(std::move(call), t.pos);
  }
};

}  // namespace detail

// Parses a candidate (or golden) assertion file: a sequence of assertion
// items terminated by `endmodule`. Returns the AST or the first error.
inline CompileResult<SvaFile> parse(std::string_view text) {
  auto tokens = lex(text);
  if (!tokens.ok()) return tokens.error();
  detail::Parser parser(tokens.value(), text);
  return parser.parse_file();
}

}  // namespace svag
