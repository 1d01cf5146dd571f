#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace svag {

//===----------------------------------------------------------------------===//
// Compile errors
//===----------------------------------------------------------------------===//

// A candidate assertion failing to compile is ordinary data (it feeds the
// scoreboard), so compile errors are values, not exceptions.
enum class CompileErrorKind {
  SyntaxError,          // unlexable input or tokens outside the grammar
  UnknownIdentifier,    // name not in the benchmark interface or constants
  UnsupportedConstruct, // recognized SystemVerilog we deliberately reject
  OutOfRangeSelect,     // constant bit/part select outside the signal width
};

inline const char* to_string(CompileErrorKind k) {
  switch (k) {
    case CompileErrorKind::SyntaxError: return "SyntaxError";
    case CompileErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case CompileErrorKind::UnsupportedConstruct: return "UnsupportedConstruct";
    case CompileErrorKind::OutOfRangeSelect: return "OutOfRangeSelect";
  }
  return "?";
}

struct SourcePos {
  int line = 1;  // 1-based
  int col = 1;
};

struct CompileError {
  CompileErrorKind kind = CompileErrorKind::SyntaxError;
  SourcePos pos;
  std::string detail;
};

// Holds either a value or the first compile error encountered.
template <typename T>
class CompileResult {
 public:
  CompileResult(T value) : value_(std::move(value)) {}
  CompileResult(CompileError error) : error_(std::move(error)) {}

  bool ok() const { return value_.has_value(); }
  T& value() { return *value_; }
  const T& value() const { return *value_; }
  const CompileError& error() const { return *error_; }
  T take() { return std::move(*value_); }

 private:
  std::optional<T> value_;
  std::optional<CompileError> error_;
};

//===----------------------------------------------------------------------===//
// Boolean-layer expressions
//===----------------------------------------------------------------------===//

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

// Binary operators, ordered loosest-binding first. The enum value doubles as
// the precedence level used by the parser and the printer.
enum class BinOp { LogicalOr = 0, LogicalAnd, BitOr, BitXor, BitAnd, Eq, Ne };

inline int precedence(BinOp op) {
  switch (op) {
    case BinOp::LogicalOr: return 0;
    case BinOp::LogicalAnd: return 1;
    case BinOp::BitOr: return 2;
    case BinOp::BitXor: return 3;
    case BinOp::BitAnd: return 4;
    case BinOp::Eq:
    case BinOp::Ne: return 5;
  }
  return 0;
}

enum class SampledFn { Past, Stable, Rose, Fell };

struct Literal {
  uint64_t value = 0;
  int width = 32;      // unsized literals behave as 32-bit values
  bool sized = false;  // true for the n'b / n'd / n'h forms
};

struct Ident {
  std::string name;
  int width = 0;  // 0 until the interface check annotates it
};

struct BitSelect {
  ExprPtr base;  // always an identifier in this grammar
  int index = 0;
};

struct PartSelect {
  ExprPtr base;
  int msb = 0;
  int lsb = 0;
};

struct Unary {
  char op = '!';  // '!' or '~'
  ExprPtr operand;
};

struct Binary {
  BinOp op = BinOp::Eq;
  ExprPtr lhs;
  ExprPtr rhs;
};

// $past / $stable / $rose / $fell. `depth` is the optional second argument of
// $past and is always 1 for the other functions.
struct Sampled {
  SampledFn fn = SampledFn::Past;
  ExprPtr arg;
  int depth = 1;
};

struct Expr {
  std::variant<Literal, Ident, BitSelect, PartSelect, Unary, Binary, Sampled> node;
  SourcePos pos;
};

inline ExprPtr make_expr(decltype(Expr::node) node, SourcePos pos = {}) {
  auto e = std::make_unique<Expr>();
  e->node = std::move(node);
  e->pos = pos;
  return e;
}

//===----------------------------------------------------------------------===//
// Properties and assertion items
//===----------------------------------------------------------------------===//

enum class ImplOp { Overlapping, NonOverlapping };  // |->  vs  |=>

// Properties are deliberately flat: one optional implication whose sides are
// boolean expressions. Nested implications are rejected at parse time.
struct Implication {
  ExprPtr antecedent;
  ImplOp op = ImplOp::Overlapping;
  int delay = 0;  // the ##n after the implication operator, 0 when absent
  ExprPtr consequent;
};

struct Property {
  std::variant<ExprPtr, Implication> body;
};

// assert property (@(posedge <clock>) <property>) [else $display(...)];
struct ConcurrentAssertion {
  std::string clock;
  Property prop;
  std::string action;  // raw text of the else action, "" when absent
};

// always @(posedge <clock>) [if (<guard>)] assert (<check>) [else ...];
struct ImmediateAlwaysAssertion {
  std::string clock;
  ExprPtr guard;  // null when the always body has no if
  ExprPtr check;
  std::string action;
};

struct AssertionItem {
  std::variant<ConcurrentAssertion, ImmediateAlwaysAssertion> body;
  SourcePos pos;
};

struct SvaFile {
  std::vector<AssertionItem> items;
  // Names seen in expressions and clocking events; the interface check
  // resolves each against the benchmark interface and named constants.
  std::set<std::string> referenced_identifiers;
};

//===----------------------------------------------------------------------===//
// Structural equality (positions and annotations ignored)
//===----------------------------------------------------------------------===//

inline bool equal(const Expr& a, const Expr& b);

inline bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return equal(*a, *b);
}

inline bool equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto* la = std::get_if<Literal>(&a.node)) {
    auto& lb = std::get<Literal>(b.node);
    return la->value == lb.value && la->width == lb.width && la->sized == lb.sized;
  }
  if (auto* ia = std::get_if<Ident>(&a.node))
    return ia->name == std::get<Ident>(b.node).name;
  if (auto* sa = std::get_if<BitSelect>(&a.node)) {
    auto& sb = std::get<BitSelect>(b.node);
    return sa->index == sb.index && equal(sa->base, sb.base);
  }
  if (auto* pa = std::get_if<PartSelect>(&a.node)) {
    auto& pb = std::get<PartSelect>(b.node);
    return pa->msb == pb.msb && pa->lsb == pb.lsb && equal(pa->base, pb.base);
  }
  if (auto* ua = std::get_if<Unary>(&a.node)) {
    auto& ub = std::get<Unary>(b.node);
    return ua->op == ub.op && equal(ua->operand, ub.operand);
  }
  if (auto* ba = std::get_if<Binary>(&a.node)) {
    auto& bb = std::get<Binary>(b.node);
    return ba->op == bb.op && equal(ba->lhs, bb.lhs) && equal(ba->rhs, bb.rhs);
  }
  auto& fa = std::get<Sampled>(a.node);
  auto& fb = std::get<Sampled>(b.node);
  return fa.fn == fb.fn && fa.depth == fb.depth && equal(fa.arg, fb.arg);
}

inline bool equal(const Property& a, const Property& b) {
  if (a.body.index() != b.body.index()) return false;
  if (auto* ea = std::get_if<ExprPtr>(&a.body))
    return equal(*ea, std::get<ExprPtr>(b.body));
  auto& ia = std::get<Implication>(a.body);
  auto& ib = std::get<Implication>(b.body);
  return ia.op == ib.op && ia.delay == ib.delay && equal(ia.antecedent, ib.antecedent) &&
         equal(ia.consequent, ib.consequent);
}

inline bool equal(const AssertionItem& a, const AssertionItem& b) {
  if (a.body.index() != b.body.index()) return false;
  if (auto* ca = std::get_if<ConcurrentAssertion>(&a.body)) {
    auto& cb = std::get<ConcurrentAssertion>(b.body);
    return ca->clock == cb.clock && ca->action == cb.action && equal(ca->prop, cb.prop);
  }
  auto& ia = std::get<ImmediateAlwaysAssertion>(a.body);
  auto& ib = std::get<ImmediateAlwaysAssertion>(b.body);
  return ia.clock == ib.clock && ia.action == ib.action && equal(ia.guard, ib.guard) &&
         equal(ia.check, ib.check);
}

inline bool equal(const SvaFile& a, const SvaFile& b) {
  if (a.items.size() != b.items.size()) return false;
  for (size_t i = 0; i < a.items.size(); ++i)
    if (!equal(a.items[i], b.items[i])) return false;
  return true;
}

}  // namespace svag
