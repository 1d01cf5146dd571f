#pragma once

#include "svag/ast.hpp"

#include <string>

namespace svag {

namespace detail {

inline void print_expr(const Expr& e, std::string& out, int parent_level, bool rhs_of_same);

inline void print_child(const ExprPtr& child, std::string& out, int parent_level,
                        bool rhs_of_same) {
  print_expr(*child, out, parent_level, rhs_of_same);
}

inline const char* spelling(BinOp op) {
  switch (op) {
    case BinOp::LogicalOr: return "||";
    case BinOp::LogicalAnd: return "&&";
    case BinOp::BitOr: return "|";
    case BinOp::BitXor: return "^";
    case BinOp::BitAnd: return "&";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
  }
  return "?";
}

// Emits minimal parentheses: a binary child is wrapped when it binds looser
// than its parent, or equally tight on the right of a left-associative chain.
inline void print_expr(const Expr& e, std::string& out, int parent_level, bool rhs_of_same) {
  if (auto* lit = std::get_if<Literal>(&e.node)) {
    if (lit->sized)
      out += std::to_string(lit->width) + "'d" + std::to_string(lit->value);
    else
      out += std::to_string(lit->value);
    return;
  }
  if (auto* id = std::get_if<Ident>(&e.node)) {
    out += id->name;
    return;
  }
  if (auto* sel = std::get_if<BitSelect>(&e.node)) {
    print_child(sel->base, out, 100, false);
    out += "[" + std::to_string(sel->index) + "]";
    return;
  }
  if (auto* sel = std::get_if<PartSelect>(&e.node)) {
    print_child(sel->base, out, 100, false);
    out += "[" + std::to_string(sel->msb) + ":" + std::to_string(sel->lsb) + "]";
    return;
  }
  if (auto* u = std::get_if<Unary>(&e.node)) {
    out += u->op;
    bool needs_parens = std::holds_alternative<Binary>(u->operand->node);
    if (needs_parens) out += "(";
    print_child(u->operand, out, 100, false);
    if (needs_parens) out += ")";
    return;
  }
  if (auto* s = std::get_if<Sampled>(&e.node)) {
    switch (s->fn) {
      case SampledFn::Past: out += "$past("; break;
      case SampledFn::Stable: out += "$stable("; break;
      case SampledFn::Rose: out += "$rose("; break;
      case SampledFn::Fell: out += "$fell("; break;
    }
    print_child(s->arg, out, 0, false);
    if (s->fn == SampledFn::Past && s->depth != 1) out += ", " + std::to_string(s->depth);
    out += ")";
    return;
  }
  auto& bin = std::get<Binary>(e.node);
  int level = precedence(bin.op);
  bool needs_parens = level < parent_level || (level == parent_level && rhs_of_same);
  if (needs_parens) out += "(";
  print_child(bin.lhs, out, level, false);
  out += " ";
  out += spelling(bin.op);
  out += " ";
  print_child(bin.rhs, out, level, true);
  if (needs_parens) out += ")";
}

}  // namespace detail

inline std::string print(const Expr& e) {
  std::string out;
  detail::print_expr(e, out, 0, false);
  return out;
}

inline std::string print(const Property& p) {
  if (auto* plain = std::get_if<ExprPtr>(&p.body)) return print(**plain);
  auto& impl = std::get<Implication>(p.body);
  std::string out = print(*impl.antecedent);
  out += impl.op == ImplOp::Overlapping ? " |-> " : " |=> ";
  if (impl.delay != 0) out += "##" + std::to_string(impl.delay) + " ";
  out += print(*impl.consequent);
  return out;
}

inline std::string print(const AssertionItem& item) {
  if (auto* c = std::get_if<ConcurrentAssertion>(&item.body)) {
    std::string out = "assert property (@(posedge " + c->clock + ") " + print(c->prop) + ")";
    if (!c->action.empty()) out += " else " + c->action;
    out += ";";
    return out;
  }
  auto& imm = std::get<ImmediateAlwaysAssertion>(item.body);
  std::string out = "always @(posedge " + imm.clock + ") ";
  if (imm.guard) out += "if (" + print(*imm.guard) + ") ";
  out += "assert (" + print(*imm.check) + ")";
  if (!imm.action.empty()) out += " else " + imm.action;
  out += ";";
  return out;
}

// Canonical single-spaced rendering of a whole file, `endmodule` included.
inline std::string print(const SvaFile& file) {
  std::string out;
  for (const auto& item : file.items) {
    out += print(item);
    out += "\n";
  }
  out += "endmodule\n";
  return out;
}

}  // namespace svag
