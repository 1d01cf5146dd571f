#pragma once

#include "svag/ast.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace svag {

// Name environment a candidate file is checked against: the benchmark's
// port widths, its named constants, and which signal is the sampling clock.
struct SignalTable {
  std::map<std::string, int> signal_widths;  // port name -> effective width
  struct Constant {
    uint64_t value = 0;
    int width = 1;
  };
  std::map<std::string, Constant> constants;
  std::string clock_name;

  // Cumulative $past lookback allowed before a candidate is rejected.
  int max_past_depth = 4;
};

namespace detail {

class Checker {
 public:
  explicit Checker(const SignalTable& table) : table_(table) {}

  std::optional<CompileError> check_expr(Expr& e, int past_depth) {
    if (auto* id = std::get_if<Ident>(&e.node)) {
      auto sig = table_.signal_widths.find(id->name);
      if (sig != table_.signal_widths.end()) {
        id->width = sig->second;
        return std::nullopt;
      }
      auto con = table_.constants.find(id->name);
      if (con != table_.constants.end()) {
        id->width = con->second.width;
        return std::nullopt;
      }
      return CompileError{CompileErrorKind::UnknownIdentifier, e.pos,
                          "'" + id->name + "' is not a signal or constant of this benchmark"};
    }
    if (auto* sel = std::get_if<BitSelect>(&e.node)) {
      if (auto err = check_expr(*sel->base, past_depth)) return err;
      int w = width_of(*sel->base);
      if (sel->index >= w)
        return CompileError{CompileErrorKind::OutOfRangeSelect, e.pos,
                            "bit " + std::to_string(sel->index) + " of a " + std::to_string(w) +
                                "-bit value"};
      return std::nullopt;
    }
    if (auto* sel = std::get_if<PartSelect>(&e.node)) {
      if (auto err = check_expr(*sel->base, past_depth)) return err;
      int w = width_of(*sel->base);
      if (sel->msb < sel->lsb)
        return CompileError{CompileErrorKind::OutOfRangeSelect, e.pos,
                            "descending part select required ([msb:lsb])"};
      if (sel->msb >= w)
        return CompileError{CompileErrorKind::OutOfRangeSelect, e.pos,
                            "bits [" + std::to_string(sel->msb) + ":" + std::to_string(sel->lsb) +
                                "] of a " + std::to_string(w) + "-bit value"};
      return std::nullopt;
    }
    if (auto* u = std::get_if<Unary>(&e.node)) return check_expr(*u->operand, past_depth);
    if (auto* b = std::get_if<Binary>(&e.node)) {
      if (auto err = check_expr(*b->lhs, past_depth)) return err;
      return check_expr(*b->rhs, past_depth);
    }
    if (auto* s = std::get_if<Sampled>(&e.node)) {
      int depth = past_depth + (s->fn == SampledFn::Past ? s->depth : 1);
      if (depth > table_.max_past_depth)
        return CompileError{CompileErrorKind::UnsupportedConstruct, e.pos,
                            "history lookback deeper than " +
                                std::to_string(table_.max_past_depth) + " cycles"};
      return check_expr(*s->arg, depth);
    }
    return std::nullopt;  // literals
  }

  std::optional<CompileError> check_clock(const std::string& clock, SourcePos pos) {
    if (clock != table_.clock_name)
      return CompileError{CompileErrorKind::UnsupportedConstruct, pos,
                          "assertions must sample @(posedge " + table_.clock_name + ")"};
    return std::nullopt;
  }

  // Expression width after annotation, following the usual self-determined
  // rules: comparisons and logical/sampled-boolean operators are 1 bit wide,
  // bitwise operators widen to the larger operand.
  int width_of(const Expr& e) const {
    if (auto* lit = std::get_if<Literal>(&e.node)) return lit->width;
    if (auto* id = std::get_if<Ident>(&e.node)) return id->width;
    if (std::get_if<BitSelect>(&e.node)) return 1;
    if (auto* sel = std::get_if<PartSelect>(&e.node)) return sel->msb - sel->lsb + 1;
    if (auto* u = std::get_if<Unary>(&e.node))
      return u->op == '!' ? 1 : width_of(*u->operand);
    if (auto* b = std::get_if<Binary>(&e.node)) {
      switch (b->op) {
        case BinOp::LogicalOr:
        case BinOp::LogicalAnd:
        case BinOp::Eq:
        case BinOp::Ne:
          return 1;
        default:
          return std::max(width_of(*b->lhs), width_of(*b->rhs));
      }
    }
    auto& s = std::get<Sampled>(e.node);
    return s.fn == SampledFn::Past ? width_of(*s.arg) : 1;
  }

 private:
  const SignalTable& table_;
};

}  // namespace detail

// Resolves every identifier in the file against the signal table, validates
// constant selects against effective widths, enforces the clock and the
// history-depth bound. Annotates identifier widths in place. Returns the
// first error, or nothing on success.
inline std::optional<CompileError> check(SvaFile& file, const SignalTable& table) {
  detail::Checker checker(table);
  for (auto& item : file.items) {
    if (auto* c = std::get_if<ConcurrentAssertion>(&item.body)) {
      if (auto err = checker.check_clock(c->clock, item.pos)) return err;
      if (auto* plain = std::get_if<ExprPtr>(&c->prop.body)) {
        if (auto err = checker.check_expr(**plain, 0)) return err;
      } else {
        auto& impl = std::get<Implication>(c->prop.body);
        if (auto err = checker.check_expr(*impl.antecedent, 0)) return err;
        if (auto err = checker.check_expr(*impl.consequent, 0)) return err;
      }
    } else {
      auto& imm = std::get<ImmediateAlwaysAssertion>(item.body);
      if (auto err = checker.check_clock(imm.clock, item.pos)) return err;
      if (imm.guard)
        if (auto err = checker.check_expr(*imm.guard, 0)) return err;
      if (auto err = checker.check_expr(*imm.check, 0)) return err;
    }
  }
  return std::nullopt;
}

// Width of an expression whose identifiers have been annotated by check().
inline int expr_width(const Expr& e, const SignalTable& table) {
  return detail::Checker(table).width_of(e);
}

}  // namespace svag
