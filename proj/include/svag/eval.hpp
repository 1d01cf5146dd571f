#pragma once

#include "svag/checker.hpp"
#include "svag/stimulus.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace svag {

struct ViolationSet {
  std::vector<std::vector<uint64_t>> per_item;  // sorted, one entry per assertion
  std::vector<uint64_t> file_union;             // sorted union across items

  bool operator==(const ViolationSet& other) const = default;
};

struct EvalResult {
  enum class Status { Completed, BudgetExceeded };
  Status status = Status::Completed;
  ViolationSet violations;   // only meaningful when Completed
  uint64_t steps_used = 0;
};

namespace detail {

// Walks the trace once per assertion item. Signal histories are pure
// functions of the cycle index, so $past simply re-samples at t-k; any
// lookback before cycle 0 reads as 0.
//
// Sampling conventions for signals the counter does not drive: the clock
// reads 0 on every cycle (its pre-edge value at its own posedge), the reset
// reads 1 during the reset prefix and 0 afterwards, anything else reads 0.
class Evaluator {
 public:
  Evaluator(const SignalTable& table, const StimulusSpec& spec, uint64_t budget)
      : table_(table), spec_(spec), budget_(budget) {}

  EvalResult run(const SvaFile& file) {
    EvalResult result;
    int64_t total = static_cast<int64_t>(spec_.total_cycles());
    for (const auto& item : file.items) {
      std::vector<uint64_t> cycles;
      if (auto* c = std::get_if<ConcurrentAssertion>(&item.body)) {
        if (auto* plain = std::get_if<ExprPtr>(&c->prop.body)) {
          for (int64_t t = 0; t < total && !exceeded_; ++t)
            if (value(**plain, t) == 0) cycles.push_back(static_cast<uint64_t>(t));
        } else {
          auto& impl = std::get<Implication>(c->prop.body);
          int64_t k = impl.delay + (impl.op == ImplOp::NonOverlapping ? 1 : 0);
          for (int64_t t = 0; t < total && !exceeded_; ++t) {
            if (value(*impl.antecedent, t) == 0) continue;
            if (t + k >= total) continue;  // end of trace: vacuous
            if (value(*impl.consequent, t + k) == 0)
              cycles.push_back(static_cast<uint64_t>(t + k));
          }
        }
      } else {
        auto& imm = std::get<ImmediateAlwaysAssertion>(item.body);
        for (int64_t t = 0; t < total && !exceeded_; ++t) {
          if (imm.guard && value(*imm.guard, t) == 0) continue;
          if (value(*imm.check, t) == 0) cycles.push_back(static_cast<uint64_t>(t));
        }
      }
      if (exceeded_) {
        result.status = EvalResult::Status::BudgetExceeded;
        result.steps_used = steps_;
        return result;
      }
      result.violations.per_item.push_back(std::move(cycles));
    }

    std::vector<uint64_t> all;
    for (const auto& v : result.violations.per_item) all.insert(all.end(), v.begin(), v.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    result.violations.file_union = std::move(all);
    result.steps_used = steps_;
    return result;
  }

 private:
  const SignalTable& table_;
  const StimulusSpec& spec_;
  uint64_t budget_;
  uint64_t steps_ = 0;
  bool exceeded_ = false;

  uint64_t signal_at(const std::string& name, int64_t t) const {
    if (name == spec_.clock_name) return 0;
    if (name == spec_.reset_name) return t < spec_.reset_cycles ? 1 : 0;
    return detail::driven_value(spec_, name, static_cast<uint64_t>(t));
  }

  // Value of `e` at cycle t, zero-extended into 64 bits.
  uint64_t value(const Expr& e, int64_t t) {
    if (exceeded_ || ++steps_ > budget_) {
      exceeded_ = true;
      return 0;
    }
    if (auto* lit = std::get_if<Literal>(&e.node)) return lit->value;
    if (auto* id = std::get_if<Ident>(&e.node)) {
      auto c = table_.constants.find(id->name);
      if (c != table_.constants.end()) return c->second.value;
      return signal_at(id->name, t);
    }
    if (auto* bs = std::get_if<BitSelect>(&e.node))
      return (value(*bs->base, t) >> bs->index) & 1;
    if (auto* ps = std::get_if<PartSelect>(&e.node))
      return (value(*ps->base, t) >> ps->lsb) & width_mask(ps->msb - ps->lsb + 1);
    if (auto* u = std::get_if<Unary>(&e.node)) {
      uint64_t v = value(*u->operand, t);
      if (u->op == '!') return v == 0 ? 1 : 0;
      return ~v & width_mask(expr_width(*u->operand, table_));
    }
    if (auto* b = std::get_if<Binary>(&e.node)) {
      // Operands are zero-extended to the wider side by construction; the
      // comparison and bitwise forms below are width-agnostic on that form.
      uint64_t l = value(*b->lhs, t);
      uint64_t r = value(*b->rhs, t);
      switch (b->op) {
        case BinOp::LogicalOr: return (l != 0 || r != 0) ? 1 : 0;
        case BinOp::LogicalAnd: return (l != 0 && r != 0) ? 1 : 0;
        case BinOp::BitOr: return l | r;
        case BinOp::BitXor: return l ^ r;
        case BinOp::BitAnd: return l & r;
        case BinOp::Eq: return l == r ? 1 : 0;
        case BinOp::Ne: return l != r ? 1 : 0;
      }
      return 0;
    }
    auto& s = std::get<Sampled>(e.node);
    switch (s.fn) {
      case SampledFn::Past:
        return t < s.depth ? 0 : value(*s.arg, t - s.depth);
      case SampledFn::Stable: {
        uint64_t cur = value(*s.arg, t);
        uint64_t prev = t < 1 ? 0 : value(*s.arg, t - 1);
        return cur == prev ? 1 : 0;
      }
      case SampledFn::Rose: {
        uint64_t cur = value(*s.arg, t) & 1;
        uint64_t prev = t < 1 ? 0 : (value(*s.arg, t - 1) & 1);
        return (cur == 1 && prev == 0) ? 1 : 0;
      }
      case SampledFn::Fell: {
        uint64_t cur = value(*s.arg, t) & 1;
        uint64_t prev = t < 1 ? 0 : (value(*s.arg, t - 1) & 1);
        return (cur == 0 && prev == 1) ? 1 : 0;
      }
    }
    return 0;
  }
};

}  // namespace detail

inline constexpr uint64_t kDefaultEvalBudget = 10'000'000;

// Evaluates a checked file over the exhaustive stimulus. Deterministic; the
// step budget bounds total expression-node evaluations.
inline EvalResult evaluate(const SvaFile& file, const SignalTable& table,
                           const StimulusSpec& spec, uint64_t budget = kDefaultEvalBudget) {
  return detail::Evaluator(table, spec, budget).run(file);
}

}  // namespace svag
