#pragma once

// Reference interpreter used only by tests. It re-derives the stimulus and
// assertion semantics from their definitions, on purpose sharing no code with
// the engine under test: signal values are tabulated up front by explicit
// enumeration, and expressions are evaluated by a plain recursion with
// locally recomputed widths. Keep this file boring.

#include "svag/ast.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct StimulusParams {
  std::vector<std::pair<std::string, int>> driven;  // (name, width), slice LSB first
  int no_clocks = 2;
  int reset_cycles = 2;
  std::string clock_name = "clk";
  std::string reset_name = "rst";
};

struct Trace {
  // value of every named signal at every cycle (clock reads 0, reset reads
  // its active flag, undriven signals read 0)
  std::vector<std::map<std::string, uint64_t>> cycles;
};

inline uint64_t bitmask(int w) { return w >= 64 ? ~0ull : ((1ull << w) - 1); }

inline int ctr_width(const StimulusParams& p) {
  int bits = 0;
  for (const auto& d : p.driven) bits += d.second;
  int log2nc = 0;
  while ((1 << log2nc) < p.no_clocks) ++log2nc;
  return bits * p.no_clocks + log2nc;
}

inline Trace build_trace(const StimulusParams& p, const std::vector<std::string>& all_signals) {
  int bits = 0;
  for (const auto& d : p.driven) bits += d.second;
  int log2nc = 0;
  while ((1 << log2nc) < p.no_clocks) ++log2nc;
  int w = bits * p.no_clocks + log2nc;
  uint64_t total = (1ull << w) + static_cast<uint64_t>(p.reset_cycles);

  Trace tr;
  tr.cycles.resize(total);
  for (uint64_t t = 0; t < total; ++t) {
    std::map<std::string, uint64_t> vals;
    for (const auto& s : all_signals) vals[s] = 0;
    for (const auto& d : p.driven) vals[d.first] = 0;
    vals[p.clock_name] = 0;
    vals[p.reset_name] = t < static_cast<uint64_t>(p.reset_cycles) ? 1 : 0;
    if (t >= static_cast<uint64_t>(p.reset_cycles)) {
      uint64_t counter = t - static_cast<uint64_t>(p.reset_cycles);
      uint64_t phase = p.no_clocks > 1 ? counter % static_cast<uint64_t>(p.no_clocks) : 0;
      int low = log2nc + static_cast<int>(phase) * bits;
      uint64_t slice = (counter >> low) & bitmask(bits);
      int offset = 0;
      for (const auto& d : p.driven) {
        vals[d.first] = (slice >> offset) & bitmask(d.second);
        offset += d.second;
      }
    }
    tr.cycles[t] = std::move(vals);
  }
  return tr;
}

struct Env {
  const Trace& trace;
  std::map<std::string, std::pair<uint64_t, int>> constants;  // name -> (value, width)
  std::map<std::string, int> widths;                          // signal -> width
};

inline int width_of(const svag::Expr& e, const Env& env) {
  using namespace svag;
  if (auto* lit = std::get_if<Literal>(&e.node)) return lit->width;
  if (auto* id = std::get_if<Ident>(&e.node)) {
    auto w = env.widths.find(id->name);
    if (w != env.widths.end()) return w->second;
    return env.constants.at(id->name).second;
  }
  if (std::get_if<BitSelect>(&e.node)) return 1;
  if (auto* ps = std::get_if<PartSelect>(&e.node)) return ps->msb - ps->lsb + 1;
  if (auto* u = std::get_if<Unary>(&e.node))
    return u->op == '~' ? width_of(*u->operand, env) : 1;
  if (auto* b = std::get_if<Binary>(&e.node)) {
    switch (b->op) {
      case BinOp::BitOr:
      case BinOp::BitXor:
      case BinOp::BitAnd: {
        int lw = width_of(*b->lhs, env), rw = width_of(*b->rhs, env);
        return lw > rw ? lw : rw;
      }
      default:
        return 1;
    }
  }
  auto& s = std::get<svag::Sampled>(e.node);
  return s.fn == svag::SampledFn::Past ? width_of(*s.arg, env) : 1;
}

// Value of `e` sampled at cycle `t`. Callers guarantee t >= 0; every negative
// lookback is absorbed by the $past/default-0 rules below.
inline uint64_t eval(const svag::Expr& e, const Env& env, int64_t t) {
  using namespace svag;
  if (auto* lit = std::get_if<Literal>(&e.node)) return lit->value;
  if (auto* id = std::get_if<Ident>(&e.node)) {
    auto c = env.constants.find(id->name);
    if (c != env.constants.end()) return c->second.first;
    return env.trace.cycles[static_cast<size_t>(t)].at(id->name);
  }
  if (auto* bs = std::get_if<BitSelect>(&e.node))
    return (eval(*bs->base, env, t) >> bs->index) & 1;
  if (auto* ps = std::get_if<PartSelect>(&e.node))
    return (eval(*ps->base, env, t) >> ps->lsb) & bitmask(ps->msb - ps->lsb + 1);
  if (auto* u = std::get_if<Unary>(&e.node)) {
    uint64_t v = eval(*u->operand, env, t);
    if (u->op == '!') return v == 0 ? 1 : 0;
    return ~v & bitmask(width_of(*u->operand, env));
  }
  if (auto* b = std::get_if<Binary>(&e.node)) {
    uint64_t l = eval(*b->lhs, env, t);
    uint64_t r = eval(*b->rhs, env, t);
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
  auto& s = std::get<svag::Sampled>(e.node);
  switch (s.fn) {
    case svag::SampledFn::Past:
      return t < s.depth ? 0 : eval(*s.arg, env, t - s.depth);
    case svag::SampledFn::Stable: {
      uint64_t cur = eval(*s.arg, env, t);
      uint64_t prev = t < 1 ? 0 : eval(*s.arg, env, t - 1);
      return cur == prev ? 1 : 0;
    }
    case svag::SampledFn::Rose: {
      uint64_t cur = eval(*s.arg, env, t) & 1;
      uint64_t prev = t < 1 ? 0 : (eval(*s.arg, env, t - 1) & 1);
      return (cur == 1 && prev == 0) ? 1 : 0;
    }
    case svag::SampledFn::Fell: {
      uint64_t cur = eval(*s.arg, env, t) & 1;
      uint64_t prev = t < 1 ? 0 : (eval(*s.arg, env, t - 1) & 1);
      return (cur == 0 && prev == 1) ? 1 : 0;
    }
  }
  return 0;
}

// All cycles at which `item` is violated, attributed to the cycle where the
// check completes. End-of-trace obligations pass vacuously.
inline std::set<uint64_t> violations(const svag::AssertionItem& item, const Env& env) {
  using namespace svag;
  std::set<uint64_t> out;
  uint64_t total = env.trace.cycles.size();
  if (auto* c = std::get_if<ConcurrentAssertion>(&item.body)) {
    if (auto* plain = std::get_if<ExprPtr>(&c->prop.body)) {
      for (uint64_t t = 0; t < total; ++t)
        if (eval(**plain, env, static_cast<int64_t>(t)) == 0) out.insert(t);
    } else {
      auto& impl = std::get<Implication>(c->prop.body);
      uint64_t k = static_cast<uint64_t>(impl.delay) +
                   (impl.op == ImplOp::NonOverlapping ? 1 : 0);
      for (uint64_t t = 0; t < total; ++t) {
        if (eval(*impl.antecedent, env, static_cast<int64_t>(t)) == 0) continue;
        if (t + k >= total) continue;  // obligation runs off the trace
        if (eval(*impl.consequent, env, static_cast<int64_t>(t + k)) == 0) out.insert(t + k);
      }
    }
  } else {
    auto& imm = std::get<ImmediateAlwaysAssertion>(item.body);
    for (uint64_t t = 0; t < total; ++t) {
      if (imm.guard && eval(*imm.guard, env, static_cast<int64_t>(t)) == 0) continue;
      if (eval(*imm.check, env, static_cast<int64_t>(t)) == 0) out.insert(t);
    }
  }
  return out;
}

inline std::set<uint64_t> file_violations(const svag::SvaFile& file, const Env& env) {
  std::set<uint64_t> all;
  for (const auto& item : file.items) {
    auto v = violations(item, env);
    all.insert(v.begin(), v.end());
  }
  return all;
}

// Hand-rolled violation set for the lockable-register golden assertion,
// written directly from "data changed while lock was set last cycle", without
// touching any AST. Anchors the engine and the generic oracle alike.
inline std::set<uint64_t> lock_register_golden_violations() {
  const int reset_cycles = 2;
  const int ctr_w = 5;  // 2 signal bits * 2 clocks + 1 phase bit
  auto lock_at = [&](int64_t t) -> uint64_t {
    if (t < reset_cycles) return 0;
    uint64_t c = static_cast<uint64_t>(t - reset_cycles);
    uint64_t phase = c & 1;
    uint64_t slice = (c >> (1 + 2 * phase)) & 3;
    return slice & 1;  // lock occupies slice bit 0
  };
  auto data_at = [&](int64_t t) -> uint64_t {
    if (t < reset_cycles) return 0;
    uint64_t c = static_cast<uint64_t>(t - reset_cycles);
    uint64_t phase = c & 1;
    uint64_t slice = (c >> (1 + 2 * phase)) & 3;
    return (slice >> 1) & 1;  // data occupies slice bit 1
  };
  std::set<uint64_t> out;
  int64_t total = reset_cycles + (1 << ctr_w);
  for (int64_t t = 0; t < total; ++t) {
    uint64_t data_prev = t < 1 ? 0 : data_at(t - 1);
    uint64_t lock_prev = t < 1 ? 0 : lock_at(t - 1);
    bool changed = (data_at(t) ^ data_prev) != 0;
    if (changed && lock_prev == 1) out.insert(static_cast<uint64_t>(t));
  }
  return out;
}

}  // namespace oracle
