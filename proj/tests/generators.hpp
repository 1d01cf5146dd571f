#pragma once

// Random generators for property-based tests: synthetic benchmark
// environments, random assertion ASTs that stay inside the supported grammar
// and interface-check limits, and random byte strings for the repair tests.

#include "svag/ast.hpp"
#include "svag/benchmark.hpp"
#include "svag/checker.hpp"
#include "svag/stimulus.hpp"

#include "oracle.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace gen {

using Rng = std::mt19937_64;

inline int pick(Rng& rng, int lo, int hi) {  // inclusive bounds
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool chance(Rng& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

// One synthetic benchmark environment: interface, constants, and testbench
// shape. Kept small so exhaustive traces stay cheap.
struct Environment {
  svag::BenchmarkManifest manifest;
  oracle::StimulusParams oracle_params;
  std::vector<std::string> all_signal_names;
};

inline Environment make_environment(const std::vector<svag::PortDecl>& driven, int no_clocks,
                                    bool with_color_constants) {
  Environment env;
  svag::BenchmarkManifest& m = env.manifest;
  m.id = "SYN";
  m.clock_name = "clk";
  m.reset_name = "rst";
  m.interface = driven;
  m.interface.push_back({"clk", 1});
  m.interface.push_back({"rst", 1});
  m.testbench.driven_signals = driven;
  m.testbench.no_clocks = no_clocks;
  m.testbench.reset_cycles = 2;
  if (with_color_constants) {
    m.named_constants["GREEN"] = {0, 2};
    m.named_constants["YELLOW"] = {1, 2};
    m.named_constants["RED"] = {2, 2};
  }

  env.oracle_params.no_clocks = no_clocks;
  env.oracle_params.reset_cycles = 2;
  env.oracle_params.clock_name = "clk";
  env.oracle_params.reset_name = "rst";
  for (const auto& d : driven) env.oracle_params.driven.push_back({d.name, d.width});
  for (const auto& p : m.interface) env.all_signal_names.push_back(p.name);
  return env;
}

inline oracle::Env make_oracle_env(const Environment& env, const oracle::Trace& trace) {
  oracle::Env oenv{trace, {}, {}};
  for (const auto& [name, c] : env.manifest.named_constants)
    oenv.constants[name] = {c.value, c.width};
  for (const auto& p : env.manifest.interface) oenv.widths[p.name] = p.width;
  return oenv;
}

//===--------------------------------------------------------------------===//
// Random expression ASTs
//===--------------------------------------------------------------------===//

// A sampled-function-free expression. Bit and part selects stay in range;
// identifiers come from the interface; constants from the named table.
inline svag::ExprPtr random_core(Rng& rng, const Environment& env, int depth) {
  using namespace svag;
  const auto& ports = env.manifest.interface;
  if (depth <= 0 || chance(rng, 0.35)) {
    int choice = pick(rng, 0, 5);
    if (choice <= 1) {  // plain identifier
      const PortDecl& p = ports[static_cast<size_t>(pick(rng, 0, static_cast<int>(ports.size()) - 1))];
      return make_expr(Ident{p.name, 0});
    }
    if (choice == 2) {  // bit select
      const PortDecl& p = ports[static_cast<size_t>(pick(rng, 0, static_cast<int>(ports.size()) - 1))];
      BitSelect bs;
      bs.base = make_expr(Ident{p.name, 0});
      bs.index = pick(rng, 0, p.width - 1);
      return make_expr(std::move(bs));
    }
    if (choice == 3) {  // part select
      const PortDecl& p = ports[static_cast<size_t>(pick(rng, 0, static_cast<int>(ports.size()) - 1))];
      PartSelect ps;
      ps.base = make_expr(Ident{p.name, 0});
      ps.lsb = pick(rng, 0, p.width - 1);
      ps.msb = pick(rng, ps.lsb, p.width - 1);
      return make_expr(std::move(ps));
    }
    if (choice == 4 && !env.manifest.named_constants.empty()) {  // named constant
      auto it = env.manifest.named_constants.begin();
      std::advance(it, pick(rng, 0, static_cast<int>(env.manifest.named_constants.size()) - 1));
      return make_expr(Ident{it->first, 0});
    }
    Literal lit;  // literal, sized or unsized
    if (chance(rng, 0.5)) {
      lit.sized = true;
      lit.width = pick(rng, 1, 3);
      lit.value = static_cast<uint64_t>(pick(rng, 0, (1 << lit.width) - 1));
    } else {
      lit.sized = false;
      lit.width = 32;
      lit.value = static_cast<uint64_t>(pick(rng, 0, 5));
    }
    return make_expr(lit);
  }
  if (chance(rng, 0.25)) {
    Unary u;
    u.op = chance(rng, 0.5) ? '!' : '~';
    u.operand = random_core(rng, env, depth - 1);
    return make_expr(std::move(u));
  }
  Binary b;
  static constexpr BinOp kOps[] = {BinOp::LogicalOr, BinOp::LogicalAnd, BinOp::BitOr,
                                   BinOp::BitXor,    BinOp::BitAnd,     BinOp::Eq,
                                   BinOp::Ne};
  b.op = kOps[pick(rng, 0, 6)];
  b.lhs = random_core(rng, env, depth - 1);
  b.rhs = random_core(rng, env, depth - 1);
  return make_expr(std::move(b));
}

// An expression that may add one layer of $past/$stable/$rose/$fell around a
// core subtree. A single layer with depth <= 3 keeps the cumulative lookback
// within the interface check's limit.
inline svag::ExprPtr random_expr(Rng& rng, const Environment& env, int depth) {
  using namespace svag;
  if (chance(rng, 0.4)) {
    Sampled s;
    int f = pick(rng, 0, 3);
    s.fn = f == 0   ? SampledFn::Past
           : f == 1 ? SampledFn::Stable
           : f == 2 ? SampledFn::Rose
                    : SampledFn::Fell;
    s.depth = s.fn == SampledFn::Past ? pick(rng, 1, 3) : 1;
    s.arg = random_core(rng, env, depth - 1);
    ExprPtr sampled = make_expr(std::move(s));
    if (chance(rng, 0.5)) {
      Binary b;
      b.op = chance(rng, 0.5) ? BinOp::Eq : BinOp::Ne;
      b.lhs = std::move(sampled);
      b.rhs = random_core(rng, env, depth - 1);
      return make_expr(std::move(b));
    }
    return sampled;
  }
  return random_core(rng, env, depth);
}

inline svag::AssertionItem random_item(Rng& rng, const Environment& env) {
  using namespace svag;
  AssertionItem item;
  if (chance(rng, 0.25)) {
    ImmediateAlwaysAssertion imm;
    imm.clock = env.manifest.clock_name;
    if (chance(rng, 0.5)) imm.guard = random_expr(rng, env, 2);
    imm.check = random_expr(rng, env, 2);
    if (chance(rng, 0.2)) imm.action = "$display(\"violation\")";
    item.body = std::move(imm);
    return item;
  }
  ConcurrentAssertion con;
  con.clock = env.manifest.clock_name;
  if (chance(rng, 0.7)) {
    Implication impl;
    impl.antecedent = random_expr(rng, env, 2);
    impl.op = chance(rng, 0.5) ? ImplOp::Overlapping : ImplOp::NonOverlapping;
    impl.delay = chance(rng, 0.4) ? pick(rng, 1, 2) : 0;
    impl.consequent = random_expr(rng, env, 2);
    con.prop.body = std::move(impl);
  } else {
    con.prop.body = random_expr(rng, env, 3);
  }
  if (chance(rng, 0.2)) con.action = "$display(\"violation\")";
  item.body = std::move(con);
  return item;
}

inline svag::SvaFile random_file(Rng& rng, const Environment& env) {
  svag::SvaFile file;
  int items = pick(rng, 1, 3);
  for (int i = 0; i < items; ++i) file.items.push_back(random_item(rng, env));
  return file;
}

//===--------------------------------------------------------------------===//
// Random raw completions for the repair tests
//===--------------------------------------------------------------------===//

// Byte soup with the structures the repair rules react to planted at random:
// non-ASCII bytes, endmodule occurrences, and triple-quote markers.
inline std::string random_completion(Rng& rng) {
  static const std::vector<std::string> tokens = {
      "assert",  "property", "(",        ")",          ";",     "\n",   " ",
      "|->",     "posedge",  "clk",      "data",       "lock",  "==",   "1",
      "$past(",  "\"\"\"",   "'''",      "endmodule",  "\n\n",  "\t",   "//x",
  };
  std::string out;
  int parts = pick(rng, 0, 24);
  for (int i = 0; i < parts; ++i) {
    int roll = pick(rng, 0, 99);
    if (roll < 78) {
      out += tokens[static_cast<size_t>(pick(rng, 0, static_cast<int>(tokens.size()) - 1))];
    } else if (roll < 92) {
      out.push_back(static_cast<char>(pick(rng, 32, 126)));
    } else {
      out.push_back(static_cast<char>(pick(rng, 128, 255)));  // non-ASCII byte
    }
  }
  return out;
}

}  // namespace gen
