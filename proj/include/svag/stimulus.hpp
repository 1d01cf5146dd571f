#pragma once

#include "svag/benchmark.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace svag {

struct StimulusError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The exhaustive counter-driven stimulus. One counter of `ctr_width` bits is
// stepped once per clock cycle after a short all-zero reset prefix. The low
// log2(no_clocks) bits select a phase; the phase selects which group of
// counter bits drives the signals that cycle. Sweeping the counter therefore
// visits every ordered no_clocks-tuple of driven-signal assignments.
struct StimulusSpec {
  std::vector<PortDecl> driven;  // slice layout, first entry in the low bits
  int no_dut_signal_bits = 0;
  int no_clocks = 2;
  int log2_no_clocks = 1;
  int ctr_width = 0;
  int reset_cycles = 2;
  std::string clock_name;
  std::string reset_name;

  uint64_t driven_cycles() const { return 1ull << ctr_width; }
  uint64_t total_cycles() const { return driven_cycles() + static_cast<uint64_t>(reset_cycles); }
};

// What every signal reads as at one cycle.
struct CycleAssignment {
  uint64_t cycle = 0;
  std::map<std::string, uint64_t> driven_values;
  bool reset_active = false;
};

inline StimulusSpec build_stimulus(const BenchmarkManifest& m, int ctr_width_bound = 30) {
  StimulusSpec s;
  s.driven = m.testbench.driven_signals;
  for (const auto& d : s.driven) s.no_dut_signal_bits += d.width;
  s.no_clocks = m.testbench.no_clocks;
  s.log2_no_clocks = 0;
  while ((1 << s.log2_no_clocks) < s.no_clocks) ++s.log2_no_clocks;
  s.ctr_width = s.no_dut_signal_bits * s.no_clocks + s.log2_no_clocks;
  s.reset_cycles = m.testbench.reset_cycles;
  s.clock_name = m.clock_name;
  s.reset_name = m.reset_name;
  if (s.ctr_width > ctr_width_bound)
    throw StimulusError("stimulus counter needs " + std::to_string(s.ctr_width) +
                        " bits, above the configured bound of " +
                        std::to_string(ctr_width_bound) + " (" + m.id + ")");
  return s;
}

namespace detail {

inline uint64_t width_mask(int w) { return w >= 64 ? ~0ull : ((1ull << w) - 1); }

// Value of one driven signal at an absolute cycle, straight from the counter
// decode; 0 during the reset prefix.
inline uint64_t driven_value(const StimulusSpec& s, const std::string& name, uint64_t cycle) {
  if (cycle < static_cast<uint64_t>(s.reset_cycles)) return 0;
  uint64_t counter = cycle - static_cast<uint64_t>(s.reset_cycles);
  uint64_t phase = counter & width_mask(s.log2_no_clocks);
  int slice_low = s.log2_no_clocks + static_cast<int>(phase) * s.no_dut_signal_bits;
  uint64_t slice = (counter >> slice_low) & width_mask(s.no_dut_signal_bits);
  int offset = 0;
  for (const auto& d : s.driven) {
    if (d.name == name) return (slice >> offset) & width_mask(d.width);
    offset += d.width;
  }
  return 0;
}

}  // namespace detail

inline CycleAssignment signal_values(const StimulusSpec& s, uint64_t cycle) {
  CycleAssignment a;
  a.cycle = cycle;
  a.reset_active = cycle < static_cast<uint64_t>(s.reset_cycles);
  for (const auto& d : s.driven)
    a.driven_values[d.name] = detail::driven_value(s, d.name, cycle);
  return a;
}

}  // namespace svag
