#pragma once

// Two benchmarks ship inside the binary so the tool works out of the box:
//
//   BM1  lock_reg        a write-lockable register; the reference assertion
//                        says the stored bit never changes while locked
//   BM2  traffic_light   a GREEN -> YELLOW -> RED controller; the reference
//                        assertion says RED is only entered from YELLOW or RED
//
// `export-benchmark` materializes these to disk so users can copy one as a
// starting point for their own benchmark directories.

#include "svag/benchmark.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace svag {

namespace detail {

inline const std::map<std::string, std::map<std::string, std::string>>& bundled_benchmarks() {
  static const std::map<std::string, std::map<std::string, std::string>> all = {
      {"BM1",
       {
           {"manifest",
            R"bm1(id: BM1
title: Locked register is unchanged while the lock is set
clock: clk
reset: rst
port: lock 1
port: clk 1
port: rst 1
port: data 1
driven: lock data
no_clocks: 2
reset_cycles: 2
)bm1"},
           {"dut_empty.sv", ""},
           {"dut_golden.sv",
            R"bm1(`timescale 1ns/10ps
module lock_reg (
    input data_in, output data_out, input r_en,
    input w_en, input lock, input clk, input rst);

reg data;
always @ (posedge clk) begin
    if (rst) begin
        data <= #1 0;
    end
    else begin
        if (w_en)
            data <= #1 lock ? data : data_in;
    end
end
assign data_out = r_en ? data : 'b0;
endmodule
)bm1"},
           {"dut_buggy.sv",
            R"bm1(`timescale 1ns/10ps
module lock_reg (
    input data_in, output data_out, input r_en,
    input w_en, input lock, input clk, input rst);

reg data;
always @ (posedge clk) begin
    if (rst) begin
        data <= #1 0;
    end
    else begin
        if (w_en)
            data <= #1 data_in;
    end
end
assign data_out = r_en ? data : 'b0;
endmodule
)bm1"},
           {"golden.sva",
            R"bm1(module v_dut (
    lock      , clk      , rst      , data      );
input lock    ; input clk    ;
input rst     ; input data   ;
// golden assertion
assert property ( @(posedge clk) (data ^ $past(data))
    |-> ($past(lock) == 0) )
    else $display("GOLDEN: FAIL, time=%4d, data=%d, data_d=%d, lock=%d", $time, data, $past(data), $past(lock));
endmodule
)bm1"},
           {"prompt_data",
            R"bm1({
  "commentStrings": {
    "VeryBriefCom": "assert that the register is not changed if it is locked\n",
    "BriefCom": "assert that the data is not changed if the lock is set\n",
    "DetailedCom": "assert that at every positive edge of clock, the value of the data register is same as its value in the previous clock cycle if the value of the lock signal in the previous clock cycle is 1\n"
  },
  "examples": {
    "NoEx": ["\n\n"],
    "TrivialEx": [" r_en is 0 if w_en is 1\n assert property (@(posedge clk) (w_en == 1) |-> (r_en == 0));\n\n"],
    "BasicEx": [" r_en is 0 if w_en is set\n assert property (@(posedge clk) ($past(w_en) == 1) |-> (r_en == 0));\n\n"],
    "DetailedEx": [" at every positive edge of clock, the value of the r_en signal is same as its value in the previous clock cycle if the value of the w_en signal in the previous clock cycle is 0\nassert property (@(posedge clk) ($past(w_en) == 0) |-> (r_en == $past(r_en))); \n\n"]
  },
  "assertionBeginning": {
    "EmptyBeg": "",
    "ShortBeg": "assert",
    "NormalBeg": "assert property (@(posedge clk) "
  }
}
)bm1"},
       }},
      {"BM2",
       {
           {"manifest",
            R"bm2(id: BM2
title: Traffic light enters RED only from YELLOW or RED
clock: clk
reset: rst
port: signal 2
port: clk 1
port: rst 1
driven: signal
no_clocks: 2
reset_cycles: 2
constant: GREEN 0 2
constant: YELLOW 1 2
constant: RED 2 2
)bm2"},
           {"dut_empty.sv", ""},
           {"dut_golden.sv",
            R"bm2(`timescale 1ns/10ps
module traffic_light (
    input walk_req, input clk, input rst,
    output reg [1:0] signal);

localparam GREEN  = 2'd0;
localparam YELLOW = 2'd1;
localparam RED    = 2'd2;

always @ (posedge clk) begin
    if (rst) begin
        signal <= #1 GREEN;
    end
    else begin
        case (signal)
            GREEN:   signal <= #1 walk_req ? YELLOW : GREEN;
            YELLOW:  signal <= #1 RED;
            RED:     signal <= #1 GREEN;
            default: signal <= #1 GREEN;
        endcase
    end
end
endmodule
)bm2"},
           {"dut_buggy.sv",
            R"bm2(`timescale 1ns/10ps
module traffic_light (
    input walk_req, input clk, input rst,
    output reg [1:0] signal);

localparam GREEN  = 2'd0;
localparam YELLOW = 2'd1;
localparam RED    = 2'd2;

always @ (posedge clk) begin
    if (rst) begin
        signal <= #1 GREEN;
    end
    else begin
        case (signal)
            GREEN:   signal <= #1 walk_req ? RED : GREEN;
            YELLOW:  signal <= #1 RED;
            RED:     signal <= #1 GREEN;
            default: signal <= #1 GREEN;
        endcase
    end
end
endmodule
)bm2"},
           {"golden.sva",
            R"bm2(module v_dut (
    signal    , clk      , rst       );
input [1:0] signal;
input clk     ; input rst    ;
// golden assertion
assert property ( @(posedge clk) (signal == RED)
    |-> (($past(signal) == RED) || ($past(signal) == YELLOW)) )
    else $display("GOLDEN: FAIL, time=%4d, signal=%d, signal_d=%d", $time, signal, $past(signal));
endmodule
)bm2"},
           {"prompt_data",
            R"bm2({
  "commentStrings": {
    "VeryBriefCom": "assert that the light turns red only after yellow\n",
    "BriefCom": "assert that the signal is RED only if it was RED or YELLOW before\n",
    "DetailedCom": "assert that at every positive edge of clock, the value of the signal register is RED only if its value in the previous clock cycle is RED or YELLOW\n"
  },
  "examples": {
    "NoEx": ["\n\n"],
    "TrivialEx": [" the signal is GREEN if walk_req is 0\n assert property (@(posedge clk) (walk_req == 0) |-> (signal == GREEN));\n\n"],
    "BasicEx": [" the signal is GREEN if walk_req was not set\n assert property (@(posedge clk) ($past(walk_req) == 0) |-> (signal == GREEN));\n\n"],
    "DetailedEx": [" at every positive edge of clock, the value of the signal register is GREEN if the value of the walk_req signal in the previous clock cycle is 0\nassert property (@(posedge clk) ($past(walk_req) == 0) |-> (signal == GREEN)); \n\n"]
  },
  "assertionBeginning": {
    "EmptyBeg": "",
    "ShortBeg": "assert",
    "NormalBeg": "assert property (@(posedge clk) "
  }
}
)bm2"},
       }},
  };
  return all;
}

}  // namespace detail

inline std::vector<std::string> bundled_benchmark_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, files] : detail::bundled_benchmarks()) ids.push_back(id);
  return ids;
}

inline bool is_bundled_benchmark(const std::string& id) {
  return detail::bundled_benchmarks().count(id) != 0;
}

inline BenchmarkManifest load_bundled(const std::string& id) {
  const auto& all = detail::bundled_benchmarks();
  auto it = all.find(id);
  if (it == all.end())
    throw ManifestError(ManifestError::Kind::MissingFile, id,
                        "no bundled benchmark with this id");
  return load_manifest_from_texts(it->second, "bundled:" + id);
}

// Writes the benchmark's files into `dir` (created if needed) so the directory
// can be loaded back with load_manifest or edited into a new benchmark.
inline void materialize_bundled(const std::string& id, const std::filesystem::path& dir) {
  const auto& all = detail::bundled_benchmarks();
  auto it = all.find(id);
  if (it == all.end())
    throw ManifestError(ManifestError::Kind::MissingFile, id,
                        "no bundled benchmark with this id");
  std::filesystem::create_directories(dir);
  for (const auto& [name, text] : it->second) write_file((dir / name).string(), text);
}

}  // namespace svag
