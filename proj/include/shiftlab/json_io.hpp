#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "shiftlab/circle.hpp"
#include "shiftlab/measures.hpp"
#include "shiftlab/observables.hpp"
#include "shiftlab/pressure.hpp"
#include "shiftlab/shift_space.hpp"
#include "shiftlab/synthesis.hpp"

namespace shiftlab::io {

using nlohmann::json;

// --- Shift spaces -----------------------------------------------------------
//
// JSON shape:
//   {"kind":"full","alphabet":K}
//   {"kind":"sft","transition":[[...],...]}
//   {"kind":"beta","beta":{...BetaSpec...},"kneading_depth":N}
//
// Shorthand grammar (for CLI flags):
//   full:K            e.g. full:2
//   golden            the golden-mean two-state transition matrix
//   sft:ROWS          rows of 0/1 digits separated by commas, e.g. sft:11,10
//   beta:X[:DEPTH]    X a decimal like 1.8, or the word "golden",
//                     or quad:p,q,d,r for (p+q*sqrt(d))/r; DEPTH defaults 64
json space_to_json(const ShiftSpace& space);
ShiftSpace space_from_json(const json& j);
ShiftSpace space_from_string(const std::string& text);

// --- Measures ---------------------------------------------------------------
//
// JSON shape:
//   {"kind":"periodic","cycle":[...]}
//   {"kind":"bernoulli","weights":[...]}
//   {"kind":"markov","rows":[[...],...]}
//   {"kind":"mixture","components":[{"weight":w,"measure":{...}},...]}
//
// Shorthand grammar:
//   periodic:W              W a digit word, e.g. periodic:001
//   bernoulli:a,b,...
//   markov:a,b|c,d          rows separated by '|'
//   mix:w1*SPEC+w2*SPEC     components separated by '+', weight*spec
json measure_to_json(const MeasureModel& mu);
MeasureModel measure_from_json(const ShiftSpace& space, const json& j);
MeasureModel measure_from_string(const ShiftSpace& space, const std::string& text);

// --- Observables ------------------------------------------------------------
//
// JSON shape:
//   {"kind":"locally_constant","range":r,"table":[...],"id":...}
//   {"kind":"coboundary","constant":c,"inner":{...},"id":...}
//   {"kind":"trig","trig":"sin"|"cos","frequency":m,"id":...}
//
// Shorthand grammar:
//   first_symbol
//   indicator:W             1 on the cylinder [W], else 0
//   sin:M | cos:M           x -> sin(2 pi M x) read through binary digits
//   table:R:v0,v1,...       locally constant of range R, K^R values
//   coboundary:C:SPEC       constant C plus h - h(shift), h parsed from SPEC
json observable_to_json(const Observable& phi);
Observable observable_from_json(int alphabet, const json& j);
Observable observable_from_string(int alphabet, const std::string& text);

// --- Schedules --------------------------------------------------------------
//
// Shorthand grammar:
//   accelerating:L0
//   geometric:L0:FACTOR
//   explicit:l1,l2,...
json schedule_to_json(const ScheduleSpec& spec);
ScheduleSpec schedule_from_json(const json& j);
ScheduleSpec schedule_from_string(const std::string& text);

// --- Results ----------------------------------------------------------------
json plan_to_json(const GluePlan& plan);
json certificate_to_json(const Certificate& cert);
json built_point_to_json(const BuiltPoint& built);
json pressure_to_json(const PressureResult& result);
json trace_to_json(const BirkhoffTrace& trace);
json family_to_json(const SeparatedFamily& family);
json demo_report_to_json(const DemoReport& report);

// --- Traces as CSV ----------------------------------------------------------
// All traces must share one checkpoint vector; columns are
// n,<id1>,<id2>,... with one row per checkpoint.
std::string traces_to_csv(const std::vector<BirkhoffTrace>& traces);

// --- Provenance and file output ---------------------------------------------
std::uint64_t fnv1a64(const std::string& data);

// {"version", "seed", "config_hash"}; hash is FNV-1a over the canonical
// (sorted-key, no-whitespace) dump of `config`. No timestamps: reruns of the
// same config and seed must be byte-identical.
json provenance_block(const json& config, std::uint64_t seed);

// Write via a sibling temp file plus rename so readers never see a torn file.
void write_json_atomic(const std::string& path, const json& j);
void write_text_atomic(const std::string& path, const std::string& text);

}  // namespace shiftlab::io
