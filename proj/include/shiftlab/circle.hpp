#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "shiftlab/observables.hpp"
#include "shiftlab/point.hpp"
#include "shiftlab/synthesis.hpp"

namespace shiftlab {

// Reduced fraction p/q in [0, 1).
struct RationalPoint {
  std::int64_t p = 0;
  std::int64_t q = 1;
};

// Doubling orbit split into its transient and its closed cycle. Every listed
// point maps to its successor exactly; the cycle closes.
struct OrbitData {
  std::vector<RationalPoint> preperiod;
  std::vector<RationalPoint> cycle;
};

// Exact orbit of p/q under x -> 2x mod 1: iterate numerators mod q until
// the first repeat. The transient is nonempty exactly when q is even.
OrbitData rational_orbit(std::int64_t p, std::int64_t q);

// Binary itinerary of p/q under doubling as an exactly periodic 2-shift
// point: bit i is 1 when the i-th iterate lies in [1/2, 1).
SymbolicPoint symbolic_encoding(std::int64_t p, std::int64_t q);

// A circle point for trig evaluation: either an exact rational, or a binary
// shift point read through the doubling conjugacy. Bit-backed evaluation of
// the j-th iterate reads bits j .. j+guard and carries absolute error at
// most 2*pi*m*2^-min(guard, 64); results are doubles, so machine epsilon is
// the floor of any bound.
class CirclePoint {
 public:
  static CirclePoint rational(std::int64_t p, std::int64_t q);
  static CirclePoint bit_backed(SymbolicPoint point, int guard_bits = 128);

  bool is_rational() const noexcept { return rational_; }
  std::int64_t p() const noexcept { return p_; }
  std::int64_t q() const noexcept { return q_; }
  const SymbolicPoint& point() const { return *point_; }
  int guard_bits() const noexcept { return guard_bits_; }

 private:
  CirclePoint() = default;

  bool rational_ = true;
  std::int64_t p_ = 0;
  std::int64_t q_ = 1;
  std::optional<SymbolicPoint> point_;
  int guard_bits_ = 128;
};

// sin or cos of 2*pi*frequency*f^j(x), where f is the doubling map. The
// rational path reduces the angle exactly mod 1 before any rounding; the
// bit-backed path never iterates a rounded real, it reads fresh bits at j.
double evaluate_trig_along(const CirclePoint& x, TrigKind kind, int frequency,
                           std::int64_t j);

// Exact cycle average of sin/cos(2*pi*frequency*x) against the periodic
// measure sitting on the orbit's cycle.
double trig_integral_periodic(const OrbitData& orbit, TrigKind kind,
                              int frequency);

// One row per trig frequency m: the cycle integrals over the orbit of
// 1/(7m) and the gaps against the fixed point at 0, which witness that both
// trig observables at frequency m distinguish the two invariant measures.
struct FrequencyWitness {
  int m = 0;
  double sin_integral = 0.0;
  double cos_integral = 0.0;
  double sin_gap = 0.0;
  double cos_gap = 0.0;
};

// Demonstration bundle for the doubling map: the frequency table for
// m = 1..8, plus an irregular point on the conjugate 2-shift alternating
// the fixed point at 0 with the 001-cycle, with oscillation certificates
// for sin(2 pi x) (cluster limits 0 and sqrt(7)/6) and cos(2 pi x)
// (limits 1 and -1/6).
struct DemoReport {
  std::vector<FrequencyWitness> frequencies;
  BuiltPoint built;
  BirkhoffTrace sin_trace;
  BirkhoffTrace cos_trace;
  Certificate sin_certificate;
  Certificate cos_certificate;
  double certificate_tol = 0.0;
  std::int64_t horizon = 0;
  std::uint64_t seed = 0;
};

DemoReport doubling_demo_report(std::int64_t horizon, std::uint64_t seed);

}  // namespace shiftlab
