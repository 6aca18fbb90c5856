#include <doctest.h>

#include <cmath>
#include <numeric>

#include "shiftlab/circle.hpp"
#include "shiftlab/word.hpp"

using namespace shiftlab;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

double direct_trig(TrigKind kind, int m, double x) {
  return kind == TrigKind::Sin ? std::sin(kTau * m * x)
                               : std::cos(kTau * m * x);
}

}  // namespace

TEST_CASE("doubling orbits of exact fractions") {
  OrbitData fixed = rational_orbit(0, 1);
  CHECK(fixed.preperiod.empty());
  REQUIRE(fixed.cycle.size() == 1);
  CHECK(fixed.cycle[0].p == 0);
  CHECK(fixed.cycle[0].q == 1);

  OrbitData sevenths = rational_orbit(1, 7);
  CHECK(sevenths.preperiod.empty());
  REQUIRE(sevenths.cycle.size() == 3);
  CHECK(sevenths.cycle[0].p == 1);
  CHECK(sevenths.cycle[1].p == 2);
  CHECK(sevenths.cycle[2].p == 4);
  for (const RationalPoint& pt : sevenths.cycle) CHECK(pt.q == 7);

  // Even denominator: one transient step before the odd-denominator cycle.
  OrbitData sixths = rational_orbit(1, 6);
  REQUIRE(sixths.preperiod.size() == 1);
  CHECK(sixths.preperiod[0].p == 1);
  CHECK(sixths.preperiod[0].q == 6);
  REQUIRE(sixths.cycle.size() == 2);
  CHECK(sixths.cycle[0].p == 1);
  CHECK(sixths.cycle[0].q == 3);
  CHECK(sixths.cycle[1].p == 2);

  // Inputs must arrive in lowest terms and inside [0, 1).
  CHECK_THROWS_AS(rational_orbit(2, 14), DomainError);
  CHECK_THROWS_AS(rational_orbit(7, 7), DomainError);
  CHECK_THROWS_AS(rational_orbit(-1, 7), DomainError);
  CHECK_THROWS_AS(rational_orbit(1, 0), DomainError);
}

TEST_CASE("binary itineraries of rational points") {
  // 1/7 = 0.(001) in binary.
  SymbolicPoint x7 = symbolic_encoding(1, 7);
  Word w7 = x7.materialize(9);
  CHECK(w7 == Word::from_string("001001001"));

  // 1/6 = 0.0(01): one transient bit, then the 1/3 cycle.
  SymbolicPoint x6 = symbolic_encoding(1, 6);
  Word w6 = x6.materialize(7);
  CHECK(w6 == Word::from_string("0010101"));

  // 0 is the fixed point with all-zero itinerary.
  Word w0 = symbolic_encoding(0, 1).materialize(5);
  CHECK(w0 == Word::from_string("00000"));
}

TEST_CASE("bit-backed trig evaluation matches exact rational evaluation") {
  // Sweep the reduced fractions with q <= 19 (120 of them).
  int tested = 0;
  for (std::int64_t q = 1; q <= 19; ++q) {
    for (std::int64_t p = 0; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      CirclePoint exact = CirclePoint::rational(p, q);
      CirclePoint bits = CirclePoint::bit_backed(symbolic_encoding(p, q));
      for (std::int64_t j : {0, 1, 2, 5, 11}) {
        for (TrigKind kind : {TrigKind::Sin, TrigKind::Cos}) {
          double a = evaluate_trig_along(exact, kind, 3, j);
          double b = evaluate_trig_along(bits, kind, 3, j);
          CHECK(std::abs(a - b) <= 1e-9);
        }
      }
      ++tested;
    }
  }
  CHECK(tested >= 100);

  // Iterating deep into the orbit costs no precision: the bit window is
  // read fresh at every j instead of doubling a rounded real.
  CirclePoint bits = CirclePoint::bit_backed(symbolic_encoding(1, 7));
  for (std::int64_t j : {10LL, 1000LL, 100000LL}) {
    // 2^j mod 7 cycles with period 3.
    std::int64_t iterate = 1;
    for (std::int64_t t = 0; t < j % 3; ++t) iterate = (2 * iterate) % 7;
    double expected =
        direct_trig(TrigKind::Sin, 3, static_cast<double>(iterate) / 7.0);
    CHECK(std::abs(evaluate_trig_along(bits, TrigKind::Sin, 3, j) - expected) <=
          1e-9);
  }
}

TEST_CASE("exact cycle integrals of sin and cos") {
  OrbitData sevenths = rational_orbit(1, 7);
  double s = (direct_trig(TrigKind::Sin, 1, 1.0 / 7) +
              direct_trig(TrigKind::Sin, 1, 2.0 / 7) +
              direct_trig(TrigKind::Sin, 1, 4.0 / 7)) /
             3.0;
  CHECK(trig_integral_periodic(sevenths, TrigKind::Sin, 1) ==
        doctest::Approx(s).epsilon(1e-12));
  CHECK(trig_integral_periodic(sevenths, TrigKind::Sin, 1) ==
        doctest::Approx(std::sqrt(7.0) / 6.0).epsilon(1e-12));
  CHECK(trig_integral_periodic(sevenths, TrigKind::Cos, 1) ==
        doctest::Approx(-1.0 / 6.0).epsilon(1e-12));

  // The integral ignores the transient.
  OrbitData sixths = rational_orbit(1, 6);
  double expected = (direct_trig(TrigKind::Cos, 1, 1.0 / 3) +
                     direct_trig(TrigKind::Cos, 1, 2.0 / 3)) /
                    2.0;
  CHECK(trig_integral_periodic(sixths, TrigKind::Cos, 1) ==
        doctest::Approx(expected).epsilon(1e-12));

  // Fixed point at 0.
  OrbitData origin = rational_orbit(0, 1);
  CHECK(trig_integral_periodic(origin, TrigKind::Sin, 5) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(trig_integral_periodic(origin, TrigKind::Cos, 5) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("frequency witnesses share one integral across frequencies") {
  // Doubling permutes the cycle of 1/(7m), so for every m the frequency-m
  // integrals over that orbit coincide with the m = 1 values.
  for (int m = 1; m <= 8; ++m) {
    OrbitData orbit = rational_orbit(1, 7LL * m);
    CHECK(trig_integral_periodic(orbit, TrigKind::Sin, m) ==
          doctest::Approx(std::sqrt(7.0) / 6.0).epsilon(1e-10));
    CHECK(trig_integral_periodic(orbit, TrigKind::Cos, m) ==
          doctest::Approx(-1.0 / 6.0).epsilon(1e-10));
  }
}
