#pragma once

#include <string>

#include "shiftlab/word.hpp"

namespace shiftlab {

// How the base beta > 1 is specified. Decimal strings are treated as exact
// rationals (the string is the number). Quadratic surds (p + q*sqrt(d))/r are
// carried exactly, which is the only way bases like the golden ratio get a
// definitive digit at an integer boundary.
struct BetaSpec {
  bool quadratic = false;
  std::string decimal;
  long long p = 0, q = 0, d = 0, r = 1;

  static BetaSpec from_decimal(std::string text);
  static BetaSpec from_quadratic(long long p, long long q, long long d, long long r);
  static BetaSpec golden() { return from_quadratic(1, 1, 5, 2); }

  double to_double() const;
  std::string describe() const;
};

struct KneadingResult {
  Word digits;            // a_1..a_N of the greedy expansion of 1
  bool eventually_zero;   // remainder hit exactly zero (expansion terminates)
  int precision_bits;
  int alphabet;           // floor(beta) + 1
};

// Greedy expansion of 1 in base beta: r_0 = 1, a_n = floor(beta*r_{n-1}),
// r_n = beta*r_{n-1} - a_n. Digits are certified: on the decimal path the
// operation refuses when a remainder is within 2^-(precision_bits/2) of an
// integer, since the reported digit would then hinge on unstated precision of
// the input. The quadratic path is exact and never refuses.
KneadingResult beta_kneading(const BetaSpec& beta, int digits, int precision_bits = 256);

}  // namespace shiftlab
