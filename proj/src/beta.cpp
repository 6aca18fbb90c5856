#include "shiftlab/beta.hpp"

#include <cmath>
#include <utility>

#include "shiftlab/bigint.hpp"

namespace shiftlab {
namespace {

BigInt gcd3(const BigInt& a, const BigInt& b, const BigInt& c) {
  return boost::multiprecision::gcd(boost::multiprecision::gcd(a, b), c);
}

// Value (x + y*sqrt(d))/z with z > 0, kept gcd-reduced.
struct Quad {
  BigInt x, y, z;

  void normalize() {
    if (z < 0) {
      x = -x;
      y = -y;
      z = -z;
    }
    BigInt g = gcd3(abs(x), abs(y), z);
    if (g > 1) {
      x /= g;
      y /= g;
      z /= g;
    }
  }
};

// sign of (x + y*sqrt(d))/z - m, computed exactly.
int compare_with_int(const Quad& v, long long d, const BigInt& m) {
  BigInt t = m * v.z - v.x;  // compare y*sqrt(d) against t
  if (v.y == 0) {
    if (t < 0) return 1;
    if (t > 0) return -1;
    return 0;
  }
  if (v.y > 0) {
    if (t <= 0) return 1;
    BigInt lhs = v.y * v.y * d;
    BigInt rhs = t * t;
    if (lhs > rhs) return 1;
    if (lhs < rhs) return -1;
    return 0;
  }
  if (t >= 0) return -1;
  BigInt lhs = v.y * v.y * d;
  BigInt rhs = t * t;
  if (lhs < rhs) return 1;  // |y|sqrt(d) < |t| and t < 0
  if (lhs > rhs) return -1;
  return 0;
}

BigInt floor_quad(const Quad& v, long long d) {
  BigInt s = boost::multiprecision::sqrt(BigInt(v.y * v.y * d));
  BigInt num = v.y >= 0 ? BigInt(v.x + s) : BigInt(v.x - s - 1);
  BigInt m = num / v.z;
  if (num < 0 && num % v.z != 0) --m;  // floor division
  while (compare_with_int(v, d, m) < 0) --m;
  while (compare_with_int(v, d, m + 1) >= 0) ++m;
  return m;
}

Quad mul(const Quad& a, const Quad& b, long long d) {
  Quad out;
  out.x = a.x * b.x + a.y * b.y * d;
  out.y = a.x * b.y + a.y * b.x;
  out.z = a.z * b.z;
  out.normalize();
  return out;
}

struct ParsedDecimal {
  BigInt num, den;  // reduced, den >= 1
};

ParsedDecimal parse_decimal(const std::string& text) {
  BigInt num = 0;
  BigInt den = 1;
  bool seen_digit = false;
  bool seen_dot = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_dot) throw DomainError("beta decimal: repeated '.'");
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      num = num * 10 + (c - '0');
      if (seen_dot) den *= 10;
      seen_digit = true;
    } else {
      throw DomainError("beta decimal: unexpected character");
    }
  }
  if (!seen_digit) throw DomainError("beta decimal: empty");
  BigInt g = boost::multiprecision::gcd(num, den);
  return ParsedDecimal{num / g, den / g};
}

bool is_perfect_square(long long d) {
  if (d < 0) return false;
  long long s = static_cast<long long>(std::sqrt(static_cast<double>(d)));
  for (long long c = s - 2; c <= s + 2; ++c) {
    if (c >= 0 && c * c == d) return true;
  }
  return false;
}

}  // namespace

BetaSpec BetaSpec::from_decimal(std::string text) {
  BetaSpec spec;
  spec.decimal = std::move(text);
  parse_decimal(spec.decimal);  // validate eagerly
  return spec;
}

BetaSpec BetaSpec::from_quadratic(long long p, long long q, long long d, long long r) {
  if (r == 0) throw DomainError("beta quadratic: zero denominator");
  if (q == 0) throw DomainError("beta quadratic: q = 0, use a decimal string");
  if (d < 2 || is_perfect_square(d)) {
    throw DomainError("beta quadratic: d must be a non-square integer >= 2");
  }
  BetaSpec spec;
  spec.quadratic = true;
  spec.p = p;
  spec.q = q;
  spec.d = d;
  spec.r = r;
  return spec;
}

double BetaSpec::to_double() const {
  if (quadratic) {
    return (static_cast<double>(p) +
            static_cast<double>(q) * std::sqrt(static_cast<double>(d))) /
           static_cast<double>(r);
  }
  ParsedDecimal v = parse_decimal(decimal);
  return v.num.convert_to<double>() / v.den.convert_to<double>();
}

std::string BetaSpec::describe() const {
  if (!quadratic) return decimal;
  return "(" + std::to_string(p) + "+" + std::to_string(q) + "*sqrt(" +
         std::to_string(d) + "))/" + std::to_string(r);
}

namespace {

KneadingResult knead_quadratic(const BetaSpec& spec, int digits, int precision_bits) {
  Quad beta{BigInt(spec.p), BigInt(spec.q), BigInt(spec.r)};
  beta.normalize();
  if (compare_with_int(beta, spec.d, 1) <= 0) {
    throw DomainError("beta must exceed 1");
  }
  BigInt fl = floor_quad(beta, spec.d);
  if (compare_with_int(beta, spec.d, fl) == 0) {
    throw DomainError("integer beta is not a valid base");
  }
  if (fl >= 35) throw DomainError("beta too large for the symbol alphabet");

  KneadingResult out;
  out.precision_bits = precision_bits;
  out.alphabet = fl.convert_to<int>() + 1;
  out.eventually_zero = false;
  Quad r{BigInt(1), BigInt(0), BigInt(1)};
  for (int n = 0; n < digits; ++n) {
    if (r.x == 0 && r.y == 0) {
      out.eventually_zero = true;
      out.digits.push_back(0);
      continue;
    }
    Quad v = mul(beta, r, spec.d);
    BigInt a = floor_quad(v, spec.d);
    out.digits.push_back(static_cast<Symbol>(a.convert_to<int>()));
    v.x -= a * v.z;
    v.normalize();
    r = v;
  }
  if (r.x == 0 && r.y == 0) out.eventually_zero = true;
  return out;
}

KneadingResult knead_decimal(const BetaSpec& spec, int digits, int precision_bits) {
  ParsedDecimal beta = parse_decimal(spec.decimal);
  if (beta.num <= beta.den) throw DomainError("beta must exceed 1");
  if (beta.den == 1) throw DomainError("integer beta is not a valid base");
  BigInt fl = beta.num / beta.den;
  if (fl >= 35) throw DomainError("beta too large for the symbol alphabet");

  double lg = std::log2(beta.num.convert_to<double>() / beta.den.convert_to<double>());
  int needed = 64 + digits * static_cast<int>(std::ceil(lg));
  if (precision_bits < needed) {
    throw DomainError("precision_bits too small: need at least " +
                      std::to_string(needed) + " for " + std::to_string(digits) +
                      " digits of this beta");
  }

  // Exact rational recurrence. The proximity refusal below implements digit
  // certification: a remainder within 2^-(precision_bits/2) of an integer
  // means the digit is not stable at the stated precision of the input.
  int half_bits = precision_bits / 2;
  KneadingResult out;
  out.precision_bits = precision_bits;
  out.alphabet = fl.convert_to<int>() + 1;
  out.eventually_zero = false;
  BigInt num = 1, den = 1;  // r = num/den
  for (int n = 0; n < digits; ++n) {
    if (num == 0) {
      out.eventually_zero = true;
      out.digits.push_back(0);
      continue;
    }
    BigInt vn = beta.num * num;
    BigInt vd = beta.den * den;
    BigInt a = vn / vd;
    BigInt rem = vn - a * vd;  // frac = rem/vd in [0,1)
    bool near_floor = (rem << half_bits) < vd;
    bool near_ceiling = ((vd - rem) << half_bits) < vd;
    if ((near_floor && rem != 0) || near_ceiling) {
      throw DomainError("cannot certify digit " + std::to_string(n + 1) +
                        ": remainder within 2^-" + std::to_string(half_bits) +
                        " of an integer; raise precision_bits or give beta exactly");
    }
    out.digits.push_back(static_cast<Symbol>(a.convert_to<int>()));
    BigInt g = boost::multiprecision::gcd(rem, vd);
    num = rem / g;
    den = vd / g;
  }
  if (num == 0) out.eventually_zero = true;
  return out;
}

void check_self_comparison(const Word& a) {
  // Every shifted tail must stay lexicographically <= the sequence itself on
  // the compared overlap; the greedy recurrence guarantees it, so a failure
  // here is a bug, not bad input.
  const std::size_t n = a.size();
  for (std::size_t s = 1; s < n; ++s) {
    for (std::size_t i = 0; i + s < n; ++i) {
      if (a[s + i] < a[i]) break;
      if (a[s + i] > a[i]) {
        throw InternalError("kneading self-comparison violated at shift " +
                            std::to_string(s));
      }
    }
  }
}

}  // namespace

KneadingResult beta_kneading(const BetaSpec& beta, int digits, int precision_bits) {
  if (digits < 1) throw DomainError("kneading digits must be >= 1");
  if (precision_bits < 64) throw DomainError("precision_bits must be >= 64");
  KneadingResult out = beta.quadratic ? knead_quadratic(beta, digits, precision_bits)
                                      : knead_decimal(beta, digits, precision_bits);
  if (out.digits.size() != static_cast<std::size_t>(digits)) {
    throw InternalError("kneading digit count mismatch");
  }
  if (out.digits[0] < 1) throw InternalError("leading kneading digit must be >= 1");
  check_self_comparison(out.digits);
  return out;
}

}  // namespace shiftlab
