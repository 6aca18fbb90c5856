#include <doctest.h>

#include "shiftlab/beta.hpp"
#include "shiftlab/bigint.hpp"
#include "shiftlab/point.hpp"
#include "shiftlab/shift_space.hpp"
#include "shiftlab/word.hpp"

using namespace shiftlab;

TEST_CASE("words: construction, slicing, repetition") {
  Word w = Word::from_string("0110");
  CHECK(w.size() == 4);
  CHECK(w[0] == 0);
  CHECK(w[1] == 1);
  Word s = w.sub(1, 2);
  CHECK(s.size() == 2);
  CHECK(s[0] == 1);
  CHECK(s[1] == 1);
  Word r = Word::from_string("01").repeated(3);
  CHECK(r.size() == 6);
  CHECK(r[4] == 0);
  CHECK(r[5] == 1);
}

TEST_CASE("full shift: every word admissible, counts are powers") {
  ShiftSpace full2 = ShiftSpace::full(2);
  CHECK(full2.kind() == SpaceKind::Full);
  CHECK(full2.alphabet_size() == 2);
  REQUIRE(full2.mixing_gap().has_value());
  CHECK(*full2.mixing_gap() == 0);
  CHECK(full2.is_admissible(Word::from_string("0110100111")));
  BigInt p{1};
  for (int n = 1; n <= 10; ++n) {
    p *= 2;
    CHECK(full2.count_words(n) == p);
  }
}

TEST_CASE("golden matrix space: forbidden block, Fibonacci counts, bridging") {
  ShiftSpace g = ShiftSpace::sft({{1, 1}, {1, 0}});
  CHECK(g.kind() == SpaceKind::Sft);
  CHECK(g.is_admissible(Word::from_string("0101001")));
  CHECK_FALSE(g.is_admissible(Word::from_string("0110")));
  REQUIRE(g.mixing_gap().has_value());
  CHECK(*g.mixing_gap() == 2);

  // Count of admissible n-words is the Fibonacci number F(n+2), F(1)=F(2)=1.
  BigInt f1{1}, f2{2};
  for (int n = 1; n <= 16; ++n) {
    CHECK(g.count_words(n) == f2);
    BigInt t = f1 + f2;
    f1 = f2;
    f2 = t;
  }

  Word u = Word::from_string("01");
  Word v = Word::from_string("10");
  Word glue = g.bridge(u, v, 4);
  CHECK(glue.size() <= 4);
  Word joined = u;
  for (std::size_t i = 0; i < glue.size(); ++i) joined.push_back(glue[i]);
  for (std::size_t i = 0; i < v.size(); ++i) joined.push_back(v[i]);
  CHECK(g.is_admissible(joined));

  CHECK(g.cyclically_admissible(Word::from_string("10")));
  CHECK_FALSE(g.cyclically_admissible(Word::from_string("1")));
}

TEST_CASE("walker automaton tracks admissibility incrementally") {
  ShiftSpace g = ShiftSpace::sft({{1, 1}, {1, 0}});
  int key = g.walker_initial();
  key = g.walker_step(key, 1);
  CHECK(key >= 0);
  CHECK(g.walker_step(key, 1) < 0);  // 11 forbidden
  CHECK(g.walker_advance(g.walker_initial(), Word::from_string("10100")) >= 0);
  CHECK(g.walker_advance(g.walker_initial(), Word::from_string("1011")) < 0);

  SpaceWalker walker(g);
  CHECK(walker.try_append(Word::from_string("010")));
  CHECK(walker.can_push(1));  // last symbol is 0
  walker.push(1);
  CHECK_FALSE(walker.can_push(1));
  CHECK_THROWS_AS(walker.push(1), DomainError);
}

TEST_CASE("golden-base expansion digits are exact and terminate") {
  KneadingResult kn = beta_kneading(BetaSpec::golden(), 12);
  REQUIRE(kn.digits.size() == 12);
  CHECK(kn.digits[0] == 1);
  CHECK(kn.digits[1] == 1);
  for (std::size_t i = 2; i < kn.digits.size(); ++i) CHECK(kn.digits[i] == 0);
  CHECK(kn.eventually_zero);
  CHECK(kn.alphabet == 2);
}

TEST_CASE("decimal-base expansion digits match exact rational greedy run") {
  const int digits = 20;
  KneadingResult kn = beta_kneading(BetaSpec::from_decimal("1.8"), digits);
  REQUIRE(kn.digits.size() == static_cast<std::size_t>(digits));
  // Independent oracle: greedy expansion of 1 with beta = 9/5 in exact
  // rational arithmetic.
  BigRational beta(9, 5), r(1);
  for (int i = 0; i < digits; ++i) {
    BigRational x = beta * r;
    BigInt a = boost::multiprecision::numerator(x) /
               boost::multiprecision::denominator(x);
    r = x - BigRational(a);
    CHECK(static_cast<int>(kn.digits[static_cast<std::size_t>(i)]) ==
          static_cast<int>(a));
  }
  CHECK_FALSE(kn.eventually_zero);
}

TEST_CASE("beta space from the golden base matches the golden graph language") {
  ShiftSpace gb = ShiftSpace::beta(BetaSpec::golden(), 32);
  ShiftSpace g = ShiftSpace::sft({{1, 1}, {1, 0}});
  CHECK(gb.kind() == SpaceKind::Beta);
  CHECK(gb.alphabet_size() == 2);
  // Bridging for expansions is search-based, so no uniform gap is reported.
  CHECK_FALSE(gb.mixing_gap().has_value());
  for (int n = 1; n <= 12; ++n) CHECK(gb.count_words(n) == g.count_words(n));
  CHECK(gb.is_admissible(Word::from_string("10101")));
  CHECK_FALSE(gb.is_admissible(Word::from_string("011")));
}

TEST_CASE("beta space for base 1.8 rejects words above the kneading word") {
  ShiftSpace b = ShiftSpace::beta(BetaSpec::from_decimal("1.8"), 32);
  // Kneading starts 1,1,0,1: any window strictly above it is out.
  CHECK(b.is_admissible(Word::from_string("110011001")));
  CHECK_FALSE(b.is_admissible(Word::from_string("111")));
  CHECK_FALSE(b.is_admissible(Word::from_string("011011011")));
  BigInt prev = b.count_words(1);
  for (int n = 2; n <= 10; ++n) {
    BigInt cur = b.count_words(n);
    CHECK(cur > prev);       // language grows
    CHECK(cur <= prev * 2);  // never faster than the full shift
    // Thinning starts at length 3, the first length that can hold the
    // smallest excluded window.
    if (n >= 3) CHECK(cur < prev * 2);
    prev = cur;
  }
}

TEST_CASE("symbolic points: periodic tails loop, horizons are enforced") {
  SymbolicPoint x =
      SymbolicPoint::periodic(Word::from_string("01"), Word::from_string("100"));
  Word w = x.materialize(8);
  CHECK(w.size() == 8);
  const char* want = "01100100";
  for (std::size_t i = 0; i < 8; ++i)
    CHECK(w[i] == static_cast<Symbol>(want[i] - '0'));

  struct Fixed : TailGenerator {
    Word generate(std::int64_t n) const override {
      return Word(std::vector<Symbol>(static_cast<std::size_t>(n), 0));
    }
    std::int64_t horizon() const override { return 5; }
  };
  SymbolicPoint y = SymbolicPoint::generated(std::make_shared<Fixed>());
  CHECK(y.materialize(5).size() == 5);
  CHECK_THROWS_AS((void)y.materialize(6), DomainError);
}
