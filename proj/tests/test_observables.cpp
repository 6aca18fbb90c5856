#include <doctest.h>

#include <cmath>

#include "shiftlab/observables.hpp"
#include "shiftlab/rng.hpp"
#include "shiftlab/word.hpp"

using namespace shiftlab;

TEST_CASE("locally constant evaluation reads fixed windows") {
  Observable phi =
      Observable::locally_constant(2, 2, {10.0, 20.0, 30.0, 40.0}, "grid");
  Word w = Word::from_string("0110");
  CHECK(phi.eval(w, 0) == doctest::Approx(20.0));  // 01
  CHECK(phi.eval(w, 1) == doctest::Approx(40.0));  // 11
  CHECK(phi.eval(w, 2) == doctest::Approx(30.0));  // 10
  CHECK(phi.range() == 2);
  CHECK(phi.sup_bound() == doctest::Approx(40.0));
  CHECK(phi.min_value() == doctest::Approx(10.0));
  CHECK(phi.max_value() == doctest::Approx(40.0));

  Observable scaled = phi.scaled(-0.5);
  CHECK(scaled.eval(w, 0) == doctest::Approx(-10.0));
  Observable shifted = phi.plus_constant(1.5);
  CHECK(shifted.eval(w, 2) == doctest::Approx(31.5));
}

TEST_CASE("indicator and first-symbol observables") {
  Observable ind = Observable::indicator(2, Word::from_string("01"), "cyl01");
  Word w = Word::from_string("0101");
  CHECK(ind.eval(w, 0) == doctest::Approx(1.0));
  CHECK(ind.eval(w, 1) == doctest::Approx(0.0));
  Observable fs = Observable::first_symbol(2, "first");
  CHECK(fs.eval(w, 0) == doctest::Approx(0.0));
  CHECK(fs.eval(w, 1) == doctest::Approx(1.0));
}

TEST_CASE("coboundary averages telescope to the constant") {
  Observable h =
      Observable::locally_constant(2, 2, {0.3, -0.2, 0.5, 0.1}, "h");
  const double c = 0.25;
  Observable cob = Observable::coboundary(h, c, "cob");
  CHECK(cob.range() == 3);

  Rng rng(5u);
  std::vector<Symbol> syms;
  for (int i = 0; i < 300; ++i)
    syms.push_back(static_cast<Symbol>(rng.next_below(2)));
  Word w(std::move(syms));

  // Pointwise identity against the inner function.
  for (int i = 0; i < 20; ++i)
    CHECK(cob.eval(w, i) ==
          doctest::Approx(c + h.eval(w, i) - h.eval(w, i + 1)).epsilon(1e-12));

  // Birkhoff averages collapse onto c at rate 2 sup|h| / n.
  std::vector<std::int64_t> cps = {8, 32, 128, 256};
  BirkhoffTrace trace = birkhoff_averages(w, cob, cps);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    double bound = 2.0 * h.sup_bound() / static_cast<double>(cps[i]);
    CHECK(std::abs(trace.averages[i] - c) <= bound + 1e-12);
  }
}

TEST_CASE("trig observables carry bounds but never evaluate on words") {
  Observable s1 = Observable::trig(TrigKind::Sin, 1, "sin1");
  Observable c1 = Observable::trig(TrigKind::Cos, 1, "cos1");
  CHECK(s1.kind() == Observable::Kind::Trig);
  CHECK(s1.sup_bound() == doctest::Approx(1.0));
  // Exact window extrema exist only for tabulated observables.
  CHECK_THROWS_AS((void)s1.min_value(), DomainError);
  CHECK_THROWS_AS((void)c1.max_value(), DomainError);
  CHECK_THROWS_AS(Observable::trig(TrigKind::Sin, 0, "bad"), DomainError);
  // Word evaluation belongs to locally constant observables; angles are
  // produced by orbits on the circle side.
  Word w = Word::from_string("01").repeated(40);
  CHECK_THROWS_AS((void)s1.eval(w, 0), DomainError);
  CHECK_THROWS_AS((void)birkhoff_averages(w, c1, {8, 16}), DomainError);
}

TEST_CASE("geometric checkpoints are sorted, unique, and end at the horizon") {
  std::vector<std::int64_t> cps = geometric_checkpoints(1000000, 1.5);
  REQUIRE(!cps.empty());
  CHECK(cps.front() >= 1);
  CHECK(cps.back() == 1000000);
  for (std::size_t i = 1; i < cps.size(); ++i) {
    CHECK(cps[i] > cps[i - 1]);
    // Gaps stay within the requested ratio.
    CHECK(static_cast<double>(cps[i]) <=
          1.5 * static_cast<double>(cps[i - 1]) + 1.0);
  }
}

TEST_CASE("birkhoff averages are prefix means") {
  Observable fs = Observable::first_symbol(2, "first");
  Word w = Word::from_string("110100");
  BirkhoffTrace t = birkhoff_averages(w, fs, {1, 2, 3, 6});
  CHECK(t.averages[0] == doctest::Approx(1.0));
  CHECK(t.averages[1] == doctest::Approx(1.0));
  CHECK(t.averages[2] == doctest::Approx(2.0 / 3.0));
  CHECK(t.averages[3] == doctest::Approx(0.5));
}

TEST_CASE("divergence certificates: issued for settled oscillation only") {
  // Two stable clusters separated by 0.8: certifiable.
  BirkhoffTrace osc;
  osc.observable_id = "osc";
  osc.checkpoints = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120};
  osc.averages = {0.1, 0.9, 0.11, 0.89, 0.1, 0.9, 0.1, 0.9, 0.11, 0.9, 0.1, 0.89};
  auto cert = irregularity_certificate(osc, 0.05);
  REQUIRE(cert.has_value());
  CHECK(cert->gap >= 0.7);
  CHECK(cert->low.limit < cert->high.limit);

  // A converging trace yields nothing.
  BirkhoffTrace flat;
  flat.observable_id = "flat";
  flat.checkpoints = osc.checkpoints;
  flat.averages = {0.5, 0.52, 0.49, 0.5, 0.51, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  CHECK_FALSE(irregularity_certificate(flat, 0.05).has_value());
}
