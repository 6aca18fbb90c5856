#include <doctest.h>

#include <cmath>

#include "shiftlab/measures.hpp"
#include "shiftlab/observables.hpp"
#include "shiftlab/rng.hpp"
#include "shiftlab/shift_space.hpp"

using namespace shiftlab;

namespace {
const double kTight = 1e-12;
}

TEST_CASE("periodic orbit measures: uniform cylinder weights, zero entropy") {
  ShiftSpace full2 = ShiftSpace::full(2);
  MeasureModel mu = MeasureModel::periodic(full2, Word::from_string("01"));
  CHECK(mu.entropy_rate() == doctest::Approx(0.0).epsilon(kTight));
  CHECK(mu.cylinder_probability(Word::from_string("0")) ==
        doctest::Approx(0.5).epsilon(kTight));
  CHECK(mu.cylinder_probability(Word::from_string("01")) ==
        doctest::Approx(0.5).epsilon(kTight));
  CHECK(mu.cylinder_probability(Word::from_string("11")) ==
        doctest::Approx(0.0).epsilon(kTight));
  CHECK(mu.is_deterministic());

  Rng rng(3u);
  Word w = mu.sample_word(9, rng);
  REQUIRE(w.size() == 9);
  for (std::size_t i = 0; i + 1 < w.size(); ++i) CHECK(w[i] != w[i + 1]);
}

TEST_CASE("product measures: cylinder probabilities multiply") {
  ShiftSpace full2 = ShiftSpace::full(2);
  MeasureModel mu = MeasureModel::bernoulli(full2, {0.3, 0.7});
  CHECK(mu.cylinder_probability(Word::from_string("01")) ==
        doctest::Approx(0.21).epsilon(kTight));
  CHECK(mu.cylinder_probability(Word::from_string("110")) ==
        doctest::Approx(0.7 * 0.7 * 0.3).epsilon(kTight));
  double h = -(0.3 * std::log(0.3) + 0.7 * std::log(0.7));
  CHECK(mu.entropy_rate() == doctest::Approx(h).epsilon(kTight));
  CHECK_FALSE(mu.is_deterministic());
}

TEST_CASE("markov chains: stationarity, entropy, compatibility validation") {
  ShiftSpace g = ShiftSpace::sft({{1, 1}, {1, 0}});
  double gr = (1.0 + std::sqrt(5.0)) / 2.0;
  MeasureModel parry =
      MeasureModel::markov(g, {{1.0 / gr, 1.0 / (gr * gr)}, {1.0, 0.0}});
  // The maximal-entropy chain of the golden graph has entropy ln g.
  CHECK(parry.entropy_rate() == doctest::Approx(std::log(gr)).epsilon(1e-10));
  auto pi = parry.stationary();
  REQUIRE(pi.size() == 2);
  CHECK(pi[0] + pi[1] == doctest::Approx(1.0).epsilon(kTight));
  // pi P = pi.
  CHECK(pi[0] * (1.0 / gr) + pi[1] * 1.0 == doctest::Approx(pi[0]).epsilon(1e-10));

  CHECK_THROWS_AS(MeasureModel::markov(g, {{0.5, 0.5}, {0.5, 0.5}}),
                  DomainError);  // mass on the forbidden transition 1->1
  CHECK_THROWS_AS(MeasureModel::markov(g, {{0.9, 0.2}, {1.0, 0.0}}),
                  DomainError);  // row does not sum to one
}

TEST_CASE("mixtures: affine cylinder weights and entropy") {
  ShiftSpace full2 = ShiftSpace::full(2);
  MeasureModel d0 = MeasureModel::periodic(full2, Word::from_string("0"));
  MeasureModel bern = MeasureModel::bernoulli(full2, {0.5, 0.5});
  MeasureModel mix = MeasureModel::mixture({{0.25, d0}, {0.75, bern}});
  CHECK(mix.cylinder_probability(Word::from_string("00")) ==
        doctest::Approx(0.25 * 1.0 + 0.75 * 0.25).epsilon(kTight));
  CHECK(mix.entropy_rate() ==
        doctest::Approx(0.75 * std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("empirical distributions count sliding windows exactly") {
  Word w = Word::from_string("0101");
  CylinderDistribution emp = empirical_distribution(w, 2, 2);
  CHECK(emp.prob(Word::from_string("01")) ==
        doctest::Approx(2.0 / 3.0).epsilon(kTight));
  CHECK(emp.prob(Word::from_string("10")) ==
        doctest::Approx(1.0 / 3.0).epsilon(kTight));
  CHECK(emp.prob(Word::from_string("00")) == doctest::Approx(0.0));
  CHECK(emp.prob(Word::from_string("11")) == doctest::Approx(0.0));
}

TEST_CASE("weak* metric: zero at equality, known value for opposite atoms") {
  ShiftSpace full2 = ShiftSpace::full(2);
  MeasureModel d0 = MeasureModel::periodic(full2, Word::from_string("0"));
  MeasureModel d1 = MeasureModel::periodic(full2, Word::from_string("1"));
  CHECK(weakstar_distance(d0, d0, 8) == doctest::Approx(0.0).epsilon(kTight));
  // Disjoint supports: every depth contributes its full 2^-m weight.
  double want = 0.0;
  for (int m = 1; m <= 8; ++m) want += std::pow(2.0, -m);
  CHECK(weakstar_distance(d0, d1, 8) == doctest::Approx(want).epsilon(kTight));
  CHECK(weakstar_distance(d0, d1, 8) <= 1.0);
}

TEST_CASE("integration agrees with exact rational integration") {
  ShiftSpace g = ShiftSpace::sft({{1, 1}, {1, 0}});
  double gr = (1.0 + std::sqrt(5.0)) / 2.0;
  MeasureModel parry =
      MeasureModel::markov(g, {{1.0 / gr, 1.0 / (gr * gr)}, {1.0, 0.0}});
  Observable phi =
      Observable::locally_constant(2, 2, {0.2, -0.3, 0.4, 0.0}, "probe");
  double direct = integrate(parry, phi);
  double exact = static_cast<double>(integrate_exact(parry, phi));
  CHECK(direct == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("sampling is reproducible per seed and varies across seeds") {
  ShiftSpace full2 = ShiftSpace::full(2);
  MeasureModel bern = MeasureModel::bernoulli(full2, {0.5, 0.5});
  Rng a(11u), b(11u), c(12u);
  Word wa = bern.sample_word(64, a);
  Word wb = bern.sample_word(64, b);
  Word wc = bern.sample_word(64, c);
  bool same_ab = true, same_ac = true;
  for (std::size_t i = 0; i < 64; ++i) {
    same_ab = same_ab && wa[i] == wb[i];
    same_ac = same_ac && wa[i] == wc[i];
  }
  CHECK(same_ab);
  CHECK_FALSE(same_ac);
}
