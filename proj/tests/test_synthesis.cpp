#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "shiftlab/measures.hpp"
#include "shiftlab/observables.hpp"
#include "shiftlab/shift_space.hpp"
#include "shiftlab/synthesis.hpp"

using namespace shiftlab;

namespace {

ShiftSpace golden() { return ShiftSpace::sft({{1, 1}, {1, 0}}); }

bool words_equal(const Word& a, const Word& b, std::size_t n) {
  if (a.size() < n || b.size() < n) return false;
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] != b[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("schedules: growth rules and tolerances") {
  ScheduleSpec acc = ScheduleSpec::accelerating(1000, 1000000);
  CHECK(acc.block_length(1, 0, 0) == 1000);
  CHECK(acc.block_length(2, 1000, 1000) == 2000);
  // max(2*2000, 2*(1000+2000)) = 6000.
  CHECK(acc.block_length(3, 2000, 3000) == 6000);
  CHECK(acc.block_length(4, 6000, 9000) == 27000);

  ScheduleSpec geo = ScheduleSpec::geometric_sum(10, 9.0, 1000000);
  CHECK(geo.block_length(1, 0, 0) == 10);
  CHECK(geo.block_length(2, 10, 10) == 90);
  CHECK(geo.block_length(3, 90, 100) == 900);

  CHECK(geo.tol(1) == doctest::Approx(0.05 * 0.9));
  CHECK(geo.tol(50) == doctest::Approx(0.005));  // floor

  CHECK_THROWS_AS(ScheduleSpec::explicit_lengths({10, 10, 30}).validate(),
                  DomainError);
  CHECK_THROWS_AS(ScheduleSpec::explicit_lengths({10, 30, 35}).validate(),
                  DomainError);  // 35 < 10 + 30
  ScheduleSpec ex = ScheduleSpec::explicit_lengths({10, 30, 90});
  ex.validate();
  CHECK(ex.block_length(3, 30, 40) == 90);
  CHECK(ex.block_length(4, 90, 130) == 0);  // exhausted
}

TEST_CASE("generic segments: deterministic targets hit exactly, infeasible "
          "tolerances fail loudly") {
  ShiftSpace full2 = ShiftSpace::full(2);
  MeasureModel d0 = MeasureModel::periodic(full2, Word::from_string("0"));
  SegmentResult seg = generic_segment(full2, d0, 50, 4, 0.05, Rng(1u));
  REQUIRE(seg.word.size() == 50);
  for (std::size_t i = 0; i < 50; ++i) CHECK(seg.word[i] == 0);
  CHECK(seg.deviation <= 1e-12);

  MeasureModel bern = MeasureModel::bernoulli(full2, {0.5, 0.5});
  SegmentResult s1 = generic_segment(full2, bern, 400, 2, 0.05, Rng(9u));
  SegmentResult s2 = generic_segment(full2, bern, 400, 2, 0.05, Rng(9u));
  CHECK(words_equal(s1.word, s2.word, 400));
  CHECK(s1.deviation <= 0.05);

  // Too short for depth-1 statistics on a stochastic model.
  CHECK_THROWS_AS(generic_segment(full2, bern, 40, 1, 0.05, Rng(2u)),
                  DomainError);
  // Odd length: the symbol frequency can never be exactly one half, so an
  // essentially-zero tolerance exhausts the retry budget.
  CHECK_THROWS_AS(generic_segment(full2, bern, 101, 1, 1e-12, Rng(2u)),
                  DomainError);
}

TEST_CASE("alternating construction: admissible prefixes, block-end "
          "convergence, determinism across horizons") {
  ShiftSpace g = golden();
  MeasureModel d0 = MeasureModel::periodic(g, Word::from_string("0"));
  MeasureModel p01 = MeasureModel::periodic(g, Word::from_string("01"));

  ScheduleSpec sched = ScheduleSpec::geometric_sum(10, 9.0, 100000);
  BuiltPoint built = build_irregular_point(g, d0, p01, sched, 7);
  Word w = built.point.materialize(100000);
  CHECK(g.is_admissible(w));

  // Weak* distance from each block-end prefix distribution to that block's
  // target is at most tol_j plus the history fraction.
  std::vector<std::int64_t> ends = built.plan.complete_block_ends();
  REQUIRE(ends.size() == 5);
  std::vector<MeasureModel> targets = {d0, p01};
  for (std::size_t j = 0; j < ends.size(); ++j) {
    const PlanBlock& blk = built.plan.blocks[j];
    Word prefix = w.sub(0, static_cast<std::size_t>(ends[j]));
    int depth = std::min(8, static_cast<int>(prefix.size()));
    double dist = weakstar_distance(
        empirical_distribution(prefix, depth, 2),
        model_distribution(targets[static_cast<std::size_t>(blk.target)],
                           depth),
        depth);
    double history = j == 0 ? 0.0
                            : static_cast<double>(ends[j - 1]) /
                                  static_cast<double>(ends[j]);
    CHECK(dist <= blk.tol + history + 1e-9);
  }

  // Same seed, longer horizon: byte-identical prefix.
  ScheduleSpec longer = ScheduleSpec::geometric_sum(10, 9.0, 1000000);
  BuiltPoint built2 = build_irregular_point(g, d0, p01, longer, 7);
  CHECK(words_equal(built2.point.materialize(100000), w, 100000));

  // Different seed changes the plan's realized bytes eventually; here both
  // targets are deterministic so only bridges could differ. Rebuild with the
  // same seed instead and require equality.
  BuiltPoint built3 = build_irregular_point(g, d0, p01, sched, 7);
  CHECK(words_equal(built3.point.materialize(100000), w, 100000));
}

TEST_CASE("periodic closing returns a loop the space accepts") {
  ShiftSpace g = golden();
  MeasureModel d0 = MeasureModel::periodic(g, Word::from_string("0"));
  MeasureModel p01 = MeasureModel::periodic(g, Word::from_string("01"));
  ScheduleSpec sched = ScheduleSpec::geometric_sum(10, 9.0, 10000);
  BuiltPoint built = build_irregular_point(g, d0, p01, sched, 3, true);
  CHECK(built.plan.closed);
  REQUIRE(built.plan.period > 0);
  CHECK(built.point.has_periodic_tail());
  std::int64_t p = built.plan.period;
  Word two = built.point.materialize(2 * p);
  for (std::int64_t i = 0; i < p; ++i)
    CHECK(two[static_cast<std::size_t>(i)] ==
          two[static_cast<std::size_t>(i + p)]);
  CHECK(g.is_admissible(two));
  CHECK(g.cyclically_admissible(two.sub(0, static_cast<std::size_t>(p))));
}

TEST_CASE("schedule tails extend on demand and refuse past explicit ends") {
  ShiftSpace full2 = ShiftSpace::full(2);
  MeasureModel d0 = MeasureModel::periodic(full2, Word::from_string("0"));
  MeasureModel d1 = MeasureModel::periodic(full2, Word::from_string("1"));
  ScheduleSpec ex = ScheduleSpec::explicit_lengths({10, 30, 90});
  BuiltPoint built = build_irregular_point(full2, d0, d1, ex, 1);
  CHECK(built.point.materialize(130).size() == 130);
  CHECK_THROWS_AS((void)built.point.materialize(131), DomainError);
}

TEST_CASE("joint construction issues one verified certificate per observable") {
  ShiftSpace full2 = ShiftSpace::full(2);
  Observable phi1 = Observable::indicator(2, Word::from_string("1"), "ind1");
  Observable phi2 =
      Observable::locally_constant(2, 2, {1.0, 0.0, 0.0, 1.0}, "eq");
  MeasureModel d0 = MeasureModel::periodic(full2, Word::from_string("0"));
  MeasureModel d1 = MeasureModel::periodic(full2, Word::from_string("1"));
  MeasureModel p01 = MeasureModel::periodic(full2, Word::from_string("01"));

  ScheduleSpec sched = ScheduleSpec::explicit_lengths(
      {100, 300, 900, 2700, 8100, 24300, 72900, 218700});
  BuiltPoint built = build_jointly_irregular_point(
      full2, {phi1, phi2}, {{d0, d1}, {p01, d0}}, sched, 11);

  REQUIRE(built.certificates.size() == 2);
  for (const Certificate& cert : built.certificates) {
    CHECK(cert.gap > 0.0);
    CHECK(cert.block_aligned);
    CHECK(cert.low.limit < cert.high.limit);
  }
  CHECK(built.plan.theta.size() == 2);
  double sum = built.plan.theta[0] + built.plan.theta[1];
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("round-robin construction visits the net cyclically") {
  ShiftSpace full2 = ShiftSpace::full(2);
  MeasureModel d0 = MeasureModel::periodic(full2, Word::from_string("0"));
  MeasureModel d1 = MeasureModel::periodic(full2, Word::from_string("1"));
  MeasureModel bern = MeasureModel::bernoulli(full2, {0.5, 0.5});
  ScheduleSpec sched =
      ScheduleSpec::explicit_lengths({100, 300, 900, 2700, 8100});
  BuiltPoint built =
      build_maximal_oscillation_point(full2, {d0, d1, bern}, sched, 4);
  REQUIRE(built.plan.blocks.size() >= 5);
  for (std::size_t j = 0; j < 5; ++j)
    CHECK(built.plan.blocks[j].target == static_cast<int>(j % 3));
  Word w = built.point.materialize(12100);
  CHECK(w.size() == 12100);
}

TEST_CASE("swept construction stays admissible and deterministic") {
  ShiftSpace full2 = ShiftSpace::full(2);
  MeasureModel d0 = MeasureModel::periodic(full2, Word::from_string("0"));
  MeasureModel d1 = MeasureModel::periodic(full2, Word::from_string("1"));
  ScheduleSpec sched = ScheduleSpec::geometric_sum(10, 9.0, 100000);
  BuiltPoint a = build_saturated_point(full2, {d0, d1}, sched, 5);
  BuiltPoint b = build_saturated_point(full2, {d0, d1}, sched, 5);
  Word wa = a.point.materialize(100000);
  CHECK(words_equal(wa, b.point.materialize(100000), 100000));
  CHECK(a.plan.complete_block_ends().size() == 5);
  // First two blocks are the polyline endpoints.
  Observable fs = Observable::first_symbol(2, "first");
  BirkhoffTrace t = birkhoff_averages(wa, fs, a.plan.complete_block_ends());
  CHECK(t.averages[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(t.averages[1] >= 0.85);
}

TEST_CASE("separated families: exact cardinality, admissible members, "
          "pairwise distinct samples") {
  ShiftSpace g = golden();
  double gr = (1.0 + std::sqrt(5.0)) / 2.0;
  MeasureModel parry =
      MeasureModel::markov(g, {{1.0 / gr, 1.0 / (gr * gr)}, {1.0, 0.0}});
  MeasureModel d0 = MeasureModel::periodic(g, Word::from_string("0"));

  SeparatedFamily fam = separated_irregular_family(g, parry, d0, 600, 0.8, 20, 9);
  REQUIRE(!fam.slots.empty());
  BigInt product{1};
  for (const FamilySlot& slot : fam.slots) {
    CHECK(slot.count > 0);
    product *= slot.count;
  }
  CHECK(fam.cardinality == product);

  // rate is ln(cardinality)/n.
  double ln_card = 0.0;
  for (const FamilySlot& slot : fam.slots)
    ln_card += std::log(static_cast<double>(slot.count));
  CHECK(fam.rate == doctest::Approx(ln_card / 600.0).epsilon(1e-9));

  std::vector<std::uint64_t> first(fam.slots.size(), 0);
  Word member0 = fam.member(g, first);
  CHECK(member0.size() == 600);
  CHECK(g.is_admissible(member0));

  // 100 random pairs realize distinct words.
  Rng rng(77u);
  for (int t = 0; t < 100; ++t) {
    Rng ra = rng.fork(static_cast<std::uint64_t>(2 * t));
    Rng rb = rng.fork(static_cast<std::uint64_t>(2 * t + 1));
    Word wa = fam.random_member(g, ra);
    Word wb = fam.random_member(g, rb);
    CHECK(g.is_admissible(wa));
    bool differ = false;
    for (std::size_t i = 0; i < 600 && !differ; ++i) differ = wa[i] != wb[i];
    CHECK(differ);
  }

  // Weighting by a zero potential reproduces the plain rate.
  Observable zero = Observable::locally_constant(2, 1, {0.0, 0.0}, "zero");
  CHECK(fam.weighted_rate(g, zero) == doctest::Approx(fam.rate).epsilon(1e-9));
}

TEST_CASE("block certificates recompute cleanly and reject tampering") {
  ShiftSpace full2 = ShiftSpace::full(2);
  MeasureModel d0 = MeasureModel::periodic(full2, Word::from_string("0"));
  MeasureModel d1 = MeasureModel::periodic(full2, Word::from_string("1"));
  ScheduleSpec sched = ScheduleSpec::geometric_sum(10, 9.0, 1000000);
  BuiltPoint built = build_irregular_point(full2, d0, d1, sched, 2);

  std::vector<std::int64_t> ends = built.plan.complete_block_ends();
  std::vector<std::int64_t> cps = geometric_checkpoints(1000000, 1.5);
  cps.insert(cps.end(), ends.begin(), ends.end());
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());

  Observable fs = Observable::first_symbol(2, "first");
  BirkhoffTrace trace = birkhoff_averages(built.point, fs, cps);
  double tol = sched.tol(1);
  auto cert = certificate_from_plan(built.plan, trace, tol);
  REQUIRE(cert.has_value());
  CHECK(cert->gap >= 2.0 * tol);
  CHECK_NOTHROW(verify_plan_certificate(built.plan, trace, *cert));

  Certificate bad = *cert;
  bad.gap += 0.1;
  CHECK_THROWS_AS(verify_plan_certificate(built.plan, trace, bad),
                  InternalError);
}
