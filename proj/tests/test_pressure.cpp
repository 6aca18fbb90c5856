#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "shiftlab/beta.hpp"
#include "shiftlab/measures.hpp"
#include "shiftlab/observables.hpp"
#include "shiftlab/pressure.hpp"
#include "shiftlab/shift_space.hpp"
#include "shiftlab/synthesis.hpp"

using namespace shiftlab;

namespace {

ShiftSpace golden() { return ShiftSpace::sft({{1, 1}, {1, 0}}); }

const double kLogGolden = std::log((1.0 + std::sqrt(5.0)) / 2.0);

Observable zero_potential(int alphabet) {
  return Observable::locally_constant(
      alphabet, 1, std::vector<double>(static_cast<std::size_t>(alphabet), 0.0),
      "zero");
}

std::vector<Word> admissible_words(const ShiftSpace& space, int n) {
  std::vector<Word> out;
  Word current;
  std::function<void(int, int)> dfs = [&](int key, int left) {
    if (left == 0) {
      out.push_back(current);
      return;
    }
    for (int c = 0; c < space.alphabet_size(); ++c) {
      int next = space.walker_step(key, static_cast<Symbol>(c));
      if (next < 0) continue;
      current.push_back(static_cast<Symbol>(c));
      dfs(next, left - 1);
      current = current.sub(0, current.size() - 1);
    }
  };
  dfs(space.walker_initial(), n);
  return out;
}

double fib_log(std::int64_t n) {  // ln of the n-th Fibonacci number, F(1)=1
  double a = 1.0, b = 1.0;
  for (std::int64_t i = 3; i <= n; ++i) {
    double c = a + b;
    a = b;
    b = c;
  }
  return std::log(b);
}

}  // namespace

TEST_CASE("spectral pressure: closed forms on full shifts and the golden "
          "subshift") {
  ShiftSpace full2 = ShiftSpace::full(2);
  PressureResult p0 = transfer_pressure(full2, zero_potential(2));
  CHECK(p0.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(p0.method == PressureResult::Method::TransferExact);
  CHECK(p0.residual <= 1e-12);
  CHECK(p0.iterations >= 1);

  Observable step = Observable::locally_constant(2, 1, {0.0, 1.0}, "step");
  PressureResult p1 = transfer_pressure(full2, step);
  CHECK(p1.value ==
        doctest::Approx(std::log(1.0 + std::exp(1.0))).epsilon(1e-9));

  PressureResult pg = transfer_pressure(golden(), zero_potential(2));
  CHECK(pg.value == doctest::Approx(kLogGolden).epsilon(1e-9));

  // Adding a constant to the potential shifts the pressure by exactly that.
  Observable base = Observable::locally_constant(2, 1, {0.3, -0.2}, "base");
  double before = transfer_pressure(golden(), base).value;
  double after = transfer_pressure(golden(), base.plus_constant(1.5)).value;
  CHECK(after - before == doctest::Approx(1.5).epsilon(1e-9));

  // A range-2 table that only reads its first symbol agrees with the
  // range-1 version.
  Observable wide =
      Observable::locally_constant(2, 2, {0.3, 0.3, -0.2, -0.2}, "wide");
  CHECK(transfer_pressure(golden(), wide).value ==
        doctest::Approx(before).epsilon(1e-9));

  CHECK_THROWS_AS(
      transfer_pressure(ShiftSpace::beta(BetaSpec::golden(), 16), step),
      DomainError);
  CHECK_THROWS_AS(transfer_pressure(full2, Observable::trig(TrigKind::Sin, 1)),
                  DomainError);
}

TEST_CASE("equilibrium chains attain the pressure and match closed forms") {
  ShiftSpace full2 = ShiftSpace::full(2);
  auto [flat, pflat] = equilibrium_markov(full2, zero_potential(2));
  CHECK(integrate(flat, Observable::first_symbol(2, "x0")) ==
        doctest::Approx(0.5).epsilon(1e-10));
  CHECK(flat.entropy_rate() == doctest::Approx(std::log(2.0)).epsilon(1e-10));

  Observable step = Observable::locally_constant(2, 1, {0.0, 1.0}, "step");
  auto [tilted, ptilt] = equilibrium_markov(full2, step);
  double e = std::exp(1.0);
  CHECK(integrate(tilted, step) == doctest::Approx(e / (1.0 + e)).epsilon(1e-8));
  CHECK(tilted.entropy_rate() + integrate(tilted, step) ==
        doctest::Approx(ptilt.value).epsilon(1e-8));

  auto [parry, pparry] = equilibrium_markov(golden(), zero_potential(2));
  double g = (1.0 + std::sqrt(5.0)) / 2.0;
  const auto& rows = parry.rows();
  CHECK(rows[0][0] == doctest::Approx(1.0 / g).epsilon(1e-9));
  CHECK(rows[0][1] == doctest::Approx(1.0 / (g * g)).epsilon(1e-9));
  CHECK(rows[1][0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rows[1][1] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(pparry.value == doctest::Approx(kLogGolden).epsilon(1e-9));

  Observable wide =
      Observable::locally_constant(2, 2, {0.1, 0.2, 0.3, 0.4}, "wide");
  CHECK_THROWS_AS(equilibrium_markov(full2, wide), DomainError);
}

TEST_CASE("cylinder partition sums: exact on full shifts, monotone toward "
          "the entropy on the golden subshift") {
  ShiftSpace full2 = ShiftSpace::full(2);
  Observable step = Observable::locally_constant(2, 1, {0.0, 1.0}, "step");
  PressureResult est = cylinder_pressure_estimate(full2, step, 12);
  CHECK(est.method == PressureResult::Method::CylinderEstimate);
  CHECK(est.n == 12);
  CHECK(est.value ==
        doctest::Approx(std::log(1.0 + std::exp(1.0))).epsilon(1e-12));

  ShiftSpace g = golden();
  Observable zero = zero_potential(2);
  std::vector<std::int64_t> depths = {8, 12, 16, 20};
  double prev = std::numeric_limits<double>::infinity();
  for (std::int64_t n : depths) {
    PressureResult r = cylinder_pressure_estimate(g, zero, n);
    // (1/n) ln of the admissible word count, F(n+2) on the golden subshift.
    CHECK(r.value ==
          doctest::Approx(fib_log(n + 2) / static_cast<double>(n))
              .epsilon(1e-12));
    CHECK(r.value < prev);
    CHECK(r.value > kLogGolden);
    prev = r.value;
  }
  CHECK(prev - kLogGolden <= 0.03);

  CHECK_THROWS_AS(cylinder_pressure_estimate(
                      g, Observable::locally_constant(2, 2,
                                                      {0.0, 0.0, 0.0, 0.0},
                                                      "w2"),
                      1),
                  DomainError);
}

TEST_CASE("explicit word covers reproduce the dynamic program") {
  ShiftSpace g = golden();
  Observable step = Observable::locally_constant(2, 1, {0.0, 1.0}, "step");
  std::vector<Word> words = admissible_words(g, 10);
  CHECK(words.size() == 144);  // F(12)
  PressureResult via_dp = cylinder_pressure_estimate(g, step, 10);
  PressureResult via_list = cylinder_pressure_estimate(g, words, step, 10);
  CHECK(via_list.value == doctest::Approx(via_dp.value).epsilon(1e-12));

  Word bad = Word::from_string("0110000000");
  CHECK_THROWS_AS(cylinder_pressure_estimate(g, {bad}, step, 10), DomainError);
}

TEST_CASE("family partition sums factor over slots exactly") {
  ShiftSpace g = golden();
  double gr = (1.0 + std::sqrt(5.0)) / 2.0;
  MeasureModel parry =
      MeasureModel::markov(g, {{1.0 / gr, 1.0 / (gr * gr)}, {1.0, 0.0}});
  MeasureModel d0 = MeasureModel::periodic(g, Word::from_string("0"));
  SeparatedFamily fam = separated_irregular_family(g, parry, d0, 60, 0.4, 20, 5);
  REQUIRE(fam.slots.size() == 1);

  Observable step = Observable::locally_constant(2, 1, {0.0, 1.0}, "step");
  PressureResult combinatorial = cylinder_pressure_estimate(g, fam, step);

  double sum = 0.0;
  std::uint64_t count = static_cast<std::uint64_t>(fam.slots[0].count);
  for (std::uint64_t c = 0; c < count; ++c) {
    Word m = fam.member(g, {c});
    double s = 0.0;
    for (std::int64_t i = 0; i + 1 <= static_cast<std::int64_t>(m.size()); ++i)
      s += step.eval(m, i);
    sum += std::exp(s);
  }
  double direct = std::log(sum) / 60.0;
  CHECK(combinatorial.value == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("scale roots: linear closed forms and the word-list variant") {
  ShiftSpace full2 = ShiftSpace::full(2);
  Observable one = Observable::locally_constant(2, 1, {1.0, 1.0}, "one");
  CHECK(bs_dimension(full2, one, 1e-9) ==
        doctest::Approx(std::log(2.0)).epsilon(5e-9));

  Observable c04 = Observable::locally_constant(2, 1, {0.4, 0.4}, "c04");
  CHECK(bs_dimension(full2, c04, 1e-9) ==
        doctest::Approx(std::log(2.0) / 0.4).epsilon(1e-8));

  CHECK(bs_dimension(golden(), one, 1e-9) ==
        doctest::Approx(kLogGolden).epsilon(5e-9));

  std::vector<Word> words = admissible_words(full2, 8);
  CHECK(words.size() == 256);
  CHECK(bs_dimension(full2, words, one, 1e-9, 8) ==
        doctest::Approx(std::log(2.0)).epsilon(5e-9));

  Observable touching_zero =
      Observable::locally_constant(2, 1, {1.0, 0.0}, "tz");
  CHECK_THROWS_AS(bs_dimension(full2, touching_zero, 1e-9), DomainError);
}

TEST_CASE("greedy separated word counts") {
  ShiftSpace full2 = ShiftSpace::full(2);
  // Separation 1 keeps every word.
  CHECK(separated_entropy_estimate(full2, 4, 0.25) ==
        doctest::Approx(std::log(16.0) / 4.0).epsilon(1e-12));
  // Distance-4 binary codes of length 8 reach 16 words (the greedy
  // lexicographic scan finds the extended Hamming code).
  CHECK(separated_entropy_estimate(full2, 8, 0.5) >=
        std::log(16.0) / 8.0 - 1e-12);
  // Separation 1 on the golden subshift counts all admissible words.
  double v = separated_entropy_estimate(golden(), 10, 0.1);
  CHECK(v == doctest::Approx(fib_log(12) / 10.0).epsilon(1e-12));
  CHECK(std::abs(v - kLogGolden) <= 0.1);

  CHECK_THROWS_AS(separated_entropy_estimate(full2, 30, 0.5), DomainError);
  CHECK_THROWS_AS(separated_entropy_estimate(full2, 8, 0.0), DomainError);
}

TEST_CASE("expansion-base entropy rows against exact word counts") {
  std::vector<std::int64_t> ns = {4, 8, 12};
  std::vector<BetaEntropyRow> rows = beta_entropy_estimate(BetaSpec::golden(), ns, 16);
  REQUIRE(rows.size() == ns.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const BetaEntropyRow& row = rows[i];
    CHECK(row.n == ns[i]);
    // The golden-base language has exactly the golden-subshift word counts.
    double expected = fib_log(row.n + 2) / static_cast<double>(row.n);
    CHECK(row.estimate == doctest::Approx(expected).epsilon(1e-12));
    CHECK(row.error_vs_log_beta ==
          doctest::Approx(expected - kLogGolden).epsilon(1e-9));
    CHECK(row.hausdorff_normalized ==
          doctest::Approx(expected / kLogGolden).epsilon(1e-9));
  }
  CHECK_THROWS_AS(beta_entropy_estimate(BetaSpec::golden(), {}, 16),
                  DomainError);
}
