#include "shiftlab/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "shiftlab/circle.hpp"
#include "shiftlab/measures.hpp"
#include "shiftlab/observables.hpp"
#include "shiftlab/pressure.hpp"
#include "shiftlab/shift_space.hpp"
#include "shiftlab/synthesis.hpp"

namespace shiftlab {

namespace {

// Collects requirements and measured facts for one check.
struct Checker {
  std::ostringstream facts;
  std::ostringstream failures;
  bool ok = true;
  bool first_fact = true;

  void note(const std::string& text) {
    if (!first_fact) facts << "; ";
    facts << text;
    first_fact = false;
  }
  void note(const std::string& name, double value) {
    std::ostringstream s;
    s.precision(10);
    s << name << "=" << value;
    note(s.str());
  }
  void require(bool cond, const std::string& what) {
    if (cond) return;
    ok = false;
    failures << (failures.tellp() > 0 ? "; " : "") << what;
  }
  std::string detail() const {
    if (ok) return facts.str();
    std::string f = facts.str();
    return "FAILED: " + failures.str() + (f.empty() ? "" : " | " + f);
  }
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

// Transfer pressure dominates entropy + integral over random compatible
// Markov chains, with equality at the tilted equilibrium chain.
void check_variational_dominance(Checker& c) {
  ShiftSpace golden = ShiftSpace::sft({{1, 1}, {1, 0}});
  Observable phi = Observable::locally_constant(2, 1, {0.0, 1.0}, "weight1");
  PressureResult pr = transfer_pressure(golden, phi);
  double closed_form = std::log((1.0 + std::sqrt(1.0 + 4.0 * std::exp(1.0))) / 2.0);
  c.note("pressure", pr.value);
  c.require(std::abs(pr.value - closed_form) <= 1e-9,
            "pressure " + fmt(pr.value) + " vs closed form " + fmt(closed_form));

  Rng rng(1u);
  double worst = -1.0;
  for (int t = 0; t < 10000; ++t) {
    double a = static_cast<double>(1 + rng.next_below(999998)) / 1000000.0;
    MeasureModel nu = MeasureModel::markov(golden, {{a, 1.0 - a}, {1.0, 0.0}});
    double lhs = nu.entropy_rate() + integrate(nu, phi);
    worst = std::max(worst, lhs - pr.value);
  }
  c.note("worst_excess", worst);
  c.require(worst <= 1e-9,
            "random chain exceeds pressure by " + fmt(worst));

  auto [eq, pr2] = equilibrium_markov(golden, phi);
  double gap = std::abs(eq.entropy_rate() + integrate(eq, phi) - pr.value);
  c.note("equilibrium_gap", gap);
  c.require(gap <= 1e-8, "equilibrium identity gap " + fmt(gap));
}

// Doubling-map demo: exact orbit integrals for sin/cos at the fixed point
// and the period-3 orbit, frequency-uniform witness gaps, and block-aligned
// divergence certificates for both trig observables at horizon 1e6, seed 42.
void check_doubling_trig_demo(Checker& c) {
  const double sin_ref = std::sqrt(7.0) / 6.0;
  const double cos_ref = -1.0 / 6.0;

  OrbitData fixed = rational_orbit(0, 1);
  double s0 = trig_integral_periodic(fixed, TrigKind::Sin, 1);
  double c0 = trig_integral_periodic(fixed, TrigKind::Cos, 1);
  c.require(std::abs(s0 - 0.0) <= 1e-9, "sin at fixed point " + fmt(s0));
  c.require(std::abs(c0 - 1.0) <= 1e-9, "cos at fixed point " + fmt(c0));

  OrbitData seventh = rational_orbit(1, 7);
  double s1 = trig_integral_periodic(seventh, TrigKind::Sin, 1);
  double c1 = trig_integral_periodic(seventh, TrigKind::Cos, 1);
  c.note("orbit_sin", s1);
  c.note("orbit_cos", c1);
  c.require(std::abs(s1 - sin_ref) <= 1e-9, "period-3 sin integral " + fmt(s1));
  c.require(std::abs(c1 - cos_ref) <= 1e-9, "period-3 cos integral " + fmt(c1));

  DemoReport rep = doubling_demo_report(1000000, 42);
  for (const FrequencyWitness& fw : rep.frequencies) {
    c.require(std::abs(fw.sin_gap - sin_ref) <= 1e-9,
              "frequency m=" + std::to_string(fw.m) + " sin gap " + fmt(fw.sin_gap));
    c.require(std::abs(fw.cos_gap - (1.0 - cos_ref)) <= 1e-9,
              "frequency m=" + std::to_string(fw.m) + " cos gap " + fmt(fw.cos_gap));
  }
  c.note("sin_cert_gap", rep.sin_certificate.gap);
  c.note("cos_cert_gap", rep.cos_certificate.gap);
  c.require(std::abs(rep.sin_certificate.gap - 0.440959) <= 0.02,
            "sin certificate gap " + fmt(rep.sin_certificate.gap));
  c.require(std::abs(rep.cos_certificate.gap - 7.0 / 6.0) <= 0.02,
            "cos certificate gap " + fmt(rep.cos_certificate.gap));
}

// Two observables, one point, both divergence certificates at once.
void check_joint_certificates(Checker& c) {
  ShiftSpace full2 = ShiftSpace::full(2);
  Observable phi1 = Observable::indicator(2, Word::from_string("1"), "ind[1]");
  Observable phi2 =
      Observable::locally_constant(2, 2, {1.0, 0.0, 0.0, 1.0}, "ind[eq]");

  MeasureModel d0 = MeasureModel::periodic(full2, Word::from_string("0"));
  MeasureModel d1 = MeasureModel::periodic(full2, Word::from_string("1"));
  MeasureModel p01 = MeasureModel::periodic(full2, Word::from_string("01"));

  // Factor 5 keeps six blocks inside the horizon while the first block is
  // long enough to carry mixture statistics at the certificate depth.
  ScheduleSpec sched = ScheduleSpec::geometric_sum(100, 5.0, 1000000);
  BuiltPoint built = build_jointly_irregular_point(
      full2, {phi1, phi2}, {{d0, d1}, {p01, d0}}, sched, 42);

  c.require(built.certificates.size() == 2,
            "expected 2 certificates, got " +
                std::to_string(built.certificates.size()));
  for (const Certificate& cert : built.certificates) {
    c.note("gap[" + cert.observable_id + "]", cert.gap);
    c.require(cert.gap >= 0.3, "certificate gap for " + cert.observable_id +
                                   " is " + fmt(cert.gap));
  }
}

// Separated families carry most of the entropy and of the partition sum:
// rate >= 0.8 ln g - 0.02 at free fraction 0.8, weighted rate >= 0.8 P - 0.05,
// and rates grow with the free fraction.
void check_family_pressure_proxy(Checker& c) {
  ShiftSpace golden = ShiftSpace::sft({{1, 1}, {1, 0}});
  double g = (1.0 + std::sqrt(5.0)) / 2.0;
  MeasureModel parry = MeasureModel::markov(
      golden, {{1.0 / g, 1.0 / (g * g)}, {1.0, 0.0}});
  MeasureModel d0 = MeasureModel::periodic(golden, Word::from_string("0"));

  const std::int64_t n = 2000;
  const int block = 20;
  std::vector<double> fractions = {0.5, 0.65, 0.8};
  std::vector<double> rates;
  SeparatedFamily last{};
  for (double ff : fractions) {
    SeparatedFamily fam =
        separated_irregular_family(golden, parry, d0, n, ff, block, 42);
    rates.push_back(fam.rate);
    c.note("rate[" + fmt(ff) + "]", fam.rate);
    if (ff == 0.8) last = fam;
  }
  c.require(rates[0] < rates[1] && rates[1] < rates[2],
            "rates not increasing across free fractions");

  double floor_rate = 0.8 * std::log(g) - 0.02;
  c.require(rates[2] >= floor_rate,
            "rate " + fmt(rates[2]) + " below " + fmt(floor_rate));

  Observable phi = Observable::locally_constant(2, 1, {0.0, 1.0}, "weight1");
  PressureResult full_p = transfer_pressure(golden, phi);
  PressureResult fam_p = cylinder_pressure_estimate(golden, last, phi);
  double floor_weighted = 0.8 * full_p.value - 0.05;
  c.note("weighted_rate", fam_p.value);
  c.require(fam_p.value >= floor_weighted,
            "weighted rate " + fmt(fam_p.value) + " below " + fmt(floor_weighted));
}

// Golden-base kneading digits are exact, and word-count entropy estimates
// for base 1.8 tighten monotonically toward ln 1.8.
void check_beta_entropy(Checker& c) {
  KneadingResult kn = beta_kneading(BetaSpec::golden(), 8);
  Word expected = Word::from_string("11000000");
  bool digits_ok = kn.digits.size() == expected.size();
  for (std::size_t i = 0; digits_ok && i < expected.size(); ++i)
    digits_ok = kn.digits[i] == expected[i];
  c.require(digits_ok, "golden kneading digits differ from 1,1,0,0,...");
  c.require(kn.eventually_zero, "golden expansion should terminate");

  auto rows = beta_entropy_estimate(BetaSpec::from_decimal("1.8"),
                                    {8, 12, 16, 20});
  c.require(rows.size() == 4, "expected 4 rows");
  for (std::size_t i = 1; i < rows.size(); ++i)
    c.require(std::abs(rows[i].error_vs_log_beta) <
                  std::abs(rows[i - 1].error_vs_log_beta),
              "error not strictly decreasing at n=" + std::to_string(rows[i].n));
  const BetaEntropyRow& final_row = rows.back();
  c.note("error_n20", final_row.error_vs_log_beta);
  c.note("hausdorff_n20", final_row.hausdorff_normalized);
  c.require(std::abs(final_row.error_vs_log_beta) <= 0.08,
            "n=20 error " + fmt(final_row.error_vs_log_beta));
  c.require(std::abs(final_row.hausdorff_normalized - 1.0) <= 0.15,
            "n=20 normalized value " + fmt(final_row.hausdorff_normalized));
}

// Bisection on the pressure equation recovers the closed-form root of
// u^2 + u = 1 and the exact ratio for constant weights.
void check_bowen_root(Checker& c) {
  ShiftSpace full2 = ShiftSpace::full(2);
  Observable two_scales =
      Observable::locally_constant(2, 1, {1.0, 2.0}, "scales12");
  double s = bs_dimension(full2, two_scales, 1e-9);
  double closed_form = std::log((1.0 + std::sqrt(5.0)) / 2.0);
  c.note("root", s);
  c.require(std::abs(s - closed_form) <= 1e-6,
            "root " + fmt(s) + " vs " + fmt(closed_form));

  for (double cv : {0.5, 1.0, 2.0}) {
    Observable constE =
        Observable::locally_constant(2, 1, {cv, cv}, "const" + fmt(cv));
    double sc = bs_dimension(full2, constE, 1e-9);
    double want = std::log(2.0) / cv;
    c.require(std::abs(sc - want) <= 1e-8,
              "constant weight " + fmt(cv) + " root " + fmt(sc) + " vs " +
                  fmt(want));
  }
}

// Coboundaries stay pinned to their constant (no certificate at any
// tolerance tried, averages within 2 sup|h| / n), while a swept mixture
// point keeps one observable regular and the other oscillating.
void check_regular_irregular_dichotomy(Checker& c) {
  ShiftSpace full2 = ShiftSpace::full(2);
  MeasureModel d0 = MeasureModel::periodic(full2, Word::from_string("0"));
  MeasureModel d1 = MeasureModel::periodic(full2, Word::from_string("1"));
  ScheduleSpec sched = ScheduleSpec::geometric_sum(10, 9.0, 1000000);

  Observable h =
      Observable::locally_constant(2, 2, {0.3, -0.2, 0.5, 0.1}, "h");
  const double constant = 0.25;
  Observable cob = Observable::coboundary(h, constant, "cob");

  BuiltPoint built = build_irregular_point(full2, d0, d1, sched, 42);
  std::vector<std::int64_t> ends = built.plan.complete_block_ends();
  std::vector<std::int64_t> cps = geometric_checkpoints(1000000, 1.5);
  cps.insert(cps.end(), ends.begin(), ends.end());
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());

  BirkhoffTrace cob_trace = birkhoff_averages(built.point, cob, cps);
  double bound_factor = 2.0 * h.sup_bound();
  double worst_scaled = 0.0;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    double dev = std::abs(cob_trace.averages[i] - constant);
    double bound = bound_factor / static_cast<double>(cps[i]);
    worst_scaled = std::max(worst_scaled, dev - bound);
  }
  c.note("worst_cob_excess", worst_scaled);
  c.require(worst_scaled <= 0.0,
            "coboundary average exceeds telescoping bound by " +
                fmt(worst_scaled));
  for (double tol : {0.005, 0.01, 0.0266, 0.05}) {
    c.require(!irregularity_certificate(cob_trace, tol).has_value(),
              "coboundary certified at tol " + fmt(tol));
    c.require(!certificate_from_plan(built.plan, cob_trace, tol).has_value(),
              "coboundary block-certified at tol " + fmt(tol));
  }

  BuiltPoint swept = build_saturated_point(full2, {d0, d1}, sched, 42);
  Observable phi = Observable::first_symbol(2, "first");
  Observable psi =
      Observable::locally_constant(2, 2, {1.0, 0.0, 0.0, 1.0}, "ind[eq]");
  std::vector<std::int64_t> ends2 = swept.plan.complete_block_ends();
  c.require(ends2.size() >= 6, "swept plan has fewer than 6 complete blocks");
  std::vector<std::int64_t> cps2 = geometric_checkpoints(1000000, 1.5);
  cps2.insert(cps2.end(), ends2.begin(), ends2.end());
  std::sort(cps2.begin(), cps2.end());
  cps2.erase(std::unique(cps2.begin(), cps2.end()), cps2.end());

  BirkhoffTrace phi_trace = birkhoff_averages(swept.point, phi, cps2);
  BirkhoffTrace psi_trace = birkhoff_averages(swept.point, psi, cps2);
  std::int64_t block3 = ends2[2];
  double psi_worst = 0.0;
  bool low_hit = false, high_hit = false;
  for (std::size_t i = 0; i < cps2.size(); ++i) {
    if (cps2[i] >= block3)
      psi_worst = std::max(psi_worst, std::abs(psi_trace.averages[i] - 1.0));
    if (phi_trace.averages[i] <= 0.1) low_hit = true;
    if (phi_trace.averages[i] >= 0.9) high_hit = true;
  }
  c.note("psi_worst_past_block3", psi_worst);
  c.require(psi_worst <= 0.02,
            "regular observable drifts " + fmt(psi_worst) + " from 1");
  c.require(low_hit, "swept averages never enter [0, 0.1]");
  c.require(high_hit, "swept averages never enter [0.9, 1]");
}

// Round-robin point revisits every target within per-block tolerance and
// covers all depth-8 cylinders at least 3 times in 1e7 symbols.
void check_oscillation_coverage(Checker& c) {
  ShiftSpace full2 = ShiftSpace::full(2);
  MeasureModel d0 = MeasureModel::periodic(full2, Word::from_string("0"));
  MeasureModel d1 = MeasureModel::periodic(full2, Word::from_string("1"));
  MeasureModel fair = MeasureModel::bernoulli(full2, {0.5, 0.5});
  ScheduleSpec sched = ScheduleSpec::geometric_sum(3000, 1.5, 10000000);

  BuiltPoint built =
      build_maximal_oscillation_point(full2, {d0, d1, fair}, sched, 42);

  std::vector<int> visits(3, 0);
  int complete = 0;
  double worst_margin = -1.0;
  for (const PlanBlock& b : built.plan.blocks) {
    if (!b.complete) continue;
    ++complete;
    visits[static_cast<std::size_t>(b.target % 3)]++;
    worst_margin = std::max(worst_margin, b.deviation - b.tol);
  }
  c.note("complete_blocks", complete);
  c.note("worst_deviation_margin", worst_margin);
  c.require(complete >= 9, "fewer than 9 complete blocks");
  for (int t = 0; t < 3; ++t)
    c.require(visits[static_cast<std::size_t>(t)] >= 3,
              "target " + std::to_string(t) + " visited " +
                  std::to_string(visits[static_cast<std::size_t>(t)]) +
                  " times");
  c.require(worst_margin <= 0.0, "a block misses its tolerance by " +
                                     fmt(worst_margin));

  const std::int64_t horizon = 10000000;
  Word w = built.point.materialize(horizon);
  std::vector<std::int64_t> counts(256, 0);
  unsigned idx = 0;
  for (std::int64_t i = 0; i < horizon; ++i) {
    idx = ((idx << 1) | (w[static_cast<std::size_t>(i)] & 1u)) & 255u;
    if (i >= 7) counts[idx]++;
  }
  std::int64_t min_count = counts[0];
  for (std::int64_t v : counts) min_count = std::min(min_count, v);
  c.note("min_cylinder_count", static_cast<double>(min_count));
  c.require(min_count >= 3, "a depth-8 cylinder appears " +
                                std::to_string(min_count) + " times");
}

// Library counting, integration, and empirical statistics agree exactly
// with direct enumeration.
void check_brute_force_equivalence(Checker& c) {
  // Word counts vs matrix powers.
  ShiftSpace golden = ShiftSpace::sft({{1, 1}, {1, 0}});
  ShiftSpace full2 = ShiftSpace::full(2);
  ShiftSpace full3 = ShiftSpace::full(3);
  for (int n = 1; n <= 12; ++n) {
    // Entry sum of [[1,1],[1,0]]^(n-1) is the Fibonacci number F(n+2)
    // (F(1)=F(2)=1), the admissible word count of the golden graph.
    BigInt f1{1}, f2{1};
    for (int i = 3; i <= n + 2; ++i) {
      BigInt t = f1 + f2;
      f1 = f2;
      f2 = t;
    }
    c.require(golden.count_words(n) == f2,
              "golden word count mismatch at n=" + std::to_string(n));
    BigInt p2{1}, p3{1};
    for (int i = 0; i < n; ++i) {
      p2 *= 2;
      p3 *= 3;
    }
    c.require(full2.count_words(n) == p2,
              "binary word count mismatch at n=" + std::to_string(n));
    c.require(full3.count_words(n) == p3,
              "ternary word count mismatch at n=" + std::to_string(n));
  }

  // Integration vs exhaustive cylinder sums, exact arithmetic.
  double g = (1.0 + std::sqrt(5.0)) / 2.0;
  MeasureModel parry = MeasureModel::markov(
      golden, {{1.0 / g, 1.0 / (g * g)}, {1.0, 0.0}});
  Observable phi3 = Observable::locally_constant(
      2, 3, {0.1, -0.4, 0.2, 0.0, 0.7, -0.1, 0.3, 0.05}, "r3");
  BigRational direct = 0;
  for (int bits = 0; bits < 8; ++bits) {
    Word w(std::vector<Symbol>{static_cast<Symbol>((bits >> 2) & 1),
                               static_cast<Symbol>((bits >> 1) & 1),
                               static_cast<Symbol>(bits & 1)});
    if (!golden.is_admissible(w)) continue;
    direct += parry.cylinder_probability_exact(w) *
              BigRational(phi3.table()[static_cast<std::size_t>(bits)]);
  }
  c.require(integrate_exact(parry, phi3) == direct,
            "range-3 integral differs from exhaustive sum");

  MeasureModel bern = MeasureModel::bernoulli(full2, {0.3, 0.7});
  Observable phi4 = Observable::locally_constant(
      2, 4,
      {0.5, -1.0, 0.25, 0.0, 1.5, -0.5, 0.75, 0.1, -0.25, 0.6, -0.9, 0.2, 0.8,
       -0.3, 0.05, 1.0},
      "r4");
  BigRational direct4 = 0;
  for (int bits = 0; bits < 16; ++bits) {
    Word w(std::vector<Symbol>{static_cast<Symbol>((bits >> 3) & 1),
                               static_cast<Symbol>((bits >> 2) & 1),
                               static_cast<Symbol>((bits >> 1) & 1),
                               static_cast<Symbol>(bits & 1)});
    direct4 += bern.cylinder_probability_exact(w) *
               BigRational(phi4.table()[static_cast<std::size_t>(bits)]);
  }
  c.require(integrate_exact(bern, phi4) == direct4,
            "range-4 integral differs from exhaustive sum");

  // Empirical distribution vs direct window counting.
  Rng rng(7u);
  Word sample = bern.sample_word(2000, rng);
  const int depth = 3;
  CylinderDistribution emp = empirical_distribution(sample, depth, 2);
  std::vector<std::int64_t> counts(8, 0);
  for (std::size_t i = 0; i + depth <= sample.size(); ++i) {
    unsigned idx = 0;
    for (int j = 0; j < depth; ++j)
      idx = (idx << 1) | (sample[i + static_cast<std::size_t>(j)] & 1u);
    counts[idx]++;
  }
  std::int64_t windows = static_cast<std::int64_t>(sample.size()) - depth + 1;
  bool emp_ok = true;
  for (int idx = 0; idx < 8; ++idx) {
    Word w(std::vector<Symbol>{static_cast<Symbol>((idx >> 2) & 1),
                               static_cast<Symbol>((idx >> 1) & 1),
                               static_cast<Symbol>(idx & 1)});
    double direct_freq = static_cast<double>(counts[static_cast<std::size_t>(idx)]) /
                         static_cast<double>(windows);
    if (emp.prob(w) != direct_freq) emp_ok = false;
  }
  c.require(emp_ok, "empirical distribution differs from window counts");
  c.note("all exact comparisons passed");
}

struct CheckEntry {
  const char* id;
  void (*fn)(Checker&);
};

const CheckEntry kChecks[] = {
    {"variational-dominance", check_variational_dominance},
    {"doubling-trig-demo", check_doubling_trig_demo},
    {"joint-certificates", check_joint_certificates},
    {"family-pressure-proxy", check_family_pressure_proxy},
    {"beta-entropy", check_beta_entropy},
    {"bowen-root", check_bowen_root},
    {"regular-irregular-dichotomy", check_regular_irregular_dichotomy},
    {"oscillation-coverage", check_oscillation_coverage},
    {"brute-force-equivalence", check_brute_force_equivalence},
};

}  // namespace

std::vector<std::string> all_check_ids() {
  std::vector<std::string> ids;
  for (const CheckEntry& e : kChecks) ids.emplace_back(e.id);
  return ids;
}

CheckResult run_check(const std::string& id) {
  for (const CheckEntry& e : kChecks) {
    if (id != e.id) continue;
    CheckResult result;
    result.id = id;
    auto start = std::chrono::steady_clock::now();
    Checker checker;
    try {
      e.fn(checker);
      result.pass = checker.ok;
      result.detail = checker.detail();
    } catch (const std::exception& ex) {
      result.pass = false;
      result.detail = std::string("exception: ") + ex.what();
    }
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return result;
  }
  throw DomainError("unknown check id '" + id + "'");
}

std::vector<CheckResult> run_all_checks() {
  std::vector<CheckResult> results;
  for (const CheckEntry& e : kChecks) results.push_back(run_check(e.id));
  return results;
}

}  // namespace shiftlab
