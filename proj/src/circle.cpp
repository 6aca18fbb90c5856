#include "shiftlab/circle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "shiftlab/measures.hpp"

namespace shiftlab {

namespace {

constexpr std::int64_t kMaxDenominator = 1000000;
constexpr long double kTwoPi = 6.283185307179586476925286766559L;

void validate_fraction(std::int64_t p, std::int64_t q) {
  if (q < 1) throw DomainError("fraction: denominator must be >= 1");
  if (q > kMaxDenominator)
    throw DomainError("fraction: denominator capped at 1000000");
  if (p < 0 || p >= q)
    throw DomainError("fraction: numerator must lie in [0, q)");
  if (std::gcd(p, q) != 1)
    throw DomainError("fraction: must be in lowest terms");
}

RationalPoint reduced(std::int64_t p, std::int64_t q) {
  const std::int64_t g = std::gcd(p, q);
  return RationalPoint{p / (g == 0 ? 1 : g), q / (g == 0 ? 1 : g)};
}

void validate_frequency(int m) {
  if (m < 1 || m > 1000000)
    throw DomainError("trig frequency must lie in [1, 1000000]");
}

double trig_of_fraction(TrigKind kind, int m, std::int64_t p, std::int64_t q) {
  // Angle 2*pi*m*p/q reduced exactly mod 1 before any floating point.
  const std::int64_t u = ((m % q) * p) % q;
  const long double arg =
      kTwoPi * static_cast<long double>(u) / static_cast<long double>(q);
  return static_cast<double>(kind == TrigKind::Sin ? std::sin(arg)
                                                   : std::cos(arg));
}

}  // namespace

OrbitData rational_orbit(std::int64_t p, std::int64_t q) {
  validate_fraction(p, q);
  std::unordered_map<std::int64_t, std::size_t> seen;
  std::vector<std::int64_t> nums;
  std::int64_t r = p;
  while (seen.find(r) == seen.end()) {
    seen.emplace(r, nums.size());
    nums.push_back(r);
    r = (2 * r) % q;
  }
  const std::size_t start = seen[r];
  OrbitData orbit;
  for (std::size_t i = 0; i < nums.size(); ++i) {
    RationalPoint rp = reduced(nums[i], q);
    if (i < start)
      orbit.preperiod.push_back(rp);
    else
      orbit.cycle.push_back(rp);
  }
  return orbit;
}

SymbolicPoint symbolic_encoding(std::int64_t p, std::int64_t q) {
  OrbitData orbit = rational_orbit(p, q);
  auto bit = [](const RationalPoint& rp) {
    return static_cast<Symbol>(2 * rp.p >= rp.q ? 1 : 0);
  };
  std::vector<Symbol> prefix, cycle;
  for (const RationalPoint& rp : orbit.preperiod) prefix.push_back(bit(rp));
  for (const RationalPoint& rp : orbit.cycle) cycle.push_back(bit(rp));
  return SymbolicPoint::periodic(Word(std::move(prefix)),
                                 Word(std::move(cycle)));
}

CirclePoint CirclePoint::rational(std::int64_t p, std::int64_t q) {
  validate_fraction(p, q);
  CirclePoint c;
  c.rational_ = true;
  c.p_ = p;
  c.q_ = q;
  return c;
}

CirclePoint CirclePoint::bit_backed(SymbolicPoint point, int guard_bits) {
  if (guard_bits < 64)
    throw DomainError("bit-backed point needs at least 64 guard bits");
  CirclePoint c;
  c.rational_ = false;
  c.point_ = std::move(point);
  c.guard_bits_ = guard_bits;
  return c;
}

double evaluate_trig_along(const CirclePoint& x, TrigKind kind, int frequency,
                           std::int64_t j) {
  validate_frequency(frequency);
  if (j < 0) throw DomainError("iterate index must be >= 0");

  if (x.is_rational()) {
    // f^j(p/q) has numerator 2^j * p mod q, computed by modular squaring.
    const std::int64_t q = x.q();
    std::int64_t base = 2 % q;
    std::int64_t pw = 1 % q;
    std::int64_t e = j;
    while (e > 0) {
      if (e & 1) pw = (pw * base) % q;
      base = (base * base) % q;
      e >>= 1;
    }
    const std::int64_t r = (pw * (x.p() % q)) % q;
    return trig_of_fraction(kind, frequency, r, q);
  }

  const int use = std::min(x.guard_bits(), 64);
  Word w = x.point().materialize(j + use);
  long double t = 0.0L;
  for (int i = use - 1; i >= 0; --i) {
    const Symbol s = w[static_cast<std::size_t>(j + i)];
    if (s > 1)
      throw DomainError("bit-backed point must have binary symbols");
    t = (t + static_cast<long double>(s)) * 0.5L;
  }
  long double mt = t * static_cast<long double>(frequency);
  mt -= std::floor(mt);
  const long double arg = kTwoPi * mt;
  return static_cast<double>(kind == TrigKind::Sin ? std::sin(arg)
                                                   : std::cos(arg));
}

double trig_integral_periodic(const OrbitData& orbit, TrigKind kind,
                              int frequency) {
  validate_frequency(frequency);
  if (orbit.cycle.empty())
    throw DomainError("cycle integral needs a nonempty cycle");
  long double acc = 0.0L;
  for (const RationalPoint& rp : orbit.cycle)
    acc += trig_of_fraction(kind, frequency, rp.p, rp.q);
  return static_cast<double>(acc /
                             static_cast<long double>(orbit.cycle.size()));
}

namespace {

// Prefix means of sin/cos(2*pi*m*x) along the doubling orbit carried by a
// binary word: the angle at step j reads the next `use` bits as a binary
// fraction, exactly as the bit-backed evaluation path does.
BirkhoffTrace trig_trace_on_word(const Word& w, TrigKind kind, int frequency,
                                 int use, std::string id,
                                 const std::vector<std::int64_t>& checkpoints) {
  if (checkpoints.empty())
    throw InternalError("demo trace: no checkpoints");
  if (static_cast<std::int64_t>(w.size()) < checkpoints.back() + use)
    throw InternalError("demo trace: word lacks read-ahead bits");
  BirkhoffTrace trace;
  trace.observable_id = std::move(id);
  trace.checkpoints = checkpoints;
  trace.averages.reserve(checkpoints.size());
  long double sum = 0.0L;
  std::size_t next = 0;
  for (std::int64_t j = 0; j < checkpoints.back(); ++j) {
    long double t = 0.0L;
    for (int i = use - 1; i >= 0; --i) {
      t = (t + static_cast<long double>(
                   w[static_cast<std::size_t>(j + i)])) *
          0.5L;
    }
    long double mt = t * static_cast<long double>(frequency);
    mt -= std::floor(mt);
    const long double arg = kTwoPi * mt;
    sum += (kind == TrigKind::Sin ? std::sin(arg) : std::cos(arg));
    if (j + 1 == checkpoints[next]) {
      trace.averages.push_back(
          static_cast<double>(sum / static_cast<long double>(j + 1)));
      ++next;
    }
  }
  return trace;
}

}  // namespace

DemoReport doubling_demo_report(std::int64_t horizon, std::uint64_t seed) {
  if (horizon < 100000)
    throw DomainError("demo report: horizon must be >= 100000");

  std::vector<FrequencyWitness> freqs;
  for (int m = 1; m <= 8; ++m) {
    OrbitData orbit = rational_orbit(1, 7 * m);
    FrequencyWitness fw;
    fw.m = m;
    fw.sin_integral = trig_integral_periodic(orbit, TrigKind::Sin, m);
    fw.cos_integral = trig_integral_periodic(orbit, TrigKind::Cos, m);
    fw.sin_gap = std::abs(0.0 - fw.sin_integral);
    fw.cos_gap = std::abs(1.0 - fw.cos_integral);
    freqs.push_back(fw);
  }

  ShiftSpace shift = ShiftSpace::full(2);
  MeasureModel fixed_zero =
      MeasureModel::periodic(shift, Word::from_string("0"));
  MeasureModel cycle001 =
      MeasureModel::periodic(shift, Word::from_string("001"));
  // First block long enough that the read-ahead guard bits spilling across
  // block boundaries stay a vanishing fraction of every certified block.
  ScheduleSpec sched = ScheduleSpec::geometric_sum(100, 3.0, horizon);
  BuiltPoint built =
      build_irregular_point(shift, fixed_zero, cycle001, sched, seed, false);

  const std::vector<std::int64_t> ends = built.plan.complete_block_ends();
  if (ends.size() < 6)
    throw DomainError(
        "demo report: horizon yields fewer than six complete blocks");
  std::vector<std::int64_t> cps = geometric_checkpoints(horizon, 1.5);
  cps.insert(cps.end(), ends.begin(), ends.end());
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());

  // Effective angular precision of the bit-backed evaluation path.
  const int use = 64;
  const Word w = built.point.materialize(horizon + use);
  const Observable sin1 = Observable::trig(TrigKind::Sin, 1);
  const Observable cos1 = Observable::trig(TrigKind::Cos, 1);
  BirkhoffTrace sin_trace =
      trig_trace_on_word(w, TrigKind::Sin, 1, use, sin1.id(), cps);
  BirkhoffTrace cos_trace =
      trig_trace_on_word(w, TrigKind::Cos, 1, use, cos1.id(), cps);

  // Loosest block tolerance inside the three-blocks-per-side window.
  double tol = 0.0;
  for (std::size_t j = ends.size() - 5; j <= ends.size(); ++j)
    tol = std::max(tol, sched.tol(static_cast<int>(j)));

  std::optional<Certificate> sin_cert =
      certificate_from_plan(built.plan, sin_trace, tol);
  std::optional<Certificate> cos_cert =
      certificate_from_plan(built.plan, cos_trace, tol);
  if (!sin_cert || !cos_cert)
    throw InternalError("demo report: trig traces failed to certify");
  verify_plan_certificate(built.plan, sin_trace, *sin_cert);
  verify_plan_certificate(built.plan, cos_trace, *cos_cert);

  return DemoReport{std::move(freqs),     std::move(built),
                    std::move(sin_trace), std::move(cos_trace),
                    std::move(*sin_cert), std::move(*cos_cert),
                    tol,                  horizon,
                    seed};
}

}  // namespace shiftlab
