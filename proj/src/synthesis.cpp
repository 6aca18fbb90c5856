#include "shiftlab/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace shiftlab {

namespace {

constexpr int kMaxBlocks = 80;  // lengths at least double, so this covers
                                // any horizon below 2^63 symbols

// How many leading symbols of `next` constrain appendability. Full shifts
// accept everything; SFTs look one symbol ahead; beta-shifts need the
// kneading window (the walker state is intrinsic to the last N-1 symbols).
std::size_t probe_length(const ShiftSpace& space, const Word& next) {
  switch (space.kind()) {
    case SpaceKind::Full:
      return 0;
    case SpaceKind::Sft:
      return std::min<std::size_t>(next.size(), 1);
    case SpaceKind::Beta:
      return std::min(next.size(), space.kneading().size());
  }
  throw InternalError("probe_length: unknown space kind");
}

}  // namespace

ScheduleSpec ScheduleSpec::accelerating(std::int64_t initial_length,
                                        std::int64_t horizon) {
  ScheduleSpec s;
  s.initial_length = initial_length;
  s.growth = Growth::Accelerating;
  s.horizon = horizon;
  return s;
}

ScheduleSpec ScheduleSpec::geometric_sum(std::int64_t initial_length,
                                         double factor, std::int64_t horizon) {
  ScheduleSpec s;
  s.initial_length = initial_length;
  s.growth = Growth::GeometricSum;
  s.factor = factor;
  s.horizon = horizon;
  return s;
}

ScheduleSpec ScheduleSpec::explicit_lengths(std::vector<std::int64_t> lengths) {
  ScheduleSpec s;
  s.growth = Growth::Explicit;
  s.lengths = std::move(lengths);
  s.initial_length = s.lengths.empty() ? 0 : s.lengths.front();
  s.horizon = 0;
  for (std::int64_t l : s.lengths) s.horizon += l;
  return s;
}

std::int64_t ScheduleSpec::block_length(int j, std::int64_t prev,
                                        std::int64_t sum) const {
  if (j < 1) throw DomainError("schedule: block index must be >= 1");
  switch (growth) {
    case Growth::Accelerating:
      if (j == 1) return initial_length;
      return std::max(2 * prev, static_cast<std::int64_t>(j - 1) * sum);
    case Growth::GeometricSum: {
      if (j == 1) return initial_length;
      double l = factor * static_cast<double>(sum);
      return static_cast<std::int64_t>(std::llround(l));
    }
    case Growth::Explicit:
      if (j > static_cast<int>(lengths.size())) return 0;
      return lengths[static_cast<std::size_t>(j - 1)];
  }
  throw InternalError("schedule: unknown growth rule");
}

double ScheduleSpec::tol(int j) const {
  if (j < 1) throw DomainError("schedule: block index must be >= 1");
  return std::max(tol_initial * std::pow(tol_decay, j), tol_floor);
}

void ScheduleSpec::validate() const {
  if (growth != Growth::Explicit && initial_length < 1)
    throw DomainError("schedule: initial length must be >= 1");
  if (growth == Growth::GeometricSum && !(factor > 1.0))
    throw DomainError("schedule: geometric-sum factor must exceed 1");
  if (growth == Growth::Explicit) {
    if (lengths.empty()) throw DomainError("schedule: empty length list");
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      if (lengths[i] < 1) throw DomainError("schedule: block length < 1");
      if (i >= 1 && lengths[i] <= lengths[i - 1])
        throw DomainError("schedule: lengths must strictly increase");
      if (i >= 2 && lengths[i] < sum)
        throw DomainError(
            "schedule: block length must dominate the sum of its "
            "predecessors");
      sum += lengths[i];
    }
  }
  if (horizon < 1) throw DomainError("schedule: horizon must be >= 1");
  if (!(tol_initial > 0.0) || !(tol_decay > 0.0) || tol_decay > 1.0 ||
      !(tol_floor > 0.0))
    throw DomainError("schedule: tolerance parameters out of range");
  if (cert_depth < 1 || cert_depth > 12)
    throw DomainError("schedule: certificate depth out of range");
  if (max_gap < 0) throw DomainError("schedule: max_gap must be >= 0");
}

std::vector<std::int64_t> GluePlan::complete_block_ends() const {
  std::vector<std::int64_t> ends;
  for (const PlanBlock& b : blocks)
    if (b.complete) ends.push_back(b.end);
  return ends;
}

int feasible_depth(const MeasureModel& mu, std::int64_t n, int requested) {
  int d = static_cast<int>(
      std::min<std::int64_t>(requested, std::max<std::int64_t>(1, n)));
  if (mu.is_deterministic()) return std::max(1, d);
  const std::int64_t k = mu.alphabet();
  auto needs = [&](int depth) {
    std::int64_t cells = 1;
    for (int i = 0; i < depth; ++i) {
      cells *= k;
      if (cells > n) return n + 1;  // already infeasible
    }
    return 50 * cells;
  };
  while (d > 1 && needs(d) > n) --d;
  return d;
}

namespace {

// Mixture segments concatenate per-component samples (largest-remainder
// apportionment) joined by bridges, then trim to the exact length.
Word draw_segment(const ShiftSpace& space, const MeasureModel& mu,
                  std::int64_t n, Rng& rng) {
  if (mu.kind() != MeasureModel::Kind::Mixture) return mu.sample_word(n, rng);

  const auto& parts = mu.components();
  std::vector<std::int64_t> sub(parts.size(), 0);
  std::vector<std::pair<double, std::size_t>> frac;
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    double exact = parts[i].first * static_cast<double>(n);
    sub[i] = static_cast<std::int64_t>(std::floor(exact));
    assigned += sub[i];
    frac.emplace_back(exact - std::floor(exact), i);
  }
  std::sort(frac.begin(), frac.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t t = 0; assigned < n; ++t, ++assigned) {
    sub[frac[t % frac.size()].second] += 1;
  }

  Word out;
  SpaceWalker walker(space);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (sub[i] == 0) continue;
    Word piece = parts[i].second.sample_word(sub[i], rng);
    if (!out.empty()) {
      Word gap = space.bridge_from(walker.key(), piece, 64);
      if (!walker.try_append(gap))
        throw InternalError("mixture segment: bridge not admissible");
      out.append(gap);
    }
    if (!walker.try_append(piece))
      throw InternalError("mixture segment: component not admissible");
    out.append(piece);
  }
  if (static_cast<std::int64_t>(out.size()) > n) out = out.sub(0, n);
  return out;
}

}  // namespace

SegmentResult generic_segment(const ShiftSpace& space, const MeasureModel& mu,
                              std::int64_t n, int depth, double tol, Rng rng,
                              int max_retries) {
  if (n < 1) throw DomainError("segment: length must be >= 1");
  if (depth < 1) throw DomainError("segment: depth must be >= 1");
  if (!(tol > 0.0)) throw DomainError("segment: tolerance must be positive");
  if (max_retries < 1) throw DomainError("segment: retry budget must be >= 1");
  if (mu.alphabet() != space.alphabet_size())
    throw DomainError("segment: measure alphabet differs from the space");
  if (n < depth)
    throw DomainError("segment: length shorter than the statistics depth");
  const bool deterministic = mu.is_deterministic();
  if (!deterministic) {
    std::int64_t cells = 1;
    bool feasible = true;
    for (int i = 0; i < depth; ++i) {
      cells *= mu.alphabet();
      if (50 * cells > n) {
        feasible = false;
        break;
      }
    }
    if (!feasible)
      throw DomainError(
          "segment: length " + std::to_string(n) +
          " too short to hold depth-" + std::to_string(depth) +
          " statistics (need n >= 50*k^depth)");
  }

  const CylinderDistribution target = model_distribution(mu, depth);
  const int attempts = deterministic ? 1 : max_retries;
  double best_dev = std::numeric_limits<double>::infinity();
  Word best;
  for (int t = 0; t < attempts; ++t) {
    Rng attempt_rng = rng.fork(static_cast<std::uint64_t>(t));
    Word w = draw_segment(space, mu, n, attempt_rng);
    double dev = weakstar_distance(
        empirical_distribution(w, depth, mu.alphabet()), target, depth);
    if (dev < best_dev) {
      best_dev = dev;
      best = std::move(w);
    }
    if (best_dev <= tol) {
      SegmentResult res;
      res.word = std::move(best);
      res.deviation = best_dev;
      res.depth = depth;
      res.retries = t;
      return res;
    }
  }
  std::ostringstream os;
  os << "segment: tolerance " << tol << " unattained after " << attempts
     << (attempts == 1 ? " attempt" : " attempts") << "; best deviation "
     << best_dev;
  throw DomainError(os.str());
}

namespace {

struct EngineInput {
  ShiftSpace space;
  std::vector<MeasureModel> targets;
  std::vector<int> order;  // target index per 1-based block
  ScheduleSpec schedule;
  std::uint64_t seed = 0;
};

struct EngineOutput {
  Word word;
  GluePlan plan;
};

EngineOutput run_plan(const EngineInput& in, std::int64_t horizon_override) {
  ScheduleSpec sched = in.schedule;
  if (horizon_override > 0) sched.horizon = horizon_override;
  sched.validate();
  if (in.targets.empty()) throw DomainError("construction: no target measures");
  for (const MeasureModel& mu : in.targets)
    if (mu.alphabet() != in.space.alphabet_size())
      throw DomainError("construction: measure alphabet differs from space");

  Rng master(in.seed);
  Word w;
  SpaceWalker walker(in.space);
  GluePlan plan;
  plan.seed = in.seed;
  plan.cert_depth = sched.cert_depth;
  for (const MeasureModel& mu : in.targets)
    plan.target_ids.push_back(mu.describe());

  std::int64_t prev = 0;
  std::int64_t sum = 0;
  for (int j = 1;; ++j) {
    if (static_cast<std::int64_t>(w.size()) >= sched.horizon) break;
    std::int64_t l = sched.block_length(j, prev, sum);
    if (l <= 0) break;  // explicit list exhausted
    if (j > static_cast<int>(in.order.size()))
      throw InternalError("construction: block program exhausted");
    const int t_idx = in.order[static_cast<std::size_t>(j - 1)];
    const MeasureModel& mu = in.targets[static_cast<std::size_t>(t_idx)];
    const double tol_j = sched.tol(j);
    const int depth = feasible_depth(mu, l, sched.cert_depth);
    SegmentResult seg = generic_segment(in.space, mu, l, depth, tol_j,
                                        master.fork(static_cast<std::uint64_t>(j)));
    Word gap;
    if (!w.empty()) gap = in.space.bridge_from(walker.key(), seg.word, sched.max_gap);
    if (!walker.try_append(gap) || !walker.try_append(seg.word))
      throw InternalError("construction: glued block is not admissible");
    w.append(gap);
    w.append(seg.word);

    PlanBlock block;
    block.index = j;
    block.target = t_idx;
    block.bridge_length = static_cast<std::int64_t>(gap.size());
    block.segment_length = l;
    block.end = static_cast<std::int64_t>(w.size());
    block.tol = tol_j;
    block.deviation = seg.deviation;
    block.depth = seg.depth;
    block.retries = seg.retries;
    block.complete = true;
    plan.blocks.push_back(block);

    prev = l;
    sum += l;
  }
  if (static_cast<std::int64_t>(w.size()) > sched.horizon) {
    w = w.sub(0, static_cast<std::size_t>(sched.horizon));
    plan.blocks.back().end = sched.horizon;
    plan.blocks.back().complete = false;
  }
  plan.horizon = static_cast<std::int64_t>(w.size());
  return EngineOutput{std::move(w), std::move(plan)};
}

// Deterministic tail: blocks are keyed by (seed, block index), so re-running
// the engine with a larger horizon extends the shorter word byte for byte.
class PlanTail final : public TailGenerator {
 public:
  PlanTail(EngineInput in, Word prebuilt)
      : in_(std::move(in)), cache_(std::move(prebuilt)) {}

  Word generate(std::int64_t n) const override {
    if (n < 0) throw DomainError("generate: negative length");
    if (n <= static_cast<std::int64_t>(cache_.size()))
      return cache_.sub(0, static_cast<std::size_t>(n));
    EngineOutput out = run_plan(in_, n);
    if (static_cast<std::int64_t>(out.word.size()) < n)
      throw DomainError(
          "generate: explicit schedule exhausted before the requested "
          "length");
    cache_ = std::move(out.word);
    return cache_.sub(0, static_cast<std::size_t>(n));
  }

  std::int64_t horizon() const override {
    return std::numeric_limits<std::int64_t>::max();
  }

 private:
  EngineInput in_;
  mutable Word cache_;  // single-threaded per point by design
};

BuiltPoint finish_point(EngineInput in, EngineOutput out, bool close_periodic) {
  if (close_periodic) {
    int key = in.space.walker_advance(in.space.walker_initial(), out.word);
    if (key < 0)
      throw InternalError("periodic closing: constructed word inadmissible");
    Word gap = in.space.bridge_from(key, out.word, in.schedule.max_gap);
    Word loop = out.word + gap;
    if (!in.space.cyclically_admissible(loop))
      throw InternalError("periodic closing: closed loop is not admissible");
    out.plan.closed = true;
    out.plan.period = static_cast<std::int64_t>(loop.size());
    return BuiltPoint{SymbolicPoint::periodic(Word{}, loop),
                      std::move(out.plan), std::move(in.targets), {}};
  }
  SymbolicPoint point =
      SymbolicPoint::generated(std::make_shared<PlanTail>(in, out.word));
  return BuiltPoint{std::move(point), std::move(out.plan),
                    std::move(in.targets), {}};
}

std::vector<int> alternating_order() {
  std::vector<int> order(kMaxBlocks);
  for (int j = 0; j < kMaxBlocks; ++j) order[j] = j % 2;
  return order;
}

}  // namespace

BuiltPoint build_irregular_point(const ShiftSpace& space,
                                 const MeasureModel& mu1,
                                 const MeasureModel& mu2,
                                 const ScheduleSpec& schedule,
                                 std::uint64_t seed, bool close_periodic) {
  if (weakstar_distance(mu1, mu2, 8) <= 1e-12)
    throw DomainError(
        "irregular construction: targets have identical cylinder statistics "
        "through depth 8");
  EngineInput in{space, {mu1, mu2}, alternating_order(), schedule, seed};
  EngineOutput out = run_plan(in, -1);
  return finish_point(std::move(in), std::move(out), close_periodic);
}

BuiltPoint build_jointly_irregular_point(
    const ShiftSpace& space, const std::vector<Observable>& observables,
    const std::vector<std::pair<MeasureModel, MeasureModel>>& pairs,
    const ScheduleSpec& schedule, std::uint64_t seed) {
  if (observables.empty())
    throw DomainError("joint construction: no observables");
  if (observables.size() != pairs.size())
    throw DomainError(
        "joint construction: need one measure pair per observable");
  for (const Observable& phi : observables)
    if (phi.kind() == Observable::Kind::Trig)
      throw DomainError(
          "joint construction: trigonometric observables have no symbolic "
          "integrals");

  const std::size_t k = pairs.size();
  // diff[j][i] = integral of observable j against pair i's first measure
  // minus its second.
  std::vector<std::vector<BigRational>> diff(
      observables.size(), std::vector<BigRational>(k));
  for (std::size_t j = 0; j < observables.size(); ++j)
    for (std::size_t i = 0; i < k; ++i)
      diff[j][i] = integrate_exact(pairs[i].first, observables[j]) -
                   integrate_exact(pairs[i].second, observables[j]);
  for (std::size_t i = 0; i < k; ++i)
    if (diff[i][i] == 0)
      throw DomainError("joint construction: pair " + std::to_string(i) +
                        " does not separate its observable");

  // Rejection-sample positive rational weights off every hyperplane,
  // keeping the draw with the best worst-case separation.
  Rng draw_rng = Rng(seed).fork(0);
  std::vector<BigRational> best_theta;
  double best_score = -1.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<BigRational> lambda(k);
    BigRational total(0);
    for (std::size_t i = 0; i < k; ++i) {
      lambda[i] = BigRational(1 + draw_rng.next_below(999), 1000);
      total += lambda[i];
    }
    double score = std::numeric_limits<double>::infinity();
    bool valid = true;
    for (std::size_t j = 0; j < observables.size() && valid; ++j) {
      BigRational dot(0);
      for (std::size_t i = 0; i < k; ++i) dot += lambda[i] * diff[j][i];
      if (dot == 0) {
        valid = false;
        break;
      }
      dot /= total;
      double g = std::abs(static_cast<double>(dot));
      score = std::min(score, g);
    }
    if (valid && score > best_score) {
      best_score = score;
      best_theta.resize(k);
      for (std::size_t i = 0; i < k; ++i) best_theta[i] = lambda[i] / total;
    }
  }
  if (best_theta.empty())
    throw DomainError(
        "joint construction: no separating weights found in 100 draws");

  // Tolerance of the last complete block under this schedule.
  ScheduleSpec sched = schedule;
  sched.validate();
  int final_block = 0;
  {
    std::int64_t prev = 0, sum = 0, covered = 0;
    for (int j = 1; covered < sched.horizon; ++j) {
      std::int64_t l = sched.block_length(j, prev, sum);
      if (l <= 0) break;
      covered += l;
      if (covered <= sched.horizon) final_block = j;
      prev = l;
      sum += l;
    }
  }
  if (final_block < 1)
    throw DomainError("joint construction: horizon admits no complete block");
  const double tol_final = sched.tol(final_block);
  if (best_score <= 4.0 * tol_final)
    throw DomainError(
        "joint construction: observable separations too small for the "
        "schedule tolerances");

  std::vector<std::pair<double, MeasureModel>> side1, side2;
  for (std::size_t i = 0; i < k; ++i) {
    double th = static_cast<double>(best_theta[i]);
    side1.emplace_back(th, pairs[i].first);
    side2.emplace_back(th, pairs[i].second);
  }
  MeasureModel nu1 = MeasureModel::mixture(side1);
  MeasureModel nu2 = MeasureModel::mixture(side2);

  EngineInput in{space, {nu1, nu2}, alternating_order(), schedule, seed};
  EngineOutput out = run_plan(in, -1);

  const std::vector<std::int64_t> ends = out.plan.complete_block_ends();
  const std::int64_t have = static_cast<std::int64_t>(out.word.size());

  std::vector<Certificate> certs;
  for (std::size_t j = 0; j < observables.size(); ++j) {
    // A width-r observable reads r-1 symbols past a checkpoint, so block
    // ends flush with the built horizon may be unusable for it. Complete
    // blocks form a prefix of the plan, so usable ends keep block indices.
    std::vector<std::int64_t> usable;
    for (std::int64_t e : ends)
      if (e + observables[j].range() - 1 <= have) usable.push_back(e);
    if (usable.size() < 6)
      throw DomainError(
          "joint construction: schedule yields fewer than six certifiable "
          "blocks for observable " +
          observables[j].id());
    // Certificate tolerance: the loosest block tolerance inside the
    // three-blocks-per-side window.
    const int last_block = static_cast<int>(usable.size());
    double tol_cert = 0.0;
    for (int b = last_block - 5; b <= last_block; ++b)
      tol_cert = std::max(tol_cert, sched.tol(b));

    BirkhoffTrace trace = birkhoff_averages(out.word, observables[j], usable);
    std::optional<Certificate> cert =
        certificate_from_plan(out.plan, trace, tol_cert);
    if (!cert)
      throw InternalError("joint construction: observable " +
                          observables[j].id() + " failed to certify");
    verify_plan_certificate(out.plan, trace, *cert);
    double reference = std::abs(static_cast<double>([&] {
      BigRational dot(0);
      for (std::size_t i = 0; i < k; ++i) dot += best_theta[i] * diff[j][i];
      return dot;
    }()));
    const double tol_last = sched.tol(last_block);
    if (!(cert->gap >= reference - 4.0 * tol_last) ||
        !(reference - 4.0 * tol_last > 0.0))
      throw InternalError(
          "joint construction: certificate weaker than the separation bound");
    certs.push_back(std::move(*cert));
  }

  out.plan.theta.resize(k);
  for (std::size_t i = 0; i < k; ++i)
    out.plan.theta[i] = static_cast<double>(best_theta[i]);

  BuiltPoint finished = finish_point(std::move(in), std::move(out), false);
  finished.certificates = std::move(certs);
  return finished;
}

BuiltPoint build_saturated_point(const ShiftSpace& space,
                                 const std::vector<MeasureModel>& polyline,
                                 const ScheduleSpec& schedule,
                                 std::uint64_t seed) {
  if (polyline.empty())
    throw DomainError("saturated construction: empty polyline");

  EngineInput in{space, {}, {}, schedule, seed};

  const int m = static_cast<int>(polyline.size()) - 1;
  if (m == 0) {
    in.targets = {polyline[0]};
    in.order.assign(kMaxBlocks, 0);
  } else {
    // Emit polyline parameters sweeping 0 -> m -> 0 -> ..., halving the
    // step each pass and dwelling 3 blocks at each turnaround endpoint.
    // Parameters are exact fractions num / 2^p over the edge index line.
    std::map<std::pair<std::int64_t, std::int64_t>, int> target_index;
    auto target_of = [&](std::int64_t num, std::int64_t den) {
      std::int64_t g = std::gcd(num, den);
      std::pair<std::int64_t, std::int64_t> key{num / g, den / g};
      auto it = target_index.find(key);
      if (it != target_index.end()) return it->second;
      int idx = static_cast<int>(in.targets.size());
      std::int64_t edge = key.first / key.second;
      std::int64_t rem = key.first % key.second;
      if (rem == 0) {
        in.targets.push_back(polyline[static_cast<std::size_t>(edge)]);
      } else {
        double t = static_cast<double>(rem) / static_cast<double>(key.second);
        in.targets.push_back(MeasureModel::mixture(
            {{1.0 - t, polyline[static_cast<std::size_t>(edge)]},
             {t, polyline[static_cast<std::size_t>(edge) + 1]}}));
      }
      target_index.emplace(key, idx);
      return idx;
    };

    std::int64_t den = 1;
    bool forward = true;
    while (static_cast<int>(in.order.size()) < kMaxBlocks) {
      const std::int64_t top = static_cast<std::int64_t>(m) * den;
      if (in.order.empty()) {
        for (std::int64_t num = 0; num <= top; num += 1)
          in.order.push_back(target_of(num, den));
      } else {
        // Turnaround: dwell twice more at the endpoint just emitted.
        std::int64_t start = forward ? 0 : top;
        in.order.push_back(target_of(start, den));
        in.order.push_back(target_of(start, den));
        for (std::int64_t s = 1; s <= top; ++s) {
          std::int64_t num = forward ? s : top - s;
          in.order.push_back(target_of(num, den));
        }
      }
      forward = !forward;
      den *= 2;
    }
    in.order.resize(kMaxBlocks);
  }

  EngineOutput out = run_plan(in, -1);
  return finish_point(std::move(in), std::move(out), false);
}

BuiltPoint build_maximal_oscillation_point(
    const ShiftSpace& space, const std::vector<MeasureModel>& net,
    const ScheduleSpec& schedule, std::uint64_t seed) {
  if (net.empty()) throw DomainError("oscillation construction: empty net");
  EngineInput in{space, net, {}, schedule, seed};
  in.order.resize(kMaxBlocks);
  for (int j = 0; j < kMaxBlocks; ++j)
    in.order[static_cast<std::size_t>(j)] =
        j % static_cast<int>(net.size());
  EngineOutput out = run_plan(in, -1);
  return finish_point(std::move(in), std::move(out), false);
}

namespace {

struct PlanEstimates {
  // Per side: block-end indices and trailing-block averages, block order.
  std::vector<std::int64_t> ends[2];
  std::vector<double> estimates[2];
};

PlanEstimates trailing_estimates(const GluePlan& plan,
                                 const BirkhoffTrace& trace) {
  // Blocks ending past the last checkpoint are not covered by the trace
  // (wide observables shorten the usable horizon), so the certificate is
  // over the traced prefix of the plan.
  std::vector<const PlanBlock*> complete;
  for (const PlanBlock& b : plan.blocks)
    if (b.complete && b.end <= trace.checkpoints.back()) complete.push_back(&b);
  if (complete.empty())
    throw DomainError("plan certificate: no complete blocks");

  std::vector<int> targets_seen;
  for (const PlanBlock* b : complete)
    if (std::find(targets_seen.begin(), targets_seen.end(), b->target) ==
        targets_seen.end())
      targets_seen.push_back(b->target);
  if (targets_seen.size() != 2)
    throw DomainError(
        "plan certificate: needs a plan alternating exactly two targets");

  auto average_at = [&](std::int64_t end) {
    auto it = std::lower_bound(trace.checkpoints.begin(),
                               trace.checkpoints.end(), end);
    if (it == trace.checkpoints.end() || *it != end)
      throw DomainError(
          "plan certificate: trace lacks a complete block end checkpoint");
    return trace.averages[static_cast<std::size_t>(
        it - trace.checkpoints.begin())];
  };

  PlanEstimates est;
  std::int64_t prev_end = 0;
  double prev_avg = 0.0;
  for (const PlanBlock* b : complete) {
    double avg = average_at(b->end);
    double block_avg =
        (static_cast<double>(b->end) * avg -
         static_cast<double>(prev_end) * prev_avg) /
        static_cast<double>(b->end - prev_end);
    int side = b->target == targets_seen[0] ? 0 : 1;
    est.ends[side].push_back(b->end);
    est.estimates[side].push_back(block_avg);
    prev_end = b->end;
    prev_avg = avg;
  }
  return est;
}

std::optional<Certificate> plan_certificate_impl(const GluePlan& plan,
                                                 const BirkhoffTrace& trace,
                                                 double tol) {
  if (!(tol > 0.0))
    throw DomainError("plan certificate: tolerance must be positive");
  PlanEstimates est = trailing_estimates(plan, trace);

  CertificateSide sides[2];
  for (int s = 0; s < 2; ++s) {
    const std::size_t count = est.estimates[s].size();
    if (count < 3) return std::nullopt;
    const std::size_t first = count - 3;
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (std::size_t i = first; i < count; ++i) {
      sides[s].indices.push_back(est.ends[s][i]);
      mn = std::min(mn, est.estimates[s][i]);
      mx = std::max(mx, est.estimates[s][i]);
    }
    sides[s].limit = est.estimates[s].back();
    sides[s].oscillation = mx - mn;
    if (sides[s].oscillation > tol) return std::nullopt;
  }
  double gap = std::abs(sides[0].limit - sides[1].limit);
  if (gap < 2.0 * tol) return std::nullopt;

  Certificate cert;
  cert.observable_id = trace.observable_id;
  const int lo = sides[0].limit <= sides[1].limit ? 0 : 1;
  cert.low = std::move(sides[lo]);
  cert.high = std::move(sides[1 - lo]);
  cert.gap = gap;
  cert.tol = tol;
  cert.block_aligned = true;
  return cert;
}

}  // namespace

std::optional<Certificate> certificate_from_plan(const GluePlan& plan,
                                                 const BirkhoffTrace& trace,
                                                 double tol) {
  return plan_certificate_impl(plan, trace, tol);
}

void verify_plan_certificate(const GluePlan& plan, const BirkhoffTrace& trace,
                             const Certificate& cert) {
  if (!cert.block_aligned)
    throw DomainError(
        "verify: raw-checkpoint certificates are checked against the word");
  std::optional<Certificate> fresh = plan_certificate_impl(plan, trace, cert.tol);
  if (!fresh)
    throw InternalError("plan certificate failed recomputation");
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9; };
  if (!close(fresh->gap, cert.gap) || !close(fresh->low.limit, cert.low.limit) ||
      !close(fresh->high.limit, cert.high.limit) ||
      !close(fresh->low.oscillation, cert.low.oscillation) ||
      !close(fresh->high.oscillation, cert.high.oscillation) ||
      fresh->low.indices != cert.low.indices ||
      fresh->high.indices != cert.high.indices)
    throw InternalError("plan certificate does not match recomputation");
  if (cert.low.oscillation > cert.tol || cert.high.oscillation > cert.tol)
    throw InternalError("plan certificate oscillation exceeds tolerance");
  if (cert.gap < 2.0 * cert.tol)
    throw InternalError("plan certificate gap below twice the tolerance");
}

namespace {

// Choice count for one free slot: paths of the slot length through the
// walker automaton from `from_key` ending anywhere the following glue
// block can be appended.
std::vector<std::vector<BigInt>> slot_count_table(const ShiftSpace& space,
                                                  int slot_len,
                                                  const Word& next_glue) {
  const int keys = space.walker_count();
  const int k = space.alphabet_size();
  const Word probe = next_glue.sub(0, probe_length(space, next_glue));
  std::vector<std::vector<BigInt>> cnt(
      static_cast<std::size_t>(slot_len) + 1,
      std::vector<BigInt>(static_cast<std::size_t>(keys), BigInt(0)));
  for (int key = 0; key < keys; ++key)
    cnt[0][static_cast<std::size_t>(key)] =
        space.walker_advance(key, probe) >= 0 ? 1 : 0;
  for (int t = 1; t <= slot_len; ++t) {
    for (int key = 0; key < keys; ++key) {
      BigInt total(0);
      for (int c = 0; c < k; ++c) {
        int next = space.walker_step(key, static_cast<Symbol>(c));
        if (next >= 0)
          total += cnt[static_cast<std::size_t>(t - 1)]
                      [static_cast<std::size_t>(next)];
      }
      cnt[static_cast<std::size_t>(t)][static_cast<std::size_t>(key)] = total;
    }
  }
  return cnt;
}

}  // namespace

SeparatedFamily separated_irregular_family(const ShiftSpace& space,
                                           const MeasureModel& mu1,
                                           const MeasureModel& mu2,
                                           std::int64_t n,
                                           double free_fraction, int block_len,
                                           std::uint64_t seed) {
  if (space.kind() == SpaceKind::Sft && !space.mixing_gap().has_value())
    throw DomainError("family: space is not mixing");
  if (block_len < 20)
    throw DomainError("family: free block length must be >= 20");
  if (!(free_fraction > 0.0) || !(free_fraction < 1.0))
    throw DomainError("family: free fraction must lie in (0,1)");
  if (n < 2 * block_len) throw DomainError("family: total length too small");

  const std::int64_t slots = static_cast<std::int64_t>(
      std::llround(free_fraction * static_cast<double>(n) /
                   static_cast<double>(block_len)));
  if (slots < 1)
    throw DomainError("family: free fraction admits no free block");
  const std::int64_t free_total = slots * block_len;
  const std::int64_t glue_total = n - free_total;
  if (glue_total < slots)
    throw DomainError("family: free fraction leaves no room for glue");
  const std::int64_t glue_base = glue_total / slots;
  const std::int64_t glue_rem = glue_total % slots;
  if (space.kind() == SpaceKind::Beta &&
      glue_base + 1 < static_cast<std::int64_t>(space.kneading().size()))
    throw DomainError(
        "family: glue blocks shorter than the kneading memory");

  // Fixed glue words, alternating the two models.
  Rng master(seed);
  std::vector<Word> glue(static_cast<std::size_t>(slots));
  for (std::int64_t i = 0; i < slots; ++i) {
    const MeasureModel& mu = (i % 2 == 0) ? mu1 : mu2;
    std::int64_t len = glue_base + (i < glue_rem ? 1 : 0);
    Rng g = master.fork(static_cast<std::uint64_t>(i + 1));
    glue[static_cast<std::size_t>(i)] = draw_segment(space, mu, len, g);
  }

  SeparatedFamily fam;
  fam.total_length = n;
  fam.free_fraction = free_fraction;
  fam.block_length = block_len;
  fam.cardinality = BigInt(1);

  int entry_key = space.walker_initial();
  std::int64_t pos = 0;
  for (std::int64_t i = 0; i < slots; ++i) {
    const Word& g = glue[static_cast<std::size_t>(i)];
    FamilySlot slot;
    slot.position = pos;
    slot.length = block_len;
    slot.from_key = entry_key;
    auto cnt = slot_count_table(space, block_len, g);
    slot.count = cnt[static_cast<std::size_t>(block_len)]
                    [static_cast<std::size_t>(entry_key)];
    if (slot.count == 0)
      throw DomainError("family: glue blocks strand free slot " +
                        std::to_string(i));
    fam.cardinality *= slot.count;
    fam.slots.push_back(slot);

    for (int t = 0; t < block_len; ++t) fam.skeleton.push_back(0);
    fam.skeleton.append(g);
    pos += block_len + static_cast<std::int64_t>(g.size());

    // The walker key entering the next slot is intrinsic to the glue
    // content (full: constant; SFT: last symbol; beta: last N-1 symbols).
    entry_key = space.walker_advance(space.walker_initial(), g);
    if (entry_key < 0)
      throw InternalError("family: glue word is not admissible");
  }
  if (pos != n) throw InternalError("family: layout arithmetic is off");

  double log_sum = 0.0;
  for (const FamilySlot& s : fam.slots)
    log_sum += std::log(static_cast<double>(s.count));
  fam.rate = log_sum / static_cast<double>(n);
  return fam;
}

Word SeparatedFamily::member(const ShiftSpace& space,
                             const std::vector<std::uint64_t>& choices) const {
  if (choices.size() != slots.size())
    throw DomainError("family member: need one choice per free slot");
  Word out = skeleton;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const FamilySlot& slot = slots[i];
    if (BigInt(choices[i]) >= slot.count)
      throw DomainError("family member: choice index out of range");
    // Glue following this slot, for the acceptance condition.
    std::size_t glue_pos =
        static_cast<std::size_t>(slot.position) +
        static_cast<std::size_t>(slot.length);
    std::size_t glue_len =
        (i + 1 < slots.size()
             ? static_cast<std::size_t>(slots[i + 1].position)
             : skeleton.size()) -
        glue_pos;
    Word g = skeleton.sub(glue_pos, glue_len);
    auto cnt = slot_count_table(space, slot.length, g);

    BigInt idx(choices[i]);
    int key = slot.from_key;
    for (int t = slot.length; t >= 1; --t) {
      bool placed = false;
      for (int c = 0; c < space.alphabet_size(); ++c) {
        int next = space.walker_step(key, static_cast<Symbol>(c));
        if (next < 0) continue;
        const BigInt& branch =
            cnt[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(next)];
        if (idx < branch) {
          out[static_cast<std::size_t>(slot.position) +
              static_cast<std::size_t>(slot.length - t)] =
              static_cast<Symbol>(c);
          key = next;
          placed = true;
          break;
        }
        idx -= branch;
      }
      if (!placed)
        throw InternalError("family member: choice unranking ran dry");
    }
  }
  return out;
}

Word SeparatedFamily::random_member(const ShiftSpace& space, Rng& rng) const {
  std::vector<std::uint64_t> choices(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].count > BigInt(std::numeric_limits<std::uint64_t>::max()))
      throw DomainError(
          "family member: slot choice count exceeds 64-bit sampling range");
    choices[i] =
        rng.next_below(static_cast<std::uint64_t>(slots[i].count));
  }
  return member(space, choices);
}

double SeparatedFamily::weighted_rate(const ShiftSpace& space,
                                      const Observable& phi) const {
  if (phi.kind() != Observable::Kind::LocallyConstant || phi.range() != 1)
    throw DomainError(
        "weighted rate: supported for single-symbol observables only");
  if (phi.alphabet() != space.alphabet_size())
    throw DomainError("weighted rate: alphabet mismatch");

  const int k = space.alphabet_size();
  const int keys = space.walker_count();
  double total = 0.0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const FamilySlot& slot = slots[i];
    std::size_t glue_pos = static_cast<std::size_t>(slot.position) +
                           static_cast<std::size_t>(slot.length);
    std::size_t glue_len =
        (i + 1 < slots.size()
             ? static_cast<std::size_t>(slots[i + 1].position)
             : skeleton.size()) -
        glue_pos;
    Word g = skeleton.sub(glue_pos, glue_len);

    const Word probe = g.sub(0, probe_length(space, g));
    std::vector<double> weight(static_cast<std::size_t>(keys), 0.0);
    for (int key = 0; key < keys; ++key)
      weight[static_cast<std::size_t>(key)] =
          space.walker_advance(key, probe) >= 0 ? 1.0 : 0.0;
    for (int t = 1; t <= slot.length; ++t) {
      std::vector<double> next_w(static_cast<std::size_t>(keys), 0.0);
      for (int key = 0; key < keys; ++key) {
        double acc = 0.0;
        for (int c = 0; c < k; ++c) {
          int next = space.walker_step(key, static_cast<Symbol>(c));
          if (next >= 0)
            acc += std::exp(phi.table()[static_cast<std::size_t>(c)]) *
                   weight[static_cast<std::size_t>(next)];
        }
        next_w[static_cast<std::size_t>(key)] = acc;
      }
      weight = std::move(next_w);
    }
    double z = weight[static_cast<std::size_t>(slot.from_key)];
    if (!(z > 0.0))
      throw InternalError("weighted rate: empty slot weight");
    total += std::log(z);

    for (Symbol s : g.symbols())
      total += phi.table()[static_cast<std::size_t>(s)];
  }
  return total / static_cast<double>(total_length);
}

}  // namespace shiftlab
