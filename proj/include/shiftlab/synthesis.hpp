#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shiftlab/bigint.hpp"
#include "shiftlab/measures.hpp"
#include "shiftlab/observables.hpp"
#include "shiftlab/point.hpp"
#include "shiftlab/rng.hpp"
#include "shiftlab/shift_space.hpp"

namespace shiftlab {

// Block length and tolerance schedule for alternation constructions.
//
// Default growth l_{j+1} = max(2*l_j, j * sum_{i<=j} l_i) guarantees the
// history fraction S_{j-1}/S_j <= 1/(j+1), which is what drags block-end
// empirical statistics to the newest target. The geometric-sum rule
// l_{j+1} = factor * S_j trades convergence speed for more blocks inside a
// fixed horizon.
struct ScheduleSpec {
  enum class Growth { Accelerating, GeometricSum, Explicit };

  std::int64_t initial_length = 1000;
  Growth growth = Growth::Accelerating;
  double factor = 9.0;                // GeometricSum only
  std::vector<std::int64_t> lengths;  // Explicit only
  double tol_initial = 0.05;
  double tol_decay = 0.9;
  double tol_floor = 0.005;
  std::int64_t horizon = 1000000;
  int cert_depth = 8;
  int max_gap = 64;

  static ScheduleSpec accelerating(std::int64_t initial_length,
                                   std::int64_t horizon);
  static ScheduleSpec geometric_sum(std::int64_t initial_length, double factor,
                                    std::int64_t horizon);
  static ScheduleSpec explicit_lengths(std::vector<std::int64_t> lengths);

  // Length of 1-based block j given the previous block length and the sum
  // of all previous block lengths; 0 signals an exhausted explicit list.
  std::int64_t block_length(int j, std::int64_t prev, std::int64_t sum) const;
  // Per-block empirical tolerance, max(tol_initial * tol_decay^j, tol_floor).
  double tol(int j) const;
  void validate() const;
};

// One glued block: an optional bridge followed by a generic segment.
struct PlanBlock {
  int index = 0;                   // 1-based
  int target = 0;                  // index into GluePlan target ids
  std::int64_t bridge_length = 0;
  std::int64_t segment_length = 0;
  std::int64_t end = 0;            // symbols materialized through this block
  double tol = 0.0;
  double deviation = 0.0;          // segment empirical deviation at `depth`
  int depth = 0;
  int retries = 0;
  bool complete = true;            // false when clipped by the horizon
};

struct GluePlan {
  std::vector<PlanBlock> blocks;
  std::vector<std::string> target_ids;
  std::vector<double> theta;       // mixture weights (joint constructions)
  std::uint64_t seed = 0;
  std::int64_t horizon = 0;        // symbols actually materialized
  int cert_depth = 8;
  bool closed = false;             // periodic closure applied
  std::int64_t period = 0;

  std::vector<std::int64_t> complete_block_ends() const;
};

struct BuiltPoint {
  SymbolicPoint point;
  GluePlan plan;
  std::vector<MeasureModel> targets;
  std::vector<Certificate> certificates;  // joint constructions only
};

struct SegmentResult {
  Word word;
  double deviation = 0.0;
  int depth = 0;
  int retries = 0;
};

// Admissible length-n word whose empirical cylinder statistics at the given
// depth sit within tol of mu (weak* metric truncated at that depth).
// Stochastic models are resampled up to max_retries times; deterministic
// models get a single attempt. Deterministic given the Rng state.
SegmentResult generic_segment(const ShiftSpace& space, const MeasureModel& mu,
                              std::int64_t n, int depth, double tol, Rng rng,
                              int max_retries = 20);

// Depth at which a length-n sample can be held to cylinder statistics:
// capped by requested depth, and for stochastic models by 50 * k^d <= n.
int feasible_depth(const MeasureModel& mu, std::int64_t n, int requested);

// Alternates generic segments of mu1 and mu2 with admissible bridges.
BuiltPoint build_irregular_point(const ShiftSpace& space,
                                 const MeasureModel& mu1,
                                 const MeasureModel& mu2,
                                 const ScheduleSpec& schedule,
                                 std::uint64_t seed,
                                 bool close_periodic = false);

// Draws positive rational weights avoiding every observable's separating
// hyperplane, mixes each pair side with those weights, and alternates the
// two mixtures. Returns one certificate per observable.
BuiltPoint build_jointly_irregular_point(
    const ShiftSpace& space, const std::vector<Observable>& observables,
    const std::vector<std::pair<MeasureModel, MeasureModel>>& pairs,
    const ScheduleSpec& schedule, std::uint64_t seed);

// Sweeps an epsilon-net of the polyline of measures back and forth,
// halving the net spacing each pass and dwelling three blocks at the
// endpoints of each turnaround.
BuiltPoint build_saturated_point(const ShiftSpace& space,
                                 const std::vector<MeasureModel>& polyline,
                                 const ScheduleSpec& schedule,
                                 std::uint64_t seed);

// Round-robin through a finite net of measures with growing blocks.
BuiltPoint build_maximal_oscillation_point(
    const ShiftSpace& space, const std::vector<MeasureModel>& net,
    const ScheduleSpec& schedule, std::uint64_t seed);

// Reads per-block trailing averages (S_j A_j - S_{j-1} A_{j-1}) / l_j off a
// two-target plan's complete block ends and certifies divergence when the
// last three blocks of each target agree within tol and the two limits are
// at least 2 tol apart. The trace must contain every complete block end.
std::optional<Certificate> certificate_from_plan(const GluePlan& plan,
                                                 const BirkhoffTrace& trace,
                                                 double tol);

// Recompute a block-aligned certificate from its plan and trace; throws
// InternalError on mismatch beyond 1e-9.
void verify_plan_certificate(const GluePlan& plan, const BirkhoffTrace& trace,
                             const Certificate& cert);

// Implicit family of words sharing fixed generic glue but ranging freely
// over whole blocks: [free][mu1 glue][free][mu2 glue]... The per-slot choice
// counts are exact path counts over the space's walker automaton, so the
// family cardinality needs no materialization.
struct FamilySlot {
  std::int64_t position = 0;  // absolute offset of the free block
  int length = 0;
  int from_key = 0;           // walker key entering the slot
  BigInt count;               // admissible choices given both contexts
};

struct SeparatedFamily {
  std::int64_t total_length = 0;
  double free_fraction = 0.0;
  int block_length = 0;
  Word skeleton;              // fixed glue with free slots zero-filled
  std::vector<FamilySlot> slots;
  BigInt cardinality;
  double rate = 0.0;          // (1/n) ln cardinality

  // Materialize the member selected by one choice index per slot.
  Word member(const ShiftSpace& space,
              const std::vector<std::uint64_t>& choices) const;
  Word random_member(const ShiftSpace& space, Rng& rng) const;

  // (1/n) ln sum over members of exp(S_n phi) for a range-1 observable,
  // via weighted path counts per slot.
  double weighted_rate(const ShiftSpace& space, const Observable& phi) const;
};

SeparatedFamily separated_irregular_family(const ShiftSpace& space,
                                           const MeasureModel& mu1,
                                           const MeasureModel& mu2,
                                           std::int64_t n,
                                           double free_fraction, int block_len,
                                           std::uint64_t seed);

}  // namespace shiftlab
