#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shiftlab/beta.hpp"
#include "shiftlab/measures.hpp"
#include "shiftlab/observables.hpp"
#include "shiftlab/shift_space.hpp"
#include "shiftlab/synthesis.hpp"

namespace shiftlab {

// Weighted growth rate over cylinder covers. Values are in nats.
struct PressureResult {
  enum class Method { TransferExact, CylinderEstimate, VariationalLower };

  double value = 0.0;
  Method method = Method::TransferExact;
  std::int64_t n = 0;   // cover depth, cylinder estimates only
  int depth_offset = 0; // ball-radius-to-cylinder-depth offset (default 0)
  std::optional<double> error_bound;
  double residual = 0.0; // power-iteration residual, transfer only
  int iterations = 0;

  std::string method_name() const;
};

// ln(spectral radius) of the weighted transition matrix on depth-r words,
// where r is the potential's window length: entries A_uv * e^{phi(u)}.
// Equals sup over invariant measures of h + integral(phi) for full shifts
// and mixing matrix SFTs. Power iteration from the all-ones vector runs to
// Rayleigh residual 1e-12.
PressureResult transfer_pressure(const ShiftSpace& space,
                                 const Observable& phi);

// Tilt of the weighted matrix by its right eigenvector (Parry-style): the
// unique measure attaining entropy_rate + integral(phi) = pressure, within
// 1e-8. Single-symbol potentials only; deeper windows tilt a multi-step
// chain outside this model family.
std::pair<MeasureModel, PressureResult> equilibrium_markov(
    const ShiftSpace& space, const Observable& phi);

// (1/n) * ln of the partition sum over n-words of e^{S phi}, where S phi
// adds the n-r+1 complete windows inside the word. Three covers:
// every admissible n-word (dynamic program over the admissibility
// automaton), an explicit word list, or a separated family (computed
// block-combinatorially from its slot counts).
PressureResult cylinder_pressure_estimate(const ShiftSpace& space,
                                          const Observable& phi,
                                          std::int64_t n);
PressureResult cylinder_pressure_estimate(const ShiftSpace& space,
                                          const std::vector<Word>& words,
                                          const Observable& phi,
                                          std::int64_t n);
PressureResult cylinder_pressure_estimate(const ShiftSpace& space,
                                          const SeparatedFamily& family,
                                          const Observable& phi);

// Greedy lexicographic scan for a maximal set of admissible n-words that
// pairwise differ in at least ceil(delta*n) positions; returns
// (1/n) * ln(count), a lower entropy bound at scale (delta, n).
double separated_entropy_estimate(const ShiftSpace& space, int n,
                                  double delta);

// Unique root of s -> pressure(-s * phi), phi strictly positive, located by
// bisection on the bracket [0, pressure(0)/min phi]. The transfer form
// solves the equation on the whole space; the word-list form uses the
// fixed-n cylinder estimate and is an upper approximant labeled by n.
double bs_dimension(const ShiftSpace& space, const Observable& phi,
                    double tol);
double bs_dimension(const ShiftSpace& space, const std::vector<Word>& words,
                    const Observable& phi, double tol, std::int64_t n);

// Word-count entropy estimates for a beta expansion base, one row per n,
// with the deviation from ln(beta) and the Hausdorff-normalized value
// estimate / ln(beta).
struct BetaEntropyRow {
  std::int64_t n = 0;
  double estimate = 0.0;
  double error_vs_log_beta = 0.0;
  double hausdorff_normalized = 0.0;
};
std::vector<BetaEntropyRow> beta_entropy_estimate(
    const BetaSpec& beta, const std::vector<std::int64_t>& n_list,
    int kneading_depth = 64);

}  // namespace shiftlab
