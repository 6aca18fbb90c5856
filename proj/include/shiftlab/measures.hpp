#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "shiftlab/bigint.hpp"
#include "shiftlab/rng.hpp"
#include "shiftlab/shift_space.hpp"
#include "shiftlab/word.hpp"

namespace shiftlab {

class Observable;

// Shift-invariant measure models over a finite alphabet.
//
//   Periodic   - equidistribution on the orbit of a periodic word.
//   Markov     - stationary Markov chain; the stationary vector is solved
//                exactly in rational arithmetic (double entries are dyadic).
//   Bernoulli  - i.i.d. product measure; full shifts only.
//   Mixture    - finite convex combination of the above (flattened).
class MeasureModel {
 public:
  enum class Kind { Periodic, Markov, Bernoulli, Mixture };

  static MeasureModel periodic(const ShiftSpace& space, const Word& cycle);
  static MeasureModel markov(const ShiftSpace& space,
                             const std::vector<std::vector<double>>& rows);
  static MeasureModel bernoulli(const ShiftSpace& space,
                                const std::vector<double>& weights);
  static MeasureModel mixture(
      const std::vector<std::pair<double, MeasureModel>>& components);

  Kind kind() const { return kind_; }
  int alphabet() const { return alphabet_; }

  // Probability of the cylinder set fixed by the first |w| symbols.
  double cylinder_probability(const Word& w) const;
  BigRational cylinder_probability_exact(const Word& w) const;

  // Kolmogorov-Sinai entropy in nats. Closed forms per kind; affine on
  // mixtures (entropy is affine in the measure).
  double entropy_rate() const;

  // Deterministic models need no sampling; stochastic ones do.
  bool is_deterministic() const;

  // Draw a length-n admissible word from the model. Mixtures are the
  // responsibility of segment synthesis and are rejected here.
  Word sample_word(std::int64_t n, Rng& rng) const;

  const Word& cycle() const;                              // Periodic
  const std::vector<std::vector<double>>& rows() const;   // Markov
  const std::vector<double>& stationary() const;          // Markov
  const std::vector<BigRational>& stationary_exact() const;  // Markov
  const std::vector<double>& weights() const;             // Bernoulli
  const std::vector<std::pair<double, MeasureModel>>& components()
      const;                                              // Mixture

  std::string describe() const;

 private:
  MeasureModel() = default;

  struct Data {
    Word cycle;
    std::vector<std::vector<double>> rows;
    std::vector<double> stationary;
    std::vector<BigRational> stationary_exact;
    std::vector<double> weights;
    std::vector<std::pair<double, MeasureModel>> components;
  };

  Kind kind_ = Kind::Periodic;
  int alphabet_ = 0;
  std::shared_ptr<const Data> data_;
};

// Table of cylinder probabilities at a fixed word length ("depth").
// probs[i] is the mass of the cylinder whose word has base-k encoding i.
struct CylinderDistribution {
  int alphabet = 2;
  int depth = 0;
  std::vector<double> probs;

  static std::size_t index_of(const Word& w, int alphabet);

  double prob(const Word& w) const;

  // Sum out trailing symbols down to depth m (exact column sums).
  CylinderDistribution marginal(int m) const;
};

// Sliding-window frequencies of depth-length factors of w.
CylinderDistribution empirical_distribution(const Word& w, int depth,
                                            int alphabet);

// Model cylinder table over all alphabet^depth words.
CylinderDistribution model_distribution(const MeasureModel& mu, int depth);

// Metrized weak* distance: sum over m = 1..max_depth of
// 2^-m * (1/2) * sum_{|w|=m} |a(w) - b(w)|. Both inputs must carry at
// least max_depth symbols of resolution.
double weakstar_distance(const CylinderDistribution& a,
                         const CylinderDistribution& b, int max_depth);
double weakstar_distance(const MeasureModel& a, const MeasureModel& b,
                         int max_depth = 8);
double weakstar_distance(const CylinderDistribution& a, const MeasureModel& b,
                         int max_depth = 8);

// Expectation of a locally constant (or coboundary) observable.
double integrate(const MeasureModel& mu, const Observable& phi);
BigRational integrate_exact(const MeasureModel& mu, const Observable& phi);

}  // namespace shiftlab
