#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shiftlab/bigint.hpp"
#include "shiftlab/point.hpp"
#include "shiftlab/word.hpp"

namespace shiftlab {

class MeasureModel;

enum class TrigKind { Sin, Cos };

// Real-valued functions of a one-sided sequence.
//
//   LocallyConstant - depends on the first `range` symbols, given as a
//                     dense table indexed by the base-k window encoding.
//   Coboundary      - c + h - h(shifted), with h locally constant; its
//                     ergodic integral is c against every invariant measure.
//   Trig            - sin/cos(2 pi m x) for circle orbits; evaluation on
//                     symbolic windows is rejected (the circle layer owns it).
class Observable {
 public:
  enum class Kind { LocallyConstant, Coboundary, Trig };

  static Observable locally_constant(int alphabet, int range,
                                     std::vector<double> table,
                                     std::string id = "");
  // Indicator of the cylinder fixed by w.
  static Observable indicator(int alphabet, const Word& w,
                              std::string id = "");
  // First-coordinate value read as a real number.
  static Observable first_symbol(int alphabet, std::string id = "");
  static Observable coboundary(const Observable& h, double constant,
                               std::string id = "");
  static Observable trig(TrigKind trig_kind, int frequency,
                         std::string id = "");

  Kind kind() const { return kind_; }
  int alphabet() const { return alphabet_; }
  // Symbols consumed per evaluation window.
  int range() const { return range_; }
  const std::string& id() const { return id_; }

  // Value of the window starting at pos; requires pos + range() <= |w|.
  double eval(const Word& w, std::int64_t pos) const;

  double sup_bound() const;
  // Extremes over windows; locally constant only.
  double min_value() const;
  double max_value() const;

  const std::vector<double>& table() const;
  double constant() const;        // Coboundary
  const Observable& inner() const;  // Coboundary
  TrigKind trig_kind() const;     // Trig
  int frequency() const;          // Trig

  // Pointwise scale / shift; locally constant only. Used by dimension
  // and pressure sweeps.
  Observable scaled(double factor) const;
  Observable plus_constant(double shift) const;

 private:
  Observable() = default;

  Kind kind_ = Kind::LocallyConstant;
  int alphabet_ = 0;
  int range_ = 0;
  std::string id_;
  std::vector<double> table_;
  double constant_ = 0.0;
  std::shared_ptr<const Observable> inner_;
  TrigKind trig_kind_ = TrigKind::Sin;
  int frequency_ = 0;
};

// Running Birkhoff averages (1/n) * sum_{i<n} phi(sigma^i x) recorded at
// the given checkpoint times.
struct BirkhoffTrace {
  std::string observable_id;
  std::vector<std::int64_t> checkpoints;
  std::vector<double> averages;
};

// Checkpoints ceil(ratio^j) deduplicated and clipped to the horizon; the
// horizon itself is always included.
std::vector<std::int64_t> geometric_checkpoints(std::int64_t horizon,
                                                double ratio = 1.5);

BirkhoffTrace birkhoff_averages(const Word& w, const Observable& phi,
                                const std::vector<std::int64_t>& checkpoints);
BirkhoffTrace birkhoff_averages(const SymbolicPoint& x, const Observable& phi,
                                const std::vector<std::int64_t>& checkpoints);

// One side of a divergence certificate: checkpoint times whose averages
// settle near `limit` with spread `oscillation`.
struct CertificateSide {
  std::vector<std::int64_t> indices;
  double limit = 0.0;
  double oscillation = 0.0;
};

struct Certificate {
  std::string observable_id;
  CertificateSide low;
  CertificateSide high;
  double gap = 0.0;
  double tol = 0.0;
  // True when the two sides were read off alternation block boundaries
  // rather than clustered from raw checkpoint averages.
  bool block_aligned = false;
};

// Cluster raw checkpoint averages into two stable groups. Deterministic
// two-means seeded at the extremes; requires at least three checkpoints
// per side, per-side oscillation <= tol, and gap >= 2 * tol.
std::optional<Certificate> irregularity_certificate(const BirkhoffTrace& trace,
                                                    double tol);

// Recompute both sides from the raw word and compare against the stored
// certificate; throws InternalError on mismatch beyond 1e-9.
void verify_certificate(const Word& w, const Observable& phi,
                        const Certificate& cert);

// Pair of pool indices whose exact integrals of phi differ, with the
// largest absolute gap (> 1e-9); nullopt when all integrals agree.
struct WitnessPair {
  std::size_t first = 0;
  std::size_t second = 0;
  double gap = 0.0;
};
std::optional<WitnessPair> truly_observable_witness(
    const std::vector<MeasureModel>& pool, const Observable& phi);

}  // namespace shiftlab
