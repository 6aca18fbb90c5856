#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shiftlab/beta.hpp"
#include "shiftlab/bigint.hpp"
#include "shiftlab/word.hpp"

namespace shiftlab {

enum class SpaceKind { Full, Sft, Beta };

// One-sided shift space over {0..k-1}: full shift, 0/1 transition-matrix SFT,
// or beta-shift cut off at a finite kneading depth N (windows deeper than N
// compare only on the available overlap). Immutable after construction.
class ShiftSpace {
 public:
  static ShiftSpace full(int k);
  static ShiftSpace sft(std::vector<std::vector<int>> transition);
  static ShiftSpace beta(const BetaSpec& spec, int kneading_depth,
                         int precision_bits = 256);

  SpaceKind kind() const noexcept { return kind_; }
  int alphabet_size() const noexcept { return k_; }

  // Smallest M >= 1 with all entries of transition^M positive; 0 for the full
  // shift (any symbol may follow any); absent for non-mixing SFTs and for
  // beta-shifts, whose bridging is search-based.
  std::optional<int> mixing_gap() const noexcept { return mixing_gap_; }

  bool allowed(Symbol a, Symbol b) const;
  bool is_admissible(const Word& w) const;
  bool cyclically_admissible(const Word& cycle) const;

  BigInt count_words(std::int64_t n) const;

  // Shortest word w with u*w*v admissible; ties broken lexicographically.
  // Throws DomainError when no bridge of length <= max_gap exists, naming the
  // minimum workable gap when one is found within the search cap.
  Word bridge(const Word& u, const Word& v, int max_gap) const;
  // Same search, but starting from an explicit walker key (the state after
  // some already-validated prefix). v must be admissible on its own.
  Word bridge_from(int from_key, const Word& v, int max_gap) const;

  // Incremental admissibility automaton. Key 0 is the fresh state; stepping
  // returns -1 when the extension is inadmissible.
  int walker_initial() const noexcept { return 0; }
  int walker_count() const noexcept;
  int walker_step(int key, Symbol c) const;
  int walker_advance(int key, const Word& w) const;  // -1 if any step dies

  // Beta-shift accessors.
  const Word& kneading() const;
  bool beta_eventually_zero() const;
  double beta_value() const;
  const BetaSpec& beta_spec() const;

  const std::vector<std::vector<int>>& transition() const;

  std::string describe() const;

 private:
  ShiftSpace() = default;

  SpaceKind kind_ = SpaceKind::Full;
  int k_ = 2;
  std::optional<int> mixing_gap_;
  std::vector<std::vector<int>> transition_;

  // Beta data: kneading digits, the lexicographic bound word the language is
  // compared against (the digits themselves, or their periodic borrow form
  // when the expansion terminates), the KMP failure table over that bound,
  // and the transition table of the longest-live-match automaton.
  struct BetaData {
    BetaSpec spec;
    Word kneading;
    Word bound;
    bool eventually_zero = false;
    double value = 0;
    std::vector<int> fail;                  // fail[m], m in [1..N]
    std::vector<std::vector<int>> step;     // step[state][symbol], -1 dead
  };
  std::shared_ptr<const BetaData> beta_;
};

// Incremental admissibility cursor over one growing word.
class SpaceWalker {
 public:
  explicit SpaceWalker(const ShiftSpace& space)
      : space_(&space), key_(space.walker_initial()) {}

  bool can_push(Symbol c) const { return space_->walker_step(key_, c) >= 0; }

  void push(Symbol c) {
    int next = space_->walker_step(key_, c);
    if (next < 0) throw DomainError("inadmissible symbol pushed");
    key_ = next;
  }

  bool try_append(const Word& w) {
    int next = space_->walker_advance(key_, w);
    if (next < 0) return false;
    key_ = next;
    return true;
  }

  int key() const noexcept { return key_; }

 private:
  const ShiftSpace* space_;
  int key_;
};

}  // namespace shiftlab
