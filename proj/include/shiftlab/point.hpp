#pragma once

#include <cstdint>
#include <memory>

#include "shiftlab/word.hpp"

namespace shiftlab {

// Deterministic on-demand symbol source for points built by a glue schedule.
// generate(n) must be a pure function of the recipe: calling it twice yields
// identical words, and there is no shared mutable state.
class TailGenerator {
 public:
  virtual ~TailGenerator() = default;
  virtual Word generate(std::int64_t n) const = 0;
  virtual std::int64_t horizon() const = 0;
};

// A point of the shift space: finite prefix followed by either a repeating
// cycle or a schedule-driven generator. Immutable.
class SymbolicPoint {
 public:
  static SymbolicPoint periodic(Word prefix, Word cycle) {
    if (cycle.empty()) throw DomainError("periodic tail needs a nonempty cycle");
    SymbolicPoint p;
    p.prefix_ = std::move(prefix);
    p.cycle_ = std::move(cycle);
    return p;
  }

  static SymbolicPoint generated(std::shared_ptr<const TailGenerator> gen) {
    if (!gen) throw DomainError("null tail generator");
    SymbolicPoint p;
    p.gen_ = std::move(gen);
    return p;
  }

  bool has_periodic_tail() const noexcept { return !cycle_.empty(); }
  const Word& prefix() const noexcept { return prefix_; }
  const Word& cycle() const { return cycle_; }
  std::shared_ptr<const TailGenerator> generator() const { return gen_; }

  // First n symbols. For schedule tails past their horizon this throws a
  // DomainError naming the maximum available length.
  Word materialize(std::int64_t n) const {
    if (n < 0) throw DomainError("materialize: negative length");
    if (has_periodic_tail()) {
      Word out = prefix_.size() >= static_cast<std::size_t>(n)
                     ? prefix_.sub(0, static_cast<std::size_t>(n))
                     : prefix_;
      while (out.size() < static_cast<std::size_t>(n)) {
        out.push_back(cycle_[(out.size() - prefix_.size()) % cycle_.size()]);
      }
      return out;
    }
    if (n > gen_->horizon()) {
      throw DomainError("materialize: schedule tail ends at " +
                        std::to_string(gen_->horizon()) + ", requested " +
                        std::to_string(n));
    }
    return gen_->generate(n);
  }

 private:
  SymbolicPoint() = default;

  Word prefix_;
  Word cycle_;
  std::shared_ptr<const TailGenerator> gen_;
};

}  // namespace shiftlab
