#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shiftlab {

using Symbol = std::uint8_t;

// Domain error: invalid input, inadmissible data, unattainable tolerance.
// Maps to CLI exit code 2.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal invariant violation (e.g. a certificate that fails recomputation).
// Maps to CLI exit code 3.
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Finite symbol block over alphabet {0..k-1}. Symbols are stored as raw
// bytes; display uses '0'..'9' then 'a'..'z'.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Symbol> syms) : syms_(std::move(syms)) {}

  static Word from_string(std::string_view text) {
    std::vector<Symbol> syms;
    syms.reserve(text.size());
    for (char c : text) {
      if (c >= '0' && c <= '9') {
        syms.push_back(static_cast<Symbol>(c - '0'));
      } else if (c >= 'a' && c <= 'z') {
        syms.push_back(static_cast<Symbol>(c - 'a' + 10));
      } else {
        throw DomainError("word literal has non-symbol character");
      }
    }
    return Word(std::move(syms));
  }

  std::string to_string() const {
    std::string out;
    out.reserve(syms_.size());
    for (Symbol s : syms_) {
      out.push_back(s < 10 ? static_cast<char>('0' + s)
                           : static_cast<char>('a' + (s - 10)));
    }
    return out;
  }

  std::size_t size() const noexcept { return syms_.size(); }
  bool empty() const noexcept { return syms_.empty(); }
  Symbol operator[](std::size_t i) const noexcept { return syms_[i]; }
  Symbol& operator[](std::size_t i) noexcept { return syms_[i]; }
  Symbol back() const { return syms_.back(); }
  Symbol front() const { return syms_.front(); }

  void push_back(Symbol s) { syms_.push_back(s); }
  void pop_back() { syms_.pop_back(); }

  void append(const Word& other) {
    syms_.insert(syms_.end(), other.syms_.begin(), other.syms_.end());
  }

  Word sub(std::size_t pos, std::size_t len) const {
    if (pos > syms_.size() || pos + len > syms_.size()) {
      throw DomainError("subword out of range");
    }
    return Word(std::vector<Symbol>(syms_.begin() + pos, syms_.begin() + pos + len));
  }

  Word repeated(std::size_t times) const {
    Word out;
    out.syms_.reserve(syms_.size() * times);
    for (std::size_t t = 0; t < times; ++t) out.append(*this);
    return out;
  }

  friend Word operator+(Word a, const Word& b) {
    a.append(b);
    return a;
  }

  bool operator==(const Word&) const = default;
  auto operator<=>(const Word& other) const {
    return syms_ <=> other.syms_;
  }

  const std::vector<Symbol>& symbols() const noexcept { return syms_; }
  std::vector<Symbol>& symbols() noexcept { return syms_; }

  auto begin() const noexcept { return syms_.begin(); }
  auto end() const noexcept { return syms_.end(); }

 private:
  std::vector<Symbol> syms_;
};

}  // namespace shiftlab
