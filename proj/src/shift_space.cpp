#include "shiftlab/shift_space.hpp"

#include <algorithm>
#include <queue>

namespace shiftlab {
namespace {

constexpr int kMaxAlphabet = 36;  // display cap: symbols '0'..'9','a'..'z'

std::vector<std::vector<char>> bool_multiply(const std::vector<std::vector<char>>& a,
                                             const std::vector<std::vector<char>>& b) {
  const std::size_t n = a.size();
  std::vector<std::vector<char>> out(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < n; ++l) {
      if (!a[i][l]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (b[l][j]) out[i][j] = 1;
      }
    }
  }
  return out;
}

bool all_positive(const std::vector<std::vector<char>>& m) {
  for (const auto& row : m) {
    for (char v : row) {
      if (!v) return false;
    }
  }
  return true;
}

}  // namespace

ShiftSpace ShiftSpace::full(int k) {
  if (k < 2 || k > kMaxAlphabet) throw DomainError("full shift needs 2 <= k <= 36");
  ShiftSpace s;
  s.kind_ = SpaceKind::Full;
  s.k_ = k;
  s.mixing_gap_ = 0;
  return s;
}

ShiftSpace ShiftSpace::sft(std::vector<std::vector<int>> transition) {
  const int k = static_cast<int>(transition.size());
  if (k < 2 || k > kMaxAlphabet) throw DomainError("SFT needs 2 <= k <= 36 symbols");
  for (const auto& row : transition) {
    if (static_cast<int>(row.size()) != k) throw DomainError("transition matrix not square");
    for (int v : row) {
      if (v != 0 && v != 1) throw DomainError("transition entries must be 0/1");
    }
  }
  for (int i = 0; i < k; ++i) {
    bool row_any = false, col_any = false;
    for (int j = 0; j < k; ++j) {
      row_any |= transition[i][j] != 0;
      col_any |= transition[j][i] != 0;
    }
    if (!row_any) throw DomainError("symbol " + std::to_string(i) + " has no successor");
    if (!col_any) throw DomainError("symbol " + std::to_string(i) + " has no predecessor");
  }

  ShiftSpace s;
  s.kind_ = SpaceKind::Sft;
  s.k_ = k;
  s.transition_ = std::move(transition);

  std::vector<std::vector<char>> a(k, std::vector<char>(k, 0));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) a[i][j] = s.transition_[i][j] ? 1 : 0;
  }
  std::vector<std::vector<char>> power = a;
  for (int m = 1; m <= k * k; ++m) {
    if (all_positive(power)) {
      s.mixing_gap_ = m;
      break;
    }
    power = bool_multiply(power, a);
  }
  return s;
}

ShiftSpace ShiftSpace::beta(const BetaSpec& spec, int kneading_depth, int precision_bits) {
  if (kneading_depth < 1) throw DomainError("kneading depth must be >= 1");
  KneadingResult kr = beta_kneading(spec, kneading_depth, precision_bits);

  auto data = std::make_shared<BetaData>();
  data->spec = spec;
  data->kneading = kr.digits;
  data->eventually_zero = kr.eventually_zero;
  data->value = spec.to_double();

  // Lexicographic bound for window comparisons. A terminating expansion
  // d_1..d_m 0^inf bounds the language through its borrow form
  // (d_1..d_{m-1}(d_m - 1)) repeated; a non-terminating one is its own bound
  // (truncated at the working depth).
  if (kr.eventually_zero) {
    std::size_t m = 0;
    for (std::size_t i = 0; i < kr.digits.size(); ++i) {
      if (kr.digits[i] != 0) m = i + 1;
    }
    if (m == 0) throw InternalError("terminating expansion with no nonzero digit");
    std::vector<Symbol> period = kr.digits.sub(0, m).symbols();
    period[m - 1] = static_cast<Symbol>(period[m - 1] - 1);
    std::vector<Symbol> filled;
    filled.reserve(kr.digits.size());
    while (filled.size() < kr.digits.size()) {
      const std::size_t take =
          std::min(period.size(), kr.digits.size() - filled.size());
      filled.insert(filled.end(), period.begin(), period.begin() + take);
    }
    data->bound = Word(std::move(filled));
  } else {
    data->bound = kr.digits;
  }

  const Word& a = data->bound;
  const int n = static_cast<int>(a.size());

  // KMP failure table over the kneading prefix: fail[m] = longest proper
  // border of a[0..m).
  data->fail.assign(n + 1, 0);
  for (int m = 2; m <= n; ++m) {
    int j = data->fail[m - 1];
    while (j > 0 && a[j] != a[m - 1]) j = data->fail[j];
    if (a[j] == a[m - 1]) ++j;
    data->fail[m] = j;
  }

  // Longest-live-match automaton. State i < N means the last i symbols equal
  // a_1..a_i; that match carries the binding constraint (self-comparison of
  // the kneading word makes shorter live matches weaker). A full match is
  // inert, so it falls back to its longest proper border.
  const int k = kr.alphabet;
  data->step.assign(n, std::vector<int>(k, -1));
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < k; ++c) {
      if (c > a[i]) continue;  // stays -1: window would exceed the kneading
      int j = i;
      int next = 0;
      while (true) {
        if (c == a[j]) {
          next = j + 1;
          if (next == n) next = data->fail[n];
          break;
        }
        if (j == 0) {
          next = 0;
          break;
        }
        j = data->fail[j];
        if (c > a[j]) {
          throw InternalError("kneading automaton: border constraint inverted");
        }
      }
      data->step[i][c] = next;
    }
  }

  ShiftSpace s;
  s.kind_ = SpaceKind::Beta;
  s.k_ = k;
  s.beta_ = std::move(data);
  return s;
}

bool ShiftSpace::allowed(Symbol a, Symbol b) const {
  if (a >= k_ || b >= k_) return false;
  if (kind_ == SpaceKind::Sft) return transition_[a][b] != 0;
  if (kind_ == SpaceKind::Full) return true;
  throw DomainError("allowed(): beta-shifts have no transition matrix");
}

bool ShiftSpace::is_admissible(const Word& w) const {
  for (Symbol s : w) {
    if (s >= k_) return false;
  }
  switch (kind_) {
    case SpaceKind::Full:
      return true;
    case SpaceKind::Sft:
      for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        if (!transition_[w[i]][w[i + 1]]) return false;
      }
      return true;
    case SpaceKind::Beta: {
      // Direct window comparison: every suffix of w must be lexicographically
      // <= the bound word on the compared overlap.
      const Word& a = beta_->bound;
      const std::size_t n = a.size();
      for (std::size_t i = 0; i < w.size(); ++i) {
        const std::size_t overlap = std::min(w.size() - i, n);
        for (std::size_t j = 0; j < overlap; ++j) {
          if (w[i + j] < a[j]) break;
          if (w[i + j] > a[j]) return false;
        }
      }
      return true;
    }
  }
  return false;
}

bool ShiftSpace::cyclically_admissible(const Word& cycle) const {
  if (cycle.empty()) return false;
  for (Symbol s : cycle) {
    if (s >= k_) return false;
  }
  switch (kind_) {
    case SpaceKind::Full:
      return true;
    case SpaceKind::Sft:
      for (std::size_t i = 0; i < cycle.size(); ++i) {
        if (!transition_[cycle[i]][cycle[(i + 1) % cycle.size()]]) return false;
      }
      return true;
    case SpaceKind::Beta: {
      // Enough repetitions that every rotation sees a full-depth window.
      const std::size_t n = beta_->bound.size();
      const std::size_t reps = n / cycle.size() + 2;
      return is_admissible(cycle.repeated(reps));
    }
  }
  return false;
}

int ShiftSpace::walker_count() const noexcept {
  switch (kind_) {
    case SpaceKind::Full:
      return 1;
    case SpaceKind::Sft:
      return k_ + 1;  // 0 = fresh, 1+s = after symbol s
    case SpaceKind::Beta:
      return static_cast<int>(beta_->bound.size());
  }
  return 1;
}

int ShiftSpace::walker_step(int key, Symbol c) const {
  if (c >= k_) return -1;
  switch (kind_) {
    case SpaceKind::Full:
      return 0;
    case SpaceKind::Sft:
      if (key == 0) return 1 + c;
      return transition_[key - 1][c] ? 1 + c : -1;
    case SpaceKind::Beta:
      return beta_->step[key][c];
  }
  return -1;
}

int ShiftSpace::walker_advance(int key, const Word& w) const {
  for (Symbol c : w) {
    key = walker_step(key, c);
    if (key < 0) return -1;
  }
  return key;
}

BigInt ShiftSpace::count_words(std::int64_t n) const {
  if (n < 0) throw DomainError("word length must be >= 0");
  if (n == 0) return BigInt(1);
  if (n > 1'000'000) throw DomainError("count_words: n too large");
  switch (kind_) {
    case SpaceKind::Full:
      return boost::multiprecision::pow(BigInt(k_), static_cast<unsigned>(n));
    case SpaceKind::Sft: {
      // 1^T A^(n-1) 1 via iterated vector-matrix products.
      std::vector<BigInt> v(k_, BigInt(1));
      for (std::int64_t t = 1; t < n; ++t) {
        std::vector<BigInt> next(k_, BigInt(0));
        for (int i = 0; i < k_; ++i) {
          for (int j = 0; j < k_; ++j) {
            if (transition_[i][j]) next[i] += v[j];
          }
        }
        v = std::move(next);
      }
      BigInt total = 0;
      for (const BigInt& x : v) total += x;
      return total;
    }
    case SpaceKind::Beta: {
      const int states = walker_count();
      std::vector<BigInt> cnt(states, BigInt(0));
      cnt[0] = 1;
      for (std::int64_t t = 0; t < n; ++t) {
        std::vector<BigInt> next(states, BigInt(0));
        for (int s = 0; s < states; ++s) {
          if (cnt[s] == 0) continue;
          for (int c = 0; c < k_; ++c) {
            int to = beta_->step[s][c];
            if (to >= 0) next[to] += cnt[s];
          }
        }
        cnt = std::move(next);
      }
      BigInt total = 0;
      for (const BigInt& x : cnt) total += x;
      return total;
    }
  }
  throw InternalError("unreachable space kind");
}

namespace {

// Distance from every walker key to the nearest key from which `v` can be
// appended, over the automaton graph. Used for shortest-lex bridging.
std::vector<int> distances_to_appendable(const ShiftSpace& space,
                                         const std::vector<char>& appendable) {
  const int n = space.walker_count();
  const int k = space.alphabet_size();
  std::vector<std::vector<int>> reverse_adj(n);
  for (int key = 0; key < n; ++key) {
    for (int c = 0; c < k; ++c) {
      int to = space.walker_step(key, static_cast<Symbol>(c));
      if (to >= 0) reverse_adj[to].push_back(key);
    }
  }
  std::vector<int> dist(n, -1);
  std::queue<int> q;
  for (int key = 0; key < n; ++key) {
    if (appendable[key]) {
      dist[key] = 0;
      q.push(key);
    }
  }
  while (!q.empty()) {
    int cur = q.front();
    q.pop();
    for (int from : reverse_adj[cur]) {
      if (dist[from] < 0) {
        dist[from] = dist[cur] + 1;
        q.push(from);
      }
    }
  }
  return dist;
}

}  // namespace

Word ShiftSpace::bridge(const Word& u, const Word& v, int max_gap) const {
  if (!is_admissible(u)) throw DomainError("bridge: u is not admissible");
  if (u.empty() || v.empty()) {
    if (!is_admissible(v)) throw DomainError("bridge: v is not admissible");
    return Word{};
  }
  int from = walker_advance(walker_initial(), u);
  if (from < 0) throw InternalError("bridge: admissible word killed the walker");
  return bridge_from(from, v, max_gap);
}

Word ShiftSpace::bridge_from(int from, const Word& v, int max_gap) const {
  if (max_gap < 0) throw DomainError("max_gap must be >= 0");
  if (from < 0 || from >= walker_count())
    throw DomainError("bridge: walker key out of range");
  if (walker_advance(walker_initial(), v) < 0)
    throw DomainError("bridge: v is not admissible");
  if (v.empty()) return Word{};

  // Whether v can follow a given walker key. For beta-shifts only the first
  // min(|v|, N) symbols matter: the live-match state is intrinsic to the last
  // N-1 symbols, so survival of the overlap plus admissibility of v itself
  // implies survival of the whole append.
  const int n = walker_count();
  std::vector<char> appendable(n, 0);
  std::size_t probe_len = v.size();
  if (kind_ == SpaceKind::Beta) {
    probe_len = std::min<std::size_t>(probe_len, beta_->bound.size());
  } else if (kind_ != SpaceKind::Full) {
    probe_len = std::min<std::size_t>(probe_len, 1);
  }
  const Word probe = v.sub(0, probe_len);
  for (int key = 0; key < n; ++key) {
    appendable[key] = walker_advance(key, probe) >= 0 ? 1 : 0;
  }

  std::vector<int> dist = distances_to_appendable(*this, appendable);
  if (dist[from] < 0) {
    throw DomainError("bridge: no gap word exists (pair not mixing)");
  }
  if (dist[from] > max_gap) {
    throw DomainError("bridge: minimum required gap is " + std::to_string(dist[from]) +
                      " > max_gap " + std::to_string(max_gap));
  }

  Word out;
  int cur = from;
  for (int remaining = dist[from]; remaining > 0; --remaining) {
    bool advanced = false;
    for (int c = 0; c < k_; ++c) {
      int to = walker_step(cur, static_cast<Symbol>(c));
      if (to >= 0 && dist[to] == remaining - 1) {
        out.push_back(static_cast<Symbol>(c));
        cur = to;
        advanced = true;
        break;
      }
    }
    if (!advanced) throw InternalError("bridge: BFS distance field inconsistent");
  }
  return out;
}

const Word& ShiftSpace::kneading() const {
  if (kind_ != SpaceKind::Beta) throw DomainError("kneading(): not a beta-shift");
  return beta_->kneading;
}

bool ShiftSpace::beta_eventually_zero() const {
  if (kind_ != SpaceKind::Beta) throw DomainError("not a beta-shift");
  return beta_->eventually_zero;
}

double ShiftSpace::beta_value() const {
  if (kind_ != SpaceKind::Beta) throw DomainError("not a beta-shift");
  return beta_->value;
}

const BetaSpec& ShiftSpace::beta_spec() const {
  if (kind_ != SpaceKind::Beta) throw DomainError("not a beta-shift");
  return beta_->spec;
}

const std::vector<std::vector<int>>& ShiftSpace::transition() const {
  if (kind_ != SpaceKind::Sft) throw DomainError("transition(): not a matrix SFT");
  return transition_;
}

std::string ShiftSpace::describe() const {
  switch (kind_) {
    case SpaceKind::Full:
      return "full shift on " + std::to_string(k_) + " symbols";
    case SpaceKind::Sft:
      return "matrix SFT on " + std::to_string(k_) + " symbols";
    case SpaceKind::Beta:
      return "beta-shift, beta = " + beta_->spec.describe() + ", depth " +
             std::to_string(beta_->kneading.size());
  }
  return "?";
}

}  // namespace shiftlab
