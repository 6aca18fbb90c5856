#include "shiftlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "shiftlab/observables.hpp"

namespace shiftlab {

namespace {

constexpr double kRowSumSlack = 1e-9;
constexpr std::size_t kMaxTableCells = std::size_t{1} << 22;

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

// Strong connectivity of the support digraph {(i,j) : rows[i][j] > 0}.
bool strongly_connected(const std::vector<std::vector<double>>& rows) {
  const int k = static_cast<int>(rows.size());
  auto reaches_all = [&](bool forward) {
    std::vector<char> seen(k, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < k; ++v) {
        double edge = forward ? rows[u][v] : rows[v][u];
        if (edge > 0.0 && !seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c; });
  };
  return reaches_all(true) && reaches_all(false);
}

// Solve p^T P = p^T, sum p = 1 exactly. P irreducible, so the k-1 balance
// equations plus normalization form a nonsingular system.
std::vector<BigRational> solve_stationary(
    const std::vector<std::vector<double>>& rows) {
  const int k = static_cast<int>(rows.size());
  std::vector<std::vector<BigRational>> m(
      k, std::vector<BigRational>(k + 1, BigRational(0)));
  for (int eq = 0; eq < k - 1; ++eq) {
    for (int j = 0; j < k; ++j) m[eq][j] = BigRational(rows[j][eq]);
    m[eq][eq] -= 1;
  }
  for (int j = 0; j < k; ++j) m[k - 1][j] = 1;
  m[k - 1][k] = 1;

  for (int col = 0; col < k; ++col) {
    int pivot = -1;
    for (int r = col; r < k; ++r) {
      if (m[r][col] != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) throw InternalError("stationary solve: singular system");
    std::swap(m[col], m[pivot]);
    for (int r = 0; r < k; ++r) {
      if (r == col || m[r][col] == 0) continue;
      BigRational f = m[r][col] / m[col][col];
      for (int c = col; c <= k; ++c) m[r][c] -= f * m[col][c];
    }
  }
  std::vector<BigRational> p(k);
  for (int i = 0; i < k; ++i) p[i] = m[i][k] / m[i][i];
  return p;
}

std::size_t checked_pow(int base, int exp, const char* what) {
  std::size_t v = 1;
  for (int i = 0; i < exp; ++i) {
    v *= static_cast<std::size_t>(base);
    if (v > kMaxTableCells)
      throw DomainError(std::string(what) + ": table of " +
                        std::to_string(base) + "^" + std::to_string(exp) +
                        " cells exceeds the supported size");
  }
  return v;
}

}  // namespace

MeasureModel MeasureModel::periodic(const ShiftSpace& space,
                                    const Word& cycle) {
  if (cycle.empty()) throw DomainError("periodic measure: empty cycle");
  for (Symbol s : cycle.symbols())
    if (s >= space.alphabet_size())
      throw DomainError("periodic measure: symbol out of alphabet");
  if (!space.cyclically_admissible(cycle))
    throw DomainError("periodic measure: cycle is not cyclically admissible");
  MeasureModel mu;
  mu.kind_ = Kind::Periodic;
  mu.alphabet_ = space.alphabet_size();
  auto data = std::make_shared<Data>();
  data->cycle = cycle;
  mu.data_ = std::move(data);
  return mu;
}

MeasureModel MeasureModel::markov(const ShiftSpace& space,
                                  const std::vector<std::vector<double>>& rows) {
  const int k = space.alphabet_size();
  if (space.kind() == SpaceKind::Beta)
    throw DomainError("markov measure: space has no transition structure");
  if (static_cast<int>(rows.size()) != k)
    throw DomainError("markov measure: matrix size differs from alphabet");
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(rows[i].size()) != k)
      throw DomainError("markov measure: matrix is not square");
    double sum = 0.0;
    for (int j = 0; j < k; ++j) {
      double p = rows[i][j];
      if (!(p >= 0.0))
        throw DomainError("markov measure: negative transition probability");
      if (p > 0.0 && !space.allowed(static_cast<Symbol>(i),
                                    static_cast<Symbol>(j)))
        throw DomainError(
            "markov measure: support uses a forbidden transition");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumSlack)
      throw DomainError("markov measure: row " + std::to_string(i) +
                        " does not sum to 1");
  }
  if (!strongly_connected(rows))
    throw DomainError("markov measure: support is not irreducible");

  MeasureModel mu;
  mu.kind_ = Kind::Markov;
  mu.alphabet_ = k;
  auto data = std::make_shared<Data>();
  data->rows = rows;
  data->stationary_exact = solve_stationary(rows);
  data->stationary.resize(k);
  for (int i = 0; i < k; ++i)
    data->stationary[i] =
        static_cast<double>(data->stationary_exact[i]);
  for (int j = 0; j < k; ++j) {
    double balance = -data->stationary[j];
    for (int i = 0; i < k; ++i) balance += data->stationary[i] * rows[i][j];
    if (std::abs(balance) > 1e-12)
      throw InternalError("stationary solve: residual exceeds 1e-12");
  }
  mu.data_ = std::move(data);
  return mu;
}

MeasureModel MeasureModel::bernoulli(const ShiftSpace& space,
                                     const std::vector<double>& weights) {
  const int k = space.alphabet_size();
  if (space.kind() != SpaceKind::Full)
    throw DomainError("bernoulli measure: product measures need a full shift");
  if (static_cast<int>(weights.size()) != k)
    throw DomainError("bernoulli measure: weight count differs from alphabet");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DomainError("bernoulli measure: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kRowSumSlack)
    throw DomainError("bernoulli measure: weights do not sum to 1");

  MeasureModel mu;
  mu.kind_ = Kind::Bernoulli;
  mu.alphabet_ = k;
  auto data = std::make_shared<Data>();
  data->weights = weights;
  for (double& w : data->weights) w /= sum;
  mu.data_ = std::move(data);
  return mu;
}

MeasureModel MeasureModel::mixture(
    const std::vector<std::pair<double, MeasureModel>>& components) {
  if (components.empty()) throw DomainError("mixture measure: no components");
  double sum = 0.0;
  for (const auto& [theta, mu] : components) {
    if (!(theta > 0.0))
      throw DomainError("mixture measure: weights must be positive");
    if (mu.alphabet() != components.front().second.alphabet())
      throw DomainError("mixture measure: mixed alphabets");
    sum += theta;
  }
  if (std::abs(sum - 1.0) > kRowSumSlack)
    throw DomainError("mixture measure: weights do not sum to 1");

  MeasureModel mu;
  mu.kind_ = Kind::Mixture;
  mu.alphabet_ = components.front().second.alphabet();
  auto data = std::make_shared<Data>();
  for (const auto& [theta, part] : components) {
    double t = theta / sum;
    if (part.kind_ == Kind::Mixture) {
      for (const auto& [inner_t, inner] : part.components())
        data->components.emplace_back(t * inner_t, inner);
    } else {
      data->components.emplace_back(t, part);
    }
  }
  mu.data_ = std::move(data);
  return mu;
}

double MeasureModel::cylinder_probability(const Word& w) const {
  if (w.empty()) return 1.0;
  for (Symbol s : w.symbols())
    if (s >= alphabet_)
      throw DomainError("cylinder probability: symbol out of alphabet");
  switch (kind_) {
    case Kind::Periodic: {
      const Word& c = data_->cycle;
      const std::size_t L = c.size();
      std::size_t hits = 0;
      for (std::size_t r = 0; r < L; ++r) {
        bool match = true;
        for (std::size_t i = 0; i < w.size() && match; ++i)
          match = (c[(r + i) % L] == w[i]);
        hits += match;
      }
      return static_cast<double>(hits) / static_cast<double>(L);
    }
    case Kind::Markov: {
      double p = data_->stationary[w[0]];
      for (std::size_t i = 0; i + 1 < w.size(); ++i)
        p *= data_->rows[w[i]][w[i + 1]];
      return p;
    }
    case Kind::Bernoulli: {
      double p = 1.0;
      for (Symbol s : w.symbols()) p *= data_->weights[s];
      return p;
    }
    case Kind::Mixture: {
      double p = 0.0;
      for (const auto& [theta, part] : data_->components)
        p += theta * part.cylinder_probability(w);
      return p;
    }
  }
  throw InternalError("cylinder probability: unknown measure kind");
}

BigRational MeasureModel::cylinder_probability_exact(const Word& w) const {
  if (w.empty()) return BigRational(1);
  for (Symbol s : w.symbols())
    if (s >= alphabet_)
      throw DomainError("cylinder probability: symbol out of alphabet");
  switch (kind_) {
    case Kind::Periodic: {
      const Word& c = data_->cycle;
      const std::size_t L = c.size();
      std::size_t hits = 0;
      for (std::size_t r = 0; r < L; ++r) {
        bool match = true;
        for (std::size_t i = 0; i < w.size() && match; ++i)
          match = (c[(r + i) % L] == w[i]);
        hits += match;
      }
      return BigRational(hits) / BigRational(L);
    }
    case Kind::Markov: {
      BigRational p = data_->stationary_exact[w[0]];
      for (std::size_t i = 0; i + 1 < w.size(); ++i)
        p *= BigRational(data_->rows[w[i]][w[i + 1]]);
      return p;
    }
    case Kind::Bernoulli: {
      BigRational p(1);
      for (Symbol s : w.symbols()) p *= BigRational(data_->weights[s]);
      return p;
    }
    case Kind::Mixture: {
      BigRational p(0);
      for (const auto& [theta, part] : data_->components)
        p += BigRational(theta) * part.cylinder_probability_exact(w);
      return p;
    }
  }
  throw InternalError("cylinder probability: unknown measure kind");
}

double MeasureModel::entropy_rate() const {
  switch (kind_) {
    case Kind::Periodic:
      return 0.0;
    case Kind::Markov: {
      double h = 0.0;
      for (int i = 0; i < alphabet_; ++i)
        for (int j = 0; j < alphabet_; ++j)
          h -= data_->stationary[i] * xlogx(data_->rows[i][j]);
      return h;
    }
    case Kind::Bernoulli: {
      double h = 0.0;
      for (double w : data_->weights) h -= xlogx(w);
      return h;
    }
    case Kind::Mixture: {
      double h = 0.0;
      for (const auto& [theta, part] : data_->components)
        h += theta * part.entropy_rate();
      return h;
    }
  }
  throw InternalError("entropy rate: unknown measure kind");
}

bool MeasureModel::is_deterministic() const {
  switch (kind_) {
    case Kind::Periodic:
      return true;
    case Kind::Markov:
    case Kind::Bernoulli:
      return false;
    case Kind::Mixture:
      for (const auto& [theta, part] : data_->components)
        if (!part.is_deterministic()) return false;
      return true;
  }
  throw InternalError("is_deterministic: unknown measure kind");
}

Word MeasureModel::sample_word(std::int64_t n, Rng& rng) const {
  if (n < 1) throw DomainError("sample_word: length must be positive");
  Word out;
  switch (kind_) {
    case Kind::Periodic: {
      const Word& c = data_->cycle;
      for (std::int64_t i = 0; i < n; ++i)
        out.push_back(c[static_cast<std::size_t>(i % static_cast<std::int64_t>(
                          c.size()))]);
      return out;
    }
    case Kind::Markov: {
      int state = rng.sample(data_->stationary);
      out.push_back(static_cast<Symbol>(state));
      for (std::int64_t i = 1; i < n; ++i) {
        state = rng.sample(data_->rows[state]);
        out.push_back(static_cast<Symbol>(state));
      }
      return out;
    }
    case Kind::Bernoulli: {
      for (std::int64_t i = 0; i < n; ++i)
        out.push_back(static_cast<Symbol>(rng.sample(data_->weights)));
      return out;
    }
    case Kind::Mixture:
      throw DomainError(
          "sample_word: mixtures are assembled by segment synthesis");
  }
  throw InternalError("sample_word: unknown measure kind");
}

const Word& MeasureModel::cycle() const {
  if (kind_ != Kind::Periodic)
    throw DomainError("cycle: not a periodic measure");
  return data_->cycle;
}

const std::vector<std::vector<double>>& MeasureModel::rows() const {
  if (kind_ != Kind::Markov) throw DomainError("rows: not a markov measure");
  return data_->rows;
}

const std::vector<double>& MeasureModel::stationary() const {
  if (kind_ != Kind::Markov)
    throw DomainError("stationary: not a markov measure");
  return data_->stationary;
}

const std::vector<BigRational>& MeasureModel::stationary_exact() const {
  if (kind_ != Kind::Markov)
    throw DomainError("stationary: not a markov measure");
  return data_->stationary_exact;
}

const std::vector<double>& MeasureModel::weights() const {
  if (kind_ != Kind::Bernoulli)
    throw DomainError("weights: not a bernoulli measure");
  return data_->weights;
}

const std::vector<std::pair<double, MeasureModel>>& MeasureModel::components()
    const {
  if (kind_ != Kind::Mixture)
    throw DomainError("components: not a mixture measure");
  return data_->components;
}

std::string MeasureModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Periodic:
      os << "periodic(" << data_->cycle.to_string() << ")";
      break;
    case Kind::Markov:
      os << "markov[k=" << alphabet_ << "]";
      break;
    case Kind::Bernoulli: {
      os << "bernoulli(";
      for (std::size_t i = 0; i < data_->weights.size(); ++i)
        os << (i ? "," : "") << data_->weights[i];
      os << ")";
      break;
    }
    case Kind::Mixture: {
      os << "mixture(";
      for (std::size_t i = 0; i < data_->components.size(); ++i) {
        if (i) os << " + ";
        os << data_->components[i].first << "*"
           << data_->components[i].second.describe();
      }
      os << ")";
      break;
    }
  }
  return os.str();
}

std::size_t CylinderDistribution::index_of(const Word& w, int alphabet) {
  std::size_t idx = 0;
  for (Symbol s : w.symbols()) {
    if (s >= alphabet)
      throw DomainError("cylinder index: symbol out of alphabet");
    idx = idx * static_cast<std::size_t>(alphabet) + s;
  }
  return idx;
}

double CylinderDistribution::prob(const Word& w) const {
  if (static_cast<int>(w.size()) != depth)
    throw DomainError("cylinder table: word length differs from table depth");
  return probs[index_of(w, alphabet)];
}

CylinderDistribution CylinderDistribution::marginal(int m) const {
  if (m < 0 || m > depth)
    throw DomainError("marginal: requested depth out of range");
  CylinderDistribution out;
  out.alphabet = alphabet;
  out.depth = m;
  std::size_t cells = 1;
  for (int i = 0; i < m; ++i) cells *= static_cast<std::size_t>(alphabet);
  std::size_t block = probs.size() / cells;
  out.probs.assign(cells, 0.0);
  for (std::size_t p = 0; p < cells; ++p) {
    double s = 0.0;
    for (std::size_t t = 0; t < block; ++t) s += probs[p * block + t];
    out.probs[p] = s;
  }
  return out;
}

CylinderDistribution empirical_distribution(const Word& w, int depth,
                                            int alphabet) {
  if (depth < 1) throw DomainError("empirical distribution: depth < 1");
  if (alphabet < 2) throw DomainError("empirical distribution: alphabet < 2");
  if (w.size() < static_cast<std::size_t>(depth))
    throw DomainError("empirical distribution: word shorter than depth");
  const std::size_t cells =
      checked_pow(alphabet, depth, "empirical distribution");
  CylinderDistribution out;
  out.alphabet = alphabet;
  out.depth = depth;
  out.probs.assign(cells, 0.0);

  const std::size_t k = static_cast<std::size_t>(alphabet);
  const std::size_t tail = cells / k;
  std::size_t idx = 0;
  for (int i = 0; i < depth; ++i) {
    if (w[i] >= alphabet)
      throw DomainError("empirical distribution: symbol out of alphabet");
    idx = idx * k + w[i];
  }
  const std::size_t windows = w.size() - static_cast<std::size_t>(depth) + 1;
  out.probs[idx] += 1.0;
  for (std::size_t t = 1; t < windows; ++t) {
    Symbol s = w[t + static_cast<std::size_t>(depth) - 1];
    if (s >= alphabet)
      throw DomainError("empirical distribution: symbol out of alphabet");
    idx = (idx % tail) * k + s;
    out.probs[idx] += 1.0;
  }
  for (double& p : out.probs) p /= static_cast<double>(windows);
  return out;
}

CylinderDistribution model_distribution(const MeasureModel& mu, int depth) {
  if (depth < 1) throw DomainError("model distribution: depth < 1");
  const int k = mu.alphabet();
  const std::size_t cells = checked_pow(k, depth, "model distribution");
  CylinderDistribution out;
  out.alphabet = k;
  out.depth = depth;
  out.probs.assign(cells, 0.0);
  Word w;
  for (int i = 0; i < depth; ++i) w.push_back(0);
  for (std::size_t idx = 0; idx < cells; ++idx) {
    std::size_t rest = idx;
    for (int i = depth - 1; i >= 0; --i) {
      w[static_cast<std::size_t>(i)] = static_cast<Symbol>(rest % k);
      rest /= static_cast<std::size_t>(k);
    }
    out.probs[idx] = mu.cylinder_probability(w);
  }
  return out;
}

double weakstar_distance(const CylinderDistribution& a,
                         const CylinderDistribution& b, int max_depth) {
  if (max_depth < 1) throw DomainError("weakstar distance: max_depth < 1");
  if (a.alphabet != b.alphabet)
    throw DomainError("weakstar distance: alphabet mismatch");
  if (a.depth < max_depth || b.depth < max_depth)
    throw DomainError(
        "weakstar distance: tables shallower than the requested depth");
  CylinderDistribution am = a.depth == max_depth ? a : a.marginal(max_depth);
  CylinderDistribution bm = b.depth == max_depth ? b : b.marginal(max_depth);
  double total = 0.0;
  for (int m = max_depth; m >= 1; --m) {
    double tv = 0.0;
    for (std::size_t i = 0; i < am.probs.size(); ++i)
      tv += std::abs(am.probs[i] - bm.probs[i]);
    total += std::ldexp(0.5 * tv, -m);
    if (m > 1) {
      am = am.marginal(m - 1);
      bm = bm.marginal(m - 1);
    }
  }
  return total;
}

double weakstar_distance(const MeasureModel& a, const MeasureModel& b,
                         int max_depth) {
  if (a.alphabet() != b.alphabet())
    throw DomainError("weakstar distance: alphabet mismatch");
  return weakstar_distance(model_distribution(a, max_depth),
                           model_distribution(b, max_depth), max_depth);
}

double weakstar_distance(const CylinderDistribution& a, const MeasureModel& b,
                         int max_depth) {
  return weakstar_distance(a, model_distribution(b, max_depth), max_depth);
}

double integrate(const MeasureModel& mu, const Observable& phi) {
  switch (phi.kind()) {
    case Observable::Kind::Trig:
      throw DomainError(
          "integrate: trigonometric observables pair with circle orbits");
    case Observable::Kind::Coboundary:
      // h - h(shifted) integrates to zero against invariant measures.
      return phi.constant();
    case Observable::Kind::LocallyConstant:
      break;
  }
  if (phi.alphabet() != mu.alphabet())
    throw DomainError("integrate: alphabet mismatch");
  const int r = phi.range();
  const int k = mu.alphabet();
  const std::size_t cells = checked_pow(k, r, "integrate");
  double total = 0.0;
  Word w;
  for (int i = 0; i < r; ++i) w.push_back(0);
  for (std::size_t idx = 0; idx < cells; ++idx) {
    std::size_t rest = idx;
    for (int i = r - 1; i >= 0; --i) {
      w[static_cast<std::size_t>(i)] = static_cast<Symbol>(rest % k);
      rest /= static_cast<std::size_t>(k);
    }
    total += mu.cylinder_probability(w) * phi.table()[idx];
  }
  return total;
}

BigRational integrate_exact(const MeasureModel& mu, const Observable& phi) {
  switch (phi.kind()) {
    case Observable::Kind::Trig:
      throw DomainError(
          "integrate: trigonometric observables pair with circle orbits");
    case Observable::Kind::Coboundary:
      return BigRational(phi.constant());
    case Observable::Kind::LocallyConstant:
      break;
  }
  if (phi.alphabet() != mu.alphabet())
    throw DomainError("integrate: alphabet mismatch");
  const int r = phi.range();
  const int k = mu.alphabet();
  const std::size_t cells = checked_pow(k, r, "integrate");
  BigRational total(0);
  Word w;
  for (int i = 0; i < r; ++i) w.push_back(0);
  for (std::size_t idx = 0; idx < cells; ++idx) {
    std::size_t rest = idx;
    for (int i = r - 1; i >= 0; --i) {
      w[static_cast<std::size_t>(i)] = static_cast<Symbol>(rest % k);
      rest /= static_cast<std::size_t>(k);
    }
    total += mu.cylinder_probability_exact(w) * BigRational(phi.table()[idx]);
  }
  return total;
}

}  // namespace shiftlab
