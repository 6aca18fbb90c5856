#include "shiftlab/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "shiftlab/measures.hpp"

namespace shiftlab {

namespace {

constexpr std::size_t kMaxTableCells = std::size_t{1} << 22;

std::size_t table_cells(int alphabet, int range) {
  std::size_t v = 1;
  for (int i = 0; i < range; ++i) {
    v *= static_cast<std::size_t>(alphabet);
    if (v > kMaxTableCells)
      throw DomainError("observable: window table exceeds the supported size");
  }
  return v;
}

struct KahanSum {
  double total = 0.0;
  double carry = 0.0;
  void add(double x) {
    double y = x - carry;
    double t = total + y;
    carry = (t - total) - y;
    total = t;
  }
};

}  // namespace

Observable Observable::locally_constant(int alphabet, int range,
                                        std::vector<double> table,
                                        std::string id) {
  if (alphabet < 2 || alphabet > 36)
    throw DomainError("observable: alphabet out of range");
  if (range < 1) throw DomainError("observable: range must be positive");
  const std::size_t cells = table_cells(alphabet, range);
  if (table.size() != cells)
    throw DomainError("observable: table size differs from alphabet^range");
  for (double v : table)
    if (!std::isfinite(v))
      throw DomainError("observable: non-finite table entry");
  Observable phi;
  phi.kind_ = Kind::LocallyConstant;
  phi.alphabet_ = alphabet;
  phi.range_ = range;
  phi.table_ = std::move(table);
  phi.id_ = id.empty() ? "lc[r=" + std::to_string(range) + "]" : std::move(id);
  return phi;
}

Observable Observable::indicator(int alphabet, const Word& w, std::string id) {
  if (w.empty()) throw DomainError("indicator: empty word");
  const int range = static_cast<int>(w.size());
  std::vector<double> table(table_cells(alphabet, range), 0.0);
  table[CylinderDistribution::index_of(w, alphabet)] = 1.0;
  return locally_constant(
      alphabet, range, std::move(table),
      id.empty() ? "indicator(" + w.to_string() + ")" : std::move(id));
}

Observable Observable::first_symbol(int alphabet, std::string id) {
  std::vector<double> table(static_cast<std::size_t>(alphabet));
  for (int s = 0; s < alphabet; ++s) table[s] = static_cast<double>(s);
  return locally_constant(alphabet, 1, std::move(table),
                          id.empty() ? "first_symbol" : std::move(id));
}

Observable Observable::coboundary(const Observable& h, double constant,
                                  std::string id) {
  if (h.kind() != Kind::LocallyConstant)
    throw DomainError("coboundary: transfer part must be locally constant");
  if (!std::isfinite(constant))
    throw DomainError("coboundary: non-finite constant");
  Observable phi;
  phi.kind_ = Kind::Coboundary;
  phi.alphabet_ = h.alphabet();
  phi.range_ = h.range() + 1;
  phi.constant_ = constant;
  phi.inner_ = std::make_shared<Observable>(h);
  phi.id_ = id.empty() ? "coboundary(c=" + std::to_string(constant) + ")"
                       : std::move(id);
  return phi;
}

Observable Observable::trig(TrigKind trig_kind, int frequency, std::string id) {
  if (frequency < 1) throw DomainError("trig observable: frequency < 1");
  Observable phi;
  phi.kind_ = Kind::Trig;
  phi.alphabet_ = 2;
  phi.range_ = 0;
  phi.trig_kind_ = trig_kind;
  phi.frequency_ = frequency;
  if (id.empty()) {
    std::ostringstream os;
    os << (trig_kind == TrigKind::Sin ? "sin" : "cos") << "(2pi*" << frequency
       << "x)";
    phi.id_ = os.str();
  } else {
    phi.id_ = std::move(id);
  }
  return phi;
}

double Observable::eval(const Word& w, std::int64_t pos) const {
  switch (kind_) {
    case Kind::Trig:
      throw DomainError(
          "eval: trigonometric observables evaluate along circle orbits");
    case Kind::Coboundary:
      if (pos < 0 || pos + range_ > static_cast<std::int64_t>(w.size()))
        throw DomainError("eval: window outside the word");
      return constant_ + inner_->eval(w, pos) - inner_->eval(w, pos + 1);
    case Kind::LocallyConstant: {
      if (pos < 0 || pos + range_ > static_cast<std::int64_t>(w.size()))
        throw DomainError("eval: window outside the word");
      std::size_t idx = 0;
      for (int i = 0; i < range_; ++i) {
        Symbol s = w[static_cast<std::size_t>(pos + i)];
        if (s >= alphabet_) throw DomainError("eval: symbol out of alphabet");
        idx = idx * static_cast<std::size_t>(alphabet_) + s;
      }
      return table_[idx];
    }
  }
  throw InternalError("eval: unknown observable kind");
}

double Observable::sup_bound() const {
  switch (kind_) {
    case Kind::Trig:
      return 1.0;
    case Kind::Coboundary: {
      double m = 0.0;
      for (double v : inner_->table_) m = std::max(m, std::abs(v));
      return std::abs(constant_) + 2.0 * m;
    }
    case Kind::LocallyConstant: {
      double m = 0.0;
      for (double v : table_) m = std::max(m, std::abs(v));
      return m;
    }
  }
  throw InternalError("sup_bound: unknown observable kind");
}

double Observable::min_value() const {
  if (kind_ != Kind::LocallyConstant)
    throw DomainError("min_value: observable has no window table");
  return *std::min_element(table_.begin(), table_.end());
}

double Observable::max_value() const {
  if (kind_ != Kind::LocallyConstant)
    throw DomainError("max_value: observable has no window table");
  return *std::max_element(table_.begin(), table_.end());
}

const std::vector<double>& Observable::table() const {
  if (kind_ != Kind::LocallyConstant)
    throw DomainError("table: observable has no window table");
  return table_;
}

double Observable::constant() const {
  if (kind_ != Kind::Coboundary)
    throw DomainError("constant: not a coboundary observable");
  return constant_;
}

const Observable& Observable::inner() const {
  if (kind_ != Kind::Coboundary)
    throw DomainError("inner: not a coboundary observable");
  return *inner_;
}

TrigKind Observable::trig_kind() const {
  if (kind_ != Kind::Trig)
    throw DomainError("trig_kind: not a trigonometric observable");
  return trig_kind_;
}

int Observable::frequency() const {
  if (kind_ != Kind::Trig)
    throw DomainError("frequency: not a trigonometric observable");
  return frequency_;
}

Observable Observable::scaled(double factor) const {
  if (kind_ != Kind::LocallyConstant)
    throw DomainError("scaled: observable has no window table");
  std::vector<double> table = table_;
  for (double& v : table) v *= factor;
  return locally_constant(alphabet_, range_, std::move(table),
                          id_ + "*" + std::to_string(factor));
}

Observable Observable::plus_constant(double shift) const {
  if (kind_ != Kind::LocallyConstant)
    throw DomainError("plus_constant: observable has no window table");
  std::vector<double> table = table_;
  for (double& v : table) v += shift;
  return locally_constant(alphabet_, range_, std::move(table),
                          id_ + "+" + std::to_string(shift));
}

std::vector<std::int64_t> geometric_checkpoints(std::int64_t horizon,
                                                double ratio) {
  if (horizon < 1) throw DomainError("checkpoints: horizon < 1");
  if (!(ratio > 1.0)) throw DomainError("checkpoints: ratio must exceed 1");
  std::vector<std::int64_t> out;
  double v = 1.0;
  while (true) {
    auto n = static_cast<std::int64_t>(std::ceil(v - 1e-9));
    if (n >= horizon) break;
    if (out.empty() || out.back() != n) out.push_back(n);
    v *= ratio;
  }
  out.push_back(horizon);
  return out;
}

BirkhoffTrace birkhoff_averages(const Word& w, const Observable& phi,
                                const std::vector<std::int64_t>& checkpoints) {
  if (phi.kind() == Observable::Kind::Trig)
    throw DomainError(
        "birkhoff averages: trigonometric observables pair with circle "
        "orbits");
  if (checkpoints.empty()) throw DomainError("birkhoff averages: no checkpoints");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1)
      throw DomainError("birkhoff averages: checkpoint < 1");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      throw DomainError("birkhoff averages: checkpoints must increase");
  }
  const std::int64_t need = checkpoints.back() + phi.range() - 1;
  if (static_cast<std::int64_t>(w.size()) < need)
    throw DomainError("birkhoff averages: word shorter than final checkpoint");

  BirkhoffTrace trace;
  trace.observable_id = phi.id();
  trace.checkpoints = checkpoints;
  trace.averages.reserve(checkpoints.size());
  KahanSum sum;
  std::size_t next = 0;
  for (std::int64_t i = 0; i < checkpoints.back(); ++i) {
    sum.add(phi.eval(w, i));
    if (i + 1 == checkpoints[next]) {
      trace.averages.push_back(sum.total /
                               static_cast<double>(checkpoints[next]));
      ++next;
    }
  }
  return trace;
}

BirkhoffTrace birkhoff_averages(const SymbolicPoint& x, const Observable& phi,
                                const std::vector<std::int64_t>& checkpoints) {
  if (phi.kind() == Observable::Kind::Trig)
    throw DomainError(
        "birkhoff averages: trigonometric observables pair with circle "
        "orbits");
  if (checkpoints.empty()) throw DomainError("birkhoff averages: no checkpoints");
  const std::int64_t need = checkpoints.back() + phi.range() - 1;
  return birkhoff_averages(x.materialize(need), phi, checkpoints);
}

std::optional<Certificate> irregularity_certificate(const BirkhoffTrace& trace,
                                                    double tol) {
  if (!(tol > 0.0)) throw DomainError("certificate: tolerance must be positive");
  const std::size_t n = trace.averages.size();
  if (n < 6) return std::nullopt;

  const auto [lo_it, hi_it] =
      std::minmax_element(trace.averages.begin(), trace.averages.end());
  double c_lo = *lo_it;
  double c_hi = *hi_it;
  if (c_hi - c_lo <= 0.0) return std::nullopt;

  // Two-means with extreme seeding is deterministic: assignments depend
  // only on the midpoint, which moves monotonically toward a fixpoint.
  std::vector<char> in_high(n, 0);
  for (int iter = 0; iter < 100; ++iter) {
    double mid = 0.5 * (c_lo + c_hi);
    bool changed = false;
    double s_lo = 0.0, s_hi = 0.0;
    std::size_t n_lo = 0, n_hi = 0;
    for (std::size_t i = 0; i < n; ++i) {
      char hi = trace.averages[i] > mid ? 1 : 0;
      if (hi != in_high[i]) changed = true;
      in_high[i] = hi;
      if (hi) {
        s_hi += trace.averages[i];
        ++n_hi;
      } else {
        s_lo += trace.averages[i];
        ++n_lo;
      }
    }
    if (n_lo == 0 || n_hi == 0) return std::nullopt;
    c_lo = s_lo / static_cast<double>(n_lo);
    c_hi = s_hi / static_cast<double>(n_hi);
    if (!changed) break;
  }

  CertificateSide low, high;
  double lo_min = std::numeric_limits<double>::infinity(), lo_max = -lo_min;
  double hi_min = lo_min, hi_max = -lo_min;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_high[i]) {
      high.indices.push_back(trace.checkpoints[i]);
      hi_min = std::min(hi_min, trace.averages[i]);
      hi_max = std::max(hi_max, trace.averages[i]);
    } else {
      low.indices.push_back(trace.checkpoints[i]);
      lo_min = std::min(lo_min, trace.averages[i]);
      lo_max = std::max(lo_max, trace.averages[i]);
    }
  }
  if (low.indices.size() < 3 || high.indices.size() < 3) return std::nullopt;
  low.limit = c_lo;
  low.oscillation = lo_max - lo_min;
  high.limit = c_hi;
  high.oscillation = hi_max - hi_min;
  if (low.oscillation > tol || high.oscillation > tol) return std::nullopt;
  double gap = high.limit - low.limit;
  if (gap < 2.0 * tol) return std::nullopt;

  Certificate cert;
  cert.observable_id = trace.observable_id;
  cert.low = std::move(low);
  cert.high = std::move(high);
  cert.gap = gap;
  cert.tol = tol;
  cert.block_aligned = false;
  return cert;
}

void verify_certificate(const Word& w, const Observable& phi,
                        const Certificate& cert) {
  if (cert.block_aligned)
    throw DomainError(
        "verify: block-aligned certificates are checked against their glue "
        "plan");
  std::vector<std::int64_t> all = cert.low.indices;
  all.insert(all.end(), cert.high.indices.begin(), cert.high.indices.end());
  std::sort(all.begin(), all.end());
  BirkhoffTrace trace = birkhoff_averages(w, phi, all);

  auto lookup = [&](std::int64_t idx) {
    auto it = std::lower_bound(trace.checkpoints.begin(),
                               trace.checkpoints.end(), idx);
    return trace.averages[static_cast<std::size_t>(
        it - trace.checkpoints.begin())];
  };
  auto check_side = [&](const CertificateSide& side, const char* name) {
    if (side.indices.size() < 3)
      throw InternalError(std::string("certificate ") + name +
                          " side has fewer than 3 checkpoints");
    double mn = std::numeric_limits<double>::infinity(), mx = -mn, sum = 0.0;
    for (std::int64_t idx : side.indices) {
      double a = lookup(idx);
      mn = std::min(mn, a);
      mx = std::max(mx, a);
      sum += a;
    }
    double mean = sum / static_cast<double>(side.indices.size());
    if (std::abs(mean - side.limit) > 1e-9)
      throw InternalError(std::string("certificate ") + name +
                          " limit does not match recomputation");
    if (std::abs((mx - mn) - side.oscillation) > 1e-9)
      throw InternalError(std::string("certificate ") + name +
                          " oscillation does not match recomputation");
    if (side.oscillation > cert.tol)
      throw InternalError(std::string("certificate ") + name +
                          " oscillation exceeds tolerance");
  };
  check_side(cert.low, "low");
  check_side(cert.high, "high");
  if (std::abs((cert.high.limit - cert.low.limit) - cert.gap) > 1e-9)
    throw InternalError("certificate gap does not match recomputation");
  if (cert.gap < 2.0 * cert.tol)
    throw InternalError("certificate gap below twice the tolerance");
}

std::optional<WitnessPair> truly_observable_witness(
    const std::vector<MeasureModel>& pool, const Observable& phi) {
  if (pool.size() < 2) return std::nullopt;
  std::vector<BigRational> ints;
  ints.reserve(pool.size());
  for (const MeasureModel& mu : pool) ints.push_back(integrate_exact(mu, phi));

  const BigRational threshold(1, 1000000000);
  BigRational best(0);
  WitnessPair out;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      BigRational d = ints[i] - ints[j];
      if (d < 0) d = -d;
      if (d > best) {
        best = d;
        out.first = i;
        out.second = j;
      }
    }
  }
  if (best <= threshold) return std::nullopt;
  out.gap = static_cast<double>(best);
  return out;
}

}  // namespace shiftlab
