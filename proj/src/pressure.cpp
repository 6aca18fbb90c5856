#include "shiftlab/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace shiftlab {

namespace {

constexpr std::int64_t kMaxRecodeStates = 1 << 20;
constexpr std::int64_t kMaxRecodeCells = 1 << 22;
constexpr double kPowerTarget = 1e-13;
constexpr int kPowerCap = 100000;

// Natural log of a positive big integer, scaling down first so the double
// conversion cannot overflow.
double log_big(const BigInt& x) {
  if (x <= 0) throw InternalError("log of a nonpositive count");
  const unsigned bits = boost::multiprecision::msb(x);
  if (bits <= 900) return std::log(x.convert_to<double>());
  const unsigned drop = bits - 512;
  BigInt shifted = x >> drop;
  return std::log(shifted.convert_to<double>()) +
         static_cast<double>(drop) * std::log(2.0);
}

void check_transfer_inputs(const ShiftSpace& space, const Observable& phi) {
  if (phi.kind() != Observable::Kind::LocallyConstant)
    throw DomainError("transfer pressure: potential must be locally constant");
  if (phi.alphabet() != space.alphabet_size())
    throw DomainError("transfer pressure: alphabet mismatch");
  if (space.kind() == SpaceKind::Beta)
    throw DomainError(
        "transfer pressure: beta-shifts are estimated at cylinder depth, "
        "not by a finite transfer matrix");
  if (!space.mixing_gap().has_value())
    throw DomainError("transfer pressure: space is not mixing");
}

// Potential-weighted adjacency on depth-r words. Stored implicitly: the word
// u steps to (u mod k^(r-1))*k + c, weighted by e^{phi(u)}.
struct Recode {
  int r = 1;
  std::int64_t k = 2;
  std::int64_t states = 0;
  std::int64_t stride = 0;
  std::vector<char> admissible;
  std::vector<double> weight;
  const ShiftSpace* space = nullptr;

  bool edge(std::int64_t u, int c) const {
    if (r == 1)
      return space->allowed(static_cast<Symbol>(u), static_cast<Symbol>(c));
    // Both endpoint words admissible forces the seam for one-step memory.
    return admissible[static_cast<std::size_t>((u % stride) * k + c)] != 0;
  }
};

Recode build_recode(const ShiftSpace& space, const Observable& phi) {
  Recode rc;
  rc.r = phi.range();
  rc.k = space.alphabet_size();
  rc.space = &space;
  rc.states = 1;
  for (int i = 0; i < rc.r; ++i) {
    rc.states *= rc.k;
    if (rc.states > kMaxRecodeStates)
      throw DomainError("transfer pressure: word recoding too large");
  }
  if (rc.states * rc.k > kMaxRecodeCells)
    throw DomainError("transfer pressure: word recoding too large");
  rc.stride = rc.states / rc.k;
  rc.admissible.assign(static_cast<std::size_t>(rc.states), 0);
  rc.weight.assign(static_cast<std::size_t>(rc.states), 0.0);
  Word w(std::vector<Symbol>(static_cast<std::size_t>(rc.r), 0));
  for (std::int64_t u = 0; u < rc.states; ++u) {
    std::int64_t rest = u;
    for (int i = rc.r - 1; i >= 0; --i) {
      w[static_cast<std::size_t>(i)] = static_cast<Symbol>(rest % rc.k);
      rest /= rc.k;
    }
    if (space.is_admissible(w)) {
      rc.admissible[static_cast<std::size_t>(u)] = 1;
      rc.weight[static_cast<std::size_t>(u)] =
          std::exp(phi.table()[static_cast<std::size_t>(u)]);
    }
  }
  return rc;
}

struct PowerResult {
  double lambda = 0.0;
  std::vector<double> vec;
  double residual = 0.0;
  int iterations = 0;
};

// Power iteration from the all-ones vector with Rayleigh-quotient eigenvalue
// estimates. The residual is ||Bx - lambda x||_inf / max(1, lambda) with x
// normalized to ||x||_inf = 1, so it is scale-free.
PowerResult power_iterate(
    std::int64_t dim, const std::vector<char>& mask,
    const std::function<void(const std::vector<double>&, std::vector<double>&)>&
        apply) {
  std::vector<double> x(static_cast<std::size_t>(dim), 0.0);
  bool any = false;
  for (std::int64_t i = 0; i < dim; ++i)
    if (mask[static_cast<std::size_t>(i)]) {
      x[static_cast<std::size_t>(i)] = 1.0;
      any = true;
    }
  if (!any)
    throw DomainError("transfer pressure: no admissible words at this depth");

  std::vector<double> y(static_cast<std::size_t>(dim), 0.0);
  PowerResult out;
  for (int it = 1; it <= kPowerCap; ++it) {
    apply(x, y);
    double num = 0.0, den = 0.0;
    for (std::int64_t i = 0; i < dim; ++i) {
      num += x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
      den += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    }
    const double lambda = num / den;
    if (!(lambda > 0.0))
      throw InternalError("transfer pressure: spectral radius not positive");
    double res = 0.0;
    double norm = 0.0;
    for (std::int64_t i = 0; i < dim; ++i) {
      res = std::max(res, std::abs(y[static_cast<std::size_t>(i)] -
                                   lambda * x[static_cast<std::size_t>(i)]));
      norm = std::max(norm, std::abs(y[static_cast<std::size_t>(i)]));
    }
    if (!(norm > 0.0))
      throw InternalError("transfer pressure: iteration vector vanished");
    for (std::int64_t i = 0; i < dim; ++i)
      x[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] / norm;
    out.lambda = lambda;
    out.iterations = it;
    out.residual = res / std::max(1.0, lambda);
    if (out.residual <= kPowerTarget) {
      out.vec = x;
      return out;
    }
  }
  throw InternalError(
      "transfer pressure: power iteration stagnated after 100000 steps");
}

}  // namespace

std::string PressureResult::method_name() const {
  switch (method) {
    case Method::TransferExact:
      return "transfer_exact";
    case Method::CylinderEstimate:
      return "cylinder_estimate(" + std::to_string(n) + ")";
    case Method::VariationalLower:
      return "variational_lower";
  }
  throw InternalError("pressure: unknown method");
}

PressureResult transfer_pressure(const ShiftSpace& space,
                                 const Observable& phi) {
  check_transfer_inputs(space, phi);
  const Recode rc = build_recode(space, phi);
  auto apply = [&rc](const std::vector<double>& x, std::vector<double>& y) {
    y.assign(static_cast<std::size_t>(rc.states), 0.0);
    for (std::int64_t u = 0; u < rc.states; ++u) {
      if (!rc.admissible[static_cast<std::size_t>(u)]) continue;
      double acc = 0.0;
      const std::int64_t base = (u % rc.stride) * rc.k;
      for (int c = 0; c < rc.k; ++c) {
        const std::int64_t v = base + c;
        if (rc.admissible[static_cast<std::size_t>(v)] && rc.edge(u, c))
          acc += x[static_cast<std::size_t>(v)];
      }
      y[static_cast<std::size_t>(u)] =
          rc.weight[static_cast<std::size_t>(u)] * acc;
    }
  };
  PowerResult pr = power_iterate(rc.states, rc.admissible, apply);
  PressureResult res;
  res.value = std::log(pr.lambda);
  res.method = PressureResult::Method::TransferExact;
  res.residual = pr.residual;
  res.iterations = pr.iterations;
  res.error_bound = pr.residual;
  return res;
}

std::pair<MeasureModel, PressureResult> equilibrium_markov(
    const ShiftSpace& space, const Observable& phi) {
  check_transfer_inputs(space, phi);
  if (phi.range() != 1)
    throw DomainError(
        "equilibrium chain: only single-symbol potentials tilt to a one-step "
        "chain in this model family");
  const Recode rc = build_recode(space, phi);
  auto apply = [&rc](const std::vector<double>& x, std::vector<double>& y) {
    y.assign(static_cast<std::size_t>(rc.states), 0.0);
    for (std::int64_t u = 0; u < rc.states; ++u) {
      double acc = 0.0;
      for (int c = 0; c < rc.k; ++c)
        if (rc.edge(u, c)) acc += x[static_cast<std::size_t>(c)];
      y[static_cast<std::size_t>(u)] =
          rc.weight[static_cast<std::size_t>(u)] * acc;
    }
  };
  PowerResult pr = power_iterate(rc.states, rc.admissible, apply);
  const double lambda = pr.lambda;
  const std::vector<double>& h = pr.vec;
  for (double v : h)
    if (!(v > 0.0))
      throw InternalError("equilibrium chain: eigenvector not positive");

  PressureResult res;
  res.value = std::log(lambda);
  res.method = PressureResult::Method::TransferExact;
  res.residual = pr.residual;
  res.iterations = pr.iterations;
  res.error_bound = pr.residual;

  MeasureModel model = [&] {
    if (space.kind() == SpaceKind::Full) {
      double total = 0.0;
      for (double v : h) total += v;
      std::vector<double> weights;
      for (double v : h) weights.push_back(v / total);
      return MeasureModel::bernoulli(space, weights);
    }
    std::vector<std::vector<double>> rows(
        static_cast<std::size_t>(rc.k),
        std::vector<double>(static_cast<std::size_t>(rc.k), 0.0));
    for (std::int64_t u = 0; u < rc.k; ++u)
      for (int c = 0; c < rc.k; ++c)
        if (rc.edge(u, c))
          rows[static_cast<std::size_t>(u)][static_cast<std::size_t>(c)] =
              rc.weight[static_cast<std::size_t>(u)] *
              h[static_cast<std::size_t>(c)] /
              (lambda * h[static_cast<std::size_t>(u)]);
    return MeasureModel::markov(space, rows);
  }();

  const double identity =
      model.entropy_rate() + integrate(model, phi) - res.value;
  if (std::abs(identity) > 1e-8)
    throw InternalError(
        "equilibrium chain: entropy + integral misses the pressure");
  return {std::move(model), std::move(res)};
}

PressureResult cylinder_pressure_estimate(const ShiftSpace& space,
                                          const Observable& phi,
                                          std::int64_t n) {
  if (phi.kind() != Observable::Kind::LocallyConstant)
    throw DomainError("cylinder pressure: potential must be locally constant");
  if (phi.alphabet() != space.alphabet_size())
    throw DomainError("cylinder pressure: alphabet mismatch");
  const int r = phi.range();
  if (n < r)
    throw DomainError("cylinder pressure: depth shorter than the potential "
                      "window");
  if (n > 1000000) throw DomainError("cylinder pressure: depth too large");

  const std::int64_t k = space.alphabet_size();
  const std::int64_t keys = space.walker_count();
  std::int64_t windows = 1;
  for (int i = 0; i + 1 < r; ++i) windows *= k;
  if (keys * windows * k > kMaxRecodeCells)
    throw DomainError("cylinder pressure: state table too large");

  // State: (walker key, last r-1 symbols). Seed with the admissible
  // (r-1)-prefixes, then each appended symbol completes one window.
  std::vector<double> z(static_cast<std::size_t>(keys * windows), 0.0);
  {
    Word w(std::vector<Symbol>(static_cast<std::size_t>(r - 1), 0));
    for (std::int64_t win = 0; win < windows; ++win) {
      std::int64_t rest = win;
      for (int i = r - 2; i >= 0; --i) {
        w[static_cast<std::size_t>(i)] = static_cast<Symbol>(rest % k);
        rest /= k;
      }
      int key = space.walker_advance(space.walker_initial(), w);
      if (key >= 0) z[static_cast<std::size_t>(key * windows + win)] = 1.0;
    }
  }

  double logscale = 0.0;
  std::vector<double> y(z.size(), 0.0);
  const std::int64_t steps = n - (r - 1);
  for (std::int64_t t = 0; t < steps; ++t) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::int64_t key = 0; key < keys; ++key) {
      for (std::int64_t win = 0; win < windows; ++win) {
        const double zv = z[static_cast<std::size_t>(key * windows + win)];
        if (zv == 0.0) continue;
        for (int c = 0; c < k; ++c) {
          int nk = space.walker_step(static_cast<int>(key),
                                     static_cast<Symbol>(c));
          if (nk < 0) continue;
          const std::int64_t full = win * k + c;
          const double wgt =
              std::exp(phi.table()[static_cast<std::size_t>(full)]);
          const std::int64_t nwin = full % windows;
          y[static_cast<std::size_t>(nk * windows + nwin)] += wgt * zv;
        }
      }
    }
    double mx = 0.0;
    for (double v : y) mx = std::max(mx, v);
    if (!(mx > 0.0))
      throw DomainError("cylinder pressure: no admissible words survive");
    for (std::size_t i = 0; i < y.size(); ++i) z[i] = y[i] / mx;
    logscale += std::log(mx);
  }
  double total = 0.0;
  for (double v : z) total += v;

  PressureResult res;
  res.value = (logscale + std::log(total)) / static_cast<double>(n);
  res.method = PressureResult::Method::CylinderEstimate;
  res.n = n;
  return res;
}

PressureResult cylinder_pressure_estimate(const ShiftSpace& space,
                                          const std::vector<Word>& words,
                                          const Observable& phi,
                                          std::int64_t n) {
  if (words.empty()) throw DomainError("cylinder pressure: empty word family");
  if (phi.kind() != Observable::Kind::LocallyConstant)
    throw DomainError("cylinder pressure: potential must be locally constant");
  if (phi.alphabet() != space.alphabet_size())
    throw DomainError("cylinder pressure: alphabet mismatch");
  const int r = phi.range();
  if (n < r)
    throw DomainError("cylinder pressure: depth shorter than the potential "
                      "window");

  std::vector<double> sums;
  sums.reserve(words.size());
  for (const Word& w : words) {
    if (static_cast<std::int64_t>(w.size()) != n)
      throw DomainError("cylinder pressure: word length differs from depth");
    if (!space.is_admissible(w))
      throw DomainError("cylinder pressure: word not admissible");
    double s = 0.0;
    for (std::int64_t i = 0; i + r <= n; ++i)
      s += phi.eval(w, static_cast<std::size_t>(i));
    sums.push_back(s);
  }
  const double m = *std::max_element(sums.begin(), sums.end());
  double acc = 0.0;
  for (double s : sums) acc += std::exp(s - m);

  PressureResult res;
  res.value = (m + std::log(acc)) / static_cast<double>(n);
  res.method = PressureResult::Method::CylinderEstimate;
  res.n = n;
  return res;
}

PressureResult cylinder_pressure_estimate(const ShiftSpace& space,
                                          const SeparatedFamily& family,
                                          const Observable& phi) {
  PressureResult res;
  res.value = family.weighted_rate(space, phi);
  res.method = PressureResult::Method::CylinderEstimate;
  res.n = family.total_length;
  return res;
}

double separated_entropy_estimate(const ShiftSpace& space, int n,
                                  double delta) {
  if (n < 1 || n > 24)
    throw DomainError("separation scan: n must lie in [1, 24]");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw DomainError("separation scan: delta must lie in (0, 1)");
  const int d = std::max(
      1, static_cast<int>(std::ceil(delta * static_cast<double>(n) - 1e-12)));

  const BigInt count = space.count_words(n);
  if (count == 0) throw DomainError("separation scan: no admissible words");
  if (d <= 1) {
    // Distinct words already differ somewhere, so all of them qualify.
    return log_big(count) / static_cast<double>(n);
  }
  if (count > BigInt(1 << 16))
    throw DomainError(
        "separation scan: too many admissible words for a pairwise scan");

  std::vector<Word> accepted;
  Word w(std::vector<Symbol>(static_cast<std::size_t>(n), 0));
  std::vector<int> keys(static_cast<std::size_t>(n) + 1, 0);
  keys[0] = space.walker_initial();
  const int k = space.alphabet_size();

  // Depth-first lexicographic enumeration of admissible n-words.
  std::function<void(int)> scan = [&](int pos) {
    if (pos == n) {
      for (const Word& a : accepted) {
        int diff = 0;
        for (int i = 0; i < n && diff < d; ++i)
          if (a[static_cast<std::size_t>(i)] != w[static_cast<std::size_t>(i)])
            ++diff;
        if (diff < d) return;  // too close to an accepted word
      }
      accepted.push_back(w);
      return;
    }
    for (int c = 0; c < k; ++c) {
      int nk = space.walker_step(keys[static_cast<std::size_t>(pos)],
                                 static_cast<Symbol>(c));
      if (nk < 0) continue;
      w[static_cast<std::size_t>(pos)] = static_cast<Symbol>(c);
      keys[static_cast<std::size_t>(pos) + 1] = nk;
      scan(pos + 1);
    }
  };
  scan(0);
  if (accepted.empty())
    throw InternalError("separation scan: greedy scan accepted nothing");
  return std::log(static_cast<double>(accepted.size())) /
         static_cast<double>(n);
}

namespace {

double bowen_root(const Observable& phi, double tol,
                  const std::function<double(double)>& pressure_at) {
  if (!(tol > 0.0)) throw DomainError("Bowen root: tolerance must be positive");
  if (phi.kind() != Observable::Kind::LocallyConstant)
    throw DomainError("Bowen root: potential must be locally constant");
  if (!(phi.min_value() > 0.0))
    throw DomainError("Bowen root: potential must be strictly positive");

  const double p0 = pressure_at(0.0);
  if (p0 <= 0.0) return 0.0;
  const double smax = p0 / phi.min_value();
  const double phi_hi = pressure_at(smax);
  if (phi_hi > 1e-9)
    throw InternalError("Bowen root: bracket endpoint has positive pressure");
  if (!(p0 > phi_hi))
    throw InternalError("Bowen root: pressure map is not decreasing");

  double lo = 0.0, hi = smax;
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (pressure_at(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double bs_dimension(const ShiftSpace& space, const Observable& phi,
                    double tol) {
  return bowen_root(phi, tol, [&](double s) {
    return transfer_pressure(space, phi.scaled(-s)).value;
  });
}

double bs_dimension(const ShiftSpace& space, const std::vector<Word>& words,
                    const Observable& phi, double tol, std::int64_t n) {
  return bowen_root(phi, tol, [&](double s) {
    return cylinder_pressure_estimate(space, words, phi.scaled(-s), n).value;
  });
}

std::vector<BetaEntropyRow> beta_entropy_estimate(
    const BetaSpec& beta, const std::vector<std::int64_t>& n_list,
    int kneading_depth) {
  if (n_list.empty()) throw DomainError("entropy estimate: empty n list");
  ShiftSpace space = ShiftSpace::beta(beta, kneading_depth);
  const double lnb = std::log(space.beta_value());
  std::vector<BetaEntropyRow> rows;
  for (std::int64_t n : n_list) {
    if (n < 1 || n > 1000000)
      throw DomainError("entropy estimate: n out of range");
    BetaEntropyRow row;
    row.n = n;
    row.estimate = log_big(space.count_words(n)) / static_cast<double>(n);
    row.error_vs_log_beta = std::abs(row.estimate - lnb);
    row.hausdorff_normalized = row.estimate / lnb;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace shiftlab
