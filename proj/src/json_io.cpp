#include "shiftlab/json_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "shiftlab/word.hpp"

namespace shiftlab::io {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw DomainError("cannot parse " + what + " from '" + text + "'");
  }
}

long long parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw DomainError("cannot parse " + what + " from '" + text + "'");
  }
}

Word parse_digit_word(const std::string& text, const std::string& what) {
  if (text.empty()) throw DomainError(what + " must be a nonempty digit word");
  std::vector<Symbol> syms;
  for (char c : text) {
    if (c < '0' || c > '9')
      throw DomainError(what + " must use digits 0-9, got '" + text + "'");
    syms.push_back(static_cast<Symbol>(c - '0'));
  }
  return Word(std::move(syms));
}

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& what) {
  std::vector<double> out;
  for (const std::string& piece : split(text, ','))
    out.push_back(parse_double(piece, what));
  return out;
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw DomainError(std::string("missing field '") + key + "' in " + j.dump());
  return *it;
}

std::string kind_of(const json& j) {
  const json& k = field(j, "kind");
  if (!k.is_string()) throw DomainError("field 'kind' must be a string");
  return k.get<std::string>();
}

json beta_spec_to_json(const BetaSpec& spec) {
  json j;
  j["quadratic"] = spec.quadratic;
  if (spec.quadratic) {
    j["p"] = spec.p;
    j["q"] = spec.q;
    j["d"] = spec.d;
    j["r"] = spec.r;
  } else {
    j["decimal"] = spec.decimal;
  }
  return j;
}

BetaSpec beta_spec_from_json(const json& j) {
  bool quadratic = field(j, "quadratic").get<bool>();
  if (quadratic)
    return BetaSpec::from_quadratic(
        field(j, "p").get<long long>(), field(j, "q").get<long long>(),
        field(j, "d").get<long long>(), field(j, "r").get<long long>());
  return BetaSpec::from_decimal(field(j, "decimal").get<std::string>());
}

json side_to_json(const CertificateSide& side) {
  json j;
  j["indices"] = side.indices;
  j["limit"] = side.limit;
  j["oscillation"] = side.oscillation;
  return j;
}

constexpr int kDefaultKneadingDepth = 64;

}  // namespace

// --- Shift spaces -----------------------------------------------------------

json space_to_json(const ShiftSpace& space) {
  json j;
  switch (space.kind()) {
    case SpaceKind::Full:
      j["kind"] = "full";
      j["alphabet"] = space.alphabet_size();
      break;
    case SpaceKind::Sft:
      j["kind"] = "sft";
      j["transition"] = space.transition();
      break;
    case SpaceKind::Beta:
      j["kind"] = "beta";
      j["beta"] = beta_spec_to_json(space.beta_spec());
      j["kneading_depth"] = space.kneading().size();
      break;
  }
  return j;
}

ShiftSpace space_from_json(const json& j) {
  std::string kind = kind_of(j);
  if (kind == "full") return ShiftSpace::full(field(j, "alphabet").get<int>());
  if (kind == "sft")
    return ShiftSpace::sft(
        field(j, "transition").get<std::vector<std::vector<int>>>());
  if (kind == "beta") {
    int depth = j.value("kneading_depth", kDefaultKneadingDepth);
    return ShiftSpace::beta(beta_spec_from_json(field(j, "beta")), depth);
  }
  throw DomainError("unknown space kind '" + kind + "'");
}

ShiftSpace space_from_string(const std::string& text) {
  if (text == "golden") return ShiftSpace::sft({{1, 1}, {1, 0}});
  auto parts = split(text, ':');
  const std::string& head = parts[0];
  if (head == "full") {
    if (parts.size() != 2) throw DomainError("expected full:K, got '" + text + "'");
    return ShiftSpace::full(static_cast<int>(parse_int(parts[1], "alphabet size")));
  }
  if (head == "sft") {
    if (parts.size() != 2)
      throw DomainError("expected sft:ROWS, got '" + text + "'");
    std::vector<std::vector<int>> rows;
    for (const std::string& row_text : split(parts[1], ',')) {
      std::vector<int> row;
      for (char c : row_text) {
        if (c != '0' && c != '1')
          throw DomainError("transition rows must be 0/1 digits, got '" +
                            row_text + "'");
        row.push_back(c - '0');
      }
      rows.push_back(std::move(row));
    }
    return ShiftSpace::sft(std::move(rows));
  }
  if (head == "beta") {
    if (parts.size() < 2)
      throw DomainError("expected beta:X[:DEPTH], got '" + text + "'");
    int depth = kDefaultKneadingDepth;
    BetaSpec spec;
    if (parts[1] == "golden") {
      spec = BetaSpec::golden();
      if (parts.size() == 3)
        depth = static_cast<int>(parse_int(parts[2], "kneading depth"));
      else if (parts.size() > 3)
        throw DomainError("expected beta:golden[:DEPTH], got '" + text + "'");
    } else if (parts[1] == "quad") {
      if (parts.size() < 3)
        throw DomainError("expected beta:quad:p,q,d,r[:DEPTH], got '" + text + "'");
      auto nums = split(parts[2], ',');
      if (nums.size() != 4)
        throw DomainError("quadratic base needs p,q,d,r, got '" + parts[2] + "'");
      spec = BetaSpec::from_quadratic(
          parse_int(nums[0], "p"), parse_int(nums[1], "q"),
          parse_int(nums[2], "d"), parse_int(nums[3], "r"));
      if (parts.size() == 4)
        depth = static_cast<int>(parse_int(parts[3], "kneading depth"));
      else if (parts.size() > 4)
        throw DomainError("expected beta:quad:p,q,d,r[:DEPTH], got '" + text + "'");
    } else {
      spec = BetaSpec::from_decimal(parts[1]);
      if (parts.size() == 3)
        depth = static_cast<int>(parse_int(parts[2], "kneading depth"));
      else if (parts.size() > 3)
        throw DomainError("expected beta:X[:DEPTH], got '" + text + "'");
    }
    return ShiftSpace::beta(spec, depth);
  }
  throw DomainError("unknown space shorthand '" + text + "'");
}

// --- Measures ---------------------------------------------------------------

json measure_to_json(const MeasureModel& mu) {
  json j;
  switch (mu.kind()) {
    case MeasureModel::Kind::Periodic: {
      j["kind"] = "periodic";
      std::vector<int> cycle;
      for (std::size_t i = 0; i < mu.cycle().size(); ++i)
        cycle.push_back(mu.cycle()[i]);
      j["cycle"] = cycle;
      break;
    }
    case MeasureModel::Kind::Bernoulli:
      j["kind"] = "bernoulli";
      j["weights"] = mu.weights();
      break;
    case MeasureModel::Kind::Markov:
      j["kind"] = "markov";
      j["rows"] = mu.rows();
      break;
    case MeasureModel::Kind::Mixture: {
      j["kind"] = "mixture";
      json comps = json::array();
      for (const auto& [weight, part] : mu.components()) {
        json c;
        c["weight"] = weight;
        c["measure"] = measure_to_json(part);
        comps.push_back(std::move(c));
      }
      j["components"] = std::move(comps);
      break;
    }
  }
  return j;
}

MeasureModel measure_from_json(const ShiftSpace& space, const json& j) {
  std::string kind = kind_of(j);
  if (kind == "periodic") {
    std::vector<Symbol> syms;
    for (int v : field(j, "cycle").get<std::vector<int>>())
      syms.push_back(static_cast<Symbol>(v));
    return MeasureModel::periodic(space, Word(std::move(syms)));
  }
  if (kind == "bernoulli")
    return MeasureModel::bernoulli(space,
                                   field(j, "weights").get<std::vector<double>>());
  if (kind == "markov")
    return MeasureModel::markov(
        space, field(j, "rows").get<std::vector<std::vector<double>>>());
  if (kind == "mixture") {
    std::vector<std::pair<double, MeasureModel>> comps;
    for (const json& c : field(j, "components")) {
      comps.emplace_back(field(c, "weight").get<double>(),
                         measure_from_json(space, field(c, "measure")));
    }
    return MeasureModel::mixture(std::move(comps));
  }
  throw DomainError("unknown measure kind '" + kind + "'");
}

MeasureModel measure_from_string(const ShiftSpace& space,
                                 const std::string& text) {
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "periodic")
    return MeasureModel::periodic(space, parse_digit_word(rest, "cycle"));
  if (head == "bernoulli")
    return MeasureModel::bernoulli(space,
                                   parse_double_list(rest, "bernoulli weight"));
  if (head == "markov") {
    std::vector<std::vector<double>> rows;
    for (const std::string& row_text : split(rest, '|'))
      rows.push_back(parse_double_list(row_text, "markov row entry"));
    return MeasureModel::markov(space, std::move(rows));
  }
  if (head == "mix") {
    std::vector<std::pair<double, MeasureModel>> comps;
    for (const std::string& piece : split(rest, '+')) {
      auto star = piece.find('*');
      if (star == std::string::npos)
        throw DomainError("mixture component must look like w*SPEC, got '" +
                          piece + "'");
      comps.emplace_back(
          parse_double(piece.substr(0, star), "mixture weight"),
          measure_from_string(space, piece.substr(star + 1)));
    }
    return MeasureModel::mixture(std::move(comps));
  }
  throw DomainError("unknown measure shorthand '" + text + "'");
}

// --- Observables ------------------------------------------------------------

json observable_to_json(const Observable& phi) {
  json j;
  switch (phi.kind()) {
    case Observable::Kind::LocallyConstant:
      j["kind"] = "locally_constant";
      j["range"] = phi.range();
      j["table"] = phi.table();
      break;
    case Observable::Kind::Coboundary:
      j["kind"] = "coboundary";
      j["constant"] = phi.constant();
      j["inner"] = observable_to_json(phi.inner());
      break;
    case Observable::Kind::Trig:
      j["kind"] = "trig";
      j["trig"] = phi.trig_kind() == TrigKind::Sin ? "sin" : "cos";
      j["frequency"] = phi.frequency();
      break;
  }
  j["id"] = phi.id();
  return j;
}

Observable observable_from_json(int alphabet, const json& j) {
  std::string kind = kind_of(j);
  std::string id = j.value("id", std::string());
  if (kind == "locally_constant")
    return Observable::locally_constant(
        alphabet, field(j, "range").get<int>(),
        field(j, "table").get<std::vector<double>>(), id);
  if (kind == "coboundary")
    return Observable::coboundary(observable_from_json(alphabet, field(j, "inner")),
                                  field(j, "constant").get<double>(), id);
  if (kind == "trig") {
    std::string t = field(j, "trig").get<std::string>();
    if (t != "sin" && t != "cos")
      throw DomainError("trig must be sin or cos, got '" + t + "'");
    return Observable::trig(t == "sin" ? TrigKind::Sin : TrigKind::Cos,
                            field(j, "frequency").get<int>(), id);
  }
  throw DomainError("unknown observable kind '" + kind + "'");
}

Observable observable_from_string(int alphabet, const std::string& text) {
  if (text == "first_symbol") return Observable::first_symbol(alphabet, text);
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "indicator")
    return Observable::indicator(alphabet, parse_digit_word(rest, "cylinder word"),
                                 text);
  if (head == "sin")
    return Observable::trig(TrigKind::Sin,
                            static_cast<int>(parse_int(rest, "frequency")), text);
  if (head == "cos")
    return Observable::trig(TrigKind::Cos,
                            static_cast<int>(parse_int(rest, "frequency")), text);
  if (head == "table") {
    auto second = rest.find(':');
    if (second == std::string::npos)
      throw DomainError("expected table:R:v0,v1,..., got '" + text + "'");
    int range = static_cast<int>(parse_int(rest.substr(0, second), "range"));
    return Observable::locally_constant(
        alphabet, range, parse_double_list(rest.substr(second + 1), "table value"),
        text);
  }
  if (head == "coboundary") {
    auto second = rest.find(':');
    if (second == std::string::npos)
      throw DomainError("expected coboundary:C:SPEC, got '" + text + "'");
    double constant = parse_double(rest.substr(0, second), "coboundary constant");
    Observable inner = observable_from_string(alphabet, rest.substr(second + 1));
    return Observable::coboundary(inner, constant, text);
  }
  throw DomainError("unknown observable shorthand '" + text + "'");
}

// --- Schedules --------------------------------------------------------------

json schedule_to_json(const ScheduleSpec& spec) {
  json j;
  switch (spec.growth) {
    case ScheduleSpec::Growth::Accelerating:
      j["growth"] = "accelerating";
      j["initial_length"] = spec.initial_length;
      break;
    case ScheduleSpec::Growth::GeometricSum:
      j["growth"] = "geometric_sum";
      j["initial_length"] = spec.initial_length;
      j["factor"] = spec.factor;
      break;
    case ScheduleSpec::Growth::Explicit:
      j["growth"] = "explicit";
      j["lengths"] = spec.lengths;
      break;
  }
  j["tol_initial"] = spec.tol_initial;
  j["tol_decay"] = spec.tol_decay;
  j["tol_floor"] = spec.tol_floor;
  j["horizon"] = spec.horizon;
  j["cert_depth"] = spec.cert_depth;
  j["max_gap"] = spec.max_gap;
  return j;
}

ScheduleSpec schedule_from_json(const json& j) {
  std::string growth = field(j, "growth").get<std::string>();
  ScheduleSpec spec;
  std::int64_t horizon = j.value("horizon", spec.horizon);
  if (growth == "accelerating") {
    spec = ScheduleSpec::accelerating(field(j, "initial_length").get<std::int64_t>(),
                                      horizon);
  } else if (growth == "geometric_sum") {
    spec = ScheduleSpec::geometric_sum(field(j, "initial_length").get<std::int64_t>(),
                                       field(j, "factor").get<double>(), horizon);
  } else if (growth == "explicit") {
    spec = ScheduleSpec::explicit_lengths(
        field(j, "lengths").get<std::vector<std::int64_t>>());
  } else {
    throw DomainError("unknown schedule growth '" + growth + "'");
  }
  spec.tol_initial = j.value("tol_initial", spec.tol_initial);
  spec.tol_decay = j.value("tol_decay", spec.tol_decay);
  spec.tol_floor = j.value("tol_floor", spec.tol_floor);
  spec.horizon = j.value("horizon", spec.horizon);
  spec.cert_depth = j.value("cert_depth", spec.cert_depth);
  spec.max_gap = j.value("max_gap", spec.max_gap);
  spec.validate();
  return spec;
}

ScheduleSpec schedule_from_string(const std::string& text) {
  auto parts = split(text, ':');
  const std::string& head = parts[0];
  if (head == "accelerating") {
    if (parts.size() != 2)
      throw DomainError("expected accelerating:L0, got '" + text + "'");
    ScheduleSpec defaults;
    return ScheduleSpec::accelerating(parse_int(parts[1], "initial length"),
                                      defaults.horizon);
  }
  if (head == "geometric") {
    if (parts.size() != 3)
      throw DomainError("expected geometric:L0:FACTOR, got '" + text + "'");
    ScheduleSpec defaults;
    return ScheduleSpec::geometric_sum(parse_int(parts[1], "initial length"),
                                       parse_double(parts[2], "factor"),
                                       defaults.horizon);
  }
  if (head == "explicit") {
    if (parts.size() != 2)
      throw DomainError("expected explicit:l1,l2,..., got '" + text + "'");
    std::vector<std::int64_t> lengths;
    for (const std::string& piece : split(parts[1], ','))
      lengths.push_back(parse_int(piece, "block length"));
    return ScheduleSpec::explicit_lengths(std::move(lengths));
  }
  throw DomainError("unknown schedule shorthand '" + text + "'");
}

// --- Results ----------------------------------------------------------------

json plan_to_json(const GluePlan& plan) {
  json j;
  j["seed"] = plan.seed;
  j["horizon"] = plan.horizon;
  j["cert_depth"] = plan.cert_depth;
  j["closed"] = plan.closed;
  j["period"] = plan.period;
  j["target_ids"] = plan.target_ids;
  j["theta"] = plan.theta;
  j["complete_block_ends"] = plan.complete_block_ends();
  json blocks = json::array();
  for (const PlanBlock& b : plan.blocks) {
    json jb;
    jb["index"] = b.index;
    jb["target"] = b.target;
    jb["bridge_length"] = b.bridge_length;
    jb["segment_length"] = b.segment_length;
    jb["end"] = b.end;
    jb["tol"] = b.tol;
    jb["deviation"] = b.deviation;
    jb["depth"] = b.depth;
    jb["retries"] = b.retries;
    jb["complete"] = b.complete;
    blocks.push_back(std::move(jb));
  }
  j["blocks"] = std::move(blocks);
  return j;
}

json certificate_to_json(const Certificate& cert) {
  json j;
  j["observable"] = cert.observable_id;
  j["low"] = side_to_json(cert.low);
  j["high"] = side_to_json(cert.high);
  j["gap"] = cert.gap;
  j["tol"] = cert.tol;
  j["block_aligned"] = cert.block_aligned;
  return j;
}

json built_point_to_json(const BuiltPoint& built) {
  json j;
  j["plan"] = plan_to_json(built.plan);
  json targets = json::array();
  for (const MeasureModel& mu : built.targets)
    targets.push_back(measure_to_json(mu));
  j["targets"] = std::move(targets);
  json certs = json::array();
  for (const Certificate& cert : built.certificates)
    certs.push_back(certificate_to_json(cert));
  j["certificates"] = std::move(certs);
  return j;
}

json pressure_to_json(const PressureResult& result) {
  json j;
  j["value"] = result.value;
  j["method"] = result.method_name();
  j["n"] = result.n;
  j["depth_offset"] = result.depth_offset;
  if (result.error_bound) j["error_bound"] = *result.error_bound;
  if (result.method == PressureResult::Method::TransferExact) {
    j["residual"] = result.residual;
    j["iterations"] = result.iterations;
  }
  return j;
}

json trace_to_json(const BirkhoffTrace& trace) {
  json j;
  j["observable"] = trace.observable_id;
  j["checkpoints"] = trace.checkpoints;
  j["averages"] = trace.averages;
  return j;
}

json family_to_json(const SeparatedFamily& family) {
  json j;
  j["total_length"] = family.total_length;
  j["free_fraction"] = family.free_fraction;
  j["block_length"] = family.block_length;
  j["cardinality"] = family.cardinality.str();
  j["rate"] = family.rate;
  json slots = json::array();
  for (const FamilySlot& slot : family.slots) {
    json js;
    js["position"] = slot.position;
    js["length"] = slot.length;
    js["from_key"] = slot.from_key;
    js["count"] = slot.count.str();
    slots.push_back(std::move(js));
  }
  j["slots"] = std::move(slots);
  return j;
}

json demo_report_to_json(const DemoReport& report) {
  json j;
  json freqs = json::array();
  for (const FrequencyWitness& w : report.frequencies) {
    json jf;
    jf["m"] = w.m;
    jf["sin_integral"] = w.sin_integral;
    jf["cos_integral"] = w.cos_integral;
    jf["sin_gap"] = w.sin_gap;
    jf["cos_gap"] = w.cos_gap;
    freqs.push_back(std::move(jf));
  }
  j["frequencies"] = std::move(freqs);
  j["certificates"] = json::array(
      {certificate_to_json(report.sin_certificate),
       certificate_to_json(report.cos_certificate)});
  j["certificate_tol"] = report.certificate_tol;
  j["horizon"] = report.horizon;
  j["seed"] = report.seed;
  j["plan"] = plan_to_json(report.built.plan);
  return j;
}

// --- Traces as CSV ----------------------------------------------------------

std::string traces_to_csv(const std::vector<BirkhoffTrace>& traces) {
  if (traces.empty()) throw DomainError("no traces to export");
  const auto& cps = traces.front().checkpoints;
  std::ostringstream out;
  out << "n";
  for (const BirkhoffTrace& t : traces) {
    if (t.checkpoints != cps)
      throw DomainError("traces in one CSV must share checkpoints");
    out << ',' << t.observable_id;
  }
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    out << cps[i];
    for (const BirkhoffTrace& t : traces) out << ',' << t.averages[i];
    out << '\n';
  }
  return out.str();
}

// --- Provenance and file output ---------------------------------------------

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

json provenance_block(const json& config, std::uint64_t seed) {
  json j;
  j["version"] = "0.1.0";
  j["seed"] = seed;
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(config.dump())));
  j["config_hash"] = std::string(buf);
  return j;
}

namespace {

void write_file_atomic(const std::string& path, const std::string& body) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("cannot open '" + tmp + "' for writing");
    out << body;
    out.flush();
    if (!out) throw DomainError("short write to '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw DomainError("cannot rename '" + tmp + "' to '" + path +
                      "': " + std::strerror(errno));
}

}  // namespace

void write_json_atomic(const std::string& path, const json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

void write_text_atomic(const std::string& path, const std::string& text) {
  write_file_atomic(path, text);
}

}  // namespace shiftlab::io
