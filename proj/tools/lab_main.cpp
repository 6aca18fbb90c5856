// Command-line workbench: space inspection, measure integration, orbit
// traces, point synthesis, pressure computations, the doubling-map demo,
// and the self-check suite. Exit codes: 0 success, 2 configuration error,
// 3 numeric or construction failure.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shiftlab/circle.hpp"
#include "shiftlab/json_io.hpp"
#include "shiftlab/measures.hpp"
#include "shiftlab/observables.hpp"
#include "shiftlab/pressure.hpp"
#include "shiftlab/shift_space.hpp"
#include "shiftlab/synthesis.hpp"
#include "shiftlab/verify.hpp"

using namespace shiftlab;
using shiftlab::io::json;

namespace {

// Values shared by most subcommands. Flags win over LAB_SEED, which wins
// over the config file; everything else falls back flag -> config -> default.
struct Common {
  CLI::App* cmd = nullptr;
  std::string space_text;
  std::vector<std::string> measure_texts;
  std::vector<std::string> observable_texts;
  std::string schedule_text;
  std::string horizon_text;
  std::string seed_text;
  std::string out_text;
  double tol = 0.0;
  std::string config_path;
  json config_file;

  void attach(CLI::App* c) {
    cmd = c;
    c->add_option("--space", space_text, "shift space (shorthand, see README)");
    c->add_option("--measures", measure_texts, "measure shorthand, repeatable")
        ->take_all();
    c->add_option("--observables", observable_texts,
                  "observable shorthand, repeatable")
        ->take_all();
    c->add_option("--schedule", schedule_text,
                  "block schedule shorthand (accelerating:L0, geometric:L0:F, "
                  "explicit:l1,l2,...)");
    c->add_option("--horizon", horizon_text, "symbol horizon, e.g. 1e6");
    c->add_option("--seed", seed_text, "RNG seed (precedence: flag > LAB_SEED "
                                       "> config)");
    c->add_option("--out", out_text,
                  "comma-separated output paths; .json gets the report, .csv "
                  "the traces, .txt the summary");
    c->add_option("--tol", tol, "tolerance override where applicable");
    c->add_option("--config", config_path,
                  "JSON file supplying any of the standard keys");
  }

  void load_config() {
    if (config_path.empty()) return;
    std::ifstream in(config_path);
    if (!in) throw DomainError("cannot open config file '" + config_path + "'");
    try {
      in >> config_file;
    } catch (const std::exception& ex) {
      throw DomainError("config file '" + config_path +
                        "' is not valid JSON: " + ex.what());
    }
  }

  bool flag_given(const std::string& name) const {
    return cmd->count(name) > 0;
  }

  std::string text_of(const std::string& flag, const std::string& key,
                      std::string current, const std::string& fallback) const {
    if (flag_given(flag)) return current;
    if (config_file.contains(key)) {
      const json& v = config_file.at(key);
      if (v.is_string()) return v.get<std::string>();
      return v.dump();
    }
    return fallback.empty() ? current : fallback;
  }

  ShiftSpace space() {
    std::string text = text_of("--space", "space", space_text, "");
    if (text.empty()) throw DomainError("--space is required");
    return io::space_from_string(text);
  }

  std::vector<MeasureModel> measures(const ShiftSpace& s, std::size_t need) {
    std::vector<std::string> texts = measure_texts;
    if (texts.empty() && config_file.contains("measures"))
      texts = config_file.at("measures").get<std::vector<std::string>>();
    if (need > 0 && texts.size() != need)
      throw DomainError("expected " + std::to_string(need) +
                        " --measures, got " + std::to_string(texts.size()));
    if (texts.empty()) throw DomainError("--measures is required");
    std::vector<MeasureModel> out;
    for (const std::string& t : texts)
      out.push_back(io::measure_from_string(s, t));
    return out;
  }

  std::vector<Observable> observables(int alphabet, std::size_t need) {
    std::vector<std::string> texts = observable_texts;
    if (texts.empty() && config_file.contains("observables"))
      texts = config_file.at("observables").get<std::vector<std::string>>();
    if (need > 0 && texts.size() != need)
      throw DomainError("expected " + std::to_string(need) +
                        " --observables, got " + std::to_string(texts.size()));
    if (texts.empty()) throw DomainError("--observables is required");
    std::vector<Observable> out;
    for (const std::string& t : texts)
      out.push_back(io::observable_from_string(alphabet, t));
    return out;
  }

  ScheduleSpec schedule(std::int64_t horizon_value) {
    std::string text =
        text_of("--schedule", "schedule", schedule_text, "accelerating:1000");
    ScheduleSpec spec = io::schedule_from_string(text);
    spec.horizon = horizon_value;
    spec.validate();
    return spec;
  }

  std::int64_t horizon(std::int64_t fallback) {
    std::string text = text_of("--horizon", "horizon", horizon_text, "");
    if (text.empty()) {
      if (fallback > 0) return fallback;
      throw DomainError("--horizon is required");
    }
    double v = 0;
    try {
      std::size_t used = 0;
      v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw DomainError("cannot parse horizon '" + text + "'");
    }
    if (!(v >= 1.0) || v > 9.0e18)
      throw DomainError("horizon out of range: '" + text + "'");
    return static_cast<std::int64_t>(v + 0.5);
  }

  // Sampling operations refuse to run without an explicit seed.
  std::uint64_t seed() {
    std::string text = seed_text;
    if (!flag_given("--seed")) {
      const char* env = std::getenv("LAB_SEED");
      if (env && *env) {
        text = env;
      } else if (config_file.contains("seed")) {
        const json& v = config_file.at("seed");
        text = v.is_string() ? v.get<std::string>() : v.dump();
      }
    }
    if (text.empty())
      throw DomainError(
          "a seed is required (--seed flag, LAB_SEED env, or config key)");
    try {
      std::size_t used = 0;
      unsigned long long v = std::stoull(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw DomainError("cannot parse seed '" + text + "'");
    }
  }

  double tolerance(double fallback) {
    if (flag_given("--tol")) return tol;
    if (config_file.contains("tol")) return config_file.at("tol").get<double>();
    return fallback;
  }

  std::vector<std::string> out_paths() {
    std::string text = text_of("--out", "out", out_text, "");
    std::vector<std::string> paths;
    std::string cur;
    for (char ch : text) {
      if (ch == ',') {
        if (!cur.empty()) paths.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    if (!cur.empty()) paths.push_back(cur);
    return paths;
  }
};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Assemble the report, route it to --out files by extension, and print the
// summary (plus the full JSON when nothing was written to disk).
void emit(Common& common, const std::string& command, const json& config,
          const json& result, std::optional<std::uint64_t> seed,
          const std::string& csv, const std::string& summary) {
  json report;
  report["command"] = command;
  report["config"] = config;
  report["result"] = result;
  report["provenance"] = io::provenance_block(config, seed.value_or(0));
  if (!seed) report["provenance"].erase("seed");

  bool wrote_json = false;
  for (const std::string& path : common.out_paths()) {
    if (ends_with(path, ".json")) {
      io::write_json_atomic(path, report);
      wrote_json = true;
      std::cout << "wrote " << path << "\n";
    } else if (ends_with(path, ".csv")) {
      if (csv.empty())
        throw DomainError("this command produces no trace CSV for '" + path +
                          "'");
      io::write_text_atomic(path, csv);
      std::cout << "wrote " << path << "\n";
    } else if (ends_with(path, ".txt")) {
      io::write_text_atomic(path, summary + "\n");
      std::cout << "wrote " << path << "\n";
    } else {
      throw DomainError("unsupported output extension in '" + path + "'");
    }
  }
  std::cout << summary << "\n";
  if (!wrote_json) std::cout << report.dump(2) << "\n";
}

json space_info_result(const ShiftSpace& s) {
  json result;
  result["space"] = io::space_to_json(s);
  result["describe"] = s.describe();
  result["alphabet"] = s.alphabet_size();
  if (s.mixing_gap())
    result["mixing_gap"] = *s.mixing_gap();
  else
    result["mixing_gap"] = nullptr;
  result["walker_states"] = s.walker_count();
  json counts = json::array();
  for (int n = 1; n <= 8; ++n) counts.push_back(s.count_words(n).str());
  result["word_counts_1_to_8"] = counts;
  return result;
}

// Block-end certificate tolerance: the loosest per-block tolerance inside
// the three-blocks-per-side window that certificates read.
double window_tolerance(const ScheduleSpec& sched, const GluePlan& plan) {
  std::size_t blocks = plan.complete_block_ends().size();
  double tol = 0.0;
  for (std::size_t j = blocks >= 5 ? blocks - 5 : 1; j <= blocks; ++j)
    tol = std::max(tol, sched.tol(static_cast<int>(j)));
  return tol;
}

std::vector<std::int64_t> trace_checkpoints(std::int64_t horizon,
                                            const GluePlan& plan) {
  std::vector<std::int64_t> cps = geometric_checkpoints(horizon, 1.5);
  std::vector<std::int64_t> ends = plan.complete_block_ends();
  cps.insert(cps.end(), ends.begin(), ends.end());
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  return cps;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"symbolic-dynamics workbench: shift spaces, Birkhoff traces, "
               "orbit synthesis, and pressure"};
  app.require_subcommand(1);

  // space info
  auto* space_cmd = app.add_subcommand("space", "shift space operations");
  space_cmd->require_subcommand(1);
  auto* space_info = space_cmd->add_subcommand("info", "describe a space");
  Common c_space;
  c_space.attach(space_info);
  space_info->callback([&] {
    c_space.load_config();
    ShiftSpace s = c_space.space();
    json config{{"space", io::space_to_json(s)}};
    emit(c_space, "space info", config, space_info_result(s), std::nullopt, "",
         s.describe());
  });

  // beta kneading
  auto* beta_cmd = app.add_subcommand("beta", "beta-expansion operations");
  beta_cmd->require_subcommand(1);
  auto* beta_kn =
      beta_cmd->add_subcommand("kneading", "greedy expansion digits of 1");
  Common c_beta;
  int kneading_digits = 32;
  c_beta.attach(beta_kn);
  beta_kn->add_option("--digits", kneading_digits, "digits to emit");
  beta_kn->callback([&] {
    c_beta.load_config();
    ShiftSpace s = c_beta.space();
    if (s.kind() != SpaceKind::Beta)
      throw DomainError("beta kneading needs a beta-shift --space");
    KneadingResult kn = beta_kneading(s.beta_spec(), kneading_digits);
    json config{{"space", io::space_to_json(s)}, {"digits", kneading_digits}};
    json result;
    std::string digits;
    for (std::size_t i = 0; i < kn.digits.size(); ++i)
      digits.push_back(static_cast<char>('0' + kn.digits[i]));
    result["digits"] = digits;
    result["eventually_zero"] = kn.eventually_zero;
    result["alphabet"] = kn.alphabet;
    result["precision_bits"] = kn.precision_bits;
    emit(c_beta, "beta kneading", config, result, std::nullopt, "",
         s.beta_spec().describe() + " kneading: " + digits);
  });

  // measure integrate
  auto* measure_cmd = app.add_subcommand("measure", "measure operations");
  measure_cmd->require_subcommand(1);
  auto* integrate_cmd = measure_cmd->add_subcommand(
      "integrate", "integral of observables against a measure");
  Common c_int;
  c_int.attach(integrate_cmd);
  integrate_cmd->callback([&] {
    c_int.load_config();
    ShiftSpace s = c_int.space();
    MeasureModel mu = c_int.measures(s, 1).front();
    std::vector<Observable> phis = c_int.observables(s.alphabet_size(), 0);
    json config{{"space", io::space_to_json(s)},
                {"measure", io::measure_to_json(mu)}};
    json result;
    result["entropy_rate"] = mu.entropy_rate();
    json rows = json::array();
    std::string summary = "h=" + std::to_string(mu.entropy_rate());
    for (const Observable& phi : phis) {
      double v = integrate(mu, phi);
      rows.push_back(json{{"observable", io::observable_to_json(phi)},
                          {"value", v}});
      summary += "  " + phi.id() + "=" + std::to_string(v);
    }
    result["integrals"] = rows;
    emit(c_int, "measure integrate", config, result, std::nullopt, "", summary);
  });

  // trace
  auto* trace_cmd = app.add_subcommand(
      "trace", "Birkhoff averages along a sampled word at geometric "
               "checkpoints");
  Common c_trace;
  c_trace.attach(trace_cmd);
  trace_cmd->callback([&] {
    c_trace.load_config();
    ShiftSpace s = c_trace.space();
    MeasureModel mu = c_trace.measures(s, 1).front();
    std::vector<Observable> phis = c_trace.observables(s.alphabet_size(), 0);
    std::int64_t horizon = c_trace.horizon(0);
    std::uint64_t seed = c_trace.seed();
    int max_range = 1;
    for (const Observable& phi : phis)
      max_range = std::max(max_range, phi.range());
    Rng rng(seed);
    Word w = mu.sample_word(horizon + max_range, rng);
    std::vector<std::int64_t> cps = geometric_checkpoints(horizon, 1.5);
    std::vector<BirkhoffTrace> traces;
    json jtraces = json::array();
    for (const Observable& phi : phis) {
      traces.push_back(birkhoff_averages(w, phi, cps));
      jtraces.push_back(io::trace_to_json(traces.back()));
    }
    json config{{"space", io::space_to_json(s)},
                {"measure", io::measure_to_json(mu)},
                {"horizon", horizon}};
    json result{{"traces", jtraces}};
    emit(c_trace, "trace", config, result, seed, io::traces_to_csv(traces),
         std::to_string(phis.size()) + " trace(s) over " +
             std::to_string(cps.size()) + " checkpoints");
  });

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "orbit synthesis");
  synth_cmd->require_subcommand(1);

  auto* irregular = synth_cmd->add_subcommand(
      "irregular", "alternate two measures with growing blocks");
  Common c_irr;
  c_irr.attach(irregular);
  irregular->callback([&] {
    c_irr.load_config();
    ShiftSpace s = c_irr.space();
    auto mus = c_irr.measures(s, 2);
    std::int64_t horizon = c_irr.horizon(1000000);
    ScheduleSpec sched = c_irr.schedule(horizon);
    std::uint64_t seed = c_irr.seed();
    BuiltPoint built = build_irregular_point(s, mus[0], mus[1], sched, seed);
    json result = io::built_point_to_json(built);
    std::string csv;
    if (!c_irr.observable_texts.empty() ||
        c_irr.config_file.contains("observables")) {
      std::vector<Observable> phis = c_irr.observables(s.alphabet_size(), 0);
      double tol = c_irr.tolerance(window_tolerance(sched, built.plan));
      std::vector<std::int64_t> cps = trace_checkpoints(horizon, built.plan);
      std::vector<BirkhoffTrace> traces;
      json certs = json::array();
      for (const Observable& phi : phis) {
        traces.push_back(birkhoff_averages(built.point, phi, cps));
        auto cert = certificate_from_plan(built.plan, traces.back(), tol);
        if (cert) {
          verify_plan_certificate(built.plan, traces.back(), *cert);
          certs.push_back(io::certificate_to_json(*cert));
        }
      }
      result["certificates"] = certs;
      result["certificate_tol"] = tol;
      csv = io::traces_to_csv(traces);
    }
    json config{{"space", io::space_to_json(s)},
                {"measures", json::array({io::measure_to_json(mus[0]),
                                          io::measure_to_json(mus[1])})},
                {"schedule", io::schedule_to_json(sched)},
                {"horizon", horizon}};
    emit(c_irr, "synth irregular", config, result, seed, csv,
         std::to_string(built.plan.complete_block_ends().size()) +
             " complete blocks");
  });

  auto* jointly = synth_cmd->add_subcommand(
      "jointly", "one point, one certificate per observable; measures are "
                 "given as consecutive pairs, one pair per observable");
  Common c_joint;
  c_joint.attach(jointly);
  jointly->callback([&] {
    c_joint.load_config();
    ShiftSpace s = c_joint.space();
    std::vector<Observable> phis = c_joint.observables(s.alphabet_size(), 0);
    auto mus = c_joint.measures(s, 2 * phis.size());
    std::vector<std::pair<MeasureModel, MeasureModel>> pairs;
    for (std::size_t i = 0; i < phis.size(); ++i)
      pairs.emplace_back(mus[2 * i], mus[2 * i + 1]);
    std::int64_t horizon = c_joint.horizon(1000000);
    ScheduleSpec sched = c_joint.schedule(horizon);
    std::uint64_t seed = c_joint.seed();
    BuiltPoint built =
        build_jointly_irregular_point(s, phis, pairs, sched, seed);
    json config{{"space", io::space_to_json(s)},
                {"schedule", io::schedule_to_json(sched)},
                {"horizon", horizon}};
    std::string summary;
    for (const Certificate& cert : built.certificates)
      summary += cert.observable_id + " gap=" + std::to_string(cert.gap) + "  ";
    emit(c_joint, "synth jointly", config, io::built_point_to_json(built), seed,
         "", summary.empty() ? "no certificates" : summary);
  });

  auto* saturated = synth_cmd->add_subcommand(
      "saturated", "sweep a polyline of measures with halving steps");
  Common c_sat;
  c_sat.attach(saturated);
  saturated->callback([&] {
    c_sat.load_config();
    ShiftSpace s = c_sat.space();
    auto mus = c_sat.measures(s, 0);
    if (mus.size() < 2)
      throw DomainError("saturated sweep needs at least 2 measures");
    std::int64_t horizon = c_sat.horizon(1000000);
    ScheduleSpec sched = c_sat.schedule(horizon);
    std::uint64_t seed = c_sat.seed();
    BuiltPoint built = build_saturated_point(s, mus, sched, seed);
    json config{{"space", io::space_to_json(s)},
                {"schedule", io::schedule_to_json(sched)},
                {"horizon", horizon}};
    emit(c_sat, "synth saturated", config, io::built_point_to_json(built), seed,
         "", std::to_string(built.plan.complete_block_ends().size()) +
                 " complete blocks");
  });

  auto* gmax = synth_cmd->add_subcommand(
      "gmax", "round-robin through a net of measures");
  Common c_gmax;
  c_gmax.attach(gmax);
  gmax->callback([&] {
    c_gmax.load_config();
    ShiftSpace s = c_gmax.space();
    auto mus = c_gmax.measures(s, 0);
    std::int64_t horizon = c_gmax.horizon(1000000);
    ScheduleSpec sched = c_gmax.schedule(horizon);
    std::uint64_t seed = c_gmax.seed();
    BuiltPoint built = build_maximal_oscillation_point(s, mus, sched, seed);
    json config{{"space", io::space_to_json(s)},
                {"schedule", io::schedule_to_json(sched)},
                {"horizon", horizon}};
    emit(c_gmax, "synth gmax", config, io::built_point_to_json(built), seed,
         "", std::to_string(built.plan.complete_block_ends().size()) +
                 " complete blocks");
  });

  auto* family = synth_cmd->add_subcommand(
      "family", "implicit separated family with fixed glue");
  Common c_fam;
  double free_fraction = 0.8;
  int block_len = 20;
  c_fam.attach(family);
  family->add_option("--free-fraction", free_fraction,
                     "fraction of positions left free");
  family->add_option("--block", block_len, "free block length");
  family->callback([&] {
    c_fam.load_config();
    ShiftSpace s = c_fam.space();
    auto mus = c_fam.measures(s, 2);
    std::int64_t n = c_fam.horizon(2000);
    std::uint64_t seed = c_fam.seed();
    SeparatedFamily fam = separated_irregular_family(s, mus[0], mus[1], n,
                                                     free_fraction, block_len,
                                                     seed);
    json config{{"space", io::space_to_json(s)},
                {"measures", json::array({io::measure_to_json(mus[0]),
                                          io::measure_to_json(mus[1])})},
                {"n", n},
                {"free_fraction", free_fraction},
                {"block", block_len}};
    json result = io::family_to_json(fam);
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    Word member = fam.random_member(s, rng);
    std::string prefix;
    for (std::size_t i = 0; i < std::min<std::size_t>(member.size(), 80); ++i)
      prefix.push_back(static_cast<char>('0' + member[i]));
    result["sample_member_prefix"] = prefix;
    emit(c_fam, "synth family", config, result, seed, "",
         "rate=" + std::to_string(fam.rate) + " over " +
             std::to_string(fam.slots.size()) + " slots");
  });

  // pressure
  auto* pressure_cmd = app.add_subcommand("pressure", "pressure and dimension");
  pressure_cmd->require_subcommand(1);

  auto* transfer = pressure_cmd->add_subcommand(
      "transfer", "spectral pressure of the weighted transition matrix");
  Common c_tr;
  c_tr.attach(transfer);
  transfer->callback([&] {
    c_tr.load_config();
    ShiftSpace s = c_tr.space();
    Observable phi = c_tr.observables(s.alphabet_size(), 1).front();
    PressureResult pr = transfer_pressure(s, phi);
    json config{{"space", io::space_to_json(s)},
                {"observable", io::observable_to_json(phi)}};
    emit(c_tr, "pressure transfer", config, io::pressure_to_json(pr),
         std::nullopt, "", "pressure=" + std::to_string(pr.value));
  });

  auto* cylinder = pressure_cmd->add_subcommand(
      "cylinder", "partition-sum pressure over all admissible n-words");
  Common c_cy;
  std::int64_t cover_depth = 12;
  c_cy.attach(cylinder);
  cylinder->add_option("--depth", cover_depth, "cover depth n");
  cylinder->callback([&] {
    c_cy.load_config();
    ShiftSpace s = c_cy.space();
    Observable phi = c_cy.observables(s.alphabet_size(), 1).front();
    PressureResult pr = cylinder_pressure_estimate(s, phi, cover_depth);
    json config{{"space", io::space_to_json(s)},
                {"observable", io::observable_to_json(phi)},
                {"depth", cover_depth}};
    emit(c_cy, "pressure cylinder", config, io::pressure_to_json(pr),
         std::nullopt, "", "estimate=" + std::to_string(pr.value));
  });

  auto* bsdim = pressure_cmd->add_subcommand(
      "bsdim", "root of s -> pressure(-s*phi) by bisection");
  Common c_bs;
  c_bs.attach(bsdim);
  bsdim->callback([&] {
    c_bs.load_config();
    ShiftSpace s = c_bs.space();
    Observable phi = c_bs.observables(s.alphabet_size(), 1).front();
    double tol = c_bs.tolerance(1e-9);
    double root = bs_dimension(s, phi, tol);
    json config{{"space", io::space_to_json(s)},
                {"observable", io::observable_to_json(phi)},
                {"tol", tol}};
    json result{{"value", root}, {"tol", tol}};
    emit(c_bs, "pressure bsdim", config, result, std::nullopt, "",
         "dimension root=" + std::to_string(root));
  });

  auto* pbeta = pressure_cmd->add_subcommand(
      "beta", "word-count entropy rows for a beta base");
  Common c_pb;
  std::vector<std::int64_t> n_list;
  c_pb.attach(pbeta);
  pbeta->add_option("--n", n_list, "word lengths, repeatable")->take_all();
  pbeta->callback([&] {
    c_pb.load_config();
    ShiftSpace s = c_pb.space();
    if (s.kind() != SpaceKind::Beta)
      throw DomainError("pressure beta needs a beta-shift --space");
    if (n_list.empty()) n_list = {8, 12, 16, 20};
    auto rows = beta_entropy_estimate(s.beta_spec(), n_list,
                                      static_cast<int>(s.kneading().size()));
    json config{{"space", io::space_to_json(s)}, {"n", n_list}};
    json jrows = json::array();
    std::string summary;
    for (const BetaEntropyRow& row : rows) {
      jrows.push_back(json{{"n", row.n},
                           {"estimate", row.estimate},
                           {"error_vs_log_beta", row.error_vs_log_beta},
                           {"hausdorff_normalized", row.hausdorff_normalized}});
      summary += "n=" + std::to_string(row.n) + ":" +
                 std::to_string(row.estimate) + "  ";
    }
    emit(c_pb, "pressure beta", config, json{{"rows", jrows}}, std::nullopt,
         "", summary);
  });

  // demo section4 (named for the runbook the workbench reproduces)
  auto* demo_cmd = app.add_subcommand("demo", "end-to-end demonstrations");
  demo_cmd->require_subcommand(1);
  auto* demo4 = demo_cmd->add_subcommand(
      "section4", "doubling-map demo: frequency witnesses plus a divergence "
                  "certificate pair for sin/cos");
  Common c_demo;
  c_demo.attach(demo4);
  demo4->callback([&] {
    c_demo.load_config();
    std::int64_t horizon = c_demo.horizon(1000000);
    std::uint64_t seed = c_demo.seed();
    DemoReport rep = doubling_demo_report(horizon, seed);
    json config{{"horizon", horizon}};
    json result = io::demo_report_to_json(rep);
    std::string csv = io::traces_to_csv({rep.sin_trace, rep.cos_trace});
    emit(c_demo, "demo section4", config, result, seed, csv,
         "sin gap=" + std::to_string(rep.sin_certificate.gap) +
             "  cos gap=" + std::to_string(rep.cos_certificate.gap));
  });

  // verify all
  auto* verify_cmd = app.add_subcommand("verify", "self checks");
  verify_cmd->require_subcommand(1);
  auto* verify_all = verify_cmd->add_subcommand("all", "run every check");
  Common c_ver;
  c_ver.attach(verify_all);
  verify_all->callback([&] {
    c_ver.load_config();
    std::vector<CheckResult> results = run_all_checks();
    json rows = json::array();
    std::string text;
    int passed = 0;
    for (const CheckResult& r : results) {
      char line[512];
      std::snprintf(line, sizeof line, "[%s] %-28s (%6.2fs) %s\n",
                    r.pass ? "PASS" : "FAIL", r.id.c_str(), r.seconds,
                    r.detail.c_str());
      std::fputs(line, stdout);
      std::fflush(stdout);
      text += line;
      rows.push_back(json{{"id", r.id},
                          {"pass", r.pass},
                          {"seconds", r.seconds},
                          {"detail", r.detail}});
      passed += r.pass ? 1 : 0;
    }
    char tail[64];
    std::snprintf(tail, sizeof tail, "%d/%zu checks passed\n", passed,
                  results.size());
    std::fputs(tail, stdout);
    text += tail;
    for (const std::string& path : c_ver.out_paths()) {
      if (ends_with(path, ".json")) {
        io::write_json_atomic(path, json{{"checks", rows}});
      } else if (ends_with(path, ".txt")) {
        io::write_text_atomic(path, text);
      } else if (ends_with(path, ".csv")) {
        throw DomainError("this command produces no trace CSV for '" + path +
                          "'");
      } else {
        throw DomainError("unsupported output extension in '" + path + "'");
      }
      std::printf("wrote %s\n", path.c_str());
    }
    if (passed != static_cast<int>(results.size()))
      throw InternalError("self checks failed");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 3;
  }
}
