#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>

using nlohmann::json;

namespace {

std::string sh_quote(const std::string& s) { return "'" + s + "'"; }

const std::string& lab_bin() {
  static std::string bin = [] {
    const char* env = std::getenv("LAB_BIN");
    REQUIRE_MESSAGE(env != nullptr, "LAB_BIN must point at the CLI binary");
    return std::string(env);
  }();
  return bin;
}

const std::string& tmp_dir() {
  static std::string dir = [] {
    const char* env = std::getenv("LAB_TEST_TMP");
    REQUIRE_MESSAGE(env != nullptr, "LAB_TEST_TMP must name a scratch dir");
    std::filesystem::create_directories(env);
    return std::string(env);
  }();
  return dir;
}

// Runs the CLI with a clean LAB_SEED unless the caller sets one explicitly.
int run_lab(const std::string& args, const std::string& seed_env = "") {
  std::string cmd = "env " +
                    (seed_env.empty() ? std::string("-u LAB_SEED")
                                      : "LAB_SEED=" + seed_env) +
                    " " + sh_quote(lab_bin()) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), ("missing output file " + path).c_str());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json slurp_json(const std::string& path) { return json::parse(slurp(path)); }

std::string out(const std::string& name) { return tmp_dir() + "/" + name; }

}  // namespace

TEST_CASE("cli: space info reports alphabet, mixing gap, and word counts") {
  std::string path = out("space_golden.json");
  int code = run_lab("space info --space golden --out " + sh_quote(path));
  CHECK(code == 0);
  json rep = slurp_json(path);
  CHECK(rep.at("command") == "space info");
  const json& result = rep.at("result");
  CHECK(result.at("alphabet") == 2);
  CHECK(result.at("mixing_gap") == 2);
  CHECK(result.at("walker_states") == 3);  // fresh state + one per symbol
  // Golden-subshift word counts follow the Fibonacci numbers.
  CHECK(result.at("word_counts_1_to_8")[0] == "2");
  CHECK(result.at("word_counts_1_to_8")[1] == "3");
  CHECK(result.at("word_counts_1_to_8")[7] == "55");
  // Deterministic command: no seed in provenance, but a config hash.
  CHECK(!rep.at("provenance").contains("seed"));
  std::string hash = rep.at("provenance").at("config_hash");
  CHECK(hash.size() == 16);

  std::string bpath = out("space_beta.json");
  CHECK(run_lab("space info --space beta:1.8 --out " + sh_quote(bpath)) == 0);
  json beta = slurp_json(bpath);
  CHECK(beta.at("result").at("mixing_gap").is_null());
}

TEST_CASE("cli: config errors exit with code 2") {
  CHECK(run_lab("space info --space wat:3") == 2);
  CHECK(run_lab("space info") == 2);              // --space missing
  CHECK(run_lab("pressure transfer --space beta:1.8 --observables "
                "table:1:0,1") == 2);             // no spectral form
  CHECK(run_lab("space info --space golden --out " +
                sh_quote(out("bad.xml"))) == 2);    // unsupported extension
  CHECK(run_lab("definitely-not-a-command") == 2);
}

TEST_CASE("cli: kneading digits of the golden base") {
  std::string path = out("kneading.json");
  int code = run_lab("beta kneading --space beta:golden --digits 12 --out " +
                     sh_quote(path));
  CHECK(code == 0);
  json rep = slurp_json(path);
  CHECK(rep.at("result").at("digits") == "110000000000");
  CHECK(rep.at("result").at("eventually_zero") == true);
  CHECK(rep.at("result").at("alphabet") == 2);
}

TEST_CASE("cli: synthesis runs are reproducible and need a seed") {
  std::string args =
      "synth irregular --space full:2 --measures periodic:0 periodic:1 "
      "--schedule geometric:10:9 --horizon 100000";

  CHECK(run_lab(args) == 2);  // no seed anywhere

  std::string p1 = out("irr1.json"), p2 = out("irr2.json"),
              p3 = out("irr3.json");
  CHECK(run_lab(args + " --seed 7 --out " + sh_quote(p1)) == 0);
  CHECK(run_lab(args + " --seed 7 --out " + sh_quote(p2)) == 0);
  CHECK(slurp(p1) == slurp(p2));

  // The seed may come from the environment instead of the flag.
  CHECK(run_lab(args + " --out " + sh_quote(p3), "7") == 0);
  CHECK(slurp(p1) == slurp(p3));

  json rep = slurp_json(p1);
  CHECK(rep.at("provenance").at("seed") == 7);
  CHECK(rep.at("result").at("plan").at("blocks").size() >= 5);
}

TEST_CASE("cli: spectral pressure value lands on the closed form") {
  std::string path = out("pressure.json");
  int code = run_lab(
      "pressure transfer --space golden --observables table:1:0,1 --out " +
      sh_quote(path));
  CHECK(code == 0);
  json rep = slurp_json(path);
  double value = rep.at("result").at("value");
  double expected = std::log((1.0 + std::sqrt(1.0 + 4.0 * std::exp(1.0))) / 2.0);
  CHECK(value == doctest::Approx(expected).epsilon(1e-6));
  CHECK(rep.at("result").at("method") == "transfer_exact");
}

TEST_CASE("cli: traces write checkpoint CSVs") {
  std::string path = out("trace.csv");
  int code = run_lab(
      "trace --space full:2 --measures bernoulli:0.5,0.5 --observables "
      "first_symbol --horizon 5000 --seed 3 --out " +
      sh_quote(path));
  CHECK(code == 0);
  std::string csv = slurp(path);
  CHECK(csv.rfind("n,", 0) == 0);
  // One line per geometric checkpoint plus the header.
  int lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines >= 20);
}
