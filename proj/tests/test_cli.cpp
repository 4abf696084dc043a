#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using qsfp::cli::run_cli;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(std::vector<std::string> args, const fs::path& dir, std::string* out_text = nullptr) {
  args.push_back("--output-dir");
  args.push_back(dir.string());
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (out_text) *out_text = out.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

const std::vector<std::string> kSmallMu{"--iterations", "20", "--sample-size", "20000", "--seed", "5"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST_CASE("approx-mu writes the sample and a report with config and version") {
  TempDir d("qsfp_cli_mu");
  std::string text;
  const int code = run(with({"approx-mu"}, kSmallMu), d.path, &text);
  CHECK((code == 0 || code == 2));
  CHECK(fs::exists(d.path / "mu.csv"));
  const auto j = read_json(d.path / "approx_mu.json");
  CHECK(j["tool"] == "qsfp");
  CHECK(j["version"] == QSFP_VERSION);
  CHECK(j["config"]["command"] == "approx-mu");
  CHECK(j["config"]["seed"] == 5);
  CHECK(j["config"]["sample_size"] == 20000);
  CHECK(j["config"]["grid"]["points"] == 200);
  CHECK(j["result"].contains("residual_cf"));
  CHECK(text.find("variance") != std::string::npos);
}

TEST_CASE("identical configs give byte-identical reports") {
  TempDir d("qsfp_cli_det");
  REQUIRE(run(with({"approx-mu"}, kSmallMu), d.path) != 1);
  const std::string json1 = slurp(d.path / "approx_mu.json");
  const std::string csv1 = slurp(d.path / "mu.csv");
  REQUIRE(run(with({"approx-mu", "--threads", "1"}, kSmallMu), d.path) != 1);
  const std::string json2 = slurp(d.path / "approx_mu.json");
  CHECK(csv1 == slurp(d.path / "mu.csv"));
  // Only the recorded thread count differs.
  auto a = nlohmann::json::parse(json1), b = nlohmann::json::parse(json2);
  a["config"].erase("threads");
  b["config"].erase("threads");
  CHECK(a == b);
  REQUIRE(run(with({"approx-mu"}, kSmallMu), d.path) != 1);
  CHECK(json1 == slurp(d.path / "approx_mu.json"));

  REQUIRE(run({"chernoff", "--n", "5", "10", "--reps", "2000", "--seed", "3"}, d.path) == 0);
  const std::string c1 = slurp(d.path / "chernoff.json");
  REQUIRE(run({"chernoff", "--n", "5", "10", "--reps", "2000", "--seed", "3"}, d.path) == 0);
  CHECK(c1 == slurp(d.path / "chernoff.json"));
}

TEST_CASE("exit codes") {
  TempDir d("qsfp_cli_codes");
  CHECK(run({"no-such-command"}, d.path) == 1);
  CHECK(run({"approx-mu", "--sample-size", "0"}, d.path) == 1);
  CHECK(run({"approx-mu", "--format", "xml"}, d.path) == 1);
  CHECK(run({"approx-mu", "--sample-size", "500", "--iterations", "2"}, d.path) == 1);
  CHECK(run({"verify-theorem1", "--sigma", "-1"}, d.path) == 1);
  // One iteration is far from the limit variance: the check fails.
  CHECK(run({"approx-mu", "--iterations", "1", "--sample-size", "5000"}, d.path) == 2);
  CHECK(read_json(d.path / "approx_mu.json")["passed"] == false);
  std::ostringstream out, err;
  CHECK(run_cli({"--help"}, out, err) == 0);
  CHECK(out.str().find("approx-mu") != std::string::npos);
  CHECK(run_cli({}, out, err) == 1);
}

TEST_CASE("unwritable output directory") {
  TempDir d("qsfp_cli_blocked");
  fs::create_directories(d.path);
  std::ofstream(d.path / "file") << "x";
  CHECK(run({"chernoff", "--n", "5", "--reps", "1000"}, d.path / "file" / "sub") == 1);
}

TEST_CASE("environment variable sets the output directory") {
  TempDir d("qsfp_cli_env");
  setenv("QSFP_OUTPUT_DIR", d.path.string().c_str(), 1);
  std::ostringstream out, err;
  CHECK(run_cli({"chernoff", "--n", "5", "--x", "1", "--reps", "1000"}, out, err) == 0);
  unsetenv("QSFP_OUTPUT_DIR");
  CHECK(fs::exists(d.path / "chernoff.json"));
}

TEST_CASE("csv report format") {
  TempDir d("qsfp_cli_csv");
  REQUIRE(run({"chernoff", "--n", "10", "--x", "1", "--reps", "1000", "--format", "csv"}, d.path) == 0);
  const std::string csv = slurp(d.path / "chernoff.csv");
  CHECK(csv.rfind("key,value\n", 0) == 0);
  CHECK(csv.find("config.command,chernoff") != std::string::npos);
  CHECK(csv.find("result.cells.0.bound,") != std::string::npos);
  CHECK_FALSE(fs::exists(d.path / "chernoff.json"));
}

TEST_CASE("every subcommand runs at small scale") {
  TempDir d("qsfp_cli_all");
  REQUIRE(run(with({"approx-mu"}, kSmallMu), d.path) != 1);
  const std::string mu = (d.path / "mu.csv").string();

  CHECK(run({"simulate-quicksort", "--n", "100", "--reps", "2000"}, d.path) == 0);
  CHECK(fs::exists(d.path / "costs.csv"));
  CHECK(run({"verify-theorem1", "--m", "1", "--sigma", "0.5", "--input", mu, "--seed", "7", "--sample-size", "20000"}, d.path) == 0);
  CHECK(read_json(d.path / "verify_theorem1.json")["result"]["params"]["sigma"] == 0.5);
  CHECK(run({"residual", "--input", mu}, d.path) == 0);
  CHECK(run({"analyze-cf", "--input", mu}, d.path) != 1);
  CHECK(fs::exists(d.path / "c_of_t.csv"));
  CHECK(fs::exists(d.path / "envelope.csv"));
  CHECK(fs::exists(d.path / "b.csv"));
  CHECK(read_json(d.path / "analyze_cf.json")["result"]["slope"].contains("J"));
  CHECK(run({"attraction", "--source", "cauchy", "--sigma", "1", "--max-level", "4", "--reps", "2000"}, d.path) == 0);
  CHECK(fs::exists(d.path / "attraction.csv"));
  CHECK(fs::exists(d.path / "l_n_histogram.csv"));
  CHECK(run({"attraction", "--source", "pareto", "--estimate-target", "--max-level", "3", "--reps", "2000",
             "--sample-size", "100000"}, d.path) != 1);
  CHECK(read_json(d.path / "attraction.json")["result"]["target_estimated"] == true);
  CHECK(run({"attraction", "--source", "mu", "--input", mu, "--max-level", "3", "--reps", "1000"}, d.path) == 1);
  CHECK(run({"chernoff", "--reps", "1000"}, d.path) == 0);
  CHECK(read_json(d.path / "chernoff.json")["result"]["cells"].size() == 12);
  CHECK(run({"coupling", "--input", mu, "--levels", "3"}, d.path) != 1);
  CHECK(read_json(d.path / "coupling.json")["result"]["degenerate_target"] == true);
}
