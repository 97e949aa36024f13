// test_cli.cpp — end-to-end checks of the command-line tool: exit codes,
// output files, cross-method agreement and determinism.
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int status;
  std::string output;  // stdout only
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(COMMUPROP_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  const int rc = pclose(pipe);
  return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, out};
}

const std::string& work_dir() {
  static const std::string dir = [] {
    std::string templ = (fs::temp_directory_path() / "commuprop_cli_XXXXXX").string();
    std::vector<char> buf(templ.begin(), templ.end());
    buf.push_back('\0');
    char* made = mkdtemp(buf.data());
    REQUIRE(made != nullptr);
    return std::string(made);
  }();
  return dir;
}

std::string write_spec(const std::string& name, const std::string& body) {
  const std::string path = work_dir() + "/" + name;
  std::ofstream(path) << body;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

const char* kNoncommSpec = R"({
  "n": 2, "interval": [-1, 5],
  "terms": [
    {"coeff": "1",
     "matrix": {"rows": 2, "cols": 2, "data": [[0,0],[1,0],[1,0],[0,0]]}},
    {"coeff": "t",
     "matrix": {"rows": 2, "cols": 2, "data": [[0,0],[0,1],[0,-1],[0,0]]}}
  ]
})";

std::string example1_spec() { return write_spec("example1.json", R"({"problem": "example1"})"); }
std::string example2_spec() { return write_spec("example2.json", R"({"problem": "example2"})"); }
std::string noncomm_spec() { return write_spec("noncomm.json", kNoncommSpec); }

}  // namespace

TEST_CASE("check: verdicts map to exit codes and output is deterministic") {
  const RunResult good = run_cli("check " + example1_spec());
  CHECK(good.status == 0);
  CHECK(good.output.find("\"commutative\":true") != std::string::npos);
  const RunResult again = run_cli("check " + example1_spec());
  CHECK(again.output == good.output);

  const RunResult bad = run_cli("check " + noncomm_spec());
  CHECK(bad.status == 1);
  CHECK(bad.output.find("\"commutative\":false") != std::string::npos);
  CHECK(bad.output.find("\"witness\"") != std::string::npos);
}

TEST_CASE("usage and input errors exit 2") {
  CHECK(run_cli("check " + write_spec("broken.json", "{ not json")).status == 2);
  CHECK(run_cli("check " + work_dir() + "/missing.json").status == 2);
  CHECK(run_cli("check").status == 2);
  CHECK(run_cli("").status == 2);
  CHECK(run_cli("check --bogus " + example1_spec()).status == 2);
  CHECK(run_cli("solve --method simpson " + example1_spec()).status == 2);
  CHECK(run_cli("solve --dt -0.1 " + example1_spec()).status == 2);
  CHECK(run_cli("--help").status == 0);
}

TEST_CASE("solve: writes csv and json trajectories on the default grid") {
  const std::string base = work_dir() + "/nested/out/traj";
  const RunResult r = run_cli("solve " + example1_spec() + " --out " + base);
  CHECK(r.status == 0);
  CHECK(r.output.find("21 samples") != std::string::npos);

  const std::string csv = slurp(base + ".csv");
  CHECK(count_lines(csv) == 22);  // header + 21 rows
  CHECK(csv.rfind("t,re_0_0", 0) == 0);

  const json j = json::parse(slurp(base + ".json"));
  REQUIRE(j.at("times").size() == 21);
  CHECK(j.at("times")[20] == 2.0);
  CHECK(j.at("values")[0].at("rows") == 4);

  // Identical reruns produce byte-identical files.
  const std::string base2 = work_dir() + "/nested/out/traj2";
  const RunResult r2 = run_cli("solve " + example1_spec() + " --out " + base2);
  CHECK(r2.status == 0);
  CHECK(slurp(base2 + ".json") == slurp(base + ".json"));
}

TEST_CASE("solve: methods cross-check against each other") {
  const std::string base = work_dir() + "/cmp";
  const RunResult r = run_cli("solve " + example2_spec() +
                              " --compare exact,zhu,rk4 --out " + base);
  REQUIRE(r.status == 0);
  const std::string key = "max cross-method deviation: ";
  const std::size_t at = r.output.find(key);
  REQUIRE(at != std::string::npos);
  const double dev = std::strtod(r.output.c_str() + at + key.size(), nullptr);
  CHECK(dev <= 1e-7);
}

TEST_CASE("solve: refusal for non-commuting input leaves no output files") {
  const std::string base = work_dir() + "/refused";
  CHECK(run_cli("solve " + noncomm_spec() + " --method exact --out " + base).status == 1);
  CHECK(run_cli("solve " + noncomm_spec() + " --method zhu --out " + base).status == 1);
  CHECK_FALSE(fs::exists(base + ".csv"));
  CHECK_FALSE(fs::exists(base + ".json"));
  // Plain time stepping has no commutativity requirement.
  CHECK(run_cli("solve " + noncomm_spec() + " --method rk4 --tmax 1 --out " +
                work_dir() + "/stepped")
            .status == 0);
}

TEST_CASE("evolve: density-matrix run with physicality columns") {
  const std::string base = work_dir() + "/state";
  const RunResult r = run_cli("evolve " + example2_spec() + " --out " + base);
  CHECK(r.status == 0);
  CHECK(r.output.find("max trace defect") != std::string::npos);
  const std::string csv = slurp(base + ".csv");
  const std::string header = csv.substr(0, csv.find('\n'));
  CHECK(header.find("trace_defect") != std::string::npos);
  CHECK(header.find("min_eigenvalue") != std::string::npos);
}

TEST_CASE("evolve: invalid or missing initial states exit 2") {
  const std::string bad_rho = write_spec("badrho.json", R"({
    "problem": "example1",
    "rho0": {"rows": 2, "cols": 2, "data": [[2,0],[0,0],[0,0],[0,0]]}
  })");
  CHECK(run_cli("evolve " + bad_rho + " --out " + work_dir() + "/x").status == 2);
  CHECK(run_cli("evolve " + noncomm_spec() + " --method rk4 --out " + work_dir() + "/y")
            .status == 2);
}

TEST_CASE("decompose: emits a small commuting basis or refuses") {
  const RunResult r = run_cli("decompose " + example2_spec());
  REQUIRE(r.status == 0);
  const json j = json::parse(r.output);
  CHECK(j.at("basis").size() <= 3);
  CHECK(j.at("max_residual").get<double>() <= 1e-9);
  CHECK(j.at("grid_size") == 33);

  CHECK(run_cli("decompose " + noncomm_spec()).status == 1);
}
