#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
  int code;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(METRICSPACE_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

bool has(const std::string& s, const std::string& needle) { return s.find(needle) != std::string::npos; }

const std::string kFixture = std::string(METRICSPACE_DATA) + "/fixture_n2_p8.json";

}  // namespace

TEST_CASE("verify-all on the bundled fixture") {
  const Run r = cli("verify-all --input " + kFixture);
  CHECK(r.code == 0);
  CHECK(has(r.out, "suite"));
  CHECK(has(r.out, "completion p=1 collapse"));
  CHECK_FALSE(has(r.out, "FAIL"));
}

TEST_CASE("geodesic report as csv") {
  const Run r = cli("geodesic --p 1 --seed 7 --format csv");
  CHECK(r.code == 0);
  CHECK(has(r.out, "t,V,logV,c,min_density\n"));
  CHECK(has(r.out, "# PASS logV_affine_deviation"));
}

TEST_CASE("completion probe at p = 1") {
  const Run r = cli("completion --p 1 --mode collapse");
  CHECK(r.code == 0);
  CHECK(has(r.out, "verdict: not-cauchy"));
}

TEST_CASE("generate-fixture") {
  const Run a = cli("generate-fixture --n 2 --points 8 --seed 7");
  const Run b = cli("generate-fixture --n 2 --points 8 --seed 7");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  std::ifstream bundled(kFixture);
  std::stringstream ss;
  ss << bundled.rdbuf();
  CHECK(a.out == ss.str());

  const Run id = cli("generate-fixture --n 2 --points 2 --spread 1");
  CHECK(id.code == 0);
  CHECK(has(id.out, "\"matrix\": [\n        1.0,\n        0.0,\n        1.0\n      ]"));
}

TEST_CASE("config file and output file") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto cfg = dir / "metricspace_cli_cfg.json";
  const auto out = dir / "metricspace_cli_out.txt";
  {
    std::ofstream f(cfg);
    f << R"({"p": 0.0, "t_max": 0.5, "format": "csv"})";
  }
  const Run r = cli("geodesic --config " + cfg.string() + " --output " + out.string());
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(out);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(has(ss.str(), "# family exponent p = 0"));
  CHECK(has(ss.str(), "motion_slope_rel_error"));
  // config keys override individual flags
  const Run both = cli("geodesic --config " + cfg.string() + " --p 1 --format table");
  CHECK(both.code == 0);
  CHECK(has(both.out, "# family exponent p = 0"));
  CHECK(has(both.out, "t,V,logV,c,min_density\n"));
  std::filesystem::remove(cfg);
  std::filesystem::remove(out);
}

TEST_CASE("exit codes") {
  CHECK(cli("").code == 2);
  CHECK(cli("bogus").code == 2);
  CHECK(cli("geodesic --dt -1").code == 2);
  CHECK(cli("geodesic --format xml").code == 2);
  CHECK(cli("geodesic --input /nonexistent/field.json").code == 2);
  CHECK(cli("completion --mode sideways").code == 2);
  CHECK(cli("geodesic --config /nonexistent/cfg.json").code == 2);
  // an unreachable tolerance makes the verdict inconclusive: invariant failure
  CHECK(cli("completion --p 0 --tol 1e-12").code == 1);
  CHECK(cli("--help").code == 0);
}

TEST_CASE("reports are deterministic") {
  CHECK(cli("verify-all --seed 7").out == cli("verify-all --seed 7").out);
  CHECK(cli("verify-all --seed 7").out != cli("verify-all --seed 8").out);
}
