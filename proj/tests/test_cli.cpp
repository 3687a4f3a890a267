#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include "json.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string g_cli;
fs::path g_dir;

struct Run {
  int code;
  std::string out;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  const fs::path out = g_dir / "stdout.txt";
  const std::string cmd = "cd '" + g_dir.string() + "' && VORTEXLAB_CACHE='" + (g_dir / "cache").string() + "' '" +
                          g_cli + "' " + args + " > '" + out.string() + "' 2> '" + (g_dir / "stderr.txt").string() + "'";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

}  // namespace

int main(int argc, char** argv) {
  // the CLI path comes first, everything else goes to doctest
  if (argc < 2) return 2;
  g_cli = fs::absolute(argv[1]).string();
  g_dir = fs::temp_directory_path() / ("vortexlab-cli-test-" + std::to_string(::getpid()));
  fs::remove_all(g_dir);
  fs::create_directories(g_dir);
  doctest::Context ctx;
  ctx.applyCommandLine(argc - 1, argv + 1);
  const int rc = ctx.run();
  fs::remove_all(g_dir);
  return rc;
}

TEST_CASE("constants") {
  Run r = run("constants --p 3 --omega 1");
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["params"]["c"].get<double>() == doctest::Approx(1.5));
  CHECK(j["config"]["p"] == "3");
  r = run("constants --p 3 --omega 4");
  CHECK(json::parse(r.out)["params"]["c"].get<double>() == doctest::Approx(6.0));
  CHECK(run("constants --p 1 --omega 1").code == 2);
  CHECK(run("constants --bogus").code == 2);
  CHECK(run("").code == 2);
}

TEST_CASE("reduced and validity range") {
  Run r = run("reduced --p 3 --delta 0.25");
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["b1"].get<double>() == doctest::Approx(3.0));
  CHECK(j["predicted"].get<double>() == doctest::Approx(0.4330127));
  CHECK(run("reduced --p 5 --delta 0.1").code == 4);
}

TEST_CASE("profile, cache and byte-identical reruns") {
  Run a = run("profile --m 32 --out first.json");
  REQUIRE(a.code == 0);
  json j = json::parse(a.out);
  CHECK(j["converged"] == true);
  CHECK(j["cache_hit"] == false);
  Run b = run("profile --m 32 --out second.json");
  REQUIRE(b.code == 0);
  CHECK(json::parse(b.out)["cache_hit"] == true);
  CHECK(slurp(g_dir / "first.json") == slurp(g_dir / "second.json"));
  CHECK(json::parse(slurp(g_dir / "first.json"))["schema"] == "vortexlab-profile-v1");
  // Newton cannot reach an unattainable tolerance: numerical failure
  CHECK(run("--no-cache --tol 1e-30 profile --m 16").code == 3);
  CHECK(run("profile --m 32 --spacing 0.05").code == 2);
}

TEST_CASE("config file with flag override") {
  {
    std::ofstream os(g_dir / "run.cfg");
    os << "# test configuration\np = 2\nomega = 1   # trailing comment\nm = 16\n";
  }
  Run r = run("--config run.cfg profile --m 8");
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["m"] == 8);
  CHECK(j["config"]["p"] == "2");
  CHECK(j["rbar"].get<double>() == doctest::Approx(16.0));
  {
    std::ofstream os(g_dir / "bad.cfg");
    os << "nonsense_key = 3\n";
  }
  CHECK(run("--config bad.cfg constants").code == 2);
  CHECK(run("--config missing.cfg constants").code == 2);
}

TEST_CASE("asymptotics") {
  Run r = run("asymptotics --m-list 8,16,32 --out-json fit.json");
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("m,h2_err,linf_err,peak_offset\n", 0) == 0);
  json j = json::parse(slurp(g_dir / "fit.json"));
  CHECK(j["rate_linf"].get<double>() < -0.65);
  Run single = run("asymptotics --m-list 16 --out-json single.json");
  REQUIRE(single.code == 0);
  CHECK(json::parse(slurp(g_dir / "single.json"))["rate_h2"].is_null());
  CHECK(run("asymptotics --m-list ''").code == 2);
}

TEST_CASE("spectrum and scan") {
  Run r = run("spectrum --m 16 --j 2 --k 2");
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["eigenvalues"].size() == 2);
  CHECK(j["max_re"].get<double>() > 0.0);
  CHECK(j["in_bracket"] == true);
  CHECK(run("spectrum --m 16 --j 16").code == 2);
  Run s = run("scan --m 16 --j-range 1:3");
  REQUIRE(s.code == 0);
  CHECK(s.out.rfind("m,j,delta,max_re,predicted,bracket_lo,bracket_hi,in_bracket,canonical\n", 0) == 0);
  CHECK(run("scan --m 16 --j-range 0:2").code == 2);
}

TEST_CASE("evolve is deterministic for a fixed seed") {
  Run a = run("--seed 9 evolve --m 16 --j 2 --T 10 --dt 0.1 --out-csv a.csv");
  REQUIRE(a.code == 0);
  Run b = run("--seed 9 evolve --m 16 --j 2 --T 10 --dt 0.1 --out-csv b.csv");
  REQUIRE(b.code == 0);
  json ja = json::parse(a.out), jb = json::parse(b.out);
  ja.erase("config");
  jb.erase("config");
  CHECK(ja == jb);
  CHECK(slurp(g_dir / "a.csv") == slurp(g_dir / "b.csv"));
  CHECK(slurp(g_dir / "a.csv").rfind("t,norm\n", 0) == 0);
  Run c = run("--seed 10 evolve --m 16 --j 2 --T 10 --dt 0.1 --out-csv c.csv");
  CHECK(slurp(g_dir / "a.csv") != slurp(g_dir / "c.csv"));
  CHECK(run("evolve --m 16 --j 2 --dt 0").code == 2);
  CHECK(run("evolve --m 16 --j 2 --dt -1").code == 2);
  Run e = run("evolve --m 16 --j 2 --T 10 --init eigenvector --out-csv e.csv");
  REQUIRE(e.code == 0);
  json j = json::parse(e.out);
  CHECK(j["rate"].get<double>() == doctest::Approx(j["eigenvalue"]["re"].get<double>()).epsilon(0.02));
}
