#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(SDCP_CLI_PATH) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("sdcp_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string config(const std::string& name) { return std::string(SDCP_CONFIG_DIR) + "/" + name; }

int csv_rows(const std::string& text) { return static_cast<int>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST_CASE("stepsize-compare writes three schedules plus both baselines") {
  const auto out = scratch("compare");
  REQUIRE(run("--config " + config("default.conf") + " --scenario stepsize-compare --jobs 1 --out " + out.string()) ==
          0);
  const std::string summary = slurp(out / "summary.csv");
  CHECK(csv_rows(summary) == 6);
  for (const char* name : {"reciprocal", "moderate", "conditional", "opt", "unif"}) {
    CHECK(summary.find(std::string("\nstepsize-compare,") + name + ",") != std::string::npos);
    CHECK(fs::exists(out / (std::string(name) + "_seed1.csv")));
    CHECK(fs::exists(out / (std::string(name) + "_seed20.csv")));
  }
  const std::string manifest = slurp(out / "manifest.txt");
  CHECK(manifest.find("scenario=stepsize-compare") != std::string::npos);
  CHECK(manifest.find("run_id=") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("slot-sweep produces one row per slot length") {
  const auto out = scratch("sweep");
  REQUIRE(run("--scenario slot-sweep --T 10,20s,1m --K 200 --out " + out.string()) == 0);
  const std::string summary = slurp(out / "summary.csv");
  CHECK(csv_rows(summary) == 4);
  CHECK(summary.find(",T=10s,") != std::string::npos);
  CHECK(summary.find(",T=20s,") != std::string::npos);
  CHECK(summary.find(",T=1m,") != std::string::npos);
  CHECK(csv_rows(slurp(out / "T1m_seed1.csv")) == 61);
  fs::remove_all(out);
}

TEST_CASE("same seed, byte-identical CSV output") {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  REQUIRE(run("--scenario run --K 300 --seed 9 --jobs 2 --out " + a.string()) == 0);
  REQUIRE(run("--scenario run --K 300 --seed 9 --jobs 1 --out " + b.string()) == 0);
  for (const char* f : {"summary.csv", "sdcp_seed9.csv", "opt_seed9.csv", "unif_seed9.csv"}) {
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK_FALSE(slurp(a / f).empty());
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("seed precedence: flag over environment over config") {
  const auto out = scratch("seed");
  REQUIRE(run("--scenario run --K 300 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "sdcp_seed1.csv"));
  fs::remove_all(out);
  ::setenv("SDCP_SEED", "41", 1);
  REQUIRE(run("--scenario run --K 300 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "sdcp_seed41.csv"));
  fs::remove_all(out);
  REQUIRE(run("--scenario run --K 300 --seed 5 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "sdcp_seed5.csv"));
  ::setenv("SDCP_SEED", "nope", 1);
  CHECK(run("--scenario run --K 300 --out " + out.string()) == 1);
  ::unsetenv("SDCP_SEED");
  fs::remove_all(out);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.conf") << "cp_shares = 0.5, 0.4\n";
  CHECK(run("--config " + (dir / "bad.conf").string() + " --out " + (dir / "o").string()) == 1);
  CHECK(run("--K -3 --out " + (dir / "o").string()) == 1);
  CHECK(run("--scenario nonsense") == 1);
  CHECK(run("--tau 3q --scenario churn") == 1);
  CHECK(run("--T 1,10 --scenario run") == 1);
  std::ofstream(dir / "blocker") << "x";
  CHECK(run("--K 300 --out " + (dir / "blocker" / "sub").string()) == 2);
  CHECK(run("--help") == 0);
  fs::remove_all(dir);
}
