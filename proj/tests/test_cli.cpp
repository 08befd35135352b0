#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli() {
  const char* path = std::getenv("RCB_CLI");
  return path ? path : "";
}

fs::path scratch() {
  static const fs::path dir = [] {
    const auto d = fs::temp_directory_path() / "rcb_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = "\"" + cli() + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("exit codes") {
  REQUIRE_MESSAGE(!cli().empty(), "RCB_CLI is not set");
  const auto out = scratch() / "codes";
  CHECK(run("--out " + out.string() + " exp example1") == 0);
  CHECK(fs::exists(out / "example1.json"));
  CHECK(run("--out " + out.string() + " perc ibar --grid 2x2 --A 0 --B 3 --mc 1000") == 2);
  CHECK(run("--no-such-flag exp example1") == 2);
  CHECK(run("") == 2);
  CHECK(run("--out " + out.string() + " perc ibar --grid 9x9 --A 0 --B 80 --exact") == 3);
  CHECK(run("--out " + out.string() + " --tolerance -1 rcr check --grid 2x2") == 1);
  CHECK(run("--out " + out.string() + " gibbs eval --model " + (scratch() / "missing.json").string()) == 2);
}

TEST_CASE("same seed gives identical bytes") {
  const auto a = scratch() / "a", b = scratch() / "b";
  const std::string args = " perc ibar --grid 3x1 --A 0 --B 2 --mc 4000 --seed 9 --tasks 4 --burn-in 20";
  REQUIRE(run("--threads 1 --out " + a.string() + args) == 0);
  REQUIRE(run("--threads 3 --out " + b.string() + args) == 0);
  const auto ja = slurp(a / "perc_ibar.json");
  CHECK(!ja.empty());
  CHECK(ja == slurp(b / "perc_ibar.json"));
  const auto j = nlohmann::json::parse(ja);
  CHECK(j["provenance"]["seed"] == 9);
  CHECK(j["scalars"].size() > 0);
}

TEST_CASE("csv output and config files") {
  const auto dir = scratch() / "csv";
  REQUIRE(run("--format csv --out " + dir.string() + " exp example2") == 0);
  const auto scalars = slurp(dir / "example2_scalars.csv");
  CHECK(scalars.rfind("name,value,stderr,mode\n", 0) == 0);
  CHECK(slurp(dir / "example2_verdicts.csv").rfind("name,holds,kind,lhs,rhs,slack\n", 0) == 0);

  const auto cfg_dir = scratch() / "cfg";
  const auto cfg = scratch() / "run.toml";
  std::ofstream(cfg) << "out = \"" << cfg_dir.string() << "\"\nformat = \"csv\"\n";
  REQUIRE(run("--config " + cfg.string() + " exp example1") == 0);
  CHECK(fs::exists(cfg_dir / "example1_scalars.csv"));
  // flags win over the file
  REQUIRE(run("--config " + cfg.string() + " --format json exp example1") == 0);
  CHECK(fs::exists(cfg_dir / "example1.json"));
}

TEST_CASE("model files") {
  const auto model = scratch() / "model.json";
  std::ofstream(model) << R"({"model": "ising", "graph": {"path": 3}, "J": 0.5, "boundary": {"0": 1}})";
  const auto dir = scratch() / "model";
  REQUIRE(run("--out " + dir.string() + " gibbs eval --model " + model.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "gibbs_eval.json"));
  CHECK(j["experiment"] == "gibbs_eval");
  const auto bad = scratch() / "bad.json";
  std::ofstream(bad) << R"({"model": "potts", "graph": {"path": 3}})";
  CHECK(run("--out " + dir.string() + " gibbs eval --model " + bad.string()) == 2);
}
