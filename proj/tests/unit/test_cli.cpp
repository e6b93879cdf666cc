#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(RANKONE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh(const std::string& name) {
  const fs::path p = fs::current_path() / "cli_out" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, const std::string& body) {
  const fs::path p = dir / "run.ini";
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("homoclinic writes a closed orbit") {
  const fs::path out = fresh("homoclinic");
  REQUIRE(run("homoclinic --out " + out.string()) == 0);
  CHECK(fs::exists(out / "orbit.csv"));
  CHECK(fs::exists(out / "config.ini"));
  const auto h1 = nlohmann::json::parse(slurp(out / "h1.json"));
  CHECK(h1.contains("config_fingerprint"));
  const std::string orbit = slurp(out / "orbit.csv");
  CHECK(orbit.find("# connected=") != std::string::npos);
  CHECK(orbit.find("s,a,b,u,v,E") != std::string::npos);
}

TEST_CASE("exit codes") {
  const fs::path out = fresh("codes");
  CHECK(run("--no-such-flag homoclinic") == 2);
  CHECK(run("verify") == 2);

  const fs::path lin = write_config(out, "[system]\nname = linear\n");
  CHECK(run("homoclinic --config " + lin.string() + " --out " + out.string()) == 3);
  const auto w = nlohmann::json::parse(slurp(out / "witness.json"));
  CHECK(w.at("command") == "homoclinic");
  CHECK(w.contains("config_fingerprint"));

  const fs::path bad = fresh("bad_mu");
  const fs::path cfg = write_config(bad, "[ranges]\nmu = 1e-3 1e-3 1\n");
  CHECK(run("melnikov --config " + cfg.string() + " --out " + bad.string()) == 2);
}

TEST_CASE("iterate is reproducible byte for byte") {
  const fs::path a = fresh("iter_a"), b = fresh("iter_b");
  REQUIRE(run("asmap iterate --seed 7 --out " + a.string()) == 0);
  REQUIRE(run("asmap iterate --seed 7 --out " + b.string()) == 0);
  const std::string ta = slurp(a / "iterates.csv");
  CHECK_FALSE(ta.empty());
  CHECK(ta == slurp(b / "iterates.csv"));
  const fs::path c = fresh("iter_c");
  REQUIRE(run("asmap iterate --seed 8 --out " + c.string()) == 0);
  CHECK(ta != slurp(c / "iterates.csv"));
}

TEST_CASE("verify c4 and flow write their reports") {
  const fs::path c4 = fresh("c4");
  CHECK(run("verify c4 --out " + c4.string()) == 0);
  CHECK(fs::exists(c4 / "c4.json"));
  CHECK(fs::exists(c4 / "c4.csv"));
  const auto j = nlohmann::json::parse(slurp(c4 / "c4.json"));
  CHECK(j.at("pass") == true);

  const fs::path flow = fresh("flow");
  CHECK(run("verify flow --out " + flow.string()) == 0);
  CHECK(fs::exists(flow / "flow_check.csv"));
  CHECK(fs::exists(flow / "flow_check.json"));
}

TEST_CASE("fingerprint ignores the output directory") {
  const fs::path a = fresh("fp_a"), b = fresh("fp_b");
  REQUIRE(run("melnikov --out " + a.string()) == 0);
  REQUIRE(run("melnikov --threads 2 --out " + b.string()) == 0);
  const auto ja = nlohmann::json::parse(slurp(a / "melnikov.json"));
  const auto jb = nlohmann::json::parse(slurp(b / "melnikov.json"));
  CHECK(ja.at("config_fingerprint") == jb.at("config_fingerprint"));
  CHECK(ja.at("A") == jb.at("A"));
}
