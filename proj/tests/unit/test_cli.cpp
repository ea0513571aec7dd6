#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/cli.hpp"
#include "doctest.h"
#include "dthazard/existence.hpp"
#include "dthazard/sample.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace dthazard;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dthazard_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const std::string kAids = std::string(DTHAZARD_DATA_DIR) + "/aids_transfusion.csv";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit 64") {
  CHECK(run_cli({}).code == cli::kExitUsage);
  CHECK(run_cli({"nonsense"}).code == cli::kExitUsage);
  CHECK(run_cli({"fit", kAids, "--kind", "bogus"}).code == cli::kExitUsage);
  CHECK(run_cli({"fit", kAids, "--no-such-flag"}).code == cli::kExitUsage);
  CHECK(run_cli({"simulate", "--model", "m9"}).code == cli::kExitUsage);
  CHECK(run_cli({"--version"}).code == cli::kExitOk);
}

TEST_CASE("data errors exit 65") {
  const fs::path dir = scratch("data");
  CHECK(run_cli({"check", (dir / "missing.csv").string()}).code == cli::kExitData);
  std::ofstream(dir / "bad.csv") << "u,x,v\n0,0.5,1\n0.7,0.5,1\n";
  const Outcome o = run_cli({"check", (dir / "bad.csv").string()});
  CHECK(o.code == cli::kExitData);
  CHECK(o.err.find("line 3") != std::string::npos);
}

TEST_CASE("check reports nonexistence and extracts the largest component") {
  const fs::path dir = scratch("check");
  std::ofstream(dir / "in.csv") << "u,x,v\n0,0.1,0.2\n0.5,0.6,0.7\n0.55,0.65,0.8\n";
  const fs::path kept = dir / "kept.csv";
  const Outcome o = run_cli({"check", (dir / "in.csv").string(), "--extract-largest",
                             kept.string()});
  CHECK(o.code == cli::kExitExistence);
  CHECK(o.out.find("exists_unique: false") != std::string::npos);
  const Sample s = read_sample_csv_file(kept.string());
  CHECK(s.size() == 2);
  CHECK(check_existence(s).exists_unique);
  const std::string removed = slurp(dir / "kept.csv.removed.csv");
  CHECK(removed.rfind("# dthazard", 0) == 0);
  CHECK(removed.find("index\n0\n") != std::string::npos);
  CHECK(run_cli({"check", kept.string()}).code == cli::kExitOk);
  CHECK(run_cli({"fit", (dir / "in.csv").string(), "--kind", "np"}).code == cli::kExitExistence);
}

TEST_CASE("fit prints a JSON summary") {
  const Outcome o = run_cli({"fit", kAids, "--transform", "0,1", "--kind", "np"});
  REQUIRE(o.code == cli::kExitOk);
  const auto j = nlohmann::json::parse(o.out);
  CHECK(j["meta"]["command"] == "fit");
  CHECK(j["n"] == 295);
  CHECK(j["fit"].contains("alpha"));
}

TEST_CASE("reruns are byte-identical") {
  const fs::path dir = scratch("rerun");
  auto hazard = [&](const std::string& name, const std::string& threads) {
    const fs::path p = dir / name;
    const Outcome o = run_cli({"bands", kAids, "--transform", "49,95", "--kind", "sp", "--family",
                               "beta", "--h", "0.3", "--bands", "30", "--seed", "3", "--grid",
                               "0.3:0.9:13", "--threads", threads, "-o", p.string(),
                               "--summary", (dir / (name + ".json")).string()});
    REQUIRE(o.code == cli::kExitOk);
    return p;
  };
  const std::string a = slurp(hazard("a.csv", "1"));
  const std::string b = slurp(hazard("b.csv", "1"));
  const std::string c = slurp(hazard("c.csv", "2"));
  CHECK(a == b);
  CHECK(a == c);
  CHECK(slurp(dir / "a.csv.json") == slurp(dir / "b.csv.json"));
  CHECK(a.rfind("# dthazard", 0) == 0);
  CHECK(a.find("x,value,lo,hi\n") != std::string::npos);
}

TEST_CASE("gfun and bandwidth write curves") {
  const fs::path dir = scratch("gfun");
  REQUIRE(run_cli({"gfun", kAids, "--transform", "49,95", "--kind", "np", "--grid", "0.2:0.9:8",
                   "-o", (dir / "g.csv").string()})
              .code == cli::kExitOk);
  const std::string g = slurp(dir / "g.csv");
  CHECK(g.find("x,value\n") != std::string::npos);
  REQUIRE(run_cli({"bandwidth", kAids, "--transform", "49,95", "--kind", "naive", "--h-grid",
                   "0.05:1:5", "-o", (dir / "bw.csv").string()})
              .code == cli::kExitOk);
  CHECK(slurp(dir / "bw.csv").find("h,score\n") != std::string::npos);
}

TEST_CASE("simulate writes its tables and counts dropped replicates") {
  const fs::path dir = scratch("simulate");
  const Outcome o = run_cli({"simulate", "--model", "m33", "--n", "30", "--reps", "20", "--kinds",
                             "np", "--h-grid", "0.05:0.3:3", "--out-dir", dir.string()});
  REQUIRE(o.code == cli::kExitOk);
  const auto j = nlohmann::json::parse(o.out);
  CHECK(j["kinds"][0]["dropped"].get<int>() > 0);
  for (const char* f : {"summary.csv", "mise.csv", "quartiles.csv"})
    CHECK(slurp(dir / f).rfind("# dthazard", 0) == 0);
}

}
