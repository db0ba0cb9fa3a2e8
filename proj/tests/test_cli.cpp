#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// run the tool inside dir, capturing stdout/stderr and the exit code
RunResult run(const fs::path& dir, const std::string& args) {
  const fs::path out = dir / "_stdout.txt";
  const fs::path err = dir / "_stderr.txt";
  const std::string cmd = "cd '" + dir.string() + "' && '" RBLAB_CLI_PATH
                          "' " + args + " > '" + out.string() + "' 2> '" +
                          err.string() + "'";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(status);
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rblab_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

}  // namespace

TEST_CASE("exponents prints and exports the theoretical table") {
  const auto dir = fresh_dir("exponents");
  const auto r = run(dir, "exponents --kind slt --h 0.7");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "space_sup=0.42857"));
  CHECK(contains(r.out, "time_sup=0.3"));
  CHECK(first_line(slurp(dir / "exponents.csv")) ==
        "kind,H1,H2,exists,space_sup,time_sup");
  CHECK(fs::exists(dir / "exponents.manifest.json"));
}

TEST_CASE("simulate is reproducible byte for byte") {
  const auto dir1 = fresh_dir("sim1");
  const auto dir2 = fresh_dir("sim2");
  const std::string args = "simulate --h 0.7 --steps 256 --seed 5";
  CHECK(run(dir1, args).exit_code == 0);
  CHECK(run(dir2, args).exit_code == 0);
  const auto csv1 = slurp(dir1 / "simulate.csv");
  CHECK(csv1 == slurp(dir2 / "simulate.csv"));
  CHECK(first_line(csv1) == "s,x");
}

TEST_CASE("replay reproduces digests and flags tampering") {
  const auto dir = fresh_dir("replay");
  CHECK(run(dir, "slt --h 0.7 --steps 64 --oversample 4 --eps 0.05 "
                 "--reps 4 --seed 42").exit_code == 0);
  const auto ok = run(dir, "replay slt.manifest.json --out-dir check");
  CHECK(ok.exit_code == 0);
  CHECK(contains(ok.out, "all outputs match"));
  CHECK(slurp(dir / "slt.csv") == slurp(dir / "check" / "slt.csv"));

  // tamper with the recorded digest
  auto manifest = slurp(dir / "slt.manifest.json");
  const auto pos = manifest.find("fnv1a64:");
  REQUIRE(pos != std::string::npos);
  manifest[pos + 8] = manifest[pos + 8] == '0' ? '1' : '0';
  std::ofstream(dir / "tampered.json", std::ios::binary) << manifest;
  const auto bad = run(dir, "replay tampered.json --out-dir check2");
  CHECK(bad.exit_code == 3);
  CHECK(contains(bad.out, "MISMATCH"));
}

TEST_CASE("worker count does not change results") {
  const auto dir1 = fresh_dir("w1");
  const auto dir4 = fresh_dir("w4");
  const std::string args =
      "eps-study --kind slt --h 0.65 --steps 128 --oversample 4 "
      "--ladder 0.1,0.05,0.025 --reps 12 --seed 3 --workers ";
  CHECK(run(dir1, args + "1").exit_code == 0);
  CHECK(run(dir4, args + "4").exit_code == 0);
  CHECK(slurp(dir1 / "eps-study.csv") == slurp(dir4 / "eps-study.csv"));
}

TEST_CASE("config file: defaults, overrides, validation") {
  const auto dir = fresh_dir("config");

  SUBCASE("H outside the open interval is rejected naming the interval") {
    std::ofstream(dir / "bad.json") << R"({"h": 0.5})";
    const auto r = run(dir, "simulate --steps 16 --config bad.json");
    CHECK(r.exit_code == 1);
    CHECK(contains(r.err, "open interval"));
  }
  SUBCASE("unknown config fields are rejected by name") {
    std::ofstream(dir / "bad2.json") << R"({"hurst": 0.7})";
    const auto r = run(dir, "simulate --config bad2.json");
    CHECK(r.exit_code == 1);
    CHECK(contains(r.err, "hurst"));
  }
  SUBCASE("config fills defaults, flags win, manifest echoes the merge") {
    std::ofstream(dir / "cfg.json")
        << R"({"h": 0.8, "steps": 32, "oversample": 4, "seed": 77})";
    const auto r = run(dir,
                       "simulate --config cfg.json --steps 16");
    CHECK(r.exit_code == 0);
    const auto manifest = slurp(dir / "simulate.manifest.json");
    CHECK(contains(manifest, "\"h\": 0.8"));        // from config
    CHECK(contains(manifest, "\"steps\": 16"));     // flag wins
    CHECK(contains(manifest, "\"oversample\": 4")); // from config
    CHECK(contains(manifest, "\"seed\": 77"));
    // missing optional oversample -> default echoed
    std::ofstream(dir / "cfg2.json") << R"({"h": 0.8, "steps": 16})";
    CHECK(run(dir, "simulate --config cfg2.json").exit_code == 0);
    CHECK(contains(slurp(dir / "simulate.manifest.json"),
                   "\"oversample\": 16"));
  }
}

TEST_CASE("epsilon below the resolution floor is refused with the floor") {
  const auto dir = fresh_dir("floor");
  const auto r = run(dir,
                     "slt --h 0.9 --steps 32 --oversample 2 --eps 1e-9");
  CHECK(r.exit_code == 1);
  CHECK(contains(r.err, "resolution floor"));
}

TEST_CASE("unknown flags exit 1 with usage text") {
  const auto dir = fresh_dir("badflag");
  const auto r = run(dir, "simulate --definitely-not-a-flag 3");
  CHECK(r.exit_code == 1);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("exit codes separate invalid input from runtime failures") {
  const auto dir = fresh_dir("numfail");
  // truncation above the node count is caught as invalid input
  const auto r = run(dir, "spectrum --h 0.7 --nodes 64 --omega 50 --trunc 80");
  CHECK(r.exit_code == 1);
  // a structurally broken manifest is a runtime failure, not usage
  std::ofstream(dir / "broken.json") << R"({"schema_version": 1})";
  CHECK(run(dir, "replay broken.json --out-dir x").exit_code == 2);
}

TEST_CASE("estimate CSVs carry the documented schema") {
  const auto dir = fresh_dir("schema");
  CHECK(run(dir, "clt --h1 0.8 --h2 0.8 --steps 32 --oversample 2 "
                 "--eps 0.1 --reps 2 --seed 1").exit_code == 0);
  CHECK(first_line(slurp(dir / "clt.csv")) == "kind,t,y,eps,value,seed");
  CHECK(run(dir, "spectrum --h 0.7 --nodes 64 --omega 50 --trunc 20")
            .exit_code == 0);
  CHECK(first_line(slurp(dir / "spectrum.csv")) == "j,lambda_j");
  CHECK(run(dir, "density --h 0.7 --nodes 64 --omega 50 --trunc 20 "
                 "--x-points 201").exit_code == 0);
  CHECK(first_line(slurp(dir / "density.csv")) == "x,p");
  CHECK(run(dir, "holder-time --kind slt --h 0.6 --n 2 --t-base 0.5 "
                 "--deltas 0.1,0.2,0.4 --eps 0.05 --steps 64 "
                 "--oversample 2 --reps 8 --seed 2").exit_code == 0);
  CHECK(first_line(slurp(dir / "holder-time.raw.csv")) ==
        "delta,moment,stderr");
  CHECK(first_line(slurp(dir / "holder-time.fit.csv")) ==
        "slope,stderr,n,kind,H1,H2");
  CHECK(run(dir, "eps-study --kind slt --h 0.65 --steps 64 --oversample 2 "
                 "--ladder 0.2,0.1 --reps 4 --seed 6").exit_code == 0);
  CHECK(first_line(slurp(dir / "eps-study.csv")) ==
        "eps,mean,stderr,diff_next,diff_stderr");
  CHECK(run(dir, "verify-bound --h 0.7 --nodes 64 --omega 50 --trunc 20")
            .exit_code == 0);
  CHECK(first_line(slurp(dir / "verify-bound.csv")) ==
        "j,sigma_j,bound_rhs,ratio");
  CHECK(run(dir, "refine --h 0.7 --nodes-ladder 32,64 --omega 50 --trunc 20")
            .exit_code == 0);
  CHECK(first_line(slurp(dir / "refine.csv")) ==
        "nodes,omega,grading,trunc,sum_lambda_sq,raw_sum_lambda_sq,rel_change");
}
