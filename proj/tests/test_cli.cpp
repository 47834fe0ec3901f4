#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spnjd/cli.hpp"

using namespace spnjd;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "spnjd");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("spnjd_cli_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("shortest round-trip numbers") {
  CHECK(cli::format_number(0.0) == "0");
  CHECK(cli::format_number(-0.0) == "0");
  CHECK(cli::format_number(0.1) == "0.1");
  CHECK(cli::format_number(128.78) == "128.78");
  CHECK(cli::format_number(1e-300) == "1e-300");
  CHECK(cli::format_number(2.0 / 3.0) == "0.6666666666666666");
  CHECK(std::stod(cli::format_number(2.0 / 3.0)) == 2.0 / 3.0);
}

TEST_CASE("semiflows command") {
  const Result r = run_cli({"semiflows", "--model", "sir_exp1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("semiflow,Outside,S,I,R,constant\n0,1,1,1,1,200\n") == 0);
  CHECK(r.out.find("classification,density-dependent") != std::string::npos);

  const Result j = run_cli({"semiflows", "--model", "client_server", "--format", "json"});
  REQUIRE(j.code == 0);
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["semiflows"].size() == 2);
  CHECK(doc["covered"] == true);
}

TEST_CASE("usage and model errors map to exit codes") {
  CHECK(run_cli({}).code == cli::kUsage);
  CHECK(run_cli({"sde"}).code == cli::kUsage);
  CHECK(run_cli({"sde", "--model", "cycle"}).code == cli::kUsage);
  CHECK(run_cli({"bogus"}).code == cli::kUsage);
  CHECK(run_cli({"sde", "--model", "cycle", "--t-final", "1", "--step", "-1"}).code == cli::kUsage);
  CHECK(run_cli({"compare", "sde", "--model", "cycle", "--t-final", "1"}).code == cli::kUsage);
  CHECK(run_cli({"compare", "sde", "warp", "--model", "cycle", "--t-final", "1"}).code == cli::kUsage);

  const Result missing = run_cli({"ode", "--model", "no_such_thing", "--t-final", "1"});
  CHECK(missing.code == cli::kModelInvalid);
  CHECK(missing.err.find("no_such_thing") != std::string::npos);

  const auto dir = scratch("bad_model");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "bad.json") << R"({"places": ["A"], "transitions": [
      {"name": "t", "rate": -1, "input": {"A": 1}, "output": {}}]})";
  const Result bad = run_cli({"ode", "--model", (dir / "bad.json").string(), "--t-final", "1"});
  CHECK(bad.code == cli::kModelInvalid);
  CHECK(bad.err.find("transitions[0].rate") != std::string::npos);

  const Result cap = run_cli({"ctmc", "--model", "sir_exp1", "--t-final", "1", "--cap", "100"});
  CHECK(cap.code == cli::kEngineFailure);
  CHECK(cap.err.find("use SSA") != std::string::npos);
}

TEST_CASE("help exits cleanly") {
  const Result r = run_cli({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("semiflows") != std::string::npos);
}

TEST_CASE("stochastic commands echo the seed") {
  const Result d = run_cli({"ssa", "--model", "cycle", "--t-final", "0.5", "--runs", "10"});
  CHECK(d.code == 0);
  CHECK(d.err == "seed: 42\n");
  const Result s = run_cli({"sde", "--model", "cycle", "--t-final", "0.5", "--runs", "10", "--seed", "7"});
  CHECK(s.err == "seed: 7\n");
  CHECK(s.out.find("place,mean,ci_halfwidth,min,max\nA,") == 0);
  CHECK(run_cli({"ode", "--model", "cycle", "--t-final", "0.5"}).err.empty());
}

TEST_CASE("ode and ctmc outputs") {
  const Result ode = run_cli({"ode", "--model", "cycle", "--t-final", "1", "--step", "0.5"});
  CHECK(ode.code == 0);
  CHECK(ode.out.rfind("time,A,B\n0,100,0\n0.5,", 0) == 0);

  const Result ctmc = run_cli({"ctmc", "--model", "cycle_n1", "--t-final", "1", "--format", "json"});
  REQUIRE(ctmc.code == 0);
  const auto doc = nlohmann::json::parse(ctmc.out);
  CHECK(doc["summary"][0]["mean"].get<double>() == doctest::Approx(0.68326).epsilon(1e-5));
  CHECK(doc["pmfs"][0]["support"] == nlohmann::json::array({0, 1}));
}

TEST_CASE("scaled model instantiation") {
  const Result r = run_cli({"semiflows", "--model", "sir_exp2", "--scale", "600"});
  CHECK(r.out.find("0,1,1,1,1,600\n") != std::string::npos);
  CHECK(r.out.find("Outside,0,600,semiflow\n") != std::string::npos);
  const Result no_alpha = run_cli({"semiflows", "--model", "client_server", "--scale", "3"});
  CHECK(no_alpha.code == cli::kModelInvalid);
}

TEST_CASE("output directory layout") {
  const auto dir = scratch("files");
  const Result r = run_cli({"sde", "--model", "cycle", "--t-final", "1", "--runs", "20", "--trace-every", "0.5",
                            "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  for (const char* f : {"summary.csv", "endpoints.csv", "trace.csv", "pmf_A.csv", "pmf_B.csv"})
    CHECK(std::filesystem::exists(dir / f));
  CHECK(slurp(dir / "pmf_A.csv").rfind("value,mass\n", 0) == 0);
  CHECK(slurp(dir / "trace.csv").rfind("run,time,A,B\n0,0,100,0\n0,0.5,", 0) == 0);
}

TEST_CASE("compare reports per-place agreement") {
  const Result r = run_cli({"compare", "sde", "ssa", "--model", "cycle", "--t-final", "1", "--runs", "2000"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string header, row;
  std::getline(lines, header);
  CHECK(header == "place,mean_a,ci_halfwidth_a,mean_b,ci_halfwidth_b,mean_diff,ci_overlap,tv_distance");
  while (std::getline(lines, row)) {
    const double tv = std::stod(row.substr(row.rfind(',') + 1));
    CHECK(tv < 0.2);
    CHECK(row.find(",true,") != std::string::npos);
  }
}

TEST_CASE("byte-identical reruns under any worker count") {
  const std::vector<std::vector<std::string>> commands{
      {"sde", "--model", "sir_exp2", "--t-final", "5", "--runs", "40", "--trace-every", "1"},
      {"ssa", "--model", "sir_exp1", "--t-final", "2", "--runs", "40", "--trace-every", "0.5"},
      {"compare", "sde", "ssa", "--model", "queue3", "--t-final", "1", "--runs", "40", "--format", "json"}};
  int k = 0;
  for (auto cmd : commands) {
    std::vector<std::string> files;
    for (const char* workers : {"1", "3", "8"}) {
      const auto dir = scratch("det" + std::to_string(k) + "_" + workers);
      auto args = cmd;
      args.insert(args.end(), {"--workers", workers, "--out", dir.string()});
      REQUIRE(run_cli(args).code == 0);
      std::string all;
      for (const auto& e : std::filesystem::directory_iterator(dir)) all += e.path().filename().string() + slurp(e.path());
      files.push_back(all);
    }
    CHECK(files[0] == files[1]);
    CHECK(files[0] == files[2]);
    ++k;
  }

  ::setenv("SPNJD_WORKERS", "1", 1);
  const Result one = run_cli({"sde", "--model", "cycle", "--t-final", "1", "--runs", "30"});
  ::setenv("SPNJD_WORKERS", "6", 1);
  const Result six = run_cli({"sde", "--model", "cycle", "--t-final", "1", "--runs", "30"});
  ::unsetenv("SPNJD_WORKERS");
  CHECK(one.out == six.out);
}

}
