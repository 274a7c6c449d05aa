#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "islopt/codegen.hpp"
#include "islopt/correlation.hpp"
#include "islopt/seqio.hpp"

using namespace islopt;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("islopt_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json without_timing(json j) {
  j.erase("elapsed_micros");
  return j;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("generate gold subset file") {
  const fs::path dir = scratch_dir("gold");
  const auto r = invoke({"generate", "--family", "gold", "--n", "6", "--k", "4", "--samples", "100000", "--seed", "1",
                         "--out", (dir / "g.txt").string()});
  REQUIRE(r.code == 0);
  const SequenceSet x = load_sequence_set(dir / "g.txt");
  CHECK(x.length() == 63);
  CHECK(x.count() == 4);
  const json info = json::parse(r.out);
  CHECK(info["isl"].get<int64_t>() == isl(x));
  CHECK(info["isl"].get<int64_t>() >= 27506);
}

TEST_CASE("generate random round-trips bit-exactly") {
  const auto r = invoke({"generate", "--family", "random", "--l", "127", "--k", "4", "--seed", "7"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  const SequenceSet x = read_sequence_set(in);
  CHECK(x == random_set(127, 4, 7));
  std::ostringstream again;
  write_sequence_set(again, x);
  CHECK(again.str() == r.out);
}

TEST_CASE("generate and evaluate an m-sequence") {
  const fs::path dir = scratch_dir("mseq");
  const fs::path file = dir / "m.txt";
  REQUIRE(invoke({"generate", "--family", "mseq", "--n", "10", "--out", file.string()}).code == 0);
  const SequenceSet x = load_sequence_set(file);
  CHECK(x.length() == 1023);
  CHECK(x.count() == 1);
  const auto r = invoke({"evaluate", "--in", file.string()});
  REQUIRE(r.code == 0);
  const json report = json::parse(r.out);
  CHECK(report["psl"] == 1);
  CHECK(report["isl"] == 1022);

  CHECK(invoke({"generate", "--family", "mseq", "--n", "2", "--taps", "2"}).code == cli::kExitUsage);
}

TEST_CASE("evaluate the all-ones set") {
  const fs::path dir = scratch_dir("ones");
  save_sequence_set(dir / "ones.txt", SequenceSet(4, 1));
  const auto r = invoke({"evaluate", "--in", (dir / "ones.txt").string(), "--out", (dir / "r.json").string()});
  REQUIRE(r.code == 0);
  const json report = json::parse(r.out);
  CHECK(report["isl"] == 48);
  CHECK(report["psl"] == 4);
  CHECK(report["histogram"] == json::parse("[[4, 3]]"));
  REQUIRE(report["pairs"].size() == 1u);
  CHECK(report["pairs"][0]["worst_value"] == 4);
  CHECK(json::parse(slurp(dir / "r.json")) == report);
}

TEST_CASE("optimize pipeline is consistent with evaluate") {
  const fs::path dir = scratch_dir("optimize");
  const auto bist = invoke({"optimize", "--l", "31", "--k", "3", "--init-seed", "5", "--n", "1", "--out",
                            (dir / "bist.txt").string(), "--trace", (dir / "bist.csv").string(), "--summary",
                            (dir / "bist.json").string()});
  REQUIRE(bist.code == 0);
  const json s1 = json::parse(slurp(dir / "bist.json"));
  for (const char* key : {"L", "K", "N", "seed", "isl_initial", "isl_final", "psl_final", "iterations", "status"}) {
    CHECK(s1.contains(key));
  }
  CHECK(s1["status"] == "converged");
  CHECK(s1["isl_initial"] == isl(random_set(31, 3, 5)));

  const std::string trace = slurp(dir / "bist.csv");
  CHECK(trace.rfind("t,isl,subset_size,nodes,micros\n", 0) == 0);
  CHECK(std::count(trace.begin(), trace.end(), '\n') == s1["iterations"].get<int>() + 1);

  const auto bcd = invoke({"optimize", "--in", (dir / "bist.txt").string(), "--n", "4", "--seed", "2", "--out",
                           (dir / "bcd.txt").string(), "--trace", (dir / "bcd.csv").string(), "--trace-subsets"});
  REQUIRE(bcd.code == 0);
  const json s2 = json::parse(bcd.out);
  CHECK(s2["isl_final"].get<int64_t>() <= s1["isl_final"].get<int64_t>());
  CHECK(s2["isl_initial"] == s1["isl_final"]);

  const json report = json::parse(invoke({"evaluate", "--in", (dir / "bcd.txt").string()}).out);
  CHECK(report["isl"] == s2["isl_final"]);
  CHECK(report["psl"] == s2["psl_final"]);
  CHECK(slurp(dir / "bcd.csv").rfind("t,isl,subset_size,nodes,micros,subset\n", 0) == 0);
}

TEST_CASE("identical invocations give identical summaries") {
  const std::vector<std::string> args{"optimize", "--l", "15", "--k", "2", "--init-seed", "3", "--n", "6",
                                      "--solver", "bnb", "--seed", "11"};
  const auto a = invoke(args);
  const auto b = invoke(args);
  REQUIRE(a.code == 0);
  CHECK(without_timing(json::parse(a.out)) == without_timing(json::parse(b.out)));
}

TEST_CASE("config files reproduce a run") {
  const fs::path dir = scratch_dir("config");
  const fs::path cfg = dir / "run.toml";
  const auto a = invoke({"--write-config", cfg.string(), "optimize", "--l", "15", "--k", "2", "--init-seed", "4",
                         "--n", "3", "--seed", "9", "--bound", "multilinear"});
  REQUIRE(a.code == 0);
  REQUIRE(fs::exists(cfg));
  const auto b = invoke({"--config", cfg.string()});
  REQUIRE(b.code == 0);
  CHECK(without_timing(json::parse(a.out)) == without_timing(json::parse(b.out)));
}

TEST_CASE("time budget ends with status budget") {
  const auto r = invoke({"optimize", "--l", "63", "--k", "4", "--n", "14", "--time-budget", "0.001",
                         "--stall-limit", "1000000"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["status"] == "budget");
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch_dir("errors");
  std::ofstream(dir / "bad.txt") << "4 1\n01x1\n";
  CHECK(invoke({"evaluate", "--in", (dir / "bad.txt").string()}).code == cli::kExitParse);
  CHECK(invoke({"optimize", "--in", (dir / "bad.txt").string()}).code == cli::kExitParse);
  CHECK(invoke({"evaluate", "--in", (dir / "missing.txt").string()}).code == cli::kExitParse);
  CHECK(invoke({"generate", "--family", "kasami"}).code == cli::kExitUsage);
  CHECK(invoke({"generate", "--family", "gold", "--n", "8"}).code == cli::kExitUsage);
  CHECK(invoke({"optimize", "--l", "7", "--k", "2", "--n", "15"}).code == cli::kExitUsage);
  CHECK(invoke({"optimize"}).code == cli::kExitUsage);
  CHECK(invoke({"frobnicate"}).code == cli::kExitUsage);
  CHECK(invoke({}).code == cli::kExitUsage);
  CHECK(invoke({"--help"}).code == cli::kExitOk);
}

TEST_CASE("benchmark CSV") {
  const auto r = invoke({"benchmark", "--l", "15,31", "--k", "2", "--n", "1,4,10", "--trials", "3", "--solver", "bnb"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "L,K,N,trials,median_micros,median_nodes,max_nodes");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::vector<int64_t> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(std::stoll(cell));
    REQUIRE(f.size() == 7u);
    CHECK(f[6] <= (int64_t{2} << f[2]));
    CHECK(f[5] <= f[6]);
  }
  CHECK(rows == 6);
}

TEST_CASE("repro-table1 writes per-stage artifacts") {
  const fs::path dir = scratch_dir("repro");
  const auto r = invoke({"repro-table1", "--l", "31", "--k", "2", "--samples", "200", "--seeds", "2", "--blocks", "4",
                         "--threads", "1", "--out-dir", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("Gold") != std::string::npos);
  CHECK(r.out.find("BCD (N=4)") != std::string::npos);
  const json summary = json::parse(slurp(dir / "summary.json"));
  REQUIRE(summary["stages"].size() == 3u);
  CHECK(summary["stages"][0]["stage"] == "gold");
  CHECK(summary["stages"][1]["stage"] == "bist");
  CHECK(summary["stages"][2]["stage"] == "bcd_n4");
  for (int s = 0; s < 2; ++s) {
    const auto bist = summary["stages"][1]["final_isl"][s].get<int64_t>();
    const auto bcd = summary["stages"][2]["final_isl"][s].get<int64_t>();
    CHECK(bcd <= bist);
    const fs::path file = dir / "bcd_n4" / ("seed_" + std::to_string(s) + ".txt");
    REQUIRE(fs::exists(file));
    CHECK(isl(load_sequence_set(file)) == bcd);
  }
  CHECK(fs::exists(dir / "gold.txt"));
  CHECK(fs::exists(dir / "bist" / "seed_0_trace.csv"));
}

TEST_SUITE_END();
