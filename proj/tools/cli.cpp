#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "islopt/bcd.hpp"
#include "islopt/codegen.hpp"
#include "islopt/correlation.hpp"
#include "islopt/error.hpp"
#include "islopt/kernels.hpp"
#include "islopt/seqio.hpp"
#include "islopt/solver.hpp"

namespace islopt::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

int64_t micros_since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start).count();
}

struct SolverOptions {
  std::string solver = "auto";
  std::string bound = "interval";
  std::string order = "best-first";
  int exhaustive_threshold = 16;
  int exhaustive_cap = kDefaultExhaustiveCap;
  uint64_t node_cap = 0;
  int64_t bnb_time_ms = 0;
  std::size_t open_list_cap = std::size_t{1} << 16;
};

const std::map<std::string, SubproblemSolver> kSolverNames{
    {"auto", SubproblemSolver::kAuto}, {"exhaustive", SubproblemSolver::kExhaustive}, {"bnb", SubproblemSolver::kBnb}};
const std::map<std::string, BoundKind> kBoundNames{
    {"interval", BoundKind::kInterval}, {"relaxation", BoundKind::kRelaxation}, {"multilinear", BoundKind::kMultilinear}};
const std::map<std::string, NodeOrder> kOrderNames{{"best-first", NodeOrder::kBestFirst},
                                                   {"depth-first", NodeOrder::kDepthFirst}};

template <typename Enum>
std::vector<std::string> names_of(const std::map<std::string, Enum>& names) {
  std::vector<std::string> out;
  for (const auto& entry : names) out.push_back(entry.first);
  return out;
}

void add_solver_options(CLI::App* cmd, SolverOptions& o) {
  cmd->add_option("--solver", o.solver, "Subproblem solver")->check(CLI::IsMember(names_of(kSolverNames)));
  cmd->add_option("--bound", o.bound, "Branch-and-bound lower bound")->check(CLI::IsMember(names_of(kBoundNames)));
  cmd->add_option("--order", o.order, "Branch-and-bound node order")->check(CLI::IsMember(names_of(kOrderNames)));
  cmd->add_option("--exhaustive-threshold", o.exhaustive_threshold, "auto solver: exhaustive up to this N")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--exhaustive-cap", o.exhaustive_cap, "Largest N accepted by exhaustive search")
      ->check(CLI::Range(1, kMaxExhaustiveSize));
  cmd->add_option("--node-cap", o.node_cap, "Branch-and-bound node cap per subproblem (0: none)");
  cmd->add_option("--bnb-time-cap", o.bnb_time_ms, "Branch-and-bound time cap per subproblem in ms (0: none)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--open-list-cap", o.open_list_cap, "Open nodes before best-first switches to dives")
      ->check(CLI::PositiveNumber);
}

BcdConfig make_config(const SolverOptions& o) {
  BcdConfig cfg;
  cfg.solver = kSolverNames.at(o.solver);
  cfg.exhaustive_threshold = o.exhaustive_threshold;
  cfg.exhaustive_cap = o.exhaustive_cap;
  cfg.bnb.bound = kBoundNames.at(o.bound);
  cfg.bnb.order = kOrderNames.at(o.order);
  cfg.bnb.node_cap = o.node_cap;
  cfg.bnb.time_cap = std::chrono::milliseconds(o.bnb_time_ms);
  cfg.bnb.open_list_cap = o.open_list_cap;
  return cfg;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream file(path);
  if (!file) throw UsageError("cannot write " + path.string());
  return file;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream file = open_output(path);
  file << text;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace, bool with_subsets) {
  out << "t,isl,subset_size,nodes,micros" << (with_subsets ? ",subset" : "") << '\n';
  for (const auto& r : trace.records) {
    out << r.t << ',' << r.isl << ',' << r.subset_size << ',' << r.nodes << ',' << r.micros;
    if (with_subsets) {
      out << ',';
      for (std::size_t q = 0; q < r.subset.size(); ++q) {
        out << (q == 0 ? "" : ";") << r.subset[q].row << ':' << r.subset[q].col;
      }
    }
    out << '\n';
  }
}

void save_trace(const fs::path& path, const RunTrace& trace, bool with_subsets) {
  std::ofstream file = open_output(path);
  write_trace_csv(file, trace, with_subsets);
}

json run_summary(const SequenceSet& x, int subset_size, uint64_t seed, const RunTrace& trace, int64_t elapsed) {
  json j;
  j["L"] = x.length();
  j["K"] = x.count();
  j["N"] = subset_size;
  j["seed"] = seed;
  j["isl_initial"] = trace.isl_initial;
  j["isl_final"] = trace.isl_final;
  j["psl_final"] = psl(x);
  j["iterations"] = trace.iterations;
  j["status"] = std::string(to_string(trace.status));
  j["subproblem_timeouts"] = trace.subproblem_timeouts;
  j["elapsed_micros"] = elapsed;
  return j;
}

// ---------------------------------------------------------------- generate

struct GenerateOptions {
  std::string family;
  int degree = 0;
  int count = 1;
  int length = 0;
  int64_t samples = 100000;
  uint64_t seed = 0;
  std::vector<int> taps;
  uint32_t lfsr_seed = 0;
  std::string out;
};

int cmd_generate(const GenerateOptions& o, std::ostream& out) {
  SequenceSet x;
  json info;
  info["family"] = o.family;
  if (o.family == "gold") {
    if (o.degree == 0) throw UsageError("--n is required for the gold family");
    const GoldFamily family = generate_gold_family(o.degree);
    const GoldSubset best = sample_best_gold_subset(family, o.count, o.samples, o.seed);
    x = best.codes;
    info["samples"] = o.samples;
    info["seed"] = o.seed;
    info["members"] = best.members;
  } else if (o.family == "mseq") {
    if (o.degree == 0) throw UsageError("--n is required for the mseq family");
    LfsrSpec spec = o.taps.empty() ? default_lfsr(o.degree) : LfsrSpec{o.degree, o.taps, 0};
    spec.seed = o.lfsr_seed;
    x = SequenceSet::from_columns({generate_mseq(spec)});
    info["taps"] = spec.taps;
  } else {
    if (o.length == 0) throw UsageError("--l is required for the random family");
    x = random_set(o.length, o.count, o.seed);
    info["seed"] = o.seed;
  }
  info["L"] = x.length();
  info["K"] = x.count();
  info["isl"] = isl(x);
  if (o.out.empty()) {
    write_sequence_set(out, x);
  } else {
    save_sequence_set(o.out, x);
    out << info.dump() << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- optimize

struct OptimizeOptions {
  std::string in;
  int length = 0;
  int count = 0;
  uint64_t init_seed = 0;
  int subset_size = 1;
  uint64_t seed = 0;
  int64_t max_iterations = 0;
  int64_t stall_limit = 0;
  int64_t column_stall_limit = 0;
  double time_budget = 0.0;
  std::string out;
  std::string trace;
  std::string summary;
  bool trace_subsets = false;
  SolverOptions solver;
};

int cmd_optimize(const OptimizeOptions& o, std::ostream& out) {
  SequenceSet x0;
  if (!o.in.empty()) {
    x0 = load_sequence_set(o.in);
  } else {
    if (o.length == 0 || o.count == 0) throw UsageError("give --in, or --l and --k for a random start");
    x0 = random_set(o.length, o.count, o.init_seed);
  }
  BcdConfig cfg = make_config(o.solver);
  cfg.subset_size = o.subset_size;
  cfg.seed = o.seed;
  cfg.max_iterations = o.max_iterations;
  cfg.stall_limit = o.stall_limit;
  cfg.column_stall_limit = o.column_stall_limit;
  cfg.time_budget = std::chrono::milliseconds(static_cast<int64_t>(o.time_budget * 1000.0));
  cfg.record_subsets = o.trace_subsets;

  const auto start = Clock::now();
  const RunResult result = run_bcd(x0, cfg);
  const json summary = run_summary(result.x, o.subset_size, o.seed, result.trace, micros_since(start));

  if (!o.out.empty()) save_sequence_set(o.out, result.x);
  if (!o.trace.empty()) save_trace(o.trace, result.trace, o.trace_subsets);
  if (!o.summary.empty()) write_text(o.summary, summary.dump(2) + "\n");
  out << summary.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
  std::string in;
  std::string out;
};

json evaluation_report(const SequenceSet& x) {
  std::map<int32_t, int64_t> histogram;
  json pairs = json::array();
  int64_t total = 0;
  int64_t peak = 0;
  for_each_correlation_row(x, CorrelationMethod::kAuto, [&](int i, int j, std::span<const int32_t> row) {
    int64_t energy = 0;
    int worst_shift = -1;
    int32_t worst_value = 0;
    for (std::size_t k = (i == j ? 1 : 0); k < row.size(); ++k) {
      const int32_t v = row[k];
      ++histogram[v];
      energy += static_cast<int64_t>(v) * v;
      if (worst_shift < 0 || std::abs(v) > std::abs(worst_value)) {
        worst_shift = static_cast<int>(k);
        worst_value = v;
      }
    }
    total += energy;
    peak = std::max<int64_t>(peak, std::abs(worst_value));
    json p;
    p["i"] = i;
    p["j"] = j;
    p["energy"] = energy;
    p["worst_shift"] = worst_shift;
    p["worst_value"] = worst_value;
    pairs.push_back(std::move(p));
  });
  json hist = json::array();
  for (const auto& [value, n] : histogram) hist.push_back(json::array({value, n}));
  json report;
  report["L"] = x.length();
  report["K"] = x.count();
  report["isl"] = total;
  report["psl"] = peak;
  report["histogram"] = std::move(hist);
  report["pairs"] = std::move(pairs);
  return report;
}

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out) {
  const SequenceSet x = load_sequence_set(o.in);
  const json report = evaluation_report(x);
  if (!o.out.empty()) write_text(o.out, report.dump(2) + "\n");
  out << report.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- benchmark

struct BenchmarkOptions {
  std::vector<int> lengths{63};
  int count = 4;
  std::vector<int> sizes{1, 4, 8, 12, 16, 20};
  int trials = 20;
  uint64_t seed = 0;
  bool descend_first = false;
  std::string out;
  SolverOptions solver;
};

template <typename T>
T median(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

int cmd_benchmark(const BenchmarkOptions& o, std::ostream& out) {
  std::ostringstream csv;
  csv << "L,K,N,trials,median_micros,median_nodes,max_nodes\n";
  for (int length : o.lengths) {
    SequenceSet x = random_set(length, o.count, o.seed);
    if (o.descend_first) x = run_bcd(x, BcdConfig{}).x;
    CorrelationTable table(x);
    for (int n : o.sizes) {
      BcdConfig cfg = make_config(o.solver);
      Rng rng = make_rng(o.seed + static_cast<uint64_t>(n));
      std::vector<int64_t> micros;
      std::vector<uint64_t> nodes;
      for (int trial = 0; trial < o.trials; ++trial) {
        const int row = uniform_index(rng, length);
        const int col = uniform_index(rng, o.count);
        const IndexSubset subset = select_subset(row, col, n, length, o.count, rng);
        const bool exhaustive = cfg.solver == SubproblemSolver::kExhaustive ||
                                (cfg.solver == SubproblemSolver::kAuto && n <= cfg.exhaustive_threshold);
        const auto start = Clock::now();
        SolveResult r;
        if (exhaustive) {
          r = solve_exhaustive(table, subset, cfg.exhaustive_cap);
        } else {
          r = solve_bnb(build_subproblem(table, subset), cfg.bnb);
        }
        micros.push_back(micros_since(start));
        nodes.push_back(r.nodes);
      }
      csv << length << ',' << o.count << ',' << n << ',' << o.trials << ',' << median(micros) << ','
          << median(nodes) << ',' << *std::max_element(nodes.begin(), nodes.end()) << '\n';
    }
  }
  if (!o.out.empty()) write_text(o.out, csv.str());
  out << csv.str();
  return kExitOk;
}

// ---------------------------------------------------------------- repro-table1

struct ReproOptions {
  int length = 63;
  int count = 4;
  int64_t samples = 100000;
  int seeds = 10;
  uint64_t seed = 1;
  std::vector<int> blocks{4, 20};
  int threads = 0;
  std::string out_dir = "repro-table1";
  int64_t max_iterations = 0;
  double stage_budget = 0.0;
  SolverOptions solver{.bound = "multilinear"};
};

int gold_degree_for(int length) {
  for (const auto& p : preferred_pairs()) {
    if ((1 << p.degree) - 1 == length) return p.degree;
  }
  return 0;
}

json stage_record(const std::string& name, int subset_size, const std::vector<RunResult>& runs, int64_t elapsed) {
  json j;
  j["stage"] = name;
  j["N"] = subset_size;
  json finals = json::array();
  json iterations = json::array();
  int64_t best = std::numeric_limits<int64_t>::max();
  for (const auto& r : runs) {
    finals.push_back(r.trace.isl_final);
    iterations.push_back(r.trace.iterations);
    best = std::min(best, r.trace.isl_final);
  }
  j["best_isl"] = best;
  j["final_isl"] = std::move(finals);
  j["iterations"] = std::move(iterations);
  j["elapsed_micros"] = elapsed;
  return j;
}

int cmd_repro(const ReproOptions& o, std::ostream& out) {
  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  const int threads = o.threads > 0 ? o.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  json summary;
  summary["L"] = o.length;
  summary["K"] = o.count;
  summary["seed"] = o.seed;
  summary["seeds"] = o.seeds;
  json stages = json::array();
  std::vector<std::pair<std::string, int64_t>> table;

  const int degree = gold_degree_for(o.length);
  if (degree != 0) {
    const auto start = Clock::now();
    const GoldSubset gold = sample_best_gold_subset(generate_gold_family(degree), o.count, o.samples, o.seed);
    save_sequence_set(dir / "gold.txt", gold.codes);
    json g;
    g["stage"] = "gold";
    g["samples"] = o.samples;
    g["members"] = gold.members;
    g["best_isl"] = gold.isl;
    g["elapsed_micros"] = micros_since(start);
    stages.push_back(std::move(g));
    table.emplace_back("Gold", gold.isl);
  }

  std::vector<SequenceSet> current;
  for (int s = 0; s < o.seeds; ++s) current.push_back(random_set(o.length, o.count, o.seed + static_cast<uint64_t>(s)));

  std::vector<int> schedule{1};
  schedule.insert(schedule.end(), o.blocks.begin(), o.blocks.end());
  for (std::size_t stage = 0; stage < schedule.size(); ++stage) {
    const int n = schedule[stage];
    BcdConfig cfg = make_config(o.solver);
    cfg.subset_size = n;
    cfg.seed = o.seed + 1000 * stage;
    cfg.max_iterations = o.max_iterations;
    cfg.time_budget = std::chrono::milliseconds(static_cast<int64_t>(o.stage_budget * 1000.0));
    cfg.record_subsets = false;
    const std::string name = n == 1 ? "bist" : "bcd_n" + std::to_string(n);
    const auto start = Clock::now();
    const std::vector<RunResult> runs = run_bcd_multistart(current, cfg, threads);
    const int64_t elapsed = micros_since(start);
    fs::create_directories(dir / name);
    for (std::size_t s = 0; s < runs.size(); ++s) {
      const std::string tag = "seed_" + std::to_string(s);
      save_sequence_set(dir / name / (tag + ".txt"), runs[s].x);
      save_trace(dir / name / (tag + "_trace.csv"), runs[s].trace, false);
      current[s] = runs[s].x;
    }
    json rec = stage_record(name, n, runs, elapsed);
    table.emplace_back(n == 1 ? "BiST" : "BCD (N=" + std::to_string(n) + ")", rec["best_isl"].get<int64_t>());
    stages.push_back(std::move(rec));
  }
  summary["stages"] = std::move(stages);
  write_text(dir / "summary.json", summary.dump(2) + "\n");

  out << "method        L=" << o.length << '\n';
  for (const auto& [name, value] : table) out << std::left << std::setw(14) << name << value << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Design binary sequence sets with low integrated sidelobe level", "islopt"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "Read options from a TOML/INI file");
  std::string write_config;
  app.add_option("--write-config", write_config, "Write the effective options to a config file");
  std::string isa = "auto";
  app.add_option("--isa", isa, "Kernel variant")->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  GenerateOptions gen;
  CLI::App* generate = app.add_subcommand("generate", "Generate Gold, m-sequence or random sets");
  generate->add_option("--family", gen.family, "gold | mseq | random")
      ->required()
      ->check(CLI::IsMember({"gold", "mseq", "random"}));
  generate->add_option("--n", gen.degree, "Register degree (gold, mseq)");
  generate->add_option("--k", gen.count, "Number of sequences (gold, random)");
  generate->add_option("--l", gen.length, "Sequence length (random)");
  generate->add_option("--samples", gen.samples, "Random Gold subsets to try");
  generate->add_option("--seed", gen.seed, "RNG seed");
  generate->add_option("--taps", gen.taps, "LFSR taps (mseq)")->delimiter(',');
  generate->add_option("--lfsr-seed", gen.lfsr_seed, "LFSR initial state, 0 for all ones (mseq)");
  generate->add_option("--out", gen.out, "Output file (default: stdout)");

  OptimizeOptions opt;
  CLI::App* optimize = app.add_subcommand("optimize", "Run single-entry or block coordinate descent");
  optimize->add_option("--in", opt.in, "Initial sequence-set file");
  optimize->add_option("--l", opt.length, "Length of a random start");
  optimize->add_option("--k", opt.count, "Sequence count of a random start");
  optimize->add_option("--init-seed", opt.init_seed, "Seed of the random start");
  optimize->add_option("--n", opt.subset_size, "Subset size N (1: single-entry descent)")
      ->check(CLI::PositiveNumber)
      ;
  optimize->add_option("--seed", opt.seed, "Subset selection seed");
  optimize->add_option("--max-iterations", opt.max_iterations, "Iteration cap (0: none)");
  optimize->add_option("--stall-limit", opt.stall_limit, "Non-improving iterations before stopping (0: L*K)")
      ;
  optimize->add_option("--column-stall-limit", opt.column_stall_limit,
                       "Non-improving iterations before moving to the next column (0: L)")
      ;
  optimize->add_option("--time-budget", opt.time_budget, "Wall-clock budget in seconds (0: none)")
      ;
  optimize->add_option("--out", opt.out, "Optimized sequence-set file");
  optimize->add_option("--trace", opt.trace, "Per-iteration CSV");
  optimize->add_option("--summary", opt.summary, "Summary JSON file");
  optimize->add_flag("--trace-subsets", opt.trace_subsets, "Add the subset column to the trace");
  add_solver_options(optimize, opt.solver);

  EvaluateOptions ev;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Report ISL, PSL and correlation statistics");
  evaluate->add_option("--in", ev.in, "Sequence-set file")->required();
  evaluate->add_option("--out", ev.out, "Also write the JSON report here");

  BenchmarkOptions bench;
  CLI::App* benchmark = app.add_subcommand("benchmark", "Time single subproblem solves");
  benchmark->add_option("--l", bench.lengths, "Sequence lengths")->delimiter(',');
  benchmark->add_option("--k", bench.count, "Sequence count");
  benchmark->add_option("--n", bench.sizes, "Subset sizes")->delimiter(',');
  benchmark->add_option("--trials", bench.trials, "Subsets per (L, N)")->check(CLI::PositiveNumber);
  benchmark->add_option("--seed", bench.seed, "RNG seed");
  benchmark->add_flag("--descend-first", bench.descend_first, "Start from a single-entry descent fixed point");
  benchmark->add_option("--out", bench.out, "Also write the CSV here");
  add_solver_options(benchmark, bench.solver);

  ReproOptions repro;
  CLI::App* repro_cmd = app.add_subcommand("repro-table1", "Gold baseline, then descent stages over several seeds");
  repro_cmd->add_option("--l", repro.length, "Sequence length");
  repro_cmd->add_option("--k", repro.count, "Sequence count");
  repro_cmd->add_option("--samples", repro.samples, "Random Gold subsets");
  repro_cmd->add_option("--seeds", repro.seeds, "Independent starts")->check(CLI::PositiveNumber);
  repro_cmd->add_option("--seed", repro.seed, "Base seed");
  repro_cmd->add_option("--blocks", repro.blocks, "Block sizes run after single-entry descent")
      ->delimiter(',')
      ;
  repro_cmd->add_option("--threads", repro.threads, "Worker threads (0: all cores)");
  repro_cmd->add_option("--out-dir", repro.out_dir, "Artifact directory");
  repro_cmd->add_option("--max-iterations", repro.max_iterations, "Per-run iteration cap (0: none)")
      ;
  repro_cmd->add_option("--stage-budget", repro.stage_budget, "Per-run time budget in seconds (0: none)")
      ;
  add_solver_options(repro_cmd, repro.solver);

  for (CLI::App* sub : {generate, optimize, evaluate, benchmark, repro_cmd}) sub->configurable();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (isa == "scalar") {
      kernels::set_active(kernels::Isa::kScalar);
    } else if (isa == "avx2") {
      kernels::set_active(kernels::Isa::kAvx2);
    }
    if (!write_config.empty()) {
      // only the command that ran, so reading the file back selects it again
      CLI::App* active = app.get_subcommands().front();
      write_text(write_config, "isa=\"" + isa + "\"\n\n[" + active->get_name() + "]\n" +
                                   active->config_to_str(true, true));
    }

    if (*generate) return cmd_generate(gen, out);
    if (*optimize) return cmd_optimize(opt, out);
    if (*evaluate) return cmd_evaluate(ev, out);
    if (*benchmark) return cmd_benchmark(bench, out);
    if (*repro_cmd) return cmd_repro(repro, out);
  } catch (const ParseError& e) {
    err << "islopt: " << e.what() << '\n';
    return kExitParse;
  } catch (const UsageError& e) {
    err << "islopt: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SolverError& e) {
    err << "islopt: solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const fs::filesystem_error& e) {
    err << "islopt: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "islopt: internal error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitUsage;
}

}  // namespace islopt::cli
