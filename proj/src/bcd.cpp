#include "islopt/bcd.hpp"

#include <algorithm>
#include <atomic>
#include <string>
#include <thread>

#include "islopt/correlation.hpp"
#include "islopt/error.hpp"
#include "islopt/miqp.hpp"

namespace islopt {

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kConverged:
      return "converged";
    case RunStatus::kMaxIterations:
      return "max_iterations";
    case RunStatus::kBudget:
      return "budget";
  }
  return "unknown";
}

bool RunTrace::monotone() const {
  int64_t previous = isl_initial;
  for (const auto& r : records) {
    if (r.isl > previous) return false;
    previous = r.isl;
  }
  return isl_final <= isl_initial;
}

IndexSubset select_subset(int row, int col, int subset_size, int length, int count, Rng& rng) {
  if (subset_size < 1) throw UsageError("subset size must be at least 1");
  if (row < 0 || row >= length || col < 0 || col >= count) throw UsageError("subset anchor out of range");
  IndexSubset subset{{row, col}};
  if (subset_size == 1) return subset;

  const int columns = count >= 2 ? 2 : 1;
  if (subset_size > columns * length) {
    throw UsageError("subset size " + std::to_string(subset_size) + " cannot be drawn from " +
                     std::to_string(columns) + " column(s) of length " + std::to_string(length));
  }
  std::vector<Index> pool;
  pool.reserve(static_cast<std::size_t>(columns) * length);
  int other = col;
  if (count >= 2) {
    other = uniform_index(rng, count - 1);
    if (other >= col) ++other;
  }
  for (int r = 0; r < length; ++r) {
    if (r != row) pool.push_back({r, col});
  }
  if (other != col) {
    for (int r = 0; r < length; ++r) pool.push_back({r, other});
  }
  std::sample(pool.begin(), pool.end(), std::back_inserter(subset), subset_size - 1, rng);
  return subset;
}

namespace {

struct StepOutcome {
  uint64_t nodes = 0;
  bool timed_out = false;
};

StepOutcome solve_step(CorrelationTable& table, const IndexSubset& subset, const BcdConfig& config) {
  const int n = static_cast<int>(subset.size());
  const bool exhaustive = config.solver == SubproblemSolver::kExhaustive ||
                          (config.solver == SubproblemSolver::kAuto && n <= config.exhaustive_threshold);
  StepOutcome outcome;
  SolveResult result;
  if (exhaustive) {
    result = solve_exhaustive(table, subset, config.exhaustive_cap);
  } else {
    const MiqpSubproblem sub = build_subproblem(table, subset);
    result = solve_bnb(sub, config.bnb);
  }
  outcome.nodes = result.nodes;
  outcome.timed_out = result.status == SolveStatus::kTimeout;
  for (int v = 0; v < n; ++v) {
    if (table.sequences().at(subset[v]) != result.assignment[v]) table.flip(subset[v]);
  }
  if (table.isl() != result.objective) {
    throw SolverError("subproblem objective " + std::to_string(result.objective) +
                      " disagrees with the committed ISL " + std::to_string(table.isl()));
  }
  return outcome;
}

}  // namespace

RunResult run_bcd(const SequenceSet& x0, const BcdConfig& config) {
  const int length = x0.length();
  const int count = x0.count();
  if (config.subset_size < 1) throw UsageError("subset size must be at least 1");
  if (config.subset_size > 1) {
    const int columns = count >= 2 ? 2 : 1;
    if (config.subset_size > columns * length) throw UsageError("subset size exceeds the entries of two columns");
  }
  const bool exhaustive_only = config.solver == SubproblemSolver::kExhaustive ||
                               (config.solver == SubproblemSolver::kAuto && config.subset_size <= config.exhaustive_threshold);
  if (exhaustive_only && config.subset_size > std::min(config.exhaustive_cap, kMaxExhaustiveSize)) {
    throw UsageError("subset size exceeds the exhaustive-search cap");
  }
  const int64_t stall_limit = config.stall_limit > 0 ? config.stall_limit : static_cast<int64_t>(length) * count;
  const int64_t column_limit = config.column_stall_limit > 0 ? config.column_stall_limit : length;

  CorrelationTable table(x0);
  Rng rng = make_rng(config.seed);
  RunTrace trace;
  trace.isl_initial = table.isl();

  const auto started = std::chrono::steady_clock::now();
  int row = 0;
  int col = 0;
  int64_t stall = 0;
  int64_t column_stall = 0;
  int64_t t = 0;
  RunStatus status = RunStatus::kConverged;
  while (true) {
    if (config.max_iterations > 0 && t >= config.max_iterations) {
      status = RunStatus::kMaxIterations;
      break;
    }
    if (config.time_budget.count() > 0 && std::chrono::steady_clock::now() - started >= config.time_budget) {
      status = RunStatus::kBudget;
      break;
    }
    ++t;
    const auto tick = std::chrono::steady_clock::now();
    IndexSubset subset = select_subset(row, col, config.subset_size, length, count, rng);
    const int64_t before = table.isl();
    const StepOutcome step = solve_step(table, subset, config);
    const int64_t after = table.isl();
    if (after > before) throw SolverError("descent violated at iteration " + std::to_string(t));
    if (step.timed_out) ++trace.subproblem_timeouts;

    IterationRecord record;
    record.t = t;
    record.isl = after;
    record.subset_size = static_cast<int>(subset.size());
    record.nodes = step.nodes;
    record.micros =
        std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - tick).count();
    if (config.record_subsets) record.subset = std::move(subset);
    trace.records.push_back(std::move(record));

    if (after < before) {
      stall = 0;
      column_stall = 0;
    } else {
      ++stall;
      ++column_stall;
    }
    if (stall >= stall_limit) break;
    if (column_stall >= column_limit) {
      col = (col + 1) % count;
      column_stall = 0;
    }
    row = (row + 1) % length;
  }

  trace.status = status;
  trace.iterations = t;
  trace.isl_final = table.isl();
  if (!trace.monotone()) throw SolverError("objective trace is not monotone");
  return RunResult{table.sequences(), std::move(trace)};
}

std::vector<RunResult> run_bcd_multistart(const std::vector<SequenceSet>& inits, const BcdConfig& config,
                                          int threads) {
  std::vector<RunResult> results(inits.size());
  std::vector<std::exception_ptr> errors(inits.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < inits.size(); i = next++) {
      try {
        BcdConfig local = config;
        local.seed = config.seed + i;
        results[i] = run_bcd(inits[i], local);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(inits.size())));
  std::vector<std::jthread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

bool is_locally_optimal(const SequenceSet& x) {
  const CorrelationTable table(x);
  for (int c = 0; c < x.count(); ++c) {
    for (int r = 0; r < x.length(); ++r) {
      if (table.flip_delta(r, c) < 0) return false;
    }
  }
  return true;
}

}  // namespace islopt
