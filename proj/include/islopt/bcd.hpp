#pragma once

#include <chrono>
#include <cstdint>
#include <string_view>
#include <vector>

#include "islopt/rng.hpp"
#include "islopt/sequence_set.hpp"
#include "islopt/solver.hpp"

namespace islopt {

enum class SubproblemSolver { kAuto, kExhaustive, kBnb };

struct BcdConfig {
  // N; 1 gives the single-entry (BiST) schedule.
  int subset_size = 1;
  SubproblemSolver solver = SubproblemSolver::kAuto;
  // kAuto uses exhaustive search up to this N and branch-and-bound above it.
  int exhaustive_threshold = 16;
  int exhaustive_cap = kDefaultExhaustiveCap;
  BnbConfig bnb;
  uint64_t seed = 0;
  int64_t max_iterations = 0;  // 0: unlimited
  // 0 selects the defaults L*K and L.
  int64_t stall_limit = 0;
  int64_t column_stall_limit = 0;
  std::chrono::milliseconds time_budget{0};  // 0: unlimited
  bool record_subsets = true;

  bool do_bcd() const { return subset_size > 1; }
};

struct IterationRecord {
  int64_t t = 0;
  int64_t isl = 0;
  IndexSubset subset;  // empty unless BcdConfig::record_subsets
  int subset_size = 0;
  uint64_t nodes = 0;
  int64_t micros = 0;
};

enum class RunStatus { kConverged, kMaxIterations, kBudget };
std::string_view to_string(RunStatus status);

struct RunTrace {
  std::vector<IterationRecord> records;
  RunStatus status = RunStatus::kConverged;
  int64_t isl_initial = 0;
  int64_t isl_final = 0;
  int64_t iterations = 0;
  uint64_t subproblem_timeouts = 0;

  // True iff the objective never increases along the trace.
  bool monotone() const;
};

struct RunResult {
  SequenceSet x;
  RunTrace trace;
};

// S = {(row, col)} plus N-1 entries drawn without replacement from columns col
// and a random col' != col (only col when K == 1). Throws UsageError when the
// columns cannot supply N distinct entries.
IndexSubset select_subset(int row, int col, int subset_size, int length, int count, Rng& rng);

// Block coordinate descent: every iteration solves the subproblem over S
// exactly and commits it. The row advances every iteration, the column after
// `column_stall_limit` consecutive non-improving iterations in it, and the run
// stops after `stall_limit` consecutive non-improving iterations.
RunResult run_bcd(const SequenceSet& x0, const BcdConfig& config);

// Independent runs (one per initial set, config.seed + index as seed) on up to
// `threads` workers. Results keep input order.
std::vector<RunResult> run_bcd_multistart(const std::vector<SequenceSet>& inits, const BcdConfig& config,
                                          int threads);

// True iff no single-entry flip strictly lowers the ISL.
bool is_locally_optimal(const SequenceSet& x);

}  // namespace islopt
