#include <doctest.h>

#include <random>
#include <set>

#include "islopt/bcd.hpp"
#include "islopt/codegen.hpp"
#include "islopt/correlation.hpp"
#include "islopt/error.hpp"
#include "oracle.hpp"

using namespace islopt;

namespace {

// Plain single-flip descent following the same row/column schedule, written
// against the brute-force ISL.
struct SingleFlipRun {
  SequenceSet x;
  std::vector<int64_t> isl;
};

SingleFlipRun single_flip_reference(SequenceSet x) {
  const int length = x.length();
  const int count = x.count();
  SingleFlipRun out{x, {}};
  int64_t current = oracle::isl(x);
  int row = 0;
  int col = 0;
  int64_t stall = 0;
  int64_t column_stall = 0;
  while (true) {
    SequenceSet trial = out.x;
    trial.flip(row, col);
    const int64_t f = oracle::isl(trial);
    if (f < current) {
      out.x = trial;
      current = f;
      stall = 0;
      column_stall = 0;
    } else {
      ++stall;
      ++column_stall;
    }
    out.isl.push_back(current);
    if (stall >= static_cast<int64_t>(length) * count) break;
    if (column_stall >= length) {
      col = (col + 1) % count;
      column_stall = 0;
    }
    row = (row + 1) % length;
  }
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("bcd");

TEST_CASE("subset selection") {
  Rng rng = make_rng(1);
  CHECK(select_subset(3, 1, 1, 7, 2, rng) == IndexSubset{{3, 1}});

  for (int rep = 0; rep < 200; ++rep) {
    const IndexSubset s = select_subset(2, 0, 4, 7, 2, rng);
    REQUIRE(s.size() == 4u);
    CHECK(s.front() == Index{2, 0});
    CHECK(std::set<Index>(s.begin(), s.end()).size() == 4u);
    for (const Index& idx : s) {
      CHECK(idx.row >= 0);
      CHECK(idx.row < 7);
      CHECK(idx.col >= 0);
      CHECK(idx.col < 2);
    }
  }

  // at most two columns, one of them the anchor's
  for (int rep = 0; rep < 200; ++rep) {
    const IndexSubset s = select_subset(5, 2, 10, 9, 5, rng);
    std::set<int> cols;
    for (const Index& idx : s) cols.insert(idx.col);
    CHECK(cols.count(2) == 1u);
    CHECK(cols.size() <= 2u);
  }

  // the partner column is uniform over the others
  std::vector<int> hits(4, 0);
  for (int rep = 0; rep < 4000; ++rep) {
    for (const Index& idx : select_subset(0, 1, 30, 16, 4, rng)) {
      if (idx.col != 1) {
        ++hits[idx.col];
        break;
      }
    }
  }
  CHECK(hits[1] == 0);
  for (int c : {0, 2, 3}) CHECK(std::abs(hits[c] - 4000 / 3) < 200);

  Rng a = make_rng(42);
  Rng b = make_rng(42);
  CHECK(select_subset(1, 1, 6, 11, 3, a) == select_subset(1, 1, 6, 11, 3, b));

  // single column when K = 1
  const IndexSubset single = select_subset(0, 0, 5, 7, 1, rng);
  for (const Index& idx : single) CHECK(idx.col == 0);
  CHECK(select_subset(0, 0, 7, 7, 1, rng).size() == 7u);
  CHECK_THROWS_AS(select_subset(0, 0, 8, 7, 1, rng), UsageError);
  CHECK_THROWS_AS(select_subset(0, 0, 15, 7, 2, rng), UsageError);
  CHECK(select_subset(0, 0, 14, 7, 2, rng).size() == 14u);
  CHECK_THROWS_AS(select_subset(7, 0, 2, 7, 2, rng), UsageError);
}

TEST_CASE("single-entry descent matches an independent reference") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 8; ++rep) {
    const int length = 5 + static_cast<int>(rng() % 20);
    const int count = 1 + static_cast<int>(rng() % 3);
    const SequenceSet x0 = oracle::random_set(rng, length, count);
    const SingleFlipRun ref = single_flip_reference(x0);
    BcdConfig cfg;
    const RunResult run = run_bcd(x0, cfg);
    CHECK(run.x == ref.x);
    REQUIRE(run.trace.records.size() == ref.isl.size());
    for (std::size_t t = 0; t < ref.isl.size(); ++t) CHECK(run.trace.records[t].isl == ref.isl[t]);
    CHECK(run.trace.status == RunStatus::kConverged);
    CHECK(is_locally_optimal(run.x));
  }
}

TEST_CASE("a local optimum is left unchanged after exactly L*K iterations") {
  const SequenceSet x0 = run_bcd(random_set(31, 3, 5), BcdConfig{}).x;
  REQUIRE(is_locally_optimal(x0));
  const RunResult run = run_bcd(x0, BcdConfig{});
  CHECK(run.x == x0);
  CHECK(run.trace.iterations == 31 * 3);
  CHECK(run.trace.isl_final == run.trace.isl_initial);
}

TEST_CASE("local optimality examples") {
  CHECK_FALSE(is_locally_optimal(SequenceSet(7, 2)));
  CHECK(is_locally_optimal(SequenceSet::from_columns({{1, 1, -1}})));
}

TEST_CASE("block descent never increases the ISL and is deterministic") {
  for (SubproblemSolver solver : {SubproblemSolver::kExhaustive, SubproblemSolver::kBnb}) {
    for (int n : {2, 4, 8}) {
      BcdConfig cfg;
      cfg.subset_size = n;
      cfg.solver = solver;
      cfg.seed = 77;
      const SequenceSet x0 = random_set(15, 3, 9);
      const RunResult a = run_bcd(x0, cfg);
      const RunResult b = run_bcd(x0, cfg);
      CHECK(a.trace.monotone());
      CHECK(a.trace.isl_final <= a.trace.isl_initial);
      CHECK(a.trace.isl_final == isl(a.x));
      CHECK(a.x == b.x);
      REQUIRE(a.trace.records.size() == b.trace.records.size());
      for (std::size_t t = 0; t < a.trace.records.size(); ++t) {
        CHECK(a.trace.records[t].isl == b.trace.records[t].isl);
        CHECK(a.trace.records[t].subset == b.trace.records[t].subset);
      }
      for (const auto& r : a.trace.records) CHECK(r.subset_size == n);
    }
  }
}

TEST_CASE("block descent from a single-entry fixed point") {
  const SequenceSet bist = run_bcd(random_set(31, 4, 3), BcdConfig{}).x;
  BcdConfig cfg;
  cfg.subset_size = 4;
  cfg.seed = 3;
  const RunResult run = run_bcd(bist, cfg);
  CHECK(run.trace.isl_final <= isl(bist));
  CHECK(run.trace.monotone());
}

TEST_CASE("solver choice does not change the iterates") {
  const SequenceSet x0 = random_set(15, 2, 12);
  BcdConfig cfg;
  cfg.subset_size = 6;
  cfg.seed = 4;
  cfg.solver = SubproblemSolver::kExhaustive;
  const RunResult ex = run_bcd(x0, cfg);
  cfg.solver = SubproblemSolver::kBnb;
  for (BoundKind bound : {BoundKind::kInterval, BoundKind::kMultilinear}) {
    cfg.bnb.bound = bound;
    const RunResult bb = run_bcd(x0, cfg);
    REQUIRE(bb.trace.records.size() == ex.trace.records.size());
    for (std::size_t t = 0; t < ex.trace.records.size(); ++t) {
      CHECK(bb.trace.records[t].isl == ex.trace.records[t].isl);
    }
  }
}

TEST_CASE("stopping limits") {
  const SequenceSet x0 = random_set(31, 2, 1);
  BcdConfig cfg;
  cfg.max_iterations = 10;
  const RunResult capped = run_bcd(x0, cfg);
  CHECK(capped.trace.status == RunStatus::kMaxIterations);
  CHECK(capped.trace.iterations == 10);
  CHECK(capped.trace.records.size() == 10u);

  BcdConfig budget;
  budget.subset_size = 12;
  budget.time_budget = std::chrono::milliseconds(1);
  budget.stall_limit = 1'000'000;
  const RunResult timed = run_bcd(x0, budget);
  CHECK(timed.trace.status == RunStatus::kBudget);

  BcdConfig tiny;
  tiny.stall_limit = 3;
  const RunResult early = run_bcd(run_bcd(x0, BcdConfig{}).x, tiny);
  CHECK(early.trace.iterations == 3);

  CHECK(to_string(RunStatus::kConverged) == "converged");
  CHECK(to_string(RunStatus::kMaxIterations) == "max_iterations");
  CHECK(to_string(RunStatus::kBudget) == "budget");
}

TEST_CASE("configuration errors") {
  const SequenceSet x0 = random_set(7, 2, 1);
  BcdConfig cfg;
  cfg.subset_size = 15;
  CHECK_THROWS_AS(run_bcd(x0, cfg), UsageError);
  cfg.subset_size = 0;
  CHECK_THROWS_AS(run_bcd(x0, cfg), UsageError);
  cfg.subset_size = 10;
  cfg.exhaustive_cap = 8;
  cfg.solver = SubproblemSolver::kExhaustive;
  CHECK_THROWS_AS(run_bcd(x0, cfg), UsageError);
}

TEST_CASE("K = 1 block descent draws from one column") {
  BcdConfig cfg;
  cfg.subset_size = 5;
  cfg.seed = 8;
  const RunResult run = run_bcd(random_set(21, 1, 2), cfg);
  CHECK(run.trace.monotone());
  for (const auto& r : run.trace.records) {
    for (const Index& idx : r.subset) CHECK(idx.col == 0);
  }
}

TEST_CASE("multistart keeps input order and matches sequential runs") {
  std::vector<SequenceSet> inits;
  for (uint64_t s = 0; s < 4; ++s) inits.push_back(random_set(15, 2, s));
  BcdConfig cfg;
  cfg.subset_size = 3;
  cfg.seed = 100;
  const auto parallel = run_bcd_multistart(inits, cfg, 3);
  REQUIRE(parallel.size() == 4u);
  for (std::size_t i = 0; i < inits.size(); ++i) {
    BcdConfig local = cfg;
    local.seed = cfg.seed + i;
    const RunResult seq = run_bcd(inits[i], local);
    CHECK(parallel[i].x == seq.x);
    CHECK(parallel[i].trace.isl_final == seq.trace.isl_final);
  }
}

TEST_SUITE_END();
