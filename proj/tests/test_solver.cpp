#include <doctest.h>

#include <random>

#include "islopt/correlation.hpp"
#include "islopt/error.hpp"
#include "islopt/solver.hpp"
#include "oracle.hpp"

using namespace islopt;

namespace {

constexpr BoundKind kAllBounds[] = {BoundKind::kInterval, BoundKind::kRelaxation, BoundKind::kMultilinear};

}  // namespace

TEST_SUITE_BEGIN("solver");

TEST_CASE("exhaustive search agrees with the brute-force oracle, including ties") {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 40; ++rep) {
    const int length = 3 + static_cast<int>(rng() % 14);
    const int count = 1 + static_cast<int>(rng() % 3);
    const int size = 1 + static_cast<int>(rng() % std::min(9, length * count));
    const SequenceSet x = oracle::random_set(rng, length, count);
    CorrelationTable t(x);
    const CorrelationTable before = t;
    const auto s = oracle::random_subset(rng, length, count, size);
    const SolveResult r = solve_exhaustive(t, s);
    const auto best = oracle::minimize(x, s);
    CHECK(t == before);
    CHECK(r.objective == best.value);
    CHECK(r.nodes == (uint64_t{1} << size));
    const int64_t entering = t.isl();
    if (best.value < entering) {
      CHECK(std::vector<int>(r.assignment.begin(), r.assignment.end()) == best.values);
    } else {
      for (int v = 0; v < size; ++v) CHECK(r.assignment[v] == x.at(s[v]));
    }
  }
}

TEST_CASE("exhaustive search keeps an optimal entering point") {
  // L=3, K=1 with a single -1 is a global optimum (ISL 2)
  const SequenceSet x = SequenceSet::from_columns({{1, 1, -1}});
  CorrelationTable t(x);
  const std::vector<Index> all{{0, 0}, {1, 0}, {2, 0}};
  const SolveResult r = solve_exhaustive(t, all);
  CHECK(r.objective == 2);
  CHECK(r.assignment == std::vector<int8_t>{1, 1, -1});
}

TEST_CASE("exhaustive search caps and validation") {
  std::mt19937_64 rng(2);
  CorrelationTable t(oracle::random_set(rng, 15, 2));
  const auto s = oracle::random_subset(rng, 15, 2, 6);
  CHECK_THROWS_AS(solve_exhaustive(t, s, 5), UsageError);
  CHECK_THROWS_AS(solve_exhaustive(t, std::vector<Index>{{0, 0}, {0, 0}}), UsageError);
  const MiqpSubproblem sub = build_subproblem(t, s);
  const SolveResult a = solve_exhaustive(sub, t);
  const SolveResult b = solve_exhaustive(t, s);
  CHECK(a.objective == b.objective);
  CHECK(a.assignment == b.assignment);
  t.flip(s[0]);
  CHECK_THROWS_AS(solve_exhaustive(sub, t), UsageError);
}

TEST_CASE("branch-and-bound with one variable needs at most two evaluations") {
  std::mt19937_64 rng(3);
  const SequenceSet x = oracle::random_set(rng, 31, 3);
  CorrelationTable t(x);
  const std::vector<Index> s{{7, 2}};
  const MiqpSubproblem sub = build_subproblem(t, s);
  for (BoundKind bound : kAllBounds) {
    BnbConfig cfg;
    cfg.bound = bound;
    const SolveResult r = solve_bnb(sub, cfg);
    CHECK(r.status == SolveStatus::kOptimal);
    CHECK(r.nodes <= 3u);  // root plus both leaves
    CHECK(r.objective == oracle::minimize(x, s).value);
  }
}

TEST_CASE("branch-and-bound matches exhaustive search for every bound and order") {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 24; ++rep) {
    const int count = 2 + rep % 3;
    const int size = 1 + static_cast<int>(rng() % 12);
    const SequenceSet x = oracle::random_set(rng, 31, count);
    CorrelationTable t(x);
    const auto s = oracle::random_subset(rng, 31, count, size);
    const MiqpSubproblem sub = build_subproblem(t, s);
    const SolveResult ex = solve_exhaustive(t, s);
    for (BoundKind bound : kAllBounds) {
      for (NodeOrder order : {NodeOrder::kBestFirst, NodeOrder::kDepthFirst}) {
        BnbConfig cfg;
        cfg.bound = bound;
        cfg.order = order;
        const SolveResult r = solve_bnb(sub, cfg);
        CHECK(r.status == SolveStatus::kOptimal);
        CHECK(r.objective == ex.objective);
        CHECK(sub.evaluate(r.assignment) == r.objective);
        CHECK(r.objective <= sub.current_objective());
        CHECK(r.nodes <= (uint64_t{2} << size));
        if (ex.objective == sub.current_objective()) {
          CHECK(std::equal(r.assignment.begin(), r.assignment.end(), sub.current().begin()));
        }
      }
    }
  }
}

TEST_CASE("best-first falls back to dives when the open list is capped") {
  std::mt19937_64 rng(5);
  const SequenceSet x = oracle::random_set(rng, 31, 3);
  CorrelationTable t(x);
  const auto s = oracle::random_subset(rng, 31, 3, 12);
  const MiqpSubproblem sub = build_subproblem(t, s);
  BnbConfig cfg;
  cfg.open_list_cap = 4;
  CHECK(solve_bnb(sub, cfg).objective == solve_exhaustive(t, s).objective);
}

TEST_CASE("node callback sees admissible bounds") {
  std::mt19937_64 rng(6);
  const SequenceSet x = oracle::random_set(rng, 15, 2);
  CorrelationTable t(x);
  const auto s = oracle::random_subset(rng, 15, 2, 8);
  const MiqpSubproblem sub = build_subproblem(t, s);
  for (BoundKind bound : kAllBounds) {
    BnbConfig cfg;
    cfg.bound = bound;
    uint64_t seen = 0;
    cfg.on_node = [&](const NodeRecord& node) {
      ++seen;
      std::vector<int> open;
      for (int v = 0; v < sub.size(); ++v) {
        if (node.partial[v] == 0) open.push_back(v);
      }
      CHECK(static_cast<int>(open.size()) == sub.size() - node.depth);
      std::vector<int8_t> full(node.partial.begin(), node.partial.end());
      int64_t best = std::numeric_limits<int64_t>::max();
      for (uint64_t code = 0; code < (uint64_t{1} << open.size()); ++code) {
        for (std::size_t q = 0; q < open.size(); ++q) full[open[q]] = ((code >> q) & 1u) != 0 ? int8_t{1} : int8_t{-1};
        best = std::min(best, sub.evaluate(full));
      }
      CHECK(node.bound <= best);
    };
    const SolveResult r = solve_bnb(sub, cfg);
    CHECK(seen == r.nodes);
  }
}

TEST_CASE("node and time caps stop with a certified gap") {
  std::mt19937_64 rng(7);
  const SequenceSet x = oracle::random_set(rng, 63, 4);
  CorrelationTable t(x);
  const auto s = oracle::random_subset(rng, 63, 4, 24);
  const MiqpSubproblem sub = build_subproblem(t, s);
  BnbConfig cfg;
  cfg.node_cap = 200;
  const SolveResult r = solve_bnb(sub, cfg);
  CHECK(r.status == SolveStatus::kTimeout);
  CHECK(r.objective <= sub.current_objective());
  CHECK(r.gap >= 0);
  CHECK(r.nodes < 400u);

  BnbConfig timed;
  timed.time_cap = std::chrono::milliseconds(1);
  timed.order = NodeOrder::kDepthFirst;
  const SolveResult q = solve_bnb(sub, timed);
  CHECK(q.objective <= sub.current_objective());
  if (q.status == SolveStatus::kTimeout) CHECK(q.gap >= 0);
}

TEST_CASE("branch-and-bound size limits") {
  std::mt19937_64 rng(8);
  CorrelationTable t(oracle::random_set(rng, 40, 2));
  const MiqpSubproblem sub = build_subproblem(t, oracle::random_subset(rng, 40, 2, 63));
  CHECK_THROWS_AS(solve_bnb(sub), UsageError);
}

TEST_SUITE_END();
