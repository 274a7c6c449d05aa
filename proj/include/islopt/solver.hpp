#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "islopt/correlation.hpp"
#include "islopt/miqp.hpp"

namespace islopt {

// kMultilinear: max of the interval bound and the multilinear-expansion bound.
enum class BoundKind { kInterval, kRelaxation, kMultilinear };
enum class NodeOrder { kBestFirst, kDepthFirst };
enum class SolveStatus { kOptimal, kTimeout };

// Passed to BnbConfig::on_node for every node whose bound is evaluated.
struct NodeRecord {
  std::span<const int8_t> partial;
  int depth;
  int64_t bound;
};

struct BnbConfig {
  BoundKind bound = BoundKind::kInterval;
  NodeOrder order = NodeOrder::kBestFirst;
  // Best-first switches to depth-first dives once this many nodes are open.
  std::size_t open_list_cap = std::size_t{1} << 16;
  std::chrono::milliseconds time_cap{0};  // 0: unlimited
  uint64_t node_cap = 0;                  // 0: unlimited
  QpOptions qp;
  std::function<void(const NodeRecord&)> on_node;
};

struct SolveResult {
  std::vector<int8_t> assignment;  // one +-1 value per free variable
  int64_t objective = 0;
  SolveStatus status = SolveStatus::kOptimal;
  uint64_t nodes = 0;
  // incumbent minus the lowest open bound when stopped early, else 0
  int64_t gap = 0;
  uint64_t relaxation_fallbacks = 0;
};

// Exact minimization of the subproblem by branch-and-bound. The entering
// assignment is the initial incumbent and is only replaced by strictly better
// ones, so the result never exceeds sub.current_objective().
SolveResult solve_bnb(const MiqpSubproblem& sub, const BnbConfig& config = {});

inline constexpr int kDefaultExhaustiveCap = 20;
inline constexpr int kMaxExhaustiveSize = 30;

// Enumerates all 2^|S| values of the free entries in Gray-code order, one
// incremental flip per step. Returns the entering assignment unless something
// strictly better exists; among strictly better minimizers the lowest binary
// encoding wins (-1 < +1, first variable most significant). `work` is restored
// before returning.
SolveResult solve_exhaustive(CorrelationTable& work, std::span<const Index> subset, int cap = kDefaultExhaustiveCap);
SolveResult solve_exhaustive(const MiqpSubproblem& sub, CorrelationTable& work, int cap = kDefaultExhaustiveCap);

}  // namespace islopt
