#include <algorithm>
#include <bit>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>

#include "islopt/error.hpp"
#include "islopt/solver.hpp"

namespace islopt {
namespace {

constexpr int kMaxBnbSize = 62;

// Per-term value intervals under a partial assignment, updated in
// O(occurrences) per assignment and undone in the same cost.
class SearchState {
 public:
  explicit SearchState(const MiqpSubproblem& sub)
      : sub_(sub), values_(sub.size(), 0), base_(sub.terms().size()), radius_(sub.terms().size()),
        term_bound_(sub.terms().size()) {
    bound_ = sub.objective_constant();
    for (std::size_t t = 0; t < sub.terms().size(); ++t) {
      base_[t] = sub.terms()[t].constant;
      radius_[t] = sub.terms()[t].radius();
      term_bound_[t] = interval_term_bound(base_[t], radius_[t]);
      bound_ += term_bound_[t];
    }
  }

  void assign(int var, int8_t value) {
    for (const auto& occ : sub_.occurrences(var)) {
      if (occ.other < 0) {
        move(occ.term, static_cast<int64_t>(occ.coef) * value, std::abs(occ.coef));
      } else if (values_[occ.other] != 0) {
        move(occ.term, static_cast<int64_t>(occ.coef) * value * values_[occ.other], std::abs(occ.coef));
      }
    }
    values_[var] = value;
  }

  void unassign(int var) {
    const int8_t value = values_[var];
    values_[var] = 0;
    for (const auto& occ : sub_.occurrences(var)) {
      if (occ.other < 0) {
        move(occ.term, -static_cast<int64_t>(occ.coef) * value, -std::abs(occ.coef));
      } else if (values_[occ.other] != 0) {
        move(occ.term, -static_cast<int64_t>(occ.coef) * value * values_[occ.other], -std::abs(occ.coef));
      }
    }
  }

  int64_t interval_bound() const { return bound_; }
  const std::vector<int8_t>& values() const { return values_; }

 private:
  void move(int term, int64_t shift, int64_t shrink) {
    base_[term] += shift;
    radius_[term] -= shrink;
    const int64_t next = interval_term_bound(base_[term], radius_[term]);
    bound_ += next - term_bound_[term];
    term_bound_[term] = next;
  }

  const MiqpSubproblem& sub_;
  std::vector<int8_t> values_;
  std::vector<int64_t> base_;
  std::vector<int64_t> radius_;
  std::vector<int64_t> term_bound_;
  int64_t bound_ = 0;
};

// Multilinear bound specialised to the static branching order: at depth d
// the first d order positions are assigned, so every monomial's unassigned
// remainder maps to a fixed slot.
class OrderedExpansion {
 public:
  OrderedExpansion(const MiqpSubproblem& sub, const std::vector<int>& order) {
    const MultilinearExpansion expansion(sub);
    const int n = sub.size();
    for (const auto& m : expansion.monomials()) {
      masks_.push_back(m.mask);
      coefs_.push_back(m.coef);
    }
    slot_.resize(static_cast<std::size_t>(n + 1));
    slot_count_.resize(static_cast<std::size_t>(n + 1));
    uint64_t assigned = 0;
    std::unordered_map<uint64_t, uint32_t> ids;
    for (int depth = 0; depth <= n; ++depth) {
      ids.clear();
      ids[0] = 0;
      auto& slots = slot_[depth];
      slots.reserve(masks_.size());
      for (uint64_t mask : masks_) {
        const auto [it, inserted] = ids.try_emplace(mask & ~assigned, static_cast<uint32_t>(ids.size()));
        slots.push_back(it->second);
      }
      slot_count_[depth] = ids.size();
      if (depth < n) assigned |= uint64_t{1} << order[depth];
    }
  }

  int64_t bound(int depth, std::span<const int8_t> values) {
    uint64_t neg = 0;
    for (std::size_t v = 0; v < values.size(); ++v) {
      if (values[v] < 0) neg |= uint64_t{1} << v;
    }
    scratch_.assign(slot_count_[depth], 0);
    const auto& slots = slot_[depth];
    for (std::size_t i = 0; i < masks_.size(); ++i) {
      scratch_[slots[i]] += (std::popcount(masks_[i] & neg) & 1) != 0 ? -coefs_[i] : coefs_[i];
    }
    int64_t total = scratch_[0];
    for (std::size_t k = 1; k < scratch_.size(); ++k) total -= std::abs(scratch_[k]);
    return total;
  }

 private:
  std::vector<uint64_t> masks_;
  std::vector<int64_t> coefs_;
  std::vector<std::vector<uint32_t>> slot_;
  std::vector<std::size_t> slot_count_;
  std::vector<int64_t> scratch_;
};

struct OpenNode {
  int64_t bound;
  int depth;
  uint64_t seq;
  uint64_t bits;  // bit p set: order position p holds +1
};

struct WorseFirst {
  bool operator()(const OpenNode& a, const OpenNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.seq > b.seq;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const MiqpSubproblem& sub, const BnbConfig& config)
      : sub_(sub), config_(config), n_(sub.size()), state_(sub), start_(std::chrono::steady_clock::now()) {
    // Static branching order: largest total |coefficient| first, ties by index.
    std::vector<int64_t> weight(n_, 0);
    for (int v = 0; v < n_; ++v) {
      for (const auto& occ : sub.occurrences(v)) weight[v] += std::abs(occ.coef);
    }
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return weight[a] > weight[b]; });

    if (config.bound == BoundKind::kMultilinear) expansion_.emplace(sub, order_);

    incumbent_.assign(sub.current().begin(), sub.current().end());
    incumbent_value_ = sub.current_objective();
  }

  SolveResult run() {
    const int64_t root = evaluate(0);
    if (root < incumbent_value_) {
      if (config_.order == NodeOrder::kDepthFirst) {
        dive(0, root);
      } else {
        best_first(root);
      }
    }
    SolveResult out;
    out.assignment = incumbent_;
    out.objective = incumbent_value_;
    out.nodes = nodes_;
    out.relaxation_fallbacks = fallbacks_;
    if (stopped_) {
      out.status = SolveStatus::kTimeout;
      int64_t open = incumbent_value_;
      if (!open_.empty()) open = std::min(open, open_.top().bound);
      for (int64_t b : dive_stack_) open = std::min(open, b);
      out.gap = std::max<int64_t>(0, incumbent_value_ - open);
    }
    return out;
  }

 private:
  int8_t preferred(int depth) const { return sub_.current()[order_[depth]]; }

  // Bound of the node the state currently describes (`depth` variables set).
  int64_t evaluate(int depth) {
    ++nodes_;
    int64_t bound = state_.interval_bound();
    if (depth < n_ && config_.bound == BoundKind::kRelaxation) {
      const RelaxationBound r = lower_bound_relaxation(sub_, state_.values(), config_.qp);
      if (r.fallback) ++fallbacks_;
      bound = r.value;
    } else if (depth < n_ && expansion_) {
      bound = std::max(bound, expansion_->bound(depth, state_.values()));
    }
    if (config_.on_node) config_.on_node(NodeRecord{state_.values(), depth, bound});
    if (depth == n_ && bound < incumbent_value_) {
      incumbent_value_ = bound;
      incumbent_ = state_.values();
    }
    if ((nodes_ & 63) == 0) check_limits();
    return bound;
  }

  void check_limits() {
    if (config_.node_cap != 0 && nodes_ >= config_.node_cap) stopped_ = true;
    if (config_.time_cap.count() > 0 && std::chrono::steady_clock::now() - start_ >= config_.time_cap) {
      stopped_ = true;
    }
  }

  // Depth-first search below the current state.
  void dive(int depth, int64_t bound) {
    dive_stack_.push_back(bound);
    for (int branch = 0; branch < 2 && !stopped_; ++branch) {
      const int8_t value = branch == 0 ? preferred(depth) : static_cast<int8_t>(-preferred(depth));
      state_.assign(order_[depth], value);
      const int64_t child = evaluate(depth + 1);
      if (depth + 1 < n_ && child < incumbent_value_ && !stopped_) dive(depth + 1, child);
      state_.unassign(order_[depth]);
    }
    if (!stopped_) dive_stack_.pop_back();
  }

  void move_to(int depth, uint64_t bits) {
    int common = 0;
    while (common < std::min(path_depth_, depth)) {
      const int8_t want = (bits >> common) & 1u ? int8_t{1} : int8_t{-1};
      if (state_.values()[order_[common]] != want) break;
      ++common;
    }
    while (path_depth_ > common) state_.unassign(order_[--path_depth_]);
    while (path_depth_ < depth) {
      const int8_t want = (bits >> path_depth_) & 1u ? int8_t{1} : int8_t{-1};
      state_.assign(order_[path_depth_++], want);
    }
  }

  void best_first(int64_t root) {
    open_.push(OpenNode{root, 0, seq_++, 0});
    while (!open_.empty() && !stopped_) {
      const OpenNode node = open_.top();
      if (node.bound >= incumbent_value_) {
        open_ = {};
        break;
      }
      open_.pop();
      move_to(node.depth, node.bits);
      if (open_.size() >= config_.open_list_cap) {
        dive(node.depth, node.bound);
        continue;
      }
      for (int branch = 0; branch < 2 && !stopped_; ++branch) {
        const int8_t value = branch == 0 ? preferred(node.depth) : static_cast<int8_t>(-preferred(node.depth));
        state_.assign(order_[node.depth], value);
        const int64_t child = evaluate(node.depth + 1);
        state_.unassign(order_[node.depth]);
        if (node.depth + 1 < n_ && child < incumbent_value_) {
          const uint64_t bits = value == 1 ? node.bits | (uint64_t{1} << node.depth) : node.bits;
          open_.push(OpenNode{child, node.depth + 1, seq_++, bits});
        }
      }
    }
  }

  const MiqpSubproblem& sub_;
  const BnbConfig& config_;
  int n_;
  SearchState state_;
  std::optional<OrderedExpansion> expansion_;
  std::chrono::steady_clock::time_point start_;
  std::vector<int> order_;
  std::vector<int8_t> incumbent_;
  int64_t incumbent_value_ = 0;
  uint64_t nodes_ = 0;
  uint64_t fallbacks_ = 0;
  uint64_t seq_ = 0;
  bool stopped_ = false;
  int path_depth_ = 0;
  std::vector<int64_t> dive_stack_;
  std::priority_queue<OpenNode, std::vector<OpenNode>, WorseFirst> open_;
};

}  // namespace

SolveResult solve_bnb(const MiqpSubproblem& sub, const BnbConfig& config) {
  if (sub.size() == 0) throw UsageError("branch-and-bound needs at least one variable");
  if (sub.size() > kMaxBnbSize) {
    throw UsageError("branch-and-bound supports at most " + std::to_string(kMaxBnbSize) + " variables");
  }
  return BranchAndBound(sub, config).run();
}

}  // namespace islopt
