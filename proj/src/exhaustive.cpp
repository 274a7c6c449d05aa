#include <bit>
#include <string>

#include "islopt/error.hpp"
#include "islopt/solver.hpp"

namespace islopt {

SolveResult solve_exhaustive(CorrelationTable& work, std::span<const Index> subset, int cap) {
  const int n = static_cast<int>(subset.size());
  if (n == 0) throw UsageError("exhaustive search needs at least one variable");
  if (cap > kMaxExhaustiveSize) cap = kMaxExhaustiveSize;
  if (n > cap) {
    throw UsageError("exhaustive search over " + std::to_string(n) + " variables exceeds the cap of " +
                     std::to_string(cap));
  }
  validate_subset(work.sequences(), subset);

  // Bit (n-1-v) of an encoding holds variable v; set means +1.
  auto bit_of = [n](int v) { return uint64_t{1} << (n - 1 - v); };
  uint64_t start = 0;
  for (int v = 0; v < n; ++v) {
    if (work.sequences().at(subset[v]) == 1) start |= bit_of(v);
  }

  const int64_t entering = work.isl();
  int64_t best = entering;
  uint64_t best_code = start;
  uint64_t code = start;
  const uint64_t states = uint64_t{1} << n;
  for (uint64_t g = 1; g < states; ++g) {
    const int bit = std::countr_zero(g);
    work.flip(subset[n - 1 - bit]);
    code ^= uint64_t{1} << bit;
    const int64_t value = work.isl();
    if (value < best || (value == best && best < entering && code < best_code)) {
      best = value;
      best_code = code;
    }
  }
  for (uint64_t diff = code ^ start; diff != 0; diff &= diff - 1) {
    work.flip(subset[n - 1 - std::countr_zero(diff)]);
  }

  SolveResult out;
  out.assignment.resize(n);
  for (int v = 0; v < n; ++v) out.assignment[v] = (best_code & bit_of(v)) != 0 ? int8_t{1} : int8_t{-1};
  out.objective = best;
  out.nodes = states;
  return out;
}

SolveResult solve_exhaustive(const MiqpSubproblem& sub, CorrelationTable& work, int cap) {
  for (int v = 0; v < sub.size(); ++v) {
    if (!work.sequences().contains(sub.variables()[v]) || work.sequences().at(sub.variables()[v]) != sub.current()[v]) {
      throw UsageError("working table does not match the subproblem's entering point");
    }
  }
  return solve_exhaustive(work, sub.variables(), cap);
}

}  // namespace islopt
