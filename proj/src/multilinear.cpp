#include <algorithm>
#include <bit>
#include <cstdlib>
#include <unordered_map>

#include "islopt/error.hpp"
#include "islopt/miqp.hpp"

namespace islopt {
namespace {

constexpr int kMaxExpansionSize = 62;

uint64_t negative_mask(std::span<const int8_t> values) {
  uint64_t mask = 0;
  for (std::size_t v = 0; v < values.size(); ++v) {
    if (values[v] < 0) mask |= uint64_t{1} << v;
  }
  return mask;
}

}  // namespace

MultilinearExpansion::MultilinearExpansion(const MiqpSubproblem& sub) : size_(sub.size()) {
  if (size_ > kMaxExpansionSize) throw UsageError("multilinear expansion supports at most 62 variables");
  std::unordered_map<uint64_t, int64_t> poly;
  poly[0] += sub.objective_constant();
  std::vector<Monomial> parts;
  for (const auto& term : sub.terms()) {
    parts.clear();
    parts.push_back({0, term.constant});
    for (const auto& l : term.linear) parts.push_back({uint64_t{1} << l.var, l.coef});
    for (const auto& p : term.products) parts.push_back({(uint64_t{1} << p.first) | (uint64_t{1} << p.second), p.coef});
    // square of the term: diagonal products fold to the constant
    for (std::size_t a = 0; a < parts.size(); ++a) {
      poly[0] += parts[a].coef * parts[a].coef;
      for (std::size_t b = a + 1; b < parts.size(); ++b) {
        poly[parts[a].mask ^ parts[b].mask] += 2 * parts[a].coef * parts[b].coef;
      }
    }
  }
  monomials_.reserve(poly.size());
  for (const auto& [mask, coef] : poly) {
    if (coef != 0 || mask == 0) monomials_.push_back({mask, coef});
  }
  std::sort(monomials_.begin(), monomials_.end(), [](const Monomial& a, const Monomial& b) { return a.mask < b.mask; });
}

int64_t MultilinearExpansion::evaluate(std::span<const int8_t> assignment) const {
  if (static_cast<int>(assignment.size()) != size_) throw UsageError("assignment size does not match the expansion");
  const uint64_t neg = negative_mask(assignment);
  int64_t total = 0;
  for (const auto& m : monomials_) total += (std::popcount(m.mask & neg) & 1) != 0 ? -m.coef : m.coef;
  return total;
}

int64_t MultilinearExpansion::lower_bound(std::span<const int8_t> partial) const {
  if (static_cast<int>(partial.size()) != size_) throw UsageError("partial assignment size does not match the expansion");
  uint64_t assigned = 0;
  for (int v = 0; v < size_; ++v) {
    if (partial[v] != 0) assigned |= uint64_t{1} << v;
  }
  const uint64_t neg = negative_mask(partial);
  std::unordered_map<uint64_t, int64_t> reduced;
  for (const auto& m : monomials_) {
    const int64_t c = (std::popcount(m.mask & neg) & 1) != 0 ? -m.coef : m.coef;
    reduced[m.mask & ~assigned] += c;
  }
  int64_t bound = 0;
  for (const auto& [mask, coef] : reduced) bound += mask == 0 ? coef : -std::abs(coef);
  return bound;
}

int64_t lower_bound_multilinear(const MiqpSubproblem& sub, std::span<const int8_t> partial) {
  return MultilinearExpansion(sub).lower_bound(partial);
}

}  // namespace islopt
