#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "islopt/correlation.hpp"
#include "islopt/sequence_set.hpp"

namespace islopt {

// One of the four inequalities tying an auxiliary z to the product of two
// +-1 variables a, b:  z <= a_coef*a + b_coef*b + offset  (or >= when !upper).
struct LinkingConstraint {
  int a_coef;
  int b_coef;
  int offset;
  bool upper;

  bool holds(double a, double b, double z, double tol = 0.0) const {
    const double rhs = a_coef * a + b_coef * b + offset;
    return upper ? z <= rhs + tol : z >= rhs - tol;
  }
};

// z <= b - a + 1,  z <= a - b + 1,  z >= -1 - a - b,  z >= -1 + a + b
inline constexpr std::array<LinkingConstraint, 4> kLinkingConstraints{{
    {-1, 1, 1, true},
    {1, -1, 1, true},
    {-1, -1, -1, false},
    {1, 1, -1, false},
}};

// The unique z satisfying all four linking constraints for a, b in {-1, +1}.
int glover_link(int a, int b);

struct LinearPart {
  int var;
  int coef;
};

// Auxiliary z = x_first * x_second (first < second), entering a term with `coef`.
struct ProductPart {
  int first;
  int second;
  int coef;
};

// One correlation value (X_i * X_j)_k written over the free variables:
// constant + sum(linear) + sum(products).
struct CorrelationTerm {
  int i = 0;
  int j = 0;
  int shift = 0;
  int64_t constant = 0;
  std::vector<LinearPart> linear;
  std::vector<ProductPart> products;

  int64_t radius() const;  // sum of |coef| over linear and product parts
};

// The ISL restricted to a set of free entries with every other entry held at
// its current value:  objective_constant + sum_t term_t(x)^2.
class MiqpSubproblem {
 public:
  struct Occurrence {
    int term;
    int coef;
    int other;  // -1 for a linear part, else the partner variable of a product
  };

  int size() const { return static_cast<int>(variables_.size()); }
  const IndexSubset& variables() const { return variables_; }
  std::span<const int8_t> current() const { return current_; }
  const std::vector<CorrelationTerm>& terms() const { return terms_; }
  int64_t objective_constant() const { return objective_constant_; }
  int64_t current_objective() const { return current_objective_; }
  std::size_t num_auxiliaries() const { return num_auxiliaries_; }
  std::span<const Occurrence> occurrences(int var) const { return occurrences_[var]; }

  int64_t term_value(std::size_t term, std::span<const int8_t> values) const;
  // Objective for a full assignment (one value per free variable, in order).
  int64_t evaluate(std::span<const int8_t> values) const;

  // Human-readable model dump (format described in the README).
  void write_model(std::ostream& out) const;

 private:
  friend MiqpSubproblem build_subproblem(const CorrelationTable&, std::span<const Index>);

  IndexSubset variables_;
  std::vector<int8_t> current_;
  std::vector<CorrelationTerm> terms_;
  std::vector<std::vector<Occurrence>> occurrences_;
  int64_t objective_constant_ = 0;
  int64_t current_objective_ = 0;
  std::size_t num_auxiliaries_ = 0;
};

// Throws UsageError for an empty subset, out-of-range or duplicate indices.
MiqpSubproblem build_subproblem(const CorrelationTable& table, std::span<const Index> subset);

// Partial assignment of the free variables: 0 = unassigned, else -1/+1.
using PartialAssignment = std::vector<int8_t>;

// Smallest square reachable by a term whose value is base plus a sum of +-w
// contributions with total magnitude `radius`. The value's parity is fixed by
// base + radius, so an interval straddling zero still costs 1 when it is odd.
inline int64_t interval_term_bound(int64_t base, int64_t radius) {
  const int64_t lo = base - radius;
  const int64_t hi = base + radius;
  if (lo > 0) return lo * lo;
  if (hi < 0) return hi * hi;
  return (hi & 1) != 0 ? 1 : 0;
}

// Sum of per-term minimal squares over every completion of `partial`.
int64_t lower_bound_interval(const MiqpSubproblem& sub, std::span<const int8_t> partial);

// The subproblem objective written as a multilinear polynomial in the free
// variables (x*x = 1 folded), one coefficient per monomial bitmask. A partial
// assignment leaves a polynomial in the unassigned variables whose constant
// term is the mean over completions; subtracting every other |coefficient|
// gives an admissible bound. Limited to 62 variables.
class MultilinearExpansion {
 public:
  struct Monomial {
    uint64_t mask;  // bit v set: variable v appears
    int64_t coef;
  };

  explicit MultilinearExpansion(const MiqpSubproblem& sub);

  int size() const { return size_; }
  const std::vector<Monomial>& monomials() const { return monomials_; }
  int64_t evaluate(std::span<const int8_t> assignment) const;
  int64_t lower_bound(std::span<const int8_t> partial) const;

 private:
  int size_ = 0;
  std::vector<Monomial> monomials_;  // sorted by mask, zero coefficients dropped
};

int64_t lower_bound_multilinear(const MiqpSubproblem& sub, std::span<const int8_t> partial);

struct QpOptions {
  int max_iterations = 4000;
  double rho = 0.1;
  double sigma = 1e-6;
  double alpha = 1.6;
  double eps_abs = 1e-6;
  double eps_rel = 1e-6;
  // Relative slack subtracted before rounding the certified bound up.
  double bound_tolerance = 1e-6;
};

struct RelaxationBound {
  int64_t value = 0;
  bool fallback = false;  // QP did not converge; `value` is the interval bound
  double qp_value = 0.0;  // primal objective of the relaxed solution
  double certified = 0.0;  // dual bound before rounding
  int iterations = 0;
};

// Continuous relaxation: unassigned variables in [-1, 1], one auxiliary per
// product occurrence constrained by the linking inequalities. The returned
// value is a dual bound certified from the QP iterate, rounded up.
RelaxationBound lower_bound_relaxation(const MiqpSubproblem& sub, std::span<const int8_t> partial,
                                       const QpOptions& options = {});

}  // namespace islopt
