#include <cmath>
#include <cstdlib>

#include "islopt/error.hpp"
#include "islopt/miqp.hpp"
#include "islopt/qp.hpp"

namespace islopt {
namespace {

// Relaxed model over the unassigned variables of `partial`: assigned values are
// substituted, a product with one assigned side becomes linear, and a product
// with both sides open gets its own auxiliary column with four linking rows.
LeastSquaresQp relaxed_model(const MiqpSubproblem& sub, std::span<const int8_t> partial) {
  const int n = sub.size();
  std::vector<int> column_of(n, -1);
  int columns = 0;
  for (int v = 0; v < n; ++v) {
    if (partial[v] == 0) column_of[v] = columns++;
  }

  struct Entry {
    int column;
    double coef;
  };
  struct Row {
    double offset;
    std::vector<Entry> entries;
  };
  struct Aux {
    int column;
    int a;
    int b;
  };
  std::vector<Row> rows;
  std::vector<Aux> aux;
  double constant = static_cast<double>(sub.objective_constant());

  for (const auto& t : sub.terms()) {
    Row row{static_cast<double>(t.constant), {}};
    for (const auto& p : t.linear) {
      if (partial[p.var] != 0) {
        row.offset += p.coef * partial[p.var];
      } else {
        row.entries.push_back({column_of[p.var], static_cast<double>(p.coef)});
      }
    }
    for (const auto& p : t.products) {
      const int8_t a = partial[p.first];
      const int8_t b = partial[p.second];
      if (a != 0 && b != 0) {
        row.offset += p.coef * a * b;
      } else if (a != 0) {
        row.entries.push_back({column_of[p.second], static_cast<double>(p.coef * a)});
      } else if (b != 0) {
        row.entries.push_back({column_of[p.first], static_cast<double>(p.coef * b)});
      } else {
        aux.push_back({columns, column_of[p.first], column_of[p.second]});
        row.entries.push_back({columns, static_cast<double>(p.coef)});
        ++columns;
      }
    }
    if (row.entries.empty()) {
      constant += row.offset * row.offset;
    } else {
      rows.push_back(std::move(row));
    }
  }

  LeastSquaresQp qp;
  qp.constant = constant;
  qp.M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), columns);
  qp.offset.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    qp.offset[static_cast<Eigen::Index>(r)] = rows[r].offset;
    for (const auto& e : rows[r].entries) qp.M(static_cast<Eigen::Index>(r), e.column) += e.coef;
  }
  qp.box_lower = Eigen::VectorXd::Constant(columns, -1.0);
  qp.box_upper = Eigen::VectorXd::Constant(columns, 1.0);

  // Each linking inequality z <= ca*a + cb*b + off (or >=) becomes the row
  // z - ca*a - cb*b in [lo, hi]; the far side is the implied box limit.
  const auto links = static_cast<Eigen::Index>(4 * aux.size());
  qp.G = Eigen::MatrixXd::Zero(links, columns);
  qp.row_lower.resize(links);
  qp.row_upper.resize(links);
  Eigen::Index r = 0;
  for (const Aux& z : aux) {
    for (const auto& c : kLinkingConstraints) {
      qp.G(r, z.column) += 1.0;
      qp.G(r, z.a) -= c.a_coef;
      qp.G(r, z.b) -= c.b_coef;
      const double reach = 1.0 + std::abs(c.a_coef) + std::abs(c.b_coef);
      qp.row_lower[r] = c.upper ? -reach : c.offset;
      qp.row_upper[r] = c.upper ? c.offset : reach;
      ++r;
    }
  }
  return qp;
}

}  // namespace

RelaxationBound lower_bound_relaxation(const MiqpSubproblem& sub, std::span<const int8_t> partial,
                                       const QpOptions& options) {
  if (partial.size() != static_cast<std::size_t>(sub.size())) throw UsageError("partial assignment size mismatch");
  RelaxationBound out;
  const LeastSquaresQp qp = relaxed_model(sub, partial);
  if (qp.M.cols() == 0) {
    out.value = static_cast<int64_t>(std::llround(qp.constant + qp.offset.squaredNorm()));
    out.qp_value = out.certified = static_cast<double>(out.value);
    return out;
  }
  const QpSolution sol = solve_least_squares_qp(qp, options);
  out.iterations = sol.iterations;
  out.qp_value = sol.primal_value;
  out.certified = sol.dual_bound;
  if (!sol.converged || !std::isfinite(sol.dual_bound)) {
    out.fallback = true;
    out.value = lower_bound_interval(sub, partial);
    return out;
  }
  const double slack = options.bound_tolerance * std::max(1.0, std::abs(sol.dual_bound));
  const auto trivial = static_cast<int64_t>(std::ceil(qp.constant - 1e-9));
  out.value = std::max(trivial, static_cast<int64_t>(std::ceil(sol.dual_bound - slack)));
  return out;
}

}  // namespace islopt
