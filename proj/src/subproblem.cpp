#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <stdexcept>

#include "islopt/error.hpp"
#include "islopt/miqp.hpp"

namespace islopt {

int glover_link(int a, int b) {
  if ((a != 1 && a != -1) || (b != 1 && b != -1)) throw UsageError("glover_link expects +-1 operands");
  int lo = -1;
  int hi = 1;
  for (const auto& c : kLinkingConstraints) {
    const int rhs = c.a_coef * a + c.b_coef * b + c.offset;
    if (c.upper) {
      hi = std::min(hi, rhs);
    } else {
      lo = std::max(lo, rhs);
    }
  }
  if (lo != hi) throw SolverError("linking constraints do not pin a unique value");
  return lo;
}

int64_t CorrelationTerm::radius() const {
  int64_t r = 0;
  for (const auto& p : linear) r += std::abs(p.coef);
  for (const auto& p : products) r += std::abs(p.coef);
  return r;
}

int64_t MiqpSubproblem::term_value(std::size_t term, std::span<const int8_t> values) const {
  const CorrelationTerm& t = terms_[term];
  int64_t v = t.constant;
  for (const auto& p : t.linear) v += static_cast<int64_t>(p.coef) * values[p.var];
  for (const auto& p : t.products) v += static_cast<int64_t>(p.coef) * values[p.first] * values[p.second];
  return v;
}

int64_t MiqpSubproblem::evaluate(std::span<const int8_t> values) const {
  if (values.size() != variables_.size()) throw UsageError("assignment size does not match the subproblem");
  int64_t total = objective_constant_;
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    const int64_t v = term_value(t, values);
    total += v * v;
  }
  return total;
}

void MiqpSubproblem::write_model(std::ostream& out) const {
  out << "# islopt subproblem model v1\n";
  out << "variables " << variables_.size() << '\n';
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    out << "x" << v << ' ' << variables_[v].row << ' ' << variables_[v].col << ' ' << int{current_[v]} << '\n';
  }
  out << "constant " << objective_constant_ << '\n';
  out << "terms " << terms_.size() << '\n';
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    const auto& term = terms_[t];
    out << 't' << t << " pair " << term.i << ' ' << term.j << " shift " << term.shift << " : " << term.constant;
    for (const auto& p : term.linear) out << (p.coef < 0 ? " - " : " + ") << std::abs(p.coef) << "*x" << p.var;
    for (std::size_t q = 0; q < term.products.size(); ++q) {
      const auto& p = term.products[q];
      out << (p.coef < 0 ? " - " : " + ") << std::abs(p.coef) << "*z" << t << '_' << q;
    }
    out << '\n';
  }
  out << "auxiliaries " << num_auxiliaries_ << '\n';
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    for (std::size_t q = 0; q < terms_[t].products.size(); ++q) {
      const auto& p = terms_[t].products[q];
      const std::string z = "z" + std::to_string(t) + "_" + std::to_string(q);
      const std::string a = "x" + std::to_string(p.first);
      const std::string b = "x" + std::to_string(p.second);
      out << z << " = " << a << '*' << b << " : " << z << " <= " << b << " - " << a << " + 1 ; " << z
          << " <= " << a << " - " << b << " + 1 ; " << z << " >= -1 - " << a << " - " << b << " ; " << z
          << " >= -1 + " << a << " + " << b << '\n';
    }
  }
}

MiqpSubproblem build_subproblem(const CorrelationTable& table, std::span<const Index> subset) {
  const SequenceSet& x = table.sequences();
  if (subset.empty()) throw UsageError("subproblem needs at least one free variable");
  validate_subset(x, subset);

  const int length = x.length();
  const int count = x.count();
  MiqpSubproblem sub;
  sub.variables_.assign(subset.begin(), subset.end());
  const int n = sub.size();
  sub.current_.resize(n);
  for (int v = 0; v < n; ++v) sub.current_[v] = x.at(subset[v]);

  std::vector<int> free_at(static_cast<std::size_t>(length) * count, -1);
  auto slot = [&](int row, int col) -> int& { return free_at[static_cast<std::size_t>(col) * length + row]; };
  std::vector<std::vector<int>> rows_in_col(count);
  for (int v = 0; v < n; ++v) {
    slot(subset[v].row, subset[v].col) = v;
    rows_in_col[subset[v].col].push_back(subset[v].row);
  }

  int64_t affected_energy = 0;
  int64_t folded = 0;
  std::vector<int> ms;
  for (int i = 0; i < count; ++i) {
    for (int j = i; j < count; ++j) {
      if (rows_in_col[i].empty() && rows_in_col[j].empty()) continue;
      const auto row = table.row(i, j);
      for (int k = (i == j ? 1 : 0); k < length; ++k) {
        // Products x_i[m] x_j[m+k] that touch a free entry.
        ms.clear();
        for (int r : rows_in_col[i]) ms.push_back(r);
        for (int r : rows_in_col[j]) ms.push_back(((r - k) % length + length) % length);
        std::sort(ms.begin(), ms.end());
        ms.erase(std::unique(ms.begin(), ms.end()), ms.end());

        CorrelationTerm term;
        term.i = i;
        term.j = j;
        term.shift = k;
        term.constant = row[k];
        for (int m : ms) {
          const int mk = (m + k) % length;
          const int a = x.at(m, i);
          const int b = x.at(mk, j);
          term.constant -= a * b;
          const int fa = slot(m, i);
          const int fb = slot(mk, j);
          if (fa >= 0 && fb >= 0) {
            const int lo = std::min(fa, fb);
            const int hi = std::max(fa, fb);
            auto it = std::find_if(term.products.begin(), term.products.end(),
                                   [&](const ProductPart& p) { return p.first == lo && p.second == hi; });
            if (it == term.products.end()) {
              term.products.push_back({lo, hi, 1});
            } else {
              it->coef += 1;
            }
          } else {
            const int var = fa >= 0 ? fa : fb;
            const int coef = fa >= 0 ? b : a;
            auto it = std::find_if(term.linear.begin(), term.linear.end(),
                                   [&](const LinearPart& p) { return p.var == var; });
            if (it == term.linear.end()) {
              term.linear.push_back({var, coef});
            } else {
              it->coef += coef;
            }
          }
        }
        std::erase_if(term.linear, [](const LinearPart& p) { return p.coef == 0; });
        affected_energy += static_cast<int64_t>(row[k]) * row[k];
        if (term.linear.empty() && term.products.empty()) {
          folded += term.constant * term.constant;
          continue;
        }
        std::sort(term.linear.begin(), term.linear.end(),
                  [](const LinearPart& p, const LinearPart& q) { return p.var < q.var; });
        sub.num_auxiliaries_ += term.products.size();
        sub.terms_.push_back(std::move(term));
      }
    }
  }
  sub.objective_constant_ = table.isl() - affected_energy + folded;
  sub.current_objective_ = table.isl();

  sub.occurrences_.assign(n, {});
  for (std::size_t t = 0; t < sub.terms_.size(); ++t) {
    const auto ti = static_cast<int>(t);
    for (const auto& p : sub.terms_[t].linear) sub.occurrences_[p.var].push_back({ti, p.coef, -1});
    for (const auto& p : sub.terms_[t].products) {
      sub.occurrences_[p.first].push_back({ti, p.coef, p.second});
      sub.occurrences_[p.second].push_back({ti, p.coef, p.first});
    }
  }
  return sub;
}

int64_t lower_bound_interval(const MiqpSubproblem& sub, std::span<const int8_t> partial) {
  if (partial.size() != static_cast<std::size_t>(sub.size())) throw UsageError("partial assignment size mismatch");
  int64_t total = sub.objective_constant();
  for (const auto& t : sub.terms()) {
    int64_t base = t.constant;
    int64_t radius = 0;
    for (const auto& p : t.linear) {
      if (partial[p.var] != 0) {
        base += static_cast<int64_t>(p.coef) * partial[p.var];
      } else {
        radius += std::abs(p.coef);
      }
    }
    for (const auto& p : t.products) {
      if (partial[p.first] != 0 && partial[p.second] != 0) {
        base += static_cast<int64_t>(p.coef) * partial[p.first] * partial[p.second];
      } else {
        radius += std::abs(p.coef);
      }
    }
    total += interval_term_bound(base, radius);
  }
  return total;
}

}  // namespace islopt
