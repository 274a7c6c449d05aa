#include "islopt/correlation.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "islopt/error.hpp"
#include "islopt/kernels.hpp"

namespace islopt {

int64_t cross_correlation(const SequenceSet& x, int i, int j, int k) {
  const int length = x.length();
  if (i < 0 || i >= x.count() || j < 0 || j >= x.count()) throw UsageError("column index out of range");
  if (k < 0 || k >= length) throw UsageError("shift out of range");
  int64_t acc = 0;
  for (int m = 0; m < length; ++m) acc += x.at(m, i) * x.at((m + k) % length, j);
  return acc;
}

CorrelationTable::CorrelationTable(SequenceSet x, CorrelationMethod method)
    : x_(std::move(x)), length_(x_.length()), count_(x_.count()) {
  if (length_ < kMinLength) throw UsageError("correlation table needs a non-empty sequence set");
  windows_.assign(static_cast<std::size_t>(count_) * 4 * length_, 0);
  for (int c = 0; c < count_; ++c) rebuild_windows(c);
  values_ = correlation_rows(x_, method);
  isl_ = recompute_isl();
}

std::size_t CorrelationTable::pair_index(int i, int j) const {
  const auto ii = static_cast<std::size_t>(i);
  return ii * count_ - ii * (ii - 1) / 2 + static_cast<std::size_t>(j - i);
}

std::span<const int32_t> CorrelationTable::row(int i, int j) const {
  if (i < 0 || j < i || j >= count_) throw UsageError("row() expects 0 <= i <= j < K");
  return {row_ptr(i, j), static_cast<std::size_t>(length_)};
}

int32_t CorrelationTable::value(int i, int j, int k) const {
  if (i < 0 || i >= count_ || j < 0 || j >= count_) throw UsageError("column index out of range");
  if (k < 0 || k >= length_) throw UsageError("shift out of range");
  if (i <= j) return row_ptr(i, j)[k];
  return row_ptr(j, i)[(length_ - k) % length_];
}

void CorrelationTable::rebuild_windows(int col) {
  int32_t* fwd = windows_.data() + static_cast<std::size_t>(col) * 4 * length_;
  int32_t* rev = fwd + 2 * length_;
  for (int t = 0; t < 2 * length_; ++t) {
    fwd[t] = x_.at(t % length_, col);
    rev[t] = x_.at((2 * length_ - t) % length_, col);
  }
}

void CorrelationTable::set_window_entry(int row, int col, int32_t v) {
  int32_t* fwd = windows_.data() + static_cast<std::size_t>(col) * 4 * length_;
  int32_t* rev = fwd + 2 * length_;
  fwd[row] = v;
  fwd[row + length_] = v;
  const int t = (length_ - row) % length_;
  rev[t] = v;
  rev[t + length_] = v;
}

int64_t CorrelationTable::recompute_isl() const {
  const auto& kt = kernels::active();
  int64_t total = 0;
  for (int i = 0; i < count_; ++i) {
    total += kt.sum_squares(row_ptr(i, i) + 1, length_ - 1);
    for (int j = i + 1; j < count_; ++j) total += kt.sum_squares(row_ptr(i, j), length_);
  }
  return total;
}

int64_t CorrelationTable::psl() const {
  const auto& kt = kernels::active();
  int32_t peak = 0;
  for (int i = 0; i < count_; ++i) {
    peak = std::max(peak, kt.max_abs(row_ptr(i, i) + 1, length_ - 1));
    for (int j = i + 1; j < count_; ++j) peak = std::max(peak, kt.max_abs(row_ptr(i, j), length_));
  }
  return peak;
}

// A flip of X[r,c] by d = -2 X[r,c] moves (X_c * X_j)_k by d X_j[r+k] for j > c,
// (X_i * X_c)_k by d X_i[r-k] for i < c, and the autocorrelation of c by
// d (X_c[r+k] + X_c[r-k]) for k != 0.
int64_t CorrelationTable::flip_delta(int row, int col) const {
  if (!x_.contains({row, col})) throw UsageError("flip index out of range");
  const auto& kt = kernels::active();
  const int64_t d = -2 * x_.at(row, col);
  const auto n = static_cast<std::size_t>(length_);
  const int back = (length_ - row) % length_;
  int64_t delta = 0;
  for (int j = 0; j < count_; ++j) {
    if (j == col) continue;
    const int64_t s = j > col ? kt.dot_sign(row_ptr(col, j), forward(j) + row, n)
                              : kt.dot_sign(row_ptr(j, col), reverse(j) + back, n);
    delta += 2 * d * s + d * d * length_;
  }
  const int32_t* self = row_ptr(col, col) + 1;
  const int32_t* f = forward(col) + row + 1;
  const int32_t* b = reverse(col) + back + 1;
  const int64_t s1 = kt.dot_sign(self, f, n - 1);
  const int64_t s2 = kt.dot_sign(self, b, n - 1);
  const int64_t sfb = kt.dot_sign(f, b, n - 1);
  delta += 2 * d * (s1 + s2) + d * d * (2 * (length_ - 1) + 2 * sfb);
  return delta;
}

int64_t CorrelationTable::flip(int row, int col) {
  if (!x_.contains({row, col})) throw UsageError("flip index out of range");
  const auto& kt = kernels::active();
  const int32_t d = -2 * x_.at(row, col);
  const int64_t dd = d;
  const auto n = static_cast<std::size_t>(length_);
  const int back = (length_ - row) % length_;
  int64_t delta = 0;
  for (int j = 0; j < count_; ++j) {
    if (j == col) continue;
    const int64_t s = j > col ? kt.fused_add_dot(row_ptr(col, j), forward(j) + row, d, n)
                              : kt.fused_add_dot(row_ptr(j, col), reverse(j) + back, d, n);
    delta += 2 * dd * s + dd * dd * length_;
  }
  int32_t* self = row_ptr(col, col) + 1;
  const int64_t s1 = kt.fused_add_dot(self, forward(col) + row + 1, d, n - 1);
  // Second pass sees the values already moved by the first.
  const int64_t s2 = kt.fused_add_dot(self, reverse(col) + back + 1, d, n - 1);
  delta += 2 * dd * (s1 + s2) + 2 * dd * dd * (length_ - 1);

  x_.flip(row, col);
  set_window_entry(row, col, x_.at(row, col));
  isl_ += delta;
  return delta;
}

int64_t isl(const CorrelationTable& table) { return table.isl(); }
int64_t psl(const CorrelationTable& table) { return table.psl(); }

int64_t isl(const SequenceSet& x) { return CorrelationTable(x).isl(); }
int64_t psl(const SequenceSet& x) { return CorrelationTable(x).psl(); }

FlipTransaction::FlipTransaction(CorrelationTable& table, std::span<const Assignment> flips) : table_(&table) {
  std::vector<Index> indices;
  indices.reserve(flips.size());
  for (const Assignment& a : flips) {
    if (a.value != 1 && a.value != -1) throw UsageError("proposed values must be -1 or +1");
    indices.push_back(a.index);
  }
  validate_subset(table.sequences(), indices);
  for (const Assignment& a : flips) {
    if (table.sequences().at(a.index) != a.value) {
      table.flip(a.index);
      applied_.push_back(a.index);
    }
  }
}

FlipTransaction::FlipTransaction(FlipTransaction&& other) noexcept
    : table_(other.table_), applied_(std::move(other.applied_)), open_(other.open_) {
  other.open_ = false;
}

FlipTransaction::~FlipTransaction() {
  if (open_) rollback();
}

int64_t FlipTransaction::isl() const { return table_->isl(); }

void FlipTransaction::commit() { open_ = false; }

void FlipTransaction::rollback() {
  if (!open_) return;
  for (auto it = applied_.rbegin(); it != applied_.rend(); ++it) table_->flip(*it);
  applied_.clear();
  open_ = false;
}

FlipTransaction isl_delta(CorrelationTable& table, std::span<const Assignment> flips) {
  return FlipTransaction(table, flips);
}

}  // namespace islopt
