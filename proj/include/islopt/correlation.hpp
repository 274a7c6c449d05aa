#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "islopt/sequence_set.hpp"

namespace islopt {

// Periodic cross-correlation sum_m X[m,i] * X[(m+k) mod L, j], evaluated
// straight from the definition.
int64_t cross_correlation(const SequenceSet& x, int i, int j, int k);

enum class CorrelationMethod {
  kDirect,     // O(K^2 L^2) integer dot products
  kTransform,  // FFT per pair, rounded; pairs failing the parity check are redone directly
  kAuto,       // transform for long sequences, direct otherwise
};

// All values (X_i * X_j)_k for i <= j, kept consistent with a private copy of
// the sequence set under single-entry flips. The cached ISL is updated in
// O(K L) per flip.
class CorrelationTable {
 public:
  explicit CorrelationTable(SequenceSet x, CorrelationMethod method = CorrelationMethod::kAuto);

  const SequenceSet& sequences() const { return x_; }
  int length() const { return length_; }
  int count() const { return count_; }

  // Row for the ordered pair i <= j, indexed by shift.
  std::span<const int32_t> row(int i, int j) const;
  // Any i, j; (X_j * X_i)_k is recovered as (X_i * X_j)_{(L-k) mod L}.
  int32_t value(int i, int j, int k) const;

  int64_t isl() const { return isl_; }
  int64_t psl() const;

  // Change in ISL if X[row, col] were negated. No state change.
  int64_t flip_delta(int row, int col) const;
  // Negates X[row, col] and updates every affected value. Returns the ISL change.
  int64_t flip(int row, int col);
  int64_t flip(Index idx) { return flip(idx.row, idx.col); }

  // Recomputes the ISL from the stored values (used by invariant checks).
  int64_t recompute_isl() const;

  friend bool operator==(const CorrelationTable& a, const CorrelationTable& b) {
    return a.x_ == b.x_ && a.values_ == b.values_ && a.isl_ == b.isl_;
  }

 private:
  std::size_t pair_index(int i, int j) const;
  int32_t* row_ptr(int i, int j) { return values_.data() + pair_index(i, j) * length_; }
  const int32_t* row_ptr(int i, int j) const { return values_.data() + pair_index(i, j) * length_; }
  // x_c[t mod L] for t in [0, 2L)
  const int32_t* forward(int c) const { return windows_.data() + static_cast<std::size_t>(c) * 4 * length_; }
  // x_c[(-t) mod L] for t in [0, 2L)
  const int32_t* reverse(int c) const { return forward(c) + 2 * length_; }
  void rebuild_windows(int col);
  void set_window_entry(int row, int col, int32_t v);

  SequenceSet x_;
  int length_ = 0;
  int count_ = 0;
  std::vector<int32_t> values_;
  std::vector<int32_t> windows_;
  int64_t isl_ = 0;
};

// Full correlation-table construction from scratch by the chosen method.
// Returned layout: one length-L row per pair i <= j in row-major pair order.
std::vector<int32_t> correlation_rows(const SequenceSet& x, CorrelationMethod method);

// Streams every row (i <= j) without holding the whole table; used for large
// code families. The span is only valid during the call.
using RowVisitor = std::function<void(int i, int j, std::span<const int32_t> row)>;
void for_each_correlation_row(const SequenceSet& x, CorrelationMethod method, const RowVisitor& visit);

int64_t isl(const CorrelationTable& table);
int64_t psl(const CorrelationTable& table);

// A batch of entry updates applied to a table, undone on destruction unless
// committed. Cost is O(|flips| K L).
class FlipTransaction {
 public:
  FlipTransaction(CorrelationTable& table, std::span<const Assignment> flips);
  FlipTransaction(const FlipTransaction&) = delete;
  FlipTransaction& operator=(const FlipTransaction&) = delete;
  FlipTransaction(FlipTransaction&& other) noexcept;
  FlipTransaction& operator=(FlipTransaction&&) = delete;
  ~FlipTransaction();

  // ISL of the table with the flips applied.
  int64_t isl() const;
  void commit();
  void rollback();

 private:
  CorrelationTable* table_;
  std::vector<Index> applied_;
  bool open_ = true;
};

// Applies `flips` (new values, not toggles) and returns the pending update.
// Throws UsageError on duplicate or out-of-range indices or values outside {-1,+1}.
[[nodiscard]] FlipTransaction isl_delta(CorrelationTable& table, std::span<const Assignment> flips);

// Convenience: the ISL of a sequence set.
int64_t isl(const SequenceSet& x);
int64_t psl(const SequenceSet& x);

}  // namespace islopt
