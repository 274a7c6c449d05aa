#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace islopt {

// Position of one binary variable X_{row,col}.
struct Index {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const Index&, const Index&) = default;
};

using IndexSubset = std::vector<Index>;

// A proposed value for one entry.
struct Assignment {
  Index index;
  int8_t value = 1;
};

inline constexpr int kMinLength = 2;
// Keeps every per-lane partial sum in the int32 kernels below 2^31.
inline constexpr int kMaxLength = 1 << 15;

// K binary sequences of length L stored column-major; every entry is -1 or +1.
class SequenceSet {
 public:
  SequenceSet() = default;
  // All entries +1.
  SequenceSet(int length, int count);
  // `entries` is column-major (column c occupies [c*L, (c+1)*L)).
  SequenceSet(int length, int count, std::vector<int8_t> entries);

  static SequenceSet from_columns(const std::vector<std::vector<int8_t>>& columns);

  int length() const { return length_; }
  int count() const { return count_; }

  int8_t at(int row, int col) const { return entries_[offset(row, col)]; }
  int8_t at(Index idx) const { return at(idx.row, idx.col); }
  void set(int row, int col, int8_t value);
  void set(Index idx, int8_t value) { set(idx.row, idx.col, value); }
  void flip(int row, int col) { entries_[offset(row, col)] = static_cast<int8_t>(-entries_[offset(row, col)]); }

  std::span<const int8_t> column(int col) const {
    return {entries_.data() + static_cast<std::size_t>(col) * length_, static_cast<std::size_t>(length_)};
  }
  std::span<const int8_t> entries() const { return entries_; }

  bool contains(Index idx) const {
    return idx.row >= 0 && idx.row < length_ && idx.col >= 0 && idx.col < count_;
  }

  friend bool operator==(const SequenceSet&, const SequenceSet&) = default;

 private:
  std::size_t offset(int row, int col) const {
    return static_cast<std::size_t>(col) * length_ + static_cast<std::size_t>(row);
  }

  int length_ = 0;
  int count_ = 0;
  std::vector<int8_t> entries_;
};

// Throws UsageError unless every index is in range and no index repeats.
void validate_subset(const SequenceSet& x, std::span<const Index> subset);

}  // namespace islopt
