#include "islopt/sequence_set.hpp"

#include <algorithm>
#include <string>

#include "islopt/error.hpp"

namespace islopt {
namespace {

void check_shape(int length, int count) {
  if (length < kMinLength || length > kMaxLength) {
    throw UsageError("sequence length must be in [" + std::to_string(kMinLength) + ", " +
                     std::to_string(kMaxLength) + "], got " + std::to_string(length));
  }
  if (count < 1) throw UsageError("sequence count must be at least 1");
}

}  // namespace

SequenceSet::SequenceSet(int length, int count) : length_(length), count_(count) {
  check_shape(length, count);
  entries_.assign(static_cast<std::size_t>(length) * count, int8_t{1});
}

SequenceSet::SequenceSet(int length, int count, std::vector<int8_t> entries)
    : length_(length), count_(count), entries_(std::move(entries)) {
  check_shape(length, count);
  if (entries_.size() != static_cast<std::size_t>(length) * count) {
    throw UsageError("entry count does not match L*K");
  }
  for (int8_t v : entries_) {
    if (v != 1 && v != -1) throw UsageError("sequence entries must be -1 or +1");
  }
}

SequenceSet SequenceSet::from_columns(const std::vector<std::vector<int8_t>>& columns) {
  if (columns.empty()) throw UsageError("at least one column is required");
  const std::size_t length = columns.front().size();
  std::vector<int8_t> entries;
  entries.reserve(length * columns.size());
  for (const auto& c : columns) {
    if (c.size() != length) throw UsageError("columns must share one length");
    entries.insert(entries.end(), c.begin(), c.end());
  }
  return SequenceSet(static_cast<int>(length), static_cast<int>(columns.size()), std::move(entries));
}

void SequenceSet::set(int row, int col, int8_t value) {
  if (value != 1 && value != -1) throw UsageError("sequence entries must be -1 or +1");
  entries_[offset(row, col)] = value;
}

void validate_subset(const SequenceSet& x, std::span<const Index> subset) {
  std::vector<Index> sorted(subset.begin(), subset.end());
  for (const Index& idx : sorted) {
    if (!x.contains(idx)) {
      throw UsageError("index (" + std::to_string(idx.row) + ", " + std::to_string(idx.col) +
                       ") is out of range");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw UsageError("duplicate index in variable subset");
  }
}

}  // namespace islopt
