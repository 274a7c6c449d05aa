#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "islopt/sequence_set.hpp"

namespace islopt {

// Fibonacci LFSR: stages 1..degree, output from stage `degree`, feedback is the
// XOR of the tapped stages and enters stage 1. Bit t-1 of `seed` is stage t.
struct LfsrSpec {
  int degree = 0;
  std::vector<int> taps;
  uint32_t seed = 0;  // 0 means all ones

  uint32_t effective_seed() const { return seed == 0 ? (1u << degree) - 1u : seed; }
};

// A primitive tap set for degree 2..16.
LfsrSpec default_lfsr(int degree);

// One period of the maximal-length sequence, mapped 0 -> +1, 1 -> -1.
// Throws UsageError if the register does not have period exactly 2^n - 1.
std::vector<int8_t> generate_mseq(const LfsrSpec& spec);

struct PreferredPair {
  int degree = 0;
  std::vector<int> first_taps;
  std::vector<int> second_taps;
};

// Parses the versioned preferred-pair table format (see data/gold_preferred_pairs.txt).
std::vector<PreferredPair> parse_preferred_pairs(std::istream& in);
// The table shipped with the library.
std::span<const PreferredPair> preferred_pairs();

// t(n) of the three-valued Gold correlation spectrum {-1, -t(n), t(n) - 2}.
int gold_t(int degree);

struct GoldFamily {
  int degree = 0;
  LfsrSpec first;
  LfsrSpec second;
  // 2^n + 1 codes of length 2^n - 1: u, v, then u * shift^d(v) for d = 0..L-1.
  SequenceSet codes;
};

GoldFamily generate_gold_family(int degree);

struct GoldSubset {
  SequenceSet codes;
  int64_t isl = 0;
  std::vector<int> members;  // family indices, ascending
};

// Best of `samples` uniformly drawn K-subsets of the family, by ISL.
GoldSubset sample_best_gold_subset(const GoldFamily& family, int count, int64_t samples, uint64_t seed);

// ISL of every subset of the family can be assembled from these: the ISL of a
// subset is sum of `autocorrelation[a]` plus sum of `pair(a, b)` over members.
class FamilyEnergies {
 public:
  explicit FamilyEnergies(const SequenceSet& family);
  int size() const { return size_; }
  int64_t autocorrelation(int a) const { return auto_[a]; }
  int64_t pair(int a, int b) const;
  int64_t subset_isl(std::span<const int> members) const;

 private:
  int size_;
  std::vector<int64_t> auto_;
  std::vector<int64_t> pair_;
};

// i.i.d. uniform entries; deterministic in `seed`.
SequenceSet random_set(int length, int count, uint64_t seed);

}  // namespace islopt
