#include "islopt/codegen.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>
#include <string>

#include "gold_pairs_data.hpp"
#include "islopt/correlation.hpp"
#include "islopt/error.hpp"
#include "islopt/rng.hpp"

namespace islopt {

LfsrSpec default_lfsr(int degree) {
  static const std::vector<std::vector<int>> kTaps = {
      {},          {},         {2, 1},        {3, 2},        {4, 1},     {5, 2},
      {6, 1},      {7, 1},     {8, 7, 2, 1},  {9, 4},        {10, 3},    {11, 2},
      {12, 8, 2, 1}, {13, 5, 2, 1}, {14, 12, 2, 1}, {15, 1}, {16, 12, 3, 1},
  };
  if (degree < 2 || degree >= static_cast<int>(kTaps.size())) {
    throw UsageError("no default LFSR for degree " + std::to_string(degree));
  }
  return LfsrSpec{degree, kTaps[degree], 0};
}

std::vector<int8_t> generate_mseq(const LfsrSpec& spec) {
  const int n = spec.degree;
  if (n < 2 || n > 24) throw UsageError("LFSR degree must be in [2, 24]");
  if (spec.taps.empty()) throw UsageError("LFSR needs at least one tap");
  uint32_t mask = 0;
  for (int t : spec.taps) {
    if (t < 1 || t > n) throw UsageError("LFSR tap " + std::to_string(t) + " outside 1.." + std::to_string(n));
    mask |= 1u << (t - 1);
  }
  const uint32_t full = (1u << n) - 1u;
  const uint32_t seed = spec.effective_seed();
  if ((seed & full) != seed) throw UsageError("LFSR seed has bits beyond the register");

  const uint32_t period = full;
  std::vector<int8_t> out(period);
  uint32_t state = seed;
  for (uint32_t step = 0; step < period; ++step) {
    out[step] = ((state >> (n - 1)) & 1u) != 0 ? int8_t{-1} : int8_t{1};
    const uint32_t fb = static_cast<uint32_t>(std::popcount(state & mask)) & 1u;
    state = ((state << 1) & full) | fb;
    if (state == seed && step + 1 < period) {
      throw UsageError("taps are not primitive: period " + std::to_string(step + 1) + " < " +
                       std::to_string(period));
    }
  }
  if (state != seed) throw UsageError("taps are not primitive: register does not return to its seed");
  return out;
}

std::vector<PreferredPair> parse_preferred_pairs(std::istream& in) {
  std::vector<PreferredPair> pairs;
  std::string line;
  bool versioned = false;
  auto parse_taps = [](const std::string& text) {
    std::istringstream ss(text);
    std::vector<int> taps;
    int t = 0;
    while (ss >> t) taps.push_back(t);
    if (!ss.eof() || taps.empty()) throw ParseError("bad tap list: '" + text + "'");
    return taps;
  };
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (line.rfind("version", 0) == 0) {
      if (line != "version 1") throw ParseError("unsupported preferred-pair table " + line);
      versioned = true;
      continue;
    }
    if (!versioned) throw ParseError("preferred-pair table lacks a version line");
    const auto a = line.find(':');
    const auto b = line.find(':', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos) throw ParseError("bad preferred-pair line: '" + line + "'");
    PreferredPair p;
    p.degree = std::stoi(line.substr(0, a));
    p.first_taps = parse_taps(line.substr(a + 1, b - a - 1));
    p.second_taps = parse_taps(line.substr(b + 1));
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::span<const PreferredPair> preferred_pairs() {
  static const std::vector<PreferredPair> table = [] {
    std::istringstream in(detail::kPreferredPairTable);
    return parse_preferred_pairs(in);
  }();
  return table;
}

int gold_t(int degree) {
  const int e = degree % 2 == 0 ? (degree + 2) / 2 : (degree + 1) / 2;
  return (1 << e) + 1;
}

GoldFamily generate_gold_family(int degree) {
  const auto pairs = preferred_pairs();
  const auto it = std::find_if(pairs.begin(), pairs.end(), [&](const PreferredPair& p) { return p.degree == degree; });
  if (it == pairs.end()) {
    throw UsageError("no Gold preferred pair for degree " + std::to_string(degree) +
                     " (supported: 5, 6, 7, 9, 10)");
  }
  GoldFamily family;
  family.degree = degree;
  family.first = LfsrSpec{degree, it->first_taps, 0};
  family.second = LfsrSpec{degree, it->second_taps, 0};
  const auto u = generate_mseq(family.first);
  const auto v = generate_mseq(family.second);
  const int length = static_cast<int>(u.size());

  std::vector<int8_t> entries;
  entries.reserve(static_cast<std::size_t>(length) * (length + 2));
  entries.insert(entries.end(), u.begin(), u.end());
  entries.insert(entries.end(), v.begin(), v.end());
  for (int d = 0; d < length; ++d) {
    for (int m = 0; m < length; ++m) entries.push_back(static_cast<int8_t>(u[m] * v[(m + d) % length]));
  }
  family.codes = SequenceSet(length, length + 2, std::move(entries));
  return family;
}

FamilyEnergies::FamilyEnergies(const SequenceSet& family) : size_(family.count()) {
  auto_.assign(size_, 0);
  pair_.assign(static_cast<std::size_t>(size_) * size_, 0);
  for_each_correlation_row(family, CorrelationMethod::kAuto, [&](int i, int j, std::span<const int32_t> row) {
    int64_t energy = 0;
    for (std::size_t k = i == j ? 1 : 0; k < row.size(); ++k) energy += static_cast<int64_t>(row[k]) * row[k];
    if (i == j) {
      auto_[i] = energy;
    } else {
      pair_[static_cast<std::size_t>(i) * size_ + j] = energy;
      pair_[static_cast<std::size_t>(j) * size_ + i] = energy;
    }
  });
}

int64_t FamilyEnergies::pair(int a, int b) const { return pair_[static_cast<std::size_t>(a) * size_ + b]; }

int64_t FamilyEnergies::subset_isl(std::span<const int> members) const {
  int64_t total = 0;
  for (std::size_t p = 0; p < members.size(); ++p) {
    total += auto_[members[p]];
    for (std::size_t q = p + 1; q < members.size(); ++q) total += pair(members[p], members[q]);
  }
  return total;
}

GoldSubset sample_best_gold_subset(const GoldFamily& family, int count, int64_t samples, uint64_t seed) {
  const int size = family.codes.count();
  if (count < 1 || count > size) throw UsageError("subset size must be in [1, family size]");
  if (samples < 1) throw UsageError("at least one sample is required");

  const FamilyEnergies energies(family.codes);
  std::vector<int> population(size);
  std::iota(population.begin(), population.end(), 0);
  std::vector<int> pick(count);
  std::vector<int> best;
  int64_t best_isl = 0;
  Rng rng = make_rng(seed);
  for (int64_t s = 0; s < samples; ++s) {
    std::sample(population.begin(), population.end(), pick.begin(), count, rng);
    const int64_t value = energies.subset_isl(pick);
    if (best.empty() || value < best_isl) {
      best = pick;
      best_isl = value;
    }
  }

  const int length = family.codes.length();
  std::vector<int8_t> entries;
  entries.reserve(static_cast<std::size_t>(length) * count);
  for (int m : best) {
    const auto col = family.codes.column(m);
    entries.insert(entries.end(), col.begin(), col.end());
  }
  GoldSubset out{SequenceSet(length, count, std::move(entries)), best_isl, best};
  return out;
}

SequenceSet random_set(int length, int count, uint64_t seed) {
  SequenceSet probe(length, count);  // validates the shape
  Rng rng = make_rng(seed);
  std::vector<int8_t> entries(static_cast<std::size_t>(length) * count);
  uint64_t word = 0;
  for (std::size_t e = 0; e < entries.size(); ++e) {
    if (e % 64 == 0) word = rng();
    entries[e] = (word >> (e % 64)) & 1u ? int8_t{-1} : int8_t{1};
  }
  return SequenceSet(length, count, std::move(entries));
}

}  // namespace islopt
