// Compiled with -mavx2; only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>
#include <cstdlib>

#include "islopt/kernels.hpp"

namespace islopt::kernels {
namespace {

inline int64_t hsum_epi32(__m256i v) {
  alignas(32) int32_t lanes[8];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
  int64_t acc = 0;
  for (int32_t x : lanes) acc += x;
  return acc;
}

inline int64_t hsum_epi64(__m256i v) {
  alignas(32) int64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
  return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

inline __m256i load(const int32_t* p) { return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p)); }
inline void store(int32_t* p, __m256i v) { _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v); }

int64_t dot_sign(const int32_t* a, const int32_t* s, std::size_t n) {
  __m256i acc0 = _mm256_setzero_si256();
  __m256i acc1 = _mm256_setzero_si256();
  std::size_t k = 0;
  for (; k + 16 <= n; k += 16) {
    acc0 = _mm256_add_epi32(acc0, _mm256_sign_epi32(load(a + k), load(s + k)));
    acc1 = _mm256_add_epi32(acc1, _mm256_sign_epi32(load(a + k + 8), load(s + k + 8)));
  }
  for (; k + 8 <= n; k += 8) acc0 = _mm256_add_epi32(acc0, _mm256_sign_epi32(load(a + k), load(s + k)));
  int64_t total = hsum_epi32(_mm256_add_epi32(acc0, acc1));
  for (; k < n; ++k) total += static_cast<int64_t>(a[k]) * s[k];
  return total;
}

int64_t fused_add_dot(int32_t* a, const int32_t* s, int32_t d, std::size_t n) {
  const __m256i dv = _mm256_set1_epi32(d);
  __m256i acc = _mm256_setzero_si256();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    const __m256i av = load(a + k);
    const __m256i sv = load(s + k);
    acc = _mm256_add_epi32(acc, _mm256_sign_epi32(av, sv));
    store(a + k, _mm256_add_epi32(av, _mm256_sign_epi32(dv, sv)));
  }
  int64_t total = hsum_epi32(acc);
  for (; k < n; ++k) {
    total += static_cast<int64_t>(a[k]) * s[k];
    a[k] += d * s[k];
  }
  return total;
}

void add_scaled_sign(int32_t* a, const int32_t* s, int32_t d, std::size_t n) {
  const __m256i dv = _mm256_set1_epi32(d);
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) store(a + k, _mm256_add_epi32(load(a + k), _mm256_sign_epi32(dv, load(s + k))));
  for (; k < n; ++k) a[k] += d * s[k];
}

int64_t sum_squares(const int32_t* a, std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    const __m256i v = load(a + k);
    const __m256i hi = _mm256_srli_epi64(v, 32);
    acc = _mm256_add_epi64(acc, _mm256_mul_epi32(v, v));
    acc = _mm256_add_epi64(acc, _mm256_mul_epi32(hi, hi));
  }
  int64_t total = hsum_epi64(acc);
  for (; k < n; ++k) total += static_cast<int64_t>(a[k]) * a[k];
  return total;
}

int32_t max_abs(const int32_t* a, std::size_t n) {
  __m256i m = _mm256_setzero_si256();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) m = _mm256_max_epi32(m, _mm256_abs_epi32(load(a + k)));
  alignas(32) int32_t lanes[8];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), m);
  int32_t best = *std::max_element(lanes, lanes + 8);
  for (; k < n; ++k) best = std::max(best, std::abs(a[k]));
  return best;
}

constexpr KernelTable kAvx2{Isa::kAvx2, "avx2", dot_sign, fused_add_dot, add_scaled_sign, sum_squares, max_abs};

}  // namespace

const KernelTable* avx2_table() { return &kAvx2; }

}  // namespace islopt::kernels
