#include <cstdlib>

#include "islopt/kernels.hpp"

namespace islopt::kernels {
namespace {

int64_t dot_sign(const int32_t* a, const int32_t* s, std::size_t n) {
  int64_t acc = 0;
  for (std::size_t k = 0; k < n; ++k) acc += static_cast<int64_t>(a[k]) * s[k];
  return acc;
}

int64_t fused_add_dot(int32_t* a, const int32_t* s, int32_t d, std::size_t n) {
  int64_t acc = 0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += static_cast<int64_t>(a[k]) * s[k];
    a[k] += d * s[k];
  }
  return acc;
}

void add_scaled_sign(int32_t* a, const int32_t* s, int32_t d, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) a[k] += d * s[k];
}

int64_t sum_squares(const int32_t* a, std::size_t n) {
  int64_t acc = 0;
  for (std::size_t k = 0; k < n; ++k) acc += static_cast<int64_t>(a[k]) * a[k];
  return acc;
}

int32_t max_abs(const int32_t* a, std::size_t n) {
  int32_t m = 0;
  for (std::size_t k = 0; k < n; ++k) m = std::max(m, std::abs(a[k]));
  return m;
}

constexpr KernelTable kScalar{Isa::kScalar, "scalar", dot_sign, fused_add_dot, add_scaled_sign,
                              sum_squares,  max_abs};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace islopt::kernels
