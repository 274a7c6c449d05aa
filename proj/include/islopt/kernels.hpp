#pragma once

// Integer inner loops behind correlation evaluation. Every kernel has a scalar
// reference version; wider variants are compiled in separate translation units
// and picked at runtime from the CPU feature bits. All variants must return
// bit-identical results.
//
// Arrays named `s` hold int32 values restricted to {-1, +1}. Callers keep
// n * max|a| below 2^31 (guaranteed by kMaxLength for correlation rows).

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace islopt::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  std::string_view name;
  // sum_k a[k] * s[k]
  int64_t (*dot_sign)(const int32_t* a, const int32_t* s, std::size_t n);
  // a[k] += d * s[k]; returns sum_k a_old[k] * s[k]
  int64_t (*fused_add_dot)(int32_t* a, const int32_t* s, int32_t d, std::size_t n);
  // a[k] += d * s[k]
  void (*add_scaled_sign)(int32_t* a, const int32_t* s, int32_t d, std::size_t n);
  // sum_k a[k]^2
  int64_t (*sum_squares)(const int32_t* a, std::size_t n);
  // max_k |a[k]|, 0 for n == 0
  int32_t (*max_abs)(const int32_t* a, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the variant was not compiled in.
const KernelTable* avx2_table();

bool cpu_supports(Isa isa);
// Variants that are both compiled in and supported by this CPU, scalar first.
std::vector<Isa> available();
const KernelTable& table_for(Isa isa);

// The table used by the library. Defaults to the widest available variant;
// the ISLOPT_ISA environment variable ("scalar", "avx2") overrides it.
const KernelTable& active();
void set_active(Isa isa);

std::string_view to_string(Isa isa);

}  // namespace islopt::kernels
