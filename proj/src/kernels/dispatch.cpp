#include <atomic>
#include <cstdlib>
#include <string>

#include "islopt/error.hpp"
#include "islopt/kernels.hpp"

namespace islopt::kernels {

#ifndef ISLOPT_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(__x86_64__) || defined(__i386__)
      return avx2_table() != nullptr && __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

std::vector<Isa> available() {
  std::vector<Isa> out{Isa::kScalar};
  if (cpu_supports(Isa::kAvx2)) out.push_back(Isa::kAvx2);
  return out;
}

const KernelTable& table_for(Isa isa) {
  if (!cpu_supports(isa)) throw UsageError("kernel variant " + std::string(to_string(isa)) + " is unavailable");
  return isa == Isa::kAvx2 ? *avx2_table() : scalar_table();
}

std::string_view to_string(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

namespace {

const KernelTable* pick_default() {
  if (const char* env = std::getenv("ISLOPT_ISA")) {
    const std::string want(env);
    if (want == "scalar") return &scalar_table();
    if (want == "avx2" && cpu_supports(Isa::kAvx2)) return avx2_table();
  }
  return cpu_supports(Isa::kAvx2) ? avx2_table() : &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{pick_default()};
  return current;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_relaxed); }

void set_active(Isa isa) { slot().store(&table_for(isa), std::memory_order_relaxed); }

}  // namespace islopt::kernels
