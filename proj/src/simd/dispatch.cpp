#include <atomic>
#include <cstdlib>
#include <string>

#include "nlcoh/error.hpp"
#include "nlcoh/simd/kernels.hpp"

namespace nlcoh::simd {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&kernels(default_isa())};
  return slot;
}

}  // namespace

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return detail::avx2_table() != nullptr && cpu_has_avx2();
    case Isa::neon: return detail::neon_table() != nullptr;
  }
  return false;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  if (name == "neon") return Isa::neon;
  throw InvalidInput("unknown SIMD ISA '" + std::string(name) + "'");
}

Isa default_isa() {
  if (const char* env = std::getenv("NLCOH_ISA"); env != nullptr && *env != '\0') {
    const Isa requested = parse_isa(env);
    if (isa_supported(requested)) return requested;
  }
  if (isa_supported(Isa::avx2)) return Isa::avx2;
  if (isa_supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

const KernelTable& kernels(Isa isa) {
  if (!isa_supported(isa))
    throw InvalidInput("SIMD ISA '" + std::string(isa_name(isa)) + "' is not supported here");
  switch (isa) {
    case Isa::avx2: return *detail::avx2_table();
    case Isa::neon: return *detail::neon_table();
    case Isa::scalar: break;
  }
  return detail::scalar_table();
}

const KernelTable& kernels() { return *active_slot().load(std::memory_order_acquire); }

Isa active_isa() { return kernels().isa; }

void set_active_isa(Isa isa) { active_slot().store(&kernels(isa), std::memory_order_release); }

}  // namespace nlcoh::simd
