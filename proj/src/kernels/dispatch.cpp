#include <cstdlib>
#include <string>

#include "skelattack/error.hpp"
#include "skelattack/kernels.hpp"

namespace skelattack::kernels {

namespace {

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa resolve() {
  if (const char* env = std::getenv("SKELATTACK_KERNEL"); env && *env && std::string_view(env) != "auto") {
    const Isa requested = parse_isa(env);
    if (!isa_supported(requested))
      throw ValidationError("SKELATTACK_KERNEL=" + std::string(env) + " is not supported on this CPU");
    return requested;
  }
  return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

}  // namespace

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      static const bool has = cpu_has_avx2();
      return has;
  }
  return false;
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  throw ValidationError("unknown kernel ISA '" + std::string(name) + "'");
}

const KernelTable& table(Isa isa) {
  if (!isa_supported(isa)) throw ValidationError("kernel ISA " + std::string(isa_name(isa)) + " unsupported");
#if defined(__x86_64__) || defined(_M_X64)
  if (isa == Isa::avx2) return avx2::kTable;
#endif
  return scalar::kTable;
}

Isa active_isa() {
  static const Isa isa = resolve();
  return isa;
}

const KernelTable& active() {
  static const KernelTable& t = table(active_isa());
  return t;
}

}  // namespace skelattack::kernels
