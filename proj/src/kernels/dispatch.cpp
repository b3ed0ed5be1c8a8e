#include <cstdlib>
#include <string>

#include "hfjump/kernels.hpp"

namespace hfjump::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(HFJUMP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa select_isa() {
  if (const char* env = std::getenv("HFJUMP_ISA")) {
    if (std::string(env) == "scalar") return Isa::kScalar;
  }
  return cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable& table(Isa isa) {
#if defined(HFJUMP_HAVE_AVX2)
  if (isa == Isa::kAvx2 && cpu_has_avx2()) return detail::kAvx2Table;
#else
  (void)isa;
#endif
  return detail::kScalarTable;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out{Isa::kScalar};
  if (cpu_has_avx2()) out.push_back(Isa::kAvx2);
  return out;
}

Isa active_isa() {
  static const Isa isa = select_isa();
  return isa;
}

const KernelTable& active() {
  static const KernelTable& t = table(active_isa());
  return t;
}

}  // namespace hfjump::kernels
