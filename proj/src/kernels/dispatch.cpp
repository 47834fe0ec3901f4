#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernel_impl.hpp"

namespace spnjd::kernels {

namespace {

constexpr KernelTable kScalar{Isa::scalar, scalar::axpy, scalar::scale, scalar::sum, scalar::csr_matvec};
#if defined(SPNJD_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, avx2::axpy, avx2::scale, avx2::sum, avx2::csr_matvec};
#endif

const KernelTable& pick() {
  if (const char* env = std::getenv("SPNJD_SIMD"); env && std::string(env) == "scalar") return kScalar;
  if (supported(Isa::avx2)) return table(Isa::avx2);
  return kScalar;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(SPNJD_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa)) throw std::invalid_argument("ISA not supported: " + std::string(to_string(isa)));
#if defined(SPNJD_HAVE_AVX2)
  if (isa == Isa::avx2) return kAvx2;
#endif
  return kScalar;
}

const KernelTable& active() {
  static const KernelTable& chosen = pick();
  return chosen;
}

}  // namespace spnjd::kernels
