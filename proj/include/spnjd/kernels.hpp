#pragma once

// Dense/sparse vector kernels used by the transient CTMC solver.
//
// Each kernel has a portable scalar reference and, on x86-64, an AVX2+FMA
// variant. The variant is chosen once at runtime from CPUID; setting the
// environment variable SPNJD_SIMD=scalar forces the reference path.
// Vector variants reorder floating-point sums, so results agree with the
// reference to rounding, not bit-for-bit.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace spnjd::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// Square sparse matrix in compressed-row form with the diagonal split off:
/// y[r] = diag[r] * x[r] + sum_k values[k] * x[cols[k]], k in [row_ptr[r], row_ptr[r+1]).
struct CsrView {
  std::span<const std::uint64_t> row_ptr;
  std::span<const std::int32_t> cols;
  std::span<const double> values;
  std::span<const double> diag;
};

struct KernelTable {
  Isa isa;
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  void (*scale)(double a, double* x, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  void (*csr_matvec)(const CsrView& m, const double* x, double* y);
};

/// True if this build and CPU can run `isa`.
bool supported(Isa isa);

/// Kernel table for `isa`. Throws std::invalid_argument if unsupported.
const KernelTable& table(Isa isa);

/// Table picked at first use (best supported ISA unless overridden by SPNJD_SIMD).
const KernelTable& active();

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}
inline void scale(double a, std::span<double> x) { active().scale(a, x.data(), x.size()); }
inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }
inline void csr_matvec(const CsrView& m, std::span<const double> x, std::span<double> y) {
  active().csr_matvec(m, x.data(), y.data());
}

}  // namespace spnjd::kernels
