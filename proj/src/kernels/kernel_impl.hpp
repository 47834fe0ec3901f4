#pragma once

#include "spnjd/kernels.hpp"

namespace spnjd::kernels {

namespace scalar {
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double a, double* x, std::size_t n);
double sum(const double* x, std::size_t n);
void csr_matvec(const CsrView& m, const double* x, double* y);
}  // namespace scalar

#if defined(SPNJD_HAVE_AVX2)
namespace avx2 {
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double a, double* x, std::size_t n);
double sum(const double* x, std::size_t n);
void csr_matvec(const CsrView& m, const double* x, double* y);
}  // namespace avx2
#endif

}  // namespace spnjd::kernels
