// Compiled with -mavx2 -mfma; only called after a CPUID check.
#include <immintrin.h>

#include "kernel_impl.hpp"

namespace spnjd::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

double sum(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i];
  return s;
}

void csr_matvec(const CsrView& m, const double* x, double* y) {
  const std::size_t rows = m.diag.size();
  const std::int32_t* cols = m.cols.data();
  const double* vals = m.values.data();
  for (std::size_t r = 0; r < rows; ++r) {
    std::uint64_t k = m.row_ptr[r];
    const std::uint64_t end = m.row_ptr[r + 1];
    double acc = m.diag[r] * x[r];
    if (end - k >= 4) {
      __m256d v = _mm256_setzero_pd();
      for (; k + 4 <= end; k += 4) {
        const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + k));
        const __m256d gathered = _mm256_i32gather_pd(x, idx, 8);
        v = _mm256_fmadd_pd(_mm256_loadu_pd(vals + k), gathered, v);
      }
      acc += hsum(v);
    }
    for (; k < end; ++k) acc += vals[k] * x[cols[k]];
    y[r] = acc;
  }
}

}  // namespace spnjd::kernels::avx2
