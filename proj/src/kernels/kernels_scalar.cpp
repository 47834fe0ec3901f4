#include "kernel_impl.hpp"

namespace spnjd::kernels::scalar {

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

void csr_matvec(const CsrView& m, const double* x, double* y) {
  const std::size_t rows = m.diag.size();
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = m.diag[r] * x[r];
    for (std::uint64_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) acc += m.values[k] * x[m.cols[k]];
    y[r] = acc;
  }
}

}  // namespace spnjd::kernels::scalar
