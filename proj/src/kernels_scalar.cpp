#include "grassvol/kernels.hpp"

namespace grassvol::kernels::detail {
namespace {

std::complex<double> cdot_scalar(const double* a, const double* b, std::size_t n) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[2 * i], ai = a[2 * i + 1];
    const double br = b[2 * i], bi = b[2 * i + 1];
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

void caxpy_sub_scalar(std::complex<double> c, const double* x, double* y, std::size_t n) {
  const double cr = c.real(), ci = c.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[2 * i], xi = x[2 * i + 1];
    y[2 * i] -= cr * xr - ci * xi;
    y[2 * i + 1] -= cr * xi + ci * xr;
  }
}

double sum_sq_scalar(const double* x, std::size_t len) {
  double acc = 0.0;
  for (std::size_t i = 0; i < len; ++i) acc += x[i] * x[i];
  return acc;
}

double dot_scalar(const double* a, const double* b, std::size_t len) {
  double acc = 0.0;
  for (std::size_t i = 0; i < len; ++i) acc += a[i] * b[i];
  return acc;
}

void dot_rows_scalar(const double* rows, std::size_t nrows, std::size_t len, const double* x,
                     double* out) {
  for (std::size_t r = 0; r < nrows; ++r) out[r] = dot_scalar(rows + r * len, x, len);
}

}  // namespace

const Table scalar_table{cdot_scalar, caxpy_sub_scalar, sum_sq_scalar, dot_scalar,
                         dot_rows_scalar};

}  // namespace grassvol::kernels::detail
