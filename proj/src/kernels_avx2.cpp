// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "grassvol/kernels.hpp"

namespace grassvol::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Two complex numbers per register: [r0 i0 r1 i1].
std::complex<double> cdot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc_rr = _mm256_setzero_pd();  // ar*br, ai*bi
  __m256d acc_ri = _mm256_setzero_pd();  // ar*bi, ai*br
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(a + 2 * i);
    const __m256d vb = _mm256_loadu_pd(b + 2 * i);
    const __m256d vb_sw = _mm256_permute_pd(vb, 0b0101);
    acc_rr = _mm256_fmadd_pd(va, vb, acc_rr);
    acc_ri = _mm256_fmadd_pd(va, vb_sw, acc_ri);
  }
  alignas(32) double rr[4];
  alignas(32) double ri[4];
  _mm256_store_pd(rr, acc_rr);
  _mm256_store_pd(ri, acc_ri);
  double re = (rr[0] + rr[1]) + (rr[2] + rr[3]);
  double im = (ri[0] - ri[1]) + (ri[2] - ri[3]);
  for (; i < n; ++i) {
    const double ar = a[2 * i], ai = a[2 * i + 1];
    const double br = b[2 * i], bi = b[2 * i + 1];
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

void caxpy_sub_avx2(std::complex<double> c, const double* x, double* y, std::size_t n) {
  const __m256d cr = _mm256_set1_pd(c.real());
  // c*x = [cr*xr - ci*xi, cr*xi + ci*xr]; ci_alt carries the sign pattern.
  const __m256d ci_alt = _mm256_setr_pd(-c.imag(), c.imag(), -c.imag(), c.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(x + 2 * i);
    const __m256d vx_sw = _mm256_permute_pd(vx, 0b0101);
    __m256d prod = _mm256_mul_pd(cr, vx);
    prod = _mm256_fmadd_pd(ci_alt, vx_sw, prod);
    _mm256_storeu_pd(y + 2 * i, _mm256_sub_pd(_mm256_loadu_pd(y + 2 * i), prod));
  }
  for (; i < n; ++i) {
    const double xr = x[2 * i], xi = x[2 * i + 1];
    y[2 * i] -= c.real() * xr - c.imag() * xi;
    y[2 * i + 1] -= c.real() * xi + c.imag() * xr;
  }
}

double dot_avx2(const double* a, const double* b, std::size_t len) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= len; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < len; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_sq_avx2(const double* x, std::size_t len) { return dot_avx2(x, x, len); }

void dot_rows_avx2(const double* rows, std::size_t nrows, std::size_t len, const double* x,
                   double* out) {
  std::size_t r = 0;
  // Four rows at a time share each load of x.
  for (; r + 4 <= nrows; r += 4) {
    const double* r0 = rows + r * len;
    const double* r1 = r0 + len;
    const double* r2 = r1 + len;
    const double* r3 = r2 + len;
    __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
      const __m256d vx = _mm256_loadu_pd(x + i);
      a0 = _mm256_fmadd_pd(_mm256_loadu_pd(r0 + i), vx, a0);
      a1 = _mm256_fmadd_pd(_mm256_loadu_pd(r1 + i), vx, a1);
      a2 = _mm256_fmadd_pd(_mm256_loadu_pd(r2 + i), vx, a2);
      a3 = _mm256_fmadd_pd(_mm256_loadu_pd(r3 + i), vx, a3);
    }
    double s0 = hsum(a0), s1 = hsum(a1), s2 = hsum(a2), s3 = hsum(a3);
    for (; i < len; ++i) {
      s0 += r0[i] * x[i];
      s1 += r1[i] * x[i];
      s2 += r2[i] * x[i];
      s3 += r3[i] * x[i];
    }
    out[r] = s0;
    out[r + 1] = s1;
    out[r + 2] = s2;
    out[r + 3] = s3;
  }
  for (; r < nrows; ++r) out[r] = dot_avx2(rows + r * len, x, len);
}

}  // namespace

const Table avx2_table{cdot_avx2, caxpy_sub_avx2, sum_sq_avx2, dot_avx2, dot_rows_avx2};

}  // namespace grassvol::kernels::detail
