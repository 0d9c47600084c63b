// AArch64 Advanced SIMD variants; NEON is part of the base ISA there.
#include <arm_neon.h>

#include "grassvol/kernels.hpp"

namespace grassvol::kernels::detail {
namespace {

// One complex number per register: [re im].
std::complex<double> cdot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc_rr = vdupq_n_f64(0.0);  // ar*br, ai*bi
  float64x2_t acc_ri = vdupq_n_f64(0.0);  // ar*bi, ai*br
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t va = vld1q_f64(a + 2 * i);
    const float64x2_t vb = vld1q_f64(b + 2 * i);
    acc_rr = vfmaq_f64(acc_rr, va, vb);
    acc_ri = vfmaq_f64(acc_ri, va, vextq_f64(vb, vb, 1));
  }
  return {vgetq_lane_f64(acc_rr, 0) + vgetq_lane_f64(acc_rr, 1),
          vgetq_lane_f64(acc_ri, 0) - vgetq_lane_f64(acc_ri, 1)};
}

void caxpy_sub_neon(std::complex<double> c, const double* x, double* y, std::size_t n) {
  const float64x2_t cr = vdupq_n_f64(c.real());
  const double alt[2] = {-c.imag(), c.imag()};
  const float64x2_t ci_alt = vld1q_f64(alt);
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t vx = vld1q_f64(x + 2 * i);
    float64x2_t prod = vmulq_f64(cr, vx);
    prod = vfmaq_f64(prod, ci_alt, vextq_f64(vx, vx, 1));
    vst1q_f64(y + 2 * i, vsubq_f64(vld1q_f64(y + 2 * i), prod));
  }
}

double dot_neon(const double* a, const double* b, std::size_t len) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < len; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_sq_neon(const double* x, std::size_t len) { return dot_neon(x, x, len); }

void dot_rows_neon(const double* rows, std::size_t nrows, std::size_t len, const double* x,
                   double* out) {
  for (std::size_t r = 0; r < nrows; ++r) out[r] = dot_neon(rows + r * len, x, len);
}

}  // namespace

const Table neon_table{cdot_neon, caxpy_sub_neon, sum_sq_neon, dot_neon, dot_rows_neon};

}  // namespace grassvol::kernels::detail
