// AArch64 always has Advanced SIMD, so no runtime check is needed.

#include <arm_neon.h>

#include <limits>

#include "lipfree/kernels.hpp"

namespace lipfree::kernels::neon {
namespace {

constexpr std::size_t kWidth = 2;

// vminq_f64 propagates NaN differently from `a < b ? a : b`; use compare +
// select so results match the scalar reference bit for bit.
inline float64x2_t select_min(float64x2_t a, float64x2_t b) {
  return vbslq_f64(vcltq_f64(a, b), a, b);
}
inline float64x2_t select_max(float64x2_t a, float64x2_t b) {
  return vbslq_f64(vcgtq_f64(a, b), a, b);
}

void axpy_neg(double* y, const double* x, double a, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    float64x2_t t = vmulq_f64(av, vld1q_f64(x + i));
    vst1q_f64(y + i, vsubq_f64(vld1q_f64(y + i), t));
  }
  for (; i < n; ++i) {
    const double t = a * x[i];
    y[i] = y[i] - t;
  }
}

void divide(double* y, double a, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) vst1q_f64(y + i, vdivq_f64(vld1q_f64(y + i), av));
  for (; i < n; ++i) y[i] = y[i] / a;
}

void min_plus(double* y, const double* x, double a, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    float64x2_t c = vaddq_f64(av, vld1q_f64(x + i));
    vst1q_f64(y + i, select_min(c, vld1q_f64(y + i)));
  }
  for (; i < n; ++i) {
    const double c = a + x[i];
    y[i] = c < y[i] ? c : y[i];
  }
}

void min_elementwise(double* y, const double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    vst1q_f64(y + i, select_min(vld1q_f64(x + i), vld1q_f64(y + i)));
  }
  for (; i < n; ++i) y[i] = x[i] < y[i] ? x[i] : y[i];
}

void min_scalar(double* y, double a, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) vst1q_f64(y + i, select_min(av, vld1q_f64(y + i)));
  for (; i < n; ++i) y[i] = a < y[i] ? a : y[i];
}

double max_abs_diff(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    acc = select_max(vabsq_f64(vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i))), acc);
  }
  double m = vmaxvq_f64(acc);
  for (; i < n; ++i) {
    const double t = x[i] > y[i] ? x[i] - y[i] : y[i] - x[i];
    m = t > m ? t : m;
  }
  return m;
}

double max_excess(const double* x, const double* y, double a, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  float64x2_t acc = vdupq_n_f64(-std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    float64x2_t t = vsubq_f64(vld1q_f64(x + i), vaddq_f64(av, vld1q_f64(y + i)));
    acc = select_max(t, acc);
  }
  double m = vmaxvq_f64(acc);
  for (; i < n; ++i) {
    const double t = x[i] - (a + y[i]);
    m = t > m ? t : m;
  }
  return m;
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{"neon",   axpy_neg,     divide,    min_plus,
                             min_elementwise, min_scalar, max_abs_diff, max_excess};
  return t;
}

}  // namespace lipfree::kernels::neon
