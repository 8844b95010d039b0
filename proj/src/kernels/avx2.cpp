// Compiled with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include <limits>

#include "lipfree/kernels.hpp"

namespace lipfree::kernels::avx2 {
namespace {

constexpr std::size_t kWidth = 4;

double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d m = _mm_max_pd(lo, hi);
  __m128d s = _mm_unpackhi_pd(m, m);
  return _mm_cvtsd_f64(_mm_max_sd(m, s));
}

void axpy_neg(double* y, const double* x, double a, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    __m256d t = _mm256_mul_pd(av, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_sub_pd(_mm256_loadu_pd(y + i), t));
  }
  for (; i < n; ++i) {
    const double t = a * x[i];
    y[i] = y[i] - t;
  }
}

void divide(double* y, double a, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    _mm256_storeu_pd(y + i, _mm256_div_pd(_mm256_loadu_pd(y + i), av));
  }
  for (; i < n; ++i) y[i] = y[i] / a;
}

void min_plus(double* y, const double* x, double a, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    __m256d c = _mm256_add_pd(av, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_min_pd(c, _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) {
    const double c = a + x[i];
    y[i] = c < y[i] ? c : y[i];
  }
}

void min_elementwise(double* y, const double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    _mm256_storeu_pd(y + i, _mm256_min_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] = x[i] < y[i] ? x[i] : y[i];
}

void min_scalar(double* y, double a, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    _mm256_storeu_pd(y + i, _mm256_min_pd(av, _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] = a < y[i] ? a : y[i];
}

double max_abs_diff(const double* x, const double* y, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_max_pd(_mm256_andnot_pd(sign, d), acc);
  }
  double m = hmax(acc);
  for (; i < n; ++i) {
    const double t = x[i] > y[i] ? x[i] - y[i] : y[i] - x[i];
    m = t > m ? t : m;
  }
  return m;
}

double max_excess(const double* x, const double* y, double a, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  __m256d acc = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    __m256d t = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_add_pd(av, _mm256_loadu_pd(y + i)));
    acc = _mm256_max_pd(t, acc);
  }
  double m = hmax(acc);
  for (; i < n; ++i) {
    const double t = x[i] - (a + y[i]);
    m = t > m ? t : m;
  }
  return m;
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{"avx2",   axpy_neg,     divide,    min_plus,
                             min_elementwise, min_scalar, max_abs_diff, max_excess};
  return t;
}

}  // namespace lipfree::kernels::avx2
