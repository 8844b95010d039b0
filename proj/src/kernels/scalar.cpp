#include "lipfree/kernels.hpp"

#include <limits>

namespace lipfree::kernels {
namespace {

void axpy_neg(double* y, const double* x, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = a * x[i];
    y[i] = y[i] - t;
  }
}

void divide(double* y, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] / a;
}

void min_plus(double* y, const double* x, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double c = a + x[i];
    y[i] = c < y[i] ? c : y[i];
  }
}

void min_elementwise(double* y, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] < y[i] ? x[i] : y[i];
}

void min_scalar(double* y, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a < y[i] ? a : y[i];
}

double max_abs_diff(const double* x, const double* y, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = x[i] > y[i] ? x[i] - y[i] : y[i] - x[i];
    m = t > m ? t : m;
  }
  return m;
}

double max_excess(const double* x, const double* y, double a, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = x[i] - (a + y[i]);
    m = t > m ? t : m;
  }
  return m;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar",   axpy_neg,     divide,    min_plus,
                                 min_elementwise, min_scalar, max_abs_diff, max_excess};
  return table;
}

}  // namespace lipfree::kernels
