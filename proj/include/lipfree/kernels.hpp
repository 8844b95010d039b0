#pragma once

// Data-parallel row kernels used by the simplex pivot, the shortest-path
// closure, distance-to-set sweeps and metric validation.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 (x86-64) or NEON (aarch64) variant. Variants are
// required to produce bit-identical results to the scalar reference: no FMA,
// no reassociation of sums, and min/max written with the same operand order
// as the hardware instructions (`a < b ? a : b`).

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace lipfree::kernels {

struct KernelTable {
  std::string_view name;

  // y[i] = y[i] - a * x[i]
  void (*axpy_neg)(double* y, const double* x, double a, std::size_t n);
  // y[i] = y[i] / a
  void (*divide)(double* y, double a, std::size_t n);
  // y[i] = min(y[i], a + x[i])
  void (*min_plus)(double* y, const double* x, double a, std::size_t n);
  // y[i] = min(y[i], x[i])
  void (*min_elementwise)(double* y, const double* x, std::size_t n);
  // y[i] = min(y[i], a)
  void (*min_scalar)(double* y, double a, std::size_t n);
  // max_i |x[i] - y[i]|, 0 for n == 0
  double (*max_abs_diff)(const double* x, const double* y, std::size_t n);
  // max_i (x[i] - (a + y[i])), -inf for n == 0
  double (*max_excess)(const double* x, const double* y, double a, std::size_t n);
};

enum class Backend { automatic, scalar, avx2, neon };

const KernelTable& scalar_table();
// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2_table();
const KernelTable* neon_table();

// All tables usable on this machine, scalar first.
std::vector<const KernelTable*> available_tables();

// The table used by the library. Selected once from CPU features unless the
// LIPFREE_SIMD environment variable ("scalar", "avx2", "neon") or
// set_backend() overrides it.
const KernelTable& active();

// Returns false if the requested backend is unavailable (selection unchanged).
bool set_backend(Backend backend);

// Span conveniences over the active table.
inline void axpy_neg(std::span<double> y, std::span<const double> x, double a) {
  active().axpy_neg(y.data(), x.data(), a, y.size());
}
inline void divide(std::span<double> y, double a) { active().divide(y.data(), a, y.size()); }
inline void min_plus(std::span<double> y, std::span<const double> x, double a) {
  active().min_plus(y.data(), x.data(), a, y.size());
}
inline void min_elementwise(std::span<double> y, std::span<const double> x) {
  active().min_elementwise(y.data(), x.data(), y.size());
}
inline void min_scalar(std::span<double> y, double a) { active().min_scalar(y.data(), a, y.size()); }
inline double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  return active().max_abs_diff(x.data(), y.data(), x.size());
}
inline double max_excess(std::span<const double> x, std::span<const double> y, double a) {
  return active().max_excess(x.data(), y.data(), a, x.size());
}

}  // namespace lipfree::kernels
