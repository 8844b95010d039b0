#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>

#include "lipfree/kernels.hpp"
#include "lipfree/metric.hpp"

namespace k = lipfree::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

class KernelEquivalence : public ::testing::TestWithParam<std::size_t> {};

TEST_P(KernelEquivalence, EveryTableMatchesScalarBitForBit) {
  const std::size_t n = GetParam();
  std::mt19937_64 rng(n * 7919 + 3);
  const auto& ref = k::scalar_table();
  for (const k::KernelTable* t : k::available_tables()) {
    SCOPED_TRACE(std::string(t->name));
    for (int trial = 0; trial < 20; ++trial) {
      const auto x = random_vector(n, rng);
      const auto y0 = random_vector(n, rng);
      const double a = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);

      auto ys = y0, yt = y0;
      ref.axpy_neg(ys.data(), x.data(), a, n);
      t->axpy_neg(yt.data(), x.data(), a, n);
      EXPECT_TRUE(same_bits(ys, yt));

      ys = y0, yt = y0;
      ref.divide(ys.data(), a, n);
      t->divide(yt.data(), a, n);
      EXPECT_TRUE(same_bits(ys, yt));

      ys = y0, yt = y0;
      ref.min_plus(ys.data(), x.data(), a, n);
      t->min_plus(yt.data(), x.data(), a, n);
      EXPECT_TRUE(same_bits(ys, yt));

      ys = y0, yt = y0;
      ref.min_elementwise(ys.data(), x.data(), n);
      t->min_elementwise(yt.data(), x.data(), n);
      EXPECT_TRUE(same_bits(ys, yt));

      ys = y0, yt = y0;
      ref.min_scalar(ys.data(), a, n);
      t->min_scalar(yt.data(), a, n);
      EXPECT_TRUE(same_bits(ys, yt));

      EXPECT_TRUE(same_bits(ref.max_abs_diff(x.data(), y0.data(), n), t->max_abs_diff(x.data(), y0.data(), n)));
      EXPECT_TRUE(
          same_bits(ref.max_excess(x.data(), y0.data(), a, n), t->max_excess(x.data(), y0.data(), a, n)));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Lengths, KernelEquivalence,
                         ::testing::Values(0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 101, 1000));

TEST(Kernels, InfinitiesPropagateIdentically) {
  const double inf = std::numeric_limits<double>::infinity();
  for (const k::KernelTable* t : k::available_tables()) {
    std::vector<double> y{inf, 1.0, inf, 2.0, inf, 0.5, 3.0, inf, 1.0};
    std::vector<double> x{1.0, inf, 0.0, inf, 2.0, 0.25, inf, inf, 0.0};
    t->min_plus(y.data(), x.data(), 1.0, y.size());
    EXPECT_EQ(y, (std::vector<double>{2.0, 1.0, 1.0, 2.0, 3.0, 0.5, 3.0, inf, 1.0})) << t->name;
  }
}

TEST(Kernels, EmptyReductions) {
  for (const k::KernelTable* t : k::available_tables()) {
    EXPECT_EQ(t->max_abs_diff(nullptr, nullptr, 0), 0.0);
    EXPECT_EQ(t->max_excess(nullptr, nullptr, 1.0, 0), -std::numeric_limits<double>::infinity());
  }
}

TEST(Kernels, ScalarIsAlwaysAvailableAndFirst) {
  const auto tables = k::available_tables();
  ASSERT_FALSE(tables.empty());
  EXPECT_EQ(tables.front()->name, k::scalar_table().name);
}

TEST(Kernels, BackendSwitchGivesIdenticalClosure) {
  auto space = lipfree::make_random_space(60, 11);
  lipfree::Matrix w = space.dist;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = i + 1; j < w.rows(); ++j) w(i, j) = w(j, i) = u(rng);
  }
  ASSERT_TRUE(k::set_backend(k::Backend::scalar));
  const auto reference = lipfree::shortest_path_closure(w);
  for (const k::KernelTable* t : k::available_tables()) {
    if (t->name == "avx2") {
      ASSERT_TRUE(k::set_backend(k::Backend::avx2));
    }
    if (t->name == "neon") {
      ASSERT_TRUE(k::set_backend(k::Backend::neon));
    }
    EXPECT_EQ(lipfree::shortest_path_closure(w), reference) << t->name;
  }
  ASSERT_TRUE(k::set_backend(k::Backend::automatic));
}

TEST(Kernels, UnavailableBackendLeavesSelectionUnchanged) {
  const auto before = &k::active();
#if defined(__x86_64__)
  EXPECT_FALSE(k::set_backend(k::Backend::neon));
#else
  EXPECT_FALSE(k::set_backend(k::Backend::avx2));
#endif
  EXPECT_EQ(&k::active(), before);
}

}  // namespace
