#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lipfree/free_norm.hpp"
#include "oracles.hpp"

using namespace lipfree;

namespace {

Matrix line(const std::vector<double>& xs) {
  Matrix d = Matrix::square(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < xs.size(); ++j) d(i, j) = std::abs(xs[i] - xs[j]);
  }
  return d;
}

FreeElement random_element(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<Term> terms;
  for (Index x = 0; x < n; ++x) {
    if (rng() % 3 != 0) terms.push_back({x, u(rng)});
  }
  return FreeElement::from_terms(std::move(terms));
}

std::vector<double> dense(const FreeElement& mu, std::size_t n) {
  std::vector<double> w(n, 0.0);
  for (const auto& t : mu.terms) w[t.point] += t.weight;
  return w;
}

TEST(FreeElement, TermsAreSortedMergedAndNonzero) {
  const auto mu = FreeElement::from_terms({{3, 1.0}, {1, 2.0}, {3, -1.0}, {2, 0.0}, {1, 0.5}});
  ASSERT_EQ(mu.terms.size(), 1u);
  EXPECT_EQ(mu.terms[0], (Term{1, 2.5}));
  EXPECT_DOUBLE_EQ(mu.evaluate({0.0, 2.0, 7.0, 9.0}), 5.0);
  EXPECT_TRUE(FreeElement::from_terms({}).empty());
}

TEST(Lipschitz, Examples) {
  const auto d = line({0, 1, 3});
  std::vector<double> dist_to_base{0, 1, 3};
  EXPECT_DOUBLE_EQ(lipschitz_constant(dist_to_base, d), 1.0);
  EXPECT_EQ(lipschitz_constant({0, 0, 0}, d), 0.0);
  EXPECT_DOUBLE_EQ(lipschitz_constant({0, 2, 3}, d), 2.0);
  const auto w = lipschitz_constant_witness({0, 2, 3}, d);
  EXPECT_EQ(std::minmax(w.x, w.y), std::minmax(Index{0}, Index{1}));
  EXPECT_DOUBLE_EQ(lipschitz_constant_on({0, 2, 3}, d, {0, 2}), 1.0);
}

TEST(Lipschitz, PseudometricZeroDistanceWithJumpIsInfinite) {
  const Matrix p = Matrix::from_rows({{0, 0, 1}, {0, 0, 1}, {1, 1, 0}});
  EXPECT_TRUE(std::isinf(lipschitz_constant({0, 1, 0}, p)));
  EXPECT_DOUBLE_EQ(lipschitz_constant({0, 0, 2}, p), 2.0);
}

TEST(FreeNorm, Examples) {
  const auto two = line({0, 2});
  EXPECT_DOUBLE_EQ(free_space_norm(FreeElement::delta(1), two, 0), 2.0);
  EXPECT_EQ(free_space_norm(FreeElement{}, two, 0), 0.0);
  // base 0, a = 1, b = 2 on a line: delta_b - 2 delta_a.
  const auto l = line({0, 1, 2});
  const auto mu = FreeElement::from_terms({{2, 1.0}, {1, -2.0}});
  EXPECT_NEAR(free_space_norm(mu, l, 0), 2.0, 1e-12);
  EXPECT_NEAR(oracle::free_norm(dense(mu, 3), l, 0), 2.0, 1e-12);
}

TEST(FreeNorm, MoleculeIdentityOnRandomSpaces) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto space = make_random_space(3 + trial % 8, 100 + trial);
    const Index base = trial % space.size();
    for (Index x = 0; x < space.size(); ++x) {
      for (Index y = 0; y < space.size(); ++y) {
        if (x == y) continue;
        EXPECT_NEAR(free_space_norm(FreeElement::molecule(x, y), space.dist, base), space.dist(x, y), 1e-9);
      }
    }
  }
}

TEST(FreeNorm, AgreesWithVertexEnumeration) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + trial % 4;
    const auto d = oracle::random_metric(n, rng);
    const Index base = rng() % n;
    const auto mu = random_element(n, rng);
    const double expected = oracle::free_norm(dense(mu, n), d, base);
    EXPECT_NEAR(free_space_norm(mu, d, base), expected, 1e-9);
    FreeNormOptions plain;
    plain.restrict_to_support = plain.prune_redundant_pairs = plain.closed_form = false;
    EXPECT_NEAR(free_space_norm(mu, d, base, plain), expected, 1e-9);
  }
}

TEST(FreeNorm, IsANorm) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const auto space = make_random_space(8, 200 + trial);
    const auto a = random_element(8, rng), b = random_element(8, rng);
    const double na = free_space_norm(a, space.dist, 0), nb = free_space_norm(b, space.dist, 0);
    std::vector<Term> sum = a.terms;
    sum.insert(sum.end(), b.terms.begin(), b.terms.end());
    EXPECT_LE(free_space_norm(FreeElement::from_terms(sum), space.dist, 0), na + nb + 1e-7);
    std::vector<Term> scaled = a.terms;
    for (auto& t : scaled) t.weight *= -2.5;
    EXPECT_NEAR(free_space_norm(FreeElement::from_terms(scaled), space.dist, 0), 2.5 * na, 1e-7);
    EXPECT_GE(na, 0.0);
  }
}

TEST(FreeNorm, BasePointTermsDoNotMatter) {
  const auto space = make_random_space(6, 5);
  const auto mu = FreeElement::from_terms({{1, 1.0}, {3, -0.5}});
  const auto with_base = FreeElement::from_terms({{1, 1.0}, {3, -0.5}, {0, 7.0}});
  EXPECT_NEAR(free_space_norm(mu, space.dist, 0), free_space_norm(with_base, space.dist, 0), 1e-12);
}

TEST(McShane, Examples) {
  const auto d = line({0, 1, 2, 4});
  const std::vector<Index> all{0, 1, 2, 3};
  const std::vector<double> f{0, 0.5, 1, 0};
  EXPECT_EQ(mcshane_extend(all, f, 1.0, d), f);
  const auto z = mcshane_extend({0, 2}, {0, 0}, 3.0, d);
  EXPECT_EQ(z, (std::vector<double>{0, 3, 0, 6}));
  EXPECT_THROW(mcshane_extend({0, 1}, {0, 5}, 1.0, d), Error);
}

TEST(McShane, RestrictsExactlyAndKeepsTheConstant) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto space = make_random_space(12, 300 + trial);
    const std::vector<Index> a{0, 2, 5, 9};
    std::vector<double> vals;
    for (std::size_t k = 0; k < a.size(); ++k) vals.push_back(u(rng));
    std::vector<double> f_full(12, 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) f_full[a[k]] = vals[k];
    const double lip = lipschitz_constant_on(f_full, space.dist, a);
    const auto ext = mcshane_extend(a, vals, lip, space.dist);
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(ext[a[k]], vals[k]);
    EXPECT_LE(lipschitz_constant(ext, space.dist), lip * (1 + 1e-12) + 1e-15);
  }
}

TEST(WeightOperator, IdentityAndConstants) {
  const auto id = identity_operator(4);
  const std::vector<double> f{0, 1, -2, 5};
  EXPECT_EQ(apply_weight_operator(id, f), f);
  EXPECT_EQ(extension_defect(id), 0.0);

  WeightOperator w;
  w.domain = {0, 3};
  w.partition_type = true;
  w.rows = {make_weight_row({{0, 1.0}}), make_weight_row({{0, 0.25}, {1, 0.75}}),
            make_weight_row({{0, 0.5}, {1, 0.5}}), make_weight_row({{1, 1.0}})};
  EXPECT_TRUE(is_partition_type(w));
  const auto c = apply_weight_operator(w, {2.0, 2.0});
  for (double v : c) EXPECT_DOUBLE_EQ(v, 2.0);
  EXPECT_EQ(extension_defect(w), 0.0);
  EXPECT_THROW(apply_weight_operator(w, {1.0}), Error);
  EXPECT_EQ(w.row_difference(1, 2).terms, FreeElement::from_terms({{0, -0.25}, {1, 0.25}}).terms);
}

TEST(OperatorNorm, ZeroAndIdentity) {
  const auto space = make_random_space(6, 9);
  EXPECT_NEAR(operator_norm(identity_operator(6), space.dist, space.dist, 0).norm, 1.0, 1e-12);
  WeightOperator zero;
  zero.domain = {0, 1, 2, 3, 4, 5};
  zero.rows.assign(6, {});
  EXPECT_EQ(operator_norm(zero, space.dist, space.dist, 0).norm, 0.0);
}

WeightOperator random_partition(const std::vector<Index>& domain, std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  WeightOperator w;
  w.domain = domain;
  w.partition_type = true;
  for (Index x = 0; x < n; ++x) {
    std::vector<Weight> row;
    const auto it = std::find(domain.begin(), domain.end(), x);
    if (it != domain.end()) {
      row.push_back({std::size_t(it - domain.begin()), 1.0});
    } else {
      double total = 0.0;
      std::vector<double> raw(domain.size());
      for (auto& r : raw) total += (r = u(rng) < 0.4 ? 0.0 : u(rng));
      if (total == 0.0) raw[0] = total = 1.0;
      for (std::size_t k = 0; k < raw.size(); ++k) {
        if (raw[k] > 0) row.push_back({k, raw[k] / total});
      }
    }
    w.rows.push_back(make_weight_row(std::move(row)));
  }
  return w;
}

TEST(OperatorNorm, MoleculeReductionMatchesExtremeProfiles) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 5 + trial % 4;
    const auto space = make_random_space(n, 400 + trial);
    std::vector<Index> domain{0, 1};
    for (Index x = 2; x < n && domain.size() < std::size_t(2 + trial % 3); ++x) {
      if (rng() % 2) domain.push_back(x);
    }
    const auto w = random_partition(domain, n, rng);
    const Matrix d_dom = space.dist.restrict_to(domain);
    std::vector<std::vector<double>> dense_w;
    for (Index x = 0; x < n; ++x) dense_w.push_back(w.dense_row(x));
    const double expected = oracle::operator_norm(dense_w, d_dom, 0, space.dist);
    for (PairSweep sweep : {PairSweep::all, PairSweep::essential}) {
      EXPECT_NEAR(operator_norm(w, d_dom, space.dist, 0, {sweep, {}}).norm, expected, 1e-9);
    }
  }
}

TEST(MetricExtension, TrivialCases) {
  const auto space = make_random_space(7, 10);
  const IndexSet s{1, 3, 4};
  const auto same = metric_extension_lp(space.dist, s, space.dist.restrict_to(s));
  EXPECT_NEAR(same.distortion, 0.0, 1e-12);
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t j = 0; j < 7; ++j) EXPECT_NEAR(same.metric(i, j), space.dist(i, j), 1e-9);
  }
  IndexSet all{0, 1, 2, 3, 4, 5, 6};
  const auto other = make_random_space(7, 11);
  EXPECT_EQ(metric_extension_lp(space.dist, all, other.dist).metric, other.dist);
  EXPECT_EQ(metric_extension_paths(space.dist, all, other.dist).metric, other.dist);
}

TEST(MetricExtension, DistortionMatchesTheBoundAndPinsS) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 15; ++trial) {
    const auto space = make_random_space(8, 500 + trial);
    IndexSet s{0, 2, 5, 6};
    const Matrix rho = oracle::random_metric(s.size(), rng, 0.5, 2.0);
    for (const auto& ext : {metric_extension_lp(space.dist, s, rho), metric_extension_paths(space.dist, s, rho)}) {
      EXPECT_TRUE(validate_metric(ext.metric).valid());
      EXPECT_EQ(ext.metric.restrict_to(s), rho);
      EXPECT_LE(ext.distortion, ext.bound + 1e-9);
      EXPECT_DOUBLE_EQ(ext.distortion, sup_distance(ext.metric, space.dist));
      EXPECT_DOUBLE_EQ(ext.bound, sup_distance(rho, space.dist.restrict_to(s)));
    }
  }
  const auto space = make_random_space(5, 1);
  const Matrix bad = Matrix::from_rows({{0, 1, 3}, {1, 0, 1}, {3, 1, 0}});
  EXPECT_THROW(metric_extension_lp(space.dist, {0, 1, 2}, bad), Error);
}

}  // namespace
