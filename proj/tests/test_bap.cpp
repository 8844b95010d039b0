#include <gtest/gtest.h>

#include "lipfree/bap.hpp"
#include "lipfree/cover.hpp"
#include "lipfree/extension.hpp"

using namespace lipfree;

namespace {

WeightOperator extension_from_net(const FiniteMetricSpace& s, double eps) {
  const auto nc = build_net_cover(s.dist, s.base, eps, brick_cover(s, eps));
  return partition_of_unity(s.dist, nc.net, nc.sets);
}

WeightOperator scaled(WeightOperator w, double c) {
  for (auto& row : w.rows) {
    std::vector<Weight> entries;
    for (auto e : row) entries.push_back({e.column, e.value * c});
    row = make_weight_row(std::move(entries));
  }
  w.partition_type = w.partition_type && c == 1.0;
  return w;
}

TEST(Defect, ExtensionOperatorHasZeroDefect) {
  const auto s = make_grid_space({65}, 1.0 / 64.0);
  const auto w = extension_from_net(s, 0.25);
  EXPECT_EQ(godefroy_defect(w, s.dist, s.base).defect, 0.0);
}

TEST(Defect, ZeroOperatorGivesTheFarthestNetPoint) {
  const auto s = make_grid_space({65}, 1.0 / 64.0);
  const auto w = scaled(extension_from_net(s, 0.25), 0.0);
  const auto r = godefroy_defect(w, s.dist, s.base);
  double expected = 0.0;
  Index far = 0;
  for (Index a : w.domain) {
    if (s.dist(a, s.base) > expected) expected = s.dist(a, s.base), far = a;
  }
  EXPECT_NEAR(r.defect, expected, 1e-12);
  EXPECT_EQ(r.witness, far);
}

TEST(Defect, OnlyRowsAtTheNetMatter) {
  const auto s = make_grid_space({65}, 1.0 / 64.0);
  auto w = extension_from_net(s, 0.25);
  const double before = godefroy_defect(w, s.dist, s.base).defect;
  // Scramble rows away from the net.
  for (Index x = 0; x < w.rows.size(); ++x) {
    if (std::find(w.domain.begin(), w.domain.end(), x) == w.domain.end()) w.rows[x] = make_weight_row({{0, 1.0}});
  }
  EXPECT_EQ(godefroy_defect(w, s.dist, s.base).defect, before);
}

TEST(Defect, ScalingInterpolatesBetweenTheCases) {
  const auto s = make_grid_space({33}, 1.0 / 32.0);
  const auto w = extension_from_net(s, 0.25);
  const auto zero = godefroy_defect(scaled(w, 0.0), s.dist, s.base).defect;
  const auto half = godefroy_defect(scaled(w, 0.5), s.dist, s.base).defect;
  // row - delta_x = (c - 1) delta_x on the net, so the defect is linear in |c - 1|.
  EXPECT_NEAR(half, 0.5 * zero, 1e-12);
}

TEST(Defect, BaseOutsideTheNetThrows) {
  const auto s = make_grid_space({33}, 1.0 / 32.0);
  auto w = extension_from_net(s, 0.25);
  Index outside = 0;
  while (std::find(w.domain.begin(), w.domain.end(), outside) != w.domain.end()) ++outside;
  EXPECT_THROW(godefroy_defect(w, s.dist, outside), Error);
}

TEST(BapCertificate, ExtensionSequencePassesAtItsOwnNorm) {
  const auto s = make_grid_space({129}, 1.0 / 128.0);
  std::vector<BapStage> stages;
  for (std::size_t n : {2, 4, 8}) {
    stages.push_back({n, 1.0 / double(n), extension_from_net(s, 1.0 / (10.0 * double(n))), "extension"});
  }
  BapOptions opts;
  opts.lambda = 880.0;
  auto rep = bap_certificate(stages, s.dist, s.base, opts);
  ASSERT_EQ(rep.rows.size(), 3u);
  double worst = 0.0;
  for (const auto& r : rep.rows) {
    EXPECT_EQ(r.defect, 0.0);
    worst = std::max(worst, r.norm);
  }
  opts.lambda = worst;
  rep = bap_certificate(stages, s.dist, s.base, opts);
  EXPECT_TRUE(rep.certificate.passed());
  const auto csv = bap_csv(rep);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,net_size,eps_n,norm,defect,witness");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(BapCertificate, ConstantOperatorsFailWithWitnesses) {
  const auto s = make_grid_space({65}, 1.0 / 64.0);
  std::vector<BapStage> stages;
  for (std::size_t n : {2, 4, 8}) {
    auto w = extension_from_net(s, 1.0 / (10.0 * double(n)));
    for (auto& row : w.rows) row = make_weight_row({{0, 1.0}});  // everything maps to f(a0) = 0
    stages.push_back({n, 1.0 / double(n), w, "constant"});
  }
  BapOptions opts;
  opts.lambda = 880.0;
  const auto rep = bap_certificate(stages, s.dist, s.base, opts);
  EXPECT_FALSE(rep.certificate.passed());
  const Check* bad = rep.certificate.first_failure();
  ASSERT_NE(bad, nullptr);
  EXPECT_FALSE(bad->witnesses.empty());
}

TEST(BapCertificate, DensityPreconditionThrows) {
  const auto s = make_grid_space({65}, 1.0 / 64.0);
  std::vector<BapStage> stages{{64, 1.0 / 64.0 / 2.0, extension_from_net(s, 0.25), "too coarse"}};
  EXPECT_THROW(bap_certificate(stages, s.dist, s.base, {}), Error);
}

}  // namespace
