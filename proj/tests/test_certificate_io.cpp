#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>

#include "lipfree/certificate.hpp"
#include "lipfree/io.hpp"

using namespace lipfree;

namespace {

TEST(Judge, StrictRelationsGetNoSlack) {
  EXPECT_TRUE(judge(Bound::less, 0.999, 1.0, 0.1).pass);
  EXPECT_FALSE(judge(Bound::less, 1.0, 1.0, 0.1).pass);
  EXPECT_FALSE(judge(Bound::greater, 1.0, 1.0, 0.1).pass);
  EXPECT_TRUE(judge(Bound::greater, 1.0 + 1e-15, 1.0, 0.0).pass);
}

TEST(Judge, NonStrictRelationsWarnInsideTheSlack) {
  auto v = judge(Bound::less_equal, 1.0, 1.0, 1e-7);
  EXPECT_TRUE(v.pass);
  EXPECT_FALSE(v.warning);
  v = judge(Bound::less_equal, 1.0 + 5e-8, 1.0, 1e-7);
  EXPECT_TRUE(v.pass);
  EXPECT_TRUE(v.warning);
  EXPECT_FALSE(judge(Bound::less_equal, 1.0 + 2e-7, 1.0, 1e-7).pass);
  v = judge(Bound::greater_equal, 1.0 - 5e-8, 1.0, 1e-7);
  EXPECT_TRUE(v.pass && v.warning);
  EXPECT_TRUE(judge(Bound::equal, 1.0 + 1e-9, 1.0, 1e-8).pass);
  EXPECT_FALSE(judge(Bound::equal, 1.0 + 1e-7, 1.0, 1e-8).pass);
  EXPECT_FALSE(judge(Bound::less_equal, NAN, 1.0, 1.0).pass);
  EXPECT_TRUE(judge(Bound::holds, 1.0, 1.0, 0.0).pass);
  EXPECT_FALSE(judge(Bound::holds, 0.0, 1.0, 0.0).pass);
}

TEST(Bound, NamesRoundTrip) {
  for (Bound b : {Bound::less, Bound::less_equal, Bound::greater, Bound::greater_equal, Bound::equal, Bound::holds}) {
    EXPECT_EQ(bound_from_string(to_string(b)), b);
  }
  EXPECT_THROW(bound_from_string("~"), Error);
}

Certificate sample() {
  Certificate c("sample", {{"eps", 0.25}, {"space", "grid"}});
  c.add("a < b", Bound::less, 1.0, 2.0);
  c.add("x <= y", Bound::less_equal, 2.0 + 1e-9, 2.0, 1e-7, {"point 3"});
  c.add_fact("things hold", true);
  c.add("unbounded below", Bound::greater_equal, INFINITY, 1.0);
  c.payload()["note"] = "kept";
  return c;
}

TEST(Certificate, PassFailAndWarnings) {
  auto c = sample();
  EXPECT_TRUE(c.passed());
  EXPECT_TRUE(c.has_warnings());
  EXPECT_EQ(c.first_failure(), nullptr);
  EXPECT_FALSE(c.add("fails", Bound::less, 3.0, 2.0));
  EXPECT_FALSE(c.passed());
  EXPECT_EQ(c.first_failure()->name, "fails");
  EXPECT_FALSE(Certificate("empty", {}).passed());
}

TEST(Certificate, AbsorbPrefixesNames) {
  Certificate outer("outer", {});
  outer.absorb(sample(), "inner: ");
  EXPECT_NE(outer.find("inner: a < b"), nullptr);
  EXPECT_EQ(outer.checks().size(), sample().checks().size());
}

TEST(Certificate, JsonRoundTripAndRecheck) {
  const auto c = sample();
  const Json j = c.to_json();
  EXPECT_EQ(j.at("kind"), "sample");
  EXPECT_EQ(j.at("checks").size(), 4u);
  const auto back = Certificate::from_json(j);
  EXPECT_EQ(back.to_json(), j);
  EXPECT_EQ(back.inputs_hash(), c.inputs_hash());
  const auto r = recheck(j);
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.problems.empty());
  // Non-finite measurements survive serialization.
  EXPECT_EQ(j.at("checks").at(3).at("measured"), "inf");
  EXPECT_TRUE(std::isinf(back.checks().at(3).measured));
}

TEST(Certificate, RecheckCatchesTampering) {
  Json j = sample().to_json();
  j["inputs"]["eps"] = 0.5;
  EXPECT_FALSE(recheck(j).pass);

  j = sample().to_json();
  j["checks"][0]["measured"] = 5.0;  // verdict says pass, numbers say fail
  EXPECT_FALSE(recheck(j).pass);

  j = sample().to_json();
  j["pass"] = false;
  EXPECT_FALSE(recheck(j).pass);

  j = sample().to_json();
  j["checks"] = Json::array();
  j["pass"] = false;
  EXPECT_FALSE(recheck(j).pass);
}

TEST(Hash, StableAndSensitive) {
  const Json a = {{"x", 1}, {"y", {1, 2, 3}}};
  Json b = a;
  EXPECT_EQ(fnv1a_hash(a), fnv1a_hash(b));
  b["y"][2] = 4;
  EXPECT_NE(fnv1a_hash(a), fnv1a_hash(b));
  EXPECT_EQ(hash_hex(0xabcULL), "0000000000000abc");
}

TEST(Io, MatricesRoundTripBitExactly) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  Matrix m = Matrix::square(7);
  for (double& v : m.data()) v = u(rng) / 3.0;
  m(1, 2) = INFINITY;
  const Matrix back = matrix_from_json(Json::parse(matrix_to_json(m).dump()));
  for (std::size_t i = 0; i < m.data().size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(m.data()[i]), std::bit_cast<std::uint64_t>(back.data()[i]));
  }
  EXPECT_THROW(matrix_from_json(Json::parse("[[0, 1], [1]]")), Error);
  EXPECT_THROW(matrix_from_json(Json::parse("{}")), Error);
}

TEST(Io, SpacesRoundTrip) {
  const auto g = make_grid_space({4, 3}, 0.125, Ground::l2);
  const auto back = space_from_json(Json::parse(space_to_json(g).dump()));
  EXPECT_EQ(back.dist, g.dist);
  EXPECT_EQ(back.grid, g.grid);
  EXPECT_EQ(back.names, g.names);

  const auto gen = space_from_json({{"generator", "grid"}, {"dims", {4, 3}}, {"spacing", 0.125}, {"ground", "l2"}});
  EXPECT_EQ(gen.dist, g.dist);
  const auto rnd = space_from_json({{"generator", "random"}, {"n", 9}, {"seed", 4}, {"base_point", 2}});
  EXPECT_EQ(rnd.dist, make_random_space(9, 4).dist);
  EXPECT_EQ(rnd.base, 2u);

  EXPECT_THROW(space_from_json({{"generator", "sphere"}}), Error);
  EXPECT_THROW(space_from_json({{"metric", {{0, 1, 3}, {1, 0, 1}, {3, 1, 0}}}}), Error);
  EXPECT_THROW(space_from_json({{"generator", "random"}, {"n", 3}, {"base_point", 3}}), Error);
}

TEST(Io, CoversOperatorsAndElementsRoundTrip) {
  NetAndCover nc{{0, 5}, {{0, 1, 2}, {3, 4, 5}}, 0.5, 1};
  const auto nb = net_cover_from_json(net_cover_to_json(nc));
  EXPECT_EQ(nb.net, nc.net);
  EXPECT_EQ(nb.sets, nc.sets);
  EXPECT_EQ(nb.eps, nc.eps);
  EXPECT_EQ(nb.order_bound, nc.order_bound);

  CoverFamily c{{{0, 1}, {1, 2}}, 1, true, true};
  const auto cb = cover_from_json(cover_to_json(c));
  EXPECT_EQ(cb.sets, c.sets);
  EXPECT_EQ(cb.order_bound, 1);

  const auto mu = FreeElement::from_terms({{2, 0.1}, {4, -1.0 / 3.0}});
  EXPECT_EQ(free_element_from_json(free_element_to_json(mu)).terms, mu.terms);

  WeightOperator w;
  w.domain = {0, 3};
  w.partition_type = true;
  w.rows = {make_weight_row({{0, 1.0}}), make_weight_row({{0, 1.0 / 3.0}, {1, 2.0 / 3.0}})};
  const auto wb = weight_operator_from_json(Json::parse(weight_operator_to_json(w).dump()));
  EXPECT_EQ(wb.domain, w.domain);
  EXPECT_EQ(wb.rows, w.rows);
  EXPECT_TRUE(wb.partition_type);
  Json bad = weight_operator_to_json(w);
  bad["rows"][1][0][0] = 7;
  EXPECT_THROW(weight_operator_from_json(bad), Error);
}

TEST(Io, CsvEscapesNames) {
  Certificate c("k", {});
  c.add("a, \"b\"", Bound::less, 1.0, 2.0);
  const auto csv = certificate_csv(c);
  EXPECT_NE(csv.find("\"a; ;b;\""), std::string::npos);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "name,relation,claimed,measured,tol,pass,warning");
}

}  // namespace
