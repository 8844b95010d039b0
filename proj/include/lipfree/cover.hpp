#pragma once

// Families of point subsets: their order, staggered brick covers of grid
// spaces, and the net-and-cover construction with its verifier.

#include <vector>

#include "lipfree/certificate.hpp"
#include "lipfree/matrix.hpp"
#include "lipfree/metric.hpp"

namespace lipfree {

struct CoverFamily {
  std::vector<IndexSet> sets;
  int order_bound = -1;  // -1 when no bound is claimed
  bool is_cover = false;
  bool verified = false;
};

// Largest membership multiplicity minus one; -1 when every set is empty.
int order(const std::vector<IndexSet>& sets, std::size_t n);
inline int order(const CoverFamily& family, std::size_t n) { return order(family.sets, n); }

bool covers(const std::vector<IndexSet>& sets, std::size_t n);

// Closed axis-aligned bricks of p lattice steps per side, p the largest
// integer with diameter < eps / 6, staggered so that at most n + 1 bricks
// meet at any point of an n-dimensional grid. When p = 0 the bricks are
// single points (order 0). Throws Error if the space carries no grid
// metadata, if 0 < p < 2^(n-1) on a grid of dimension n >= 2 (too short
// to stagger), or if the result would exceed order n.
CoverFamily brick_cover(const FiniteMetricSpace& space, double eps);

// Brick side in lattice steps that brick_cover uses (0 when none fits).
std::size_t brick_steps(const GridInfo& grid, double eps);

struct NetAndCover {
  std::vector<Index> net;       // net[0] is the base point a0
  std::vector<IndexSet> sets;   // sets[i] is U_i, paired with net[i]
  double eps = 0.0;
  int order_bound = 0;          // r

  std::size_t size() const { return net.size(); }
};

// Prunes redundant members of the refiner, removes a0 from every member but
// one, picks a private representative per member, keeps a greedy maximal
// eps/3-separated subfamily (a0 first, then by representative index) and
// merges every member into the kept member with the nearest representative.
// Throws Error if the refiner does not cover or has a member of diameter
// >= eps / 6.
NetAndCover build_net_cover(const Matrix& d, Index base, double eps, const CoverFamily& refiner);

// Coverage, a_i in U_j iff i = j, U_i inside the open eps/2-ball around
// a_i, pairwise net distances > eps/3, order <= r and a0 = net[0].
Certificate verify_net_cover(const NetAndCover& nc, const Matrix& d, Index base);

}  // namespace lipfree
