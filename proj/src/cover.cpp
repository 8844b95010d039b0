#include "lipfree/cover.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace lipfree {

namespace {

std::string point_name(Index x) { return "point " + std::to_string(x); }

}  // namespace

int order(const std::vector<IndexSet>& sets, std::size_t n) {
  std::vector<int> count(n, 0);
  int best = 0;
  for (const auto& s : sets) {
    for (Index x : s) {
      if (x >= n) throw Error("order: member " + std::to_string(x) + " outside a space of " + std::to_string(n));
      best = std::max(best, ++count[x]);
    }
  }
  return best - 1;
}

bool covers(const std::vector<IndexSet>& sets, std::size_t n) {
  std::vector<char> hit(n, 0);
  for (const auto& s : sets) {
    for (Index x : s) hit.at(x) = 1;
  }
  return std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
}

std::size_t brick_steps(const GridInfo& grid, double eps) {
  const double n = double(grid.dims.size());
  double c = 1.0;
  if (grid.ground == Ground::l1) c = n;
  if (grid.ground == Ground::l2) c = std::sqrt(n);
  const double unit = c * grid.spacing;
  const double limit = eps / 6.0;
  if (!(unit > 0.0) || !(limit > 0.0)) return 0;
  auto p = static_cast<std::size_t>(std::floor(limit / unit));
  while (p > 0 && double(p) * unit >= limit) --p;
  while (double(p + 1) * unit < limit) ++p;
  return p;
}

CoverFamily brick_cover(const FiniteMetricSpace& space, double eps) {
  if (!space.grid) throw Error("brick_cover: space has no grid structure");
  if (!(eps > 0.0)) throw Error("brick_cover: eps must be positive");
  const GridInfo& grid = *space.grid;
  const std::size_t dim = grid.dims.size();
  const std::size_t p = brick_steps(grid, eps);
  if (p == 0) {
    // Only single points are small enough; they form a disjoint cover.
    CoverFamily singletons;
    for (Index x = 0; x < space.size(); ++x) singletons.sets.push_back({x});
    singletons.order_bound = 0;
    singletons.is_cover = singletons.verified = true;
    return singletons;
  }
  // Offsets along axis 0 are multiples of p / 2^(dim-1); they must stay
  // distinct after rounding to lattice steps.
  const std::size_t min_steps = std::size_t(1) << (dim - 1);
  if (dim >= 2 && p < min_steps) {
    throw Error("brick_cover: staggering in dimension " + std::to_string(dim) + " needs at least " +
                std::to_string(min_steps) + " lattice steps per brick side; eps = " + std::to_string(eps) +
                " allows " + std::to_string(p));
  }
  const long step = long(p);

  // Intervals [lo, hi] of lattice coordinates per axis for the current brick.
  std::vector<long> k(dim, 0);
  std::vector<std::pair<long, long>> span(dim);
  CoverFamily family;

  auto offset = [&](std::size_t j) {
    double s = 0.0;
    for (std::size_t i = j + 1; i < dim; ++i) {
      s += double(((k[i] % 2) + 2) % 2) / std::ldexp(1.0, int(i - j));
    }
    return long(std::floor(double(step) * s));
  };

  auto emit = [&] {
    IndexSet members;
    std::vector<std::size_t> coord(dim);
    std::function<void(std::size_t)> walk = [&](std::size_t axis) {
      if (axis == dim) {
        members.push_back(grid.index_of(coord));
        return;
      }
      const long top = long(grid.dims[axis]) - 1;
      for (long c = std::max(span[axis].first, 0L); c <= std::min(span[axis].second, top); ++c) {
        coord[axis] = std::size_t(c);
        walk(axis + 1);
      }
    };
    walk(0);
    std::sort(members.begin(), members.end());
    if (!members.empty()) family.sets.push_back(std::move(members));
  };

  std::function<void(std::size_t)> place = [&](std::size_t remaining) {
    if (remaining == 0) {
      emit();
      return;
    }
    const std::size_t j = remaining - 1;
    const long o = offset(j);
    const long top = long(grid.dims[j]) - 1;
    long first = (o > 0) ? -((o + step - 1) / step) : 0;
    for (long kj = first - 1;; ++kj) {
      const long lo = o + kj * step;
      const long hi = lo + step;
      if (lo > top) break;
      const bool meets = top == 0 ? (lo <= 0 && 0 < hi) : std::max(lo, 0L) < std::min(hi, top);
      if (!meets) continue;
      k[j] = kj;
      span[j] = {lo, hi};
      place(j);
    }
  };
  place(dim);

  family.is_cover = covers(family.sets, space.size());
  if (!family.is_cover) throw Error("brick_cover: bricks fail to cover the grid");
  const int ord = order(family.sets, space.size());
  if (ord > int(dim)) {
    throw Error("brick_cover: staggered bricks have order " + std::to_string(ord) + " > dimension " +
                std::to_string(dim));
  }
  family.order_bound = int(dim);
  family.verified = true;
  return family;
}

NetAndCover build_net_cover(const Matrix& d, Index base, double eps, const CoverFamily& refiner) {
  const std::size_t n = d.rows();
  if (base >= n) throw Error("build_net_cover: base point out of range");
  if (!(eps > 0.0)) throw Error("build_net_cover: eps must be positive");
  std::vector<IndexSet> sets = refiner.sets;
  for (auto& s : sets) s = make_index_set(std::move(s), n);
  if (!covers(sets, n)) throw Error("build_net_cover: refiner does not cover the space");
  for (std::size_t v = 0; v < sets.size(); ++v) {
    if (sets[v].empty()) continue;
    const double diam = diameter(d, sets[v]);
    if (!(diam < eps / 6.0)) {
      throw Error("build_net_cover: refiner member " + std::to_string(v) + " has diameter " + std::to_string(diam) +
                  " >= eps/6 = " + std::to_string(eps / 6.0));
    }
  }

  std::vector<int> count(n, 0);
  for (const auto& s : sets) {
    for (Index x : s) ++count[x];
  }
  std::vector<char> active(sets.size(), 1);
  for (std::size_t v = 0; v < sets.size(); ++v) {
    const bool redundant = std::all_of(sets[v].begin(), sets[v].end(), [&](Index x) { return count[x] >= 2; });
    if (!redundant) continue;
    active[v] = 0;
    for (Index x : sets[v]) --count[x];
  }

  std::size_t v0 = sets.size();
  for (std::size_t v = 0; v < sets.size(); ++v) {
    if (active[v] && contains(sets[v], base)) {
      v0 = v;
      break;
    }
  }
  for (std::size_t v = 0; v < sets.size(); ++v) {
    if (!active[v] || v == v0 || !contains(sets[v], base)) continue;
    std::erase(sets[v], base);
    --count[base];
  }

  struct Member {
    std::size_t set;
    Index representative;
  };
  std::vector<Member> members;
  for (std::size_t v = 0; v < sets.size(); ++v) {
    if (!active[v]) continue;
    if (v == v0) {
      members.push_back({v, base});
      continue;
    }
    auto it = std::find_if(sets[v].begin(), sets[v].end(), [&](Index x) { return count[x] == 1; });
    if (it == sets[v].end()) throw Error("build_net_cover: member without a private point after pruning");
    members.push_back({v, *it});
  }
  std::stable_sort(members.begin(), members.end(), [&](const Member& a, const Member& b) {
    const bool a0 = a.set == v0;
    const bool b0 = b.set == v0;
    if (a0 != b0) return a0;
    return a.representative < b.representative;
  });

  std::vector<std::size_t> kept;  // positions in `members`
  for (std::size_t m = 0; m < members.size(); ++m) {
    const Index a = members[m].representative;
    const bool far = std::all_of(kept.begin(), kept.end(),
                                 [&](std::size_t w) { return d(a, members[w].representative) > eps / 3.0; });
    if (far) kept.push_back(m);
  }

  NetAndCover out;
  out.eps = eps;
  out.order_bound = refiner.order_bound >= 0 ? refiner.order_bound : order(refiner.sets, n);
  out.sets.resize(kept.size());
  for (std::size_t w : kept) out.net.push_back(members[w].representative);
  for (const auto& m : members) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < kept.size(); ++w) {
      const double dist = d(m.representative, members[kept[w]].representative);
      if (dist < best_d) {
        best_d = dist;
        best = w;
      }
    }
    auto& u = out.sets[best];
    u.insert(u.end(), sets[m.set].begin(), sets[m.set].end());
  }
  for (auto& u : out.sets) u = make_index_set(std::move(u), n);
  return out;
}

Certificate verify_net_cover(const NetAndCover& nc, const Matrix& d, Index base) {
  const std::size_t n = d.rows();
  Json inputs = {{"eps", nc.eps}, {"order_bound", nc.order_bound}, {"net", nc.net}, {"sets", nc.sets}, {"base", base}};
  Certificate cert("net-cover", std::move(inputs));

  cert.add_fact("net and cover have equal length", nc.net.size() == nc.sets.size() && !nc.net.empty(),
                {"net " + std::to_string(nc.net.size()) + ", sets " + std::to_string(nc.sets.size())});
  if (nc.net.size() != nc.sets.size() || nc.net.empty()) return cert;
  cert.add_fact("first net point is the base point", nc.net.front() == base, {point_name(nc.net.front())});

  std::vector<int> count(n, 0);
  for (const auto& s : nc.sets) {
    for (Index x : s) {
      if (x < n) ++count[x];
    }
  }
  std::vector<std::string> uncovered;
  for (Index x = 0; x < n; ++x) {
    if (count[x] == 0 && uncovered.size() < 10) uncovered.push_back(point_name(x));
  }
  cert.add_fact("sets cover the space", uncovered.empty(), uncovered);

  std::vector<std::string> membership;
  for (std::size_t i = 0; i < nc.net.size(); ++i) {
    for (std::size_t j = 0; j < nc.sets.size(); ++j) {
      if (contains(nc.sets[j], nc.net[i]) != (i == j) && membership.size() < 10) {
        membership.push_back("net " + std::to_string(i) + " vs set " + std::to_string(j));
      }
    }
  }
  cert.add_fact("net point i lies exactly in set i", membership.empty(), membership);

  double radius = 0.0;
  std::string far_witness;
  for (std::size_t i = 0; i < nc.sets.size(); ++i) {
    for (Index x : nc.sets[i]) {
      if (d(x, nc.net[i]) > radius) {
        radius = d(x, nc.net[i]);
        far_witness = "set " + std::to_string(i) + ", " + point_name(x);
      }
    }
  }
  cert.add("sets inside open eps/2 balls", Bound::less, radius, nc.eps / 2.0, 0.0, {far_witness});

  double separation = std::numeric_limits<double>::infinity();
  std::string close_witness;
  for (std::size_t i = 0; i < nc.net.size(); ++i) {
    for (std::size_t j = i + 1; j < nc.net.size(); ++j) {
      if (d(nc.net[i], nc.net[j]) < separation) {
        separation = d(nc.net[i], nc.net[j]);
        close_witness = "net " + std::to_string(i) + " and " + std::to_string(j);
      }
    }
  }
  cert.add("net separation", Bound::greater, separation, nc.eps / 3.0, 0.0, {close_witness});
  cert.add("order", Bound::less_equal, double(order(nc.sets, n)), double(nc.order_bound));
  return cert;
}

}  // namespace lipfree
