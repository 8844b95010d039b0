#pragma once

// Independent reference computations for small spaces. Nothing here calls
// the LP solver: the unit ball of Lip0 over a few points is a polytope whose
// vertices are the functions pinned down by a spanning tree of tight pairs,
// so they can be enumerated directly.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lipfree/matrix.hpp"

namespace oracle {

using lipfree::Index;
using lipfree::Matrix;

inline double lipschitz(const std::vector<double>& f, const Matrix& d) {
  double best = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = i + 1; j < f.size(); ++j) {
      const double diff = std::abs(f[i] - f[j]);
      if (d(i, j) > 0.0) {
        best = std::max(best, diff / d(i, j));
      } else if (diff > 0.0) {
        return INFINITY;
      }
    }
  }
  return best;
}

namespace detail {
// Every spanning tree rooted at the base can be grown one leaf at a time,
// so trying each unplaced point against each placed one reaches them all.
inline void grow_any(const Matrix& d, std::vector<double>& f, std::vector<bool>& placed, std::size_t count,
                     std::vector<std::vector<double>>& out) {
  const std::size_t n = f.size();
  if (count == n) {
    if (lipschitz(f, d) <= 1.0 + 1e-12) out.push_back(f);
    return;
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (placed[x]) continue;
    placed[x] = true;
    for (std::size_t y = 0; y < n; ++y) {
      if (!placed[y] || y == x) continue;
      for (double sign : {1.0, -1.0}) {
        f[x] = f[y] + sign * d(x, y);
        grow_any(d, f, placed, count + 1, out);
      }
    }
    placed[x] = false;
  }
}
}  // namespace detail

// Vertices of {f : f(base) = 0, |f(x) - f(y)| <= d(x, y)} (with
// duplicates). Exponential; meant for at most six points.
inline std::vector<std::vector<double>> extreme_profiles(const Matrix& d, Index base) {
  const std::size_t n = d.rows();
  std::vector<double> f(n, 0.0);
  std::vector<bool> placed(n, false);
  placed[base] = true;
  std::vector<std::vector<double>> out;
  detail::grow_any(d, f, placed, 1, out);
  return out;
}

// ||sum w_x delta_x|| as the max of the pairing over the vertices.
inline double free_norm(const std::vector<double>& weights, const Matrix& d, Index base) {
  double best = -INFINITY;
  for (const auto& f : extreme_profiles(d, base)) {
    double s = 0.0;
    for (std::size_t x = 0; x < f.size(); ++x) s += weights[x] * f[x];
    best = std::max(best, s);
  }
  return best;
}

// Norm of f |-> W f (W dense, target x domain) from Lip0(domain, d_dom)
// to Lip0(target, d_tgt): Lip(Wf) is convex in f, so its maximum over the
// unit ball sits at a vertex.
inline double operator_norm(const std::vector<std::vector<double>>& w, const Matrix& d_dom, Index base_col,
                            const Matrix& d_tgt) {
  double best = 0.0;
  for (const auto& f : extreme_profiles(d_dom, base_col)) {
    std::vector<double> g(w.size(), 0.0);
    for (std::size_t x = 0; x < w.size(); ++x) {
      for (std::size_t k = 0; k < f.size(); ++k) g[x] += w[x][k] * f[k];
    }
    best = std::max(best, lipschitz(g, d_tgt));
  }
  return best;
}

// Floyd-Warshall written out plainly.
inline Matrix closure(Matrix w) {
  const std::size_t n = w.rows();
  for (std::size_t i = 0; i < n; ++i) w(i, i) = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) w(i, j) = std::min(w(i, j), w(i, k) + w(k, j));
    }
  }
  return w;
}

inline Matrix random_metric(std::size_t n, std::mt19937_64& rng, double lo = 0.5, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix w = Matrix::square(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) w(i, j) = w(j, i) = u(rng);
  }
  return closure(w);
}

}  // namespace oracle
