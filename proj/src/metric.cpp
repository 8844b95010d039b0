#include "lipfree/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lipfree/kernels.hpp"

namespace lipfree {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (!m.is_square()) {
    throw Error(std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                std::to_string(m.cols()) + ", expected square");
  }
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(std::string(what) + ": shape mismatch (" + std::to_string(a.rows()) + " vs " +
                std::to_string(b.rows()) + " points)");
  }
}

void require_nonempty(const IndexSet& s, const char* what) {
  if (s.empty()) throw Error(std::string(what) + ": empty set");
}

}  // namespace

std::string to_string(Ground g) {
  switch (g) {
    case Ground::linf:
      return "linf";
    case Ground::l1:
      return "l1";
    case Ground::l2:
      return "l2";
  }
  return "linf";
}

Ground ground_from_string(const std::string& s) {
  if (s == "linf") return Ground::linf;
  if (s == "l1") return Ground::l1;
  if (s == "l2") return Ground::l2;
  throw Error("unknown ground metric '" + s + "' (expected linf, l1 or l2)");
}

std::string to_string(Axiom a) {
  switch (a) {
    case Axiom::diagonal:
      return "diagonal";
    case Axiom::symmetry:
      return "symmetry";
    case Axiom::nonnegativity:
      return "nonnegativity";
    case Axiom::separation:
      return "separation";
    case Axiom::triangle:
      return "triangle";
  }
  return "unknown";
}

std::size_t GridInfo::point_count() const {
  std::size_t n = 1;
  for (auto k : dims) n *= k;
  return dims.empty() ? 0 : n;
}

std::vector<std::size_t> GridInfo::lattice(Index point) const {
  std::vector<std::size_t> c(dims.size());
  for (std::size_t a = 0; a < dims.size(); ++a) {
    c[a] = point % dims[a];
    point /= dims[a];
  }
  return c;
}

Index GridInfo::index_of(const std::vector<std::size_t>& c) const {
  Index idx = 0;
  for (std::size_t a = dims.size(); a-- > 0;) idx = idx * dims[a] + c[a];
  return idx;
}

FiniteMetricSpace make_space(Matrix dist, Index base, std::vector<std::string> names, double tol) {
  require_square(dist, "make_space");
  const auto report = validate_metric(dist, {.tol = tol});
  if (!report.valid()) {
    const auto& v = report.violations.front();
    throw Error("not a metric: " + to_string(v.axiom) + " violated at (" + std::to_string(v.i) +
                ", " + std::to_string(v.k) + ", " + std::to_string(v.j) + ")");
  }
  const std::size_t n = dist.rows();
  if (n == 0) throw Error("make_space: empty space");
  if (base >= n) throw Error("base point " + std::to_string(base) + " out of range");
  if (names.empty()) {
    for (std::size_t i = 0; i < n; ++i) names.push_back("p" + std::to_string(i));
  } else if (names.size() != n) {
    throw Error("make_space: " + std::to_string(names.size()) + " names for " + std::to_string(n) +
                " points");
  }
  return FiniteMetricSpace{std::move(names), std::move(dist), base, std::nullopt};
}

ValidationReport validate_metric(const Matrix& m, const ValidateOptions& opts) {
  require_square(m, "validate_metric");
  ValidationReport report;
  const std::size_t n = m.rows();
  auto record = [&](Axiom a, Index i, Index j, Index k, double excess) {
    ++report.total;
    if (report.violations.size() < opts.max_witnesses) report.violations.push_back({a, i, j, k, excess});
  };
  for (Index i = 0; i < n; ++i) {
    if (std::abs(m(i, i)) > opts.tol || std::isnan(m(i, i))) record(Axiom::diagonal, i, i, i, std::abs(m(i, i)));
    for (Index j = i + 1; j < n; ++j) {
      const double a = m(i, j);
      const double b = m(j, i);
      if (std::isnan(a) || std::isnan(b) || std::abs(a - b) > opts.tol) {
        record(Axiom::symmetry, i, j, j, std::abs(a - b));
      }
      if (a < -opts.tol || b < -opts.tol) record(Axiom::nonnegativity, i, j, j, -std::min(a, b));
      if (!opts.pseudometric && std::min(a, b) <= 0.0) record(Axiom::separation, i, j, j, -std::min(a, b));
    }
  }
  // Fast row scan with the max_excess kernel, then enumerate witnesses only
  // for the (i, k) combinations that fail.
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < n; ++k) {
      if (k == i) continue;
      const double worst = kernels::max_excess(m.row(i), m.row(k), m(i, k));
      if (!(worst > opts.tol)) continue;
      for (Index j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        const double excess = m(i, j) - (m(i, k) + m(k, j));
        if (excess > opts.tol) record(Axiom::triangle, i, j, k, excess);
      }
    }
  }
  return report;
}

double sup_distance(const Matrix& d, const Matrix& e) {
  require_same_shape(d, e, "sup_distance");
  double m = 0.0;
  for (std::size_t i = 0; i < d.rows(); ++i) m = std::max(m, kernels::max_abs_diff(d.row(i), e.row(i)));
  return m;
}

Matrix snowflake(const Matrix& d, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error("snowflake exponent must lie in (0, 1], got " + std::to_string(alpha));
  }
  require_square(d, "snowflake");
  Matrix out = d;
  if (alpha == 1.0) return out;
  for (double& x : out.data()) x = std::pow(x, alpha);
  return out;
}

PseudometricMatrix truncate(const Matrix& d, double eta) {
  if (!(eta > 0.0)) throw Error("truncation level must be positive, got " + std::to_string(eta));
  require_square(d, "truncate");
  Matrix out = d;
  for (std::size_t i = 0; i < out.rows(); ++i) kernels::min_scalar(out.row(i), eta);
  return out;
}

PseudometricMatrix hat_metric(const Matrix& d, const IndexSet& a) {
  require_nonempty(a, "hat_metric");
  require_square(d, "hat_metric");
  const auto to_a = dist_to_set_all(d, a);
  Matrix out = d;
  for (std::size_t x = 0; x < out.rows(); ++x) kernels::min_plus(out.row(x), to_a, to_a[x]);
  for (std::size_t x = 0; x < out.rows(); ++x) out(x, x) = 0.0;
  return out;
}

PseudometricMatrix add_pseudometrics(const Matrix& p, const Matrix& q) {
  require_same_shape(p, q, "add_pseudometrics");
  Matrix out = p;
  auto dst = out.data();
  auto src = q.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  return out;
}

double dist_to_set(const Matrix& d, Index x, const IndexSet& s) {
  require_nonempty(s, "dist_to_set");
  double m = std::numeric_limits<double>::infinity();
  for (Index y : s) m = std::min(m, d(x, y));
  return m;
}

std::vector<double> dist_to_set_all(const Matrix& d, const IndexSet& s) {
  require_nonempty(s, "dist_to_set");
  std::vector<double> out(d.row(s.front()).begin(), d.row(s.front()).end());
  // Rows of a symmetric matrix double as columns.
  for (std::size_t k = 1; k < s.size(); ++k) kernels::min_elementwise(out, d.row(s[k]));
  return out;
}

double diameter(const Matrix& d, const IndexSet& s) {
  require_nonempty(s, "diameter");
  double m = 0.0;
  for (Index x : s) {
    for (Index y : s) m = std::max(m, d(x, y));
  }
  return m;
}

double diameter(const Matrix& d) {
  double m = 0.0;
  for (double x : d.data()) m = std::max(m, x);
  return m;
}

IndexSet ball(const Matrix& d, Index center, double r) {
  IndexSet out;
  for (Index x = 0; x < d.rows(); ++x) {
    if (d(center, x) < r) out.push_back(x);
  }
  return out;
}

DensityResult is_eps_dense(const Matrix& d, const IndexSet& a, double eps) {
  const auto to_a = dist_to_set_all(d, a);
  DensityResult r;
  for (Index x = 0; x < to_a.size(); ++x) {
    if (to_a[x] > r.max_distance) {
      r.max_distance = to_a[x];
      r.witness = x;
    }
  }
  r.dense = r.max_distance <= eps;
  return r;
}

FiniteMetricSpace make_grid_space(const std::vector<std::size_t>& dims, double spacing, Ground ground) {
  if (dims.empty()) throw Error("make_grid_space: empty dims");
  for (auto k : dims) {
    if (k == 0) throw Error("make_grid_space: every extent must be positive");
  }
  if (!(spacing > 0.0)) throw Error("make_grid_space: spacing must be positive");
  GridInfo info{dims, spacing, ground};
  const std::size_t n = info.point_count();
  std::vector<std::vector<std::size_t>> coords(n);
  std::vector<std::string> names(n);
  for (Index p = 0; p < n; ++p) {
    coords[p] = info.lattice(p);
    std::string name = "(";
    for (std::size_t a = 0; a < coords[p].size(); ++a) {
      if (a) name += ",";
      name += std::to_string(coords[p][a]);
    }
    names[p] = name + ")";
  }
  Matrix d = Matrix::square(n);
  for (Index p = 0; p < n; ++p) {
    for (Index q = p + 1; q < n; ++q) {
      double acc = 0.0;
      for (std::size_t a = 0; a < dims.size(); ++a) {
        const double delta = coords[p][a] > coords[q][a] ? double(coords[p][a] - coords[q][a])
                                                         : double(coords[q][a] - coords[p][a]);
        switch (ground) {
          case Ground::linf:
            acc = std::max(acc, delta);
            break;
          case Ground::l1:
            acc += delta;
            break;
          case Ground::l2:
            acc += delta * delta;
            break;
        }
      }
      if (ground == Ground::l2) acc = std::sqrt(acc);
      d(p, q) = d(q, p) = acc * spacing;
    }
  }
  return FiniteMetricSpace{std::move(names), std::move(d), 0, std::move(info)};
}

FiniteMetricSpace make_random_space(std::size_t n, std::uint64_t seed, double lo, double hi) {
  if (n == 0) throw Error("make_random_space: need at least one point");
  if (!(lo > 0.0 && hi >= lo)) throw Error("make_random_space: need 0 < lo <= hi");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(lo, hi);
  Matrix w = Matrix::square(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) w(i, j) = w(j, i) = weight(rng);
  }
  Matrix d = shortest_path_closure(std::move(w));
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("p" + std::to_string(i));
  return FiniteMetricSpace{std::move(names), std::move(d), 0, std::nullopt};
}

Matrix shortest_path_closure(Matrix w) {
  require_square(w, "shortest_path_closure");
  const std::size_t n = w.rows();
  for (Index i = 0; i < n; ++i) w(i, i) = 0.0;
  for (Index k = 0; k < n; ++k) {
    const auto via = w.row(k);
    for (Index i = 0; i < n; ++i) {
      if (i == k) continue;
      kernels::min_plus(w.row(i), via, w(i, k));
    }
  }
  return w;
}

std::vector<std::pair<Index, Index>> essential_pairs(const Matrix& d) {
  require_square(d, "essential_pairs");
  const std::size_t n = d.rows();
  std::vector<std::pair<Index, Index>> out;
  std::vector<double> best(n);
  for (Index i = 0; i < n; ++i) {
    std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
    for (Index k = 0; k < n; ++k) {
      if (k == i) continue;
      if (!(d(i, k) > 0.0)) throw Error("essential_pairs: requires a metric (zero distance off the diagonal)");
      // Route i -> k -> j; the j == k entry would be the trivial route.
      const double keep = best[k];
      kernels::min_plus(best, d.row(k), d(i, k));
      best[k] = keep;
    }
    for (Index j = i + 1; j < n; ++j) {
      if (!(best[j] <= d(i, j))) out.emplace_back(i, j);
    }
  }
  return out;
}

}  // namespace lipfree
