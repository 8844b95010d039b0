#pragma once

// Finite metric spaces and the metric-level operations used by the
// constructions: validation, sup distance, snowflake and truncation
// transforms, the set-collapsing pseudometric, distances to sets and
// generators for grid and random spaces.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lipfree/matrix.hpp"

namespace lipfree {

inline constexpr double kDefaultTolerance = 1e-7;

// Same layout as a metric but off-diagonal zeros are allowed.
using PseudometricMatrix = Matrix;

enum class Ground { linf, l1, l2 };

std::string to_string(Ground g);
Ground ground_from_string(const std::string& s);

// Lattice metadata for spaces produced by make_grid_space. Points are
// numbered with axis 0 varying fastest.
struct GridInfo {
  std::vector<std::size_t> dims;  // points per axis
  double spacing = 1.0;
  Ground ground = Ground::linf;

  std::size_t nominal_dimension() const { return dims.size(); }
  std::size_t point_count() const;
  std::vector<std::size_t> lattice(Index point) const;
  Index index_of(const std::vector<std::size_t>& lattice) const;

  friend bool operator==(const GridInfo&, const GridInfo&) = default;
};

struct FiniteMetricSpace {
  std::vector<std::string> names;
  Matrix dist;
  Index base = 0;
  std::optional<GridInfo> grid;

  std::size_t size() const { return dist.rows(); }
};

// Builds a space, validating the metric (throws Error with the first
// violation). Names default to "p0", "p1", ...
FiniteMetricSpace make_space(Matrix dist, Index base = 0, std::vector<std::string> names = {},
                             double tol = kDefaultTolerance);

enum class Axiom { diagonal, symmetry, nonnegativity, separation, triangle };
std::string to_string(Axiom a);

struct Violation {
  Axiom axiom;
  Index i = 0;
  Index j = 0;
  Index k = 0;        // middle point of a triangle witness (i, k, j)
  double excess = 0;  // amount by which the axiom fails
};

struct ValidationReport {
  std::vector<Violation> violations;  // at most max_witnesses entries
  std::size_t total = 0;              // every violation found
  bool valid() const { return total == 0; }
};

struct ValidateOptions {
  double tol = kDefaultTolerance;
  bool pseudometric = false;  // allow d(x, y) = 0 for x != y
  std::size_t max_witnesses = 1000;
};

// Throws Error for a non-square matrix. A triangle witness (i, k, j) means
// d(i, j) > d(i, k) + d(k, j) + tol.
ValidationReport validate_metric(const Matrix& m, const ValidateOptions& opts = {});

// max over pairs of |d - e|.
double sup_distance(const Matrix& d, const Matrix& e);

// Entrywise d^alpha, 0 < alpha <= 1.
Matrix snowflake(const Matrix& d, double alpha);

// Entrywise min(d, eta) off the diagonal.
PseudometricMatrix truncate(const Matrix& d, double eta);

// min(d(x, y), d(x, A) + d(A, y)); vanishes on A x A.
PseudometricMatrix hat_metric(const Matrix& d, const IndexSet& a);

PseudometricMatrix add_pseudometrics(const Matrix& p, const Matrix& q);

double dist_to_set(const Matrix& d, Index x, const IndexSet& s);
// d(x, S) for every x.
std::vector<double> dist_to_set_all(const Matrix& d, const IndexSet& s);
double diameter(const Matrix& d, const IndexSet& s);
double diameter(const Matrix& d);
// Open ball {x : d(x, center) < r}.
IndexSet ball(const Matrix& d, Index center, double r);

struct DensityResult {
  bool dense = false;
  Index witness = 0;      // point attaining max_x d(x, A)
  double max_distance = 0;
};
DensityResult is_eps_dense(const Matrix& d, const IndexSet& a, double eps);

// Lattice with the chosen ground metric; dims are point counts per axis.
FiniteMetricSpace make_grid_space(const std::vector<std::size_t>& dims, double spacing,
                                  Ground ground = Ground::linf);

// Shortest-path completion of uniform random weights in [lo, hi] on the
// complete graph. Deterministic for a given seed.
FiniteMetricSpace make_random_space(std::size_t n, std::uint64_t seed, double lo = 0.5,
                                    double hi = 2.0);

// Floyd-Warshall closure: the largest pseudometric below a nonnegative
// symmetric weight matrix.
Matrix shortest_path_closure(Matrix w);

// Pairs (i < j) with no third point k such that d(i, k) + d(k, j) <= d(i, j).
// The Lipschitz constant of any function is attained on one of these pairs.
std::vector<std::pair<Index, Index>> essential_pairs(const Matrix& d);

}  // namespace lipfree
