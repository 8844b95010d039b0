#pragma once

// Lipschitz constants, norms in the Lipschitz-free space over a finite
// metric space, McShane extension, linear extension operators given by weight
// rows, their operator norms, and metric extension from a subset.

#include <utility>
#include <vector>

#include "lipfree/lp.hpp"
#include "lipfree/matrix.hpp"
#include "lipfree/metric.hpp"

namespace lipfree {

// Values indexed by point; a Lip0 element when the base value is 0.
using LipFunction = std::vector<double>;

struct Term {
  Index point = 0;
  double weight = 0.0;
  friend bool operator==(const Term&, const Term&) = default;
};

// Finitely supported combination sum_i w_i delta_{x_i}. Terms are sorted by
// point, merged and free of zero weights.
struct FreeElement {
  std::vector<Term> terms;

  static FreeElement from_terms(std::vector<Term> terms);
  static FreeElement delta(Index x, double weight = 1.0) { return from_terms({{x, weight}}); }
  // delta_x - delta_y
  static FreeElement molecule(Index x, Index y) { return from_terms({{x, 1.0}, {y, -1.0}}); }

  bool empty() const { return terms.empty(); }
  // <mu, f>
  double evaluate(const LipFunction& f) const;
};

struct FreeNormOptions {
  // Solve on supp(mu) + {base} instead of the whole space. Exact, because
  // Lipschitz functions on a subset extend without increasing the constant.
  bool restrict_to_support = true;
  // Skip constraints implied by the triangle inequality (metrics only).
  bool prune_redundant_pairs = true;
  // |w| d(x, base) and |w| d(x, y) for one-point and balanced two-point supports.
  bool closed_form = true;
  lp::SolverOptions solver{};
};

// max <mu, f> over f with f(base) = 0 and |f(x) - f(y)| <= d(x, y).
// Throws Error if the LP does not reach optimality.
double free_space_norm(const FreeElement& mu, const Matrix& d, Index base,
                       const FreeNormOptions& opts = {});

// The same LP, exposed for inspection and debugging.
lp::LinearProgram free_norm_program(const FreeElement& mu, const Matrix& d, Index base);

// max over pairs with d > 0 of |f(x) - f(y)| / d(x, y); +inf if some pair has
// d(x, y) = 0 but f(x) != f(y); 0 for constants.
double lipschitz_constant(const LipFunction& f, const Matrix& d);

struct LipschitzWitness {
  double constant = 0.0;
  Index x = 0;
  Index y = 0;
};
LipschitzWitness lipschitz_constant_witness(const LipFunction& f, const Matrix& d);

// Lipschitz constant of f restricted to `points`.
double lipschitz_constant_on(const LipFunction& f, const Matrix& d, const std::vector<Index>& points);

// min over a in A of f(a) + L d(x, a). `values[k]` is the value at domain[k].
// Throws Error if f is not L-Lipschitz on A (beyond tol).
LipFunction mcshane_extend(const std::vector<Index>& domain, const std::vector<double>& values, double lipschitz,
                           const Matrix& d, double tol = kDefaultTolerance);

struct Weight {
  std::size_t column = 0;  // position in WeightOperator::domain
  double value = 0.0;
  friend bool operator==(const Weight&, const Weight&) = default;
};
using WeightRow = std::vector<Weight>;  // sorted by column, no zeros

// f |-> (x |-> sum_k w_k(x) f(domain[k])), a linear map from functions on
// the domain subset to functions on the whole space.
struct WeightOperator {
  std::vector<Index> domain;   // points of the target space, in column order
  std::vector<WeightRow> rows; // one per target point
  bool partition_type = false; // weights nonnegative and summing to 1

  std::size_t target_size() const { return rows.size(); }
  std::vector<double> dense_row(Index x) const;
  // rows(x) - rows(y) as an element of the free space over the domain
  // (points are domain positions).
  FreeElement row_difference(Index x, Index y) const;
};

WeightRow make_weight_row(std::vector<Weight> entries);

// Identity on A = T: w_i(x) = [x = a_i].
WeightOperator identity_operator(std::size_t n);

// Throws Error when f has the wrong length.
LipFunction apply_weight_operator(const WeightOperator& w, const std::vector<double>& f_on_domain);

// Checks partition_type rows (nonnegative, sum to 1 within tol).
bool is_partition_type(const WeightOperator& w, double tol = kDefaultTolerance);

// max_{x, y in domain} |w_j(domain[i]) - [i = j]|: 0 iff w is an extension operator.
double extension_defect(const WeightOperator& w);

enum class PairSweep {
  all,        // every pair of target points
  essential,  // pairs with no intermediate point (target must be a metric)
};

struct OperatorNormOptions {
  PairSweep sweep = PairSweep::all;
  FreeNormOptions free_norm{};
};

struct OperatorNormResult {
  double norm = 0.0;
  Index x = 0;  // witness pair in the target space
  Index y = 0;
  std::size_t pairs = 0;        // target pairs considered
  std::size_t programs = 0;     // distinct free-norm evaluations
};

// Norm of W: Lip0(domain, d_domain) -> Lip0(T, d_target), computed as
// max over target pairs of ||W*(delta_x - delta_y)|| / d_target(x, y).
// base_column is the position of the base point in W.domain.
OperatorNormResult operator_norm(const WeightOperator& w, const Matrix& d_domain, const Matrix& d_target,
                                 std::size_t base_column, const OperatorNormOptions& opts = {});

struct MetricExtension {
  Matrix metric;            // d2 on T, equal to rho on S x S
  double distortion = 0.0;  // sup_distance(d2, d)
  double bound = 0.0;       // sup_distance(rho, d restricted to S)
  std::size_t pivots = 0;
};

// Minimizes sup |d2 - d| over metrics d2 on T extending rho, with
// d2(x, y) >= 1e-9 * (smallest positive entry of d) for x != y.
// Throws Error if rho is not a metric on S.
MetricExtension metric_extension_lp(const Matrix& d, const IndexSet& s, const Matrix& rho,
                                    const lp::SolverOptions& solver = {});

// Shortest-path construction: closure of the weights rho on S x S and
// d + delta elsewhere, delta = sup |rho - d|. Achieves distortion <= delta
// and scales to spaces where the LP is too large.
MetricExtension metric_extension_paths(const Matrix& d, const IndexSet& s, const Matrix& rho);

}  // namespace lipfree
