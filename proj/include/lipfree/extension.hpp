#pragma once

// Extension operators from a net to the whole space built from a partition
// of unity, the metrics that make them norm one, and their perturbed
// counterparts with certified norm bounds.

#include <cstdint>
#include <vector>

#include "lipfree/certificate.hpp"
#include "lipfree/cover.hpp"
#include "lipfree/free_norm.hpp"

namespace lipfree {

// lambda_i(x) = d(x, U_i^c) / sum_j d(x, U_j^c), columns in net order.
// A member equal to the whole space counts as infinitely far from its
// (empty) complement, so such members share the weight equally. Throws
// Error if some point lies in no set.
WeightOperator partition_of_unity(const Matrix& d, const std::vector<Index>& net, const std::vector<IndexSet>& sets);

// tilde_d(x, y) = || sum_i (w_i(x) - w_i(y)) delta_{a_i} || in F(A, d_net).
// Rows that coincide are solved once.
PseudometricMatrix tilde_metric(const WeightOperator& w, const Matrix& d_net, std::size_t base_column,
                                const FreeNormOptions& opts = {});

struct ExtensionOptions {
  double tol = kDefaultTolerance;  // slack on non-strict bounds
  double norm_tol = 1e-6;          // |norm(E) - 1|
  bool measure_norms = true;
  OperatorNormOptions norm{PairSweep::essential, {}};
};

struct Prop33Bundle {
  Matrix d;
  Index base = 0;
  NetAndCover nc;
  int r = 0;
  double eps = 0.0;
  WeightOperator lambda;  // also the operator E, read over bar_d
  PseudometricMatrix tilde_d;
  PseudometricMatrix hat_d;
  Matrix bar_d;
  OperatorNormResult e_norm;
  Certificate certificate;

  std::size_t base_column() const { return 0; }
  Matrix net_metric() const { return d.restrict_to(nc.net); }
};

// Requires nc to pass verify_net_cover for (d, eps); throws Error with the
// failed check otherwise. The returned certificate records every bound.
Prop33Bundle build_prop33(const Matrix& d, Index base, const NetAndCover& nc, const ExtensionOptions& opts = {});

// Minimum over x of sum_i bar_d(x, U_i^c) against eps / 3.
Certificate verify_sum_dist_bound(const Prop33Bundle& bundle, double tol = kDefaultTolerance);

struct PerturbedBundle {
  Matrix e;
  WeightOperator mu;  // also the operator G
  double admission = 0.0;   // sup |e - bar_d|
  double radius = 0.0;      // eps / (12 (r + 1))
  double claimed_bound = 0.0;
  OperatorNormResult g_norm;
  Certificate certificate;
};

// 88 (r + 1)(2r + 3)
double perturbed_norm_bound(int r);
double admission_radius(const Prop33Bundle& bundle);

// Throws Error when e is not a metric on the same points or lies outside
// the admission radius around bar_d.
PerturbedBundle build_perturbed_G(const Prop33Bundle& bundle, const Matrix& e, const ExtensionOptions& opts = {});

struct Perturbation {
  Matrix metric;
  double amplitude = 0.0;  // noise amplitude finally used
  double distance = 0.0;   // sup |metric - base|
  int halvings = 0;
};

// Adds seeded symmetric noise in [-amplitude, amplitude] to the off-diagonal
// entries (never below half the original entry), re-metrizes by shortest
// paths and halves the amplitude until the result lies within `radius`.
Perturbation perturb_metric(const Matrix& m, double amplitude, double radius, std::uint64_t seed);

}  // namespace lipfree
