#pragma once

// Gluing an extension operator near a finite-dimensional piece K with the
// identity far from K: exhaustion of T \ K, the perturbed metric bar_d, the
// sandwich sets, the cutoff rho, the glued operator H and its certificate.

#include <cstdint>
#include <vector>

#include "lipfree/certificate.hpp"
#include "lipfree/cover.hpp"
#include "lipfree/extension.hpp"
#include "lipfree/free_norm.hpp"

namespace lipfree {

struct GluingConfig {
  FiniteMetricSpace space;         // T with metric d
  IndexSet k;                      // K, containing the base point
  int dim_k = 0;                   // nominal dimension of K
  std::vector<double> thresholds;  // t_1 > t_2 > ... > 0
};

// Throws Error unless the base point lies in K, K is nonempty and the
// thresholds are positive and strictly decreasing.
void validate(const GluingConfig& cfg);

// C_n = {x : d(x, K) >= t_n}, n = 1, 2, ...; element n - 1 holds C_n.
// Throws Error if some point of T \ K lies in none of them.
std::vector<IndexSet> build_exhaustion(const GluingConfig& cfg);

struct Sandwich {
  IndexSet inner;  // {x : m(x, K) <= inner_threshold}
  IndexSet outer;  // {x : m(x, K) < outer_threshold}
};
Sandwich sandwich_sets(const Matrix& m, const IndexSet& k, double inner_threshold, double outer_threshold);
// V1, V2 for bar_d: thresholds eps/(32(dimK+1)) and eps/(14(dimK+1)).
Sandwich v_sets(const Matrix& bar_d, const IndexSet& k, double eps, int dim_k);
// W1, W2 for e: thresholds eps/(30(dimK+1)) and eps/(15(dimK+1)).
Sandwich w_sets(const Matrix& e, const IndexSet& k, double eps, int dim_k);

// rho(x) = min(1, 30(dimK+1)/eps * e(x, W1)). Throws Error for empty W1.
std::vector<double> cutoff_rho(const Matrix& e, const IndexSet& w1, double eps, int dim_k);

// 88 (dimK + 1)(2 dimK + 3)
double gamma_constant(int dim_k);
// (150 dimK + 152)(Gamma + 1)
double rnm_bound(int dim_k);
// eps / (480 (dimK + 1))
double rnm_admission_radius(double eps, int dim_k);

struct Section4Options {
  ExtensionOptions extension{};
  // Metric extension by linear programming instead of shortest paths; only
  // practical for a few dozen points.
  bool extension_by_lp = false;
};

struct Section4Bundle {
  GluingConfig cfg;
  std::size_t n = 1;
  double nu = 0.0;
  double eps = 0.0;
  double gamma = 0.0;
  std::vector<IndexSet> exhaustion;

  NetAndCover k_cover;                 // indices of T
  double xi = 0.0;                     // Lebesgue number of the K cover
  std::vector<IndexSet> u_shrunk;      // U_i'
  double dilation = 0.0;               // radius s of V_i'
  std::vector<IndexSet> v_members;     // V_i
  double eta = 0.0;
  IndexSet v;                          // V = {d(x, K) <= eta}

  Prop33Bundle inner;                  // on V, indices are positions in `v`
  MetricExtension extension;           // d2 on T
  PseudometricMatrix e1;
  Matrix bar_d;
  Sandwich v12;                        // V1, V2
  std::size_t m = 0;
  Certificate certificate;

  std::vector<Index> net() const { return k_cover.net; }
  Index base() const { return cfg.space.base; }
};

// Runs the whole construction for a fixed n and nu, certifying every
// intermediate bound. Throws Error if a step cannot be carried out (no m
// with C_m and V1 covering T, order inflation under dilation, ...).
Section4Bundle build_section4(const GluingConfig& cfg, std::size_t n, double nu, const Section4Options& opts = {});

// Lip0(C_m u A, e) -> Lip0(T, e) as weights over C_m u A.
WeightOperator build_H_operator(const Section4Bundle& bundle, const PerturbedBundle& e_on_v,
                                const std::vector<double>& rho);

// H(f) for f on T restricted to C_m u A (values elsewhere are ignored).
LipFunction build_H(const Section4Bundle& bundle, const PerturbedBundle& e_on_v, const std::vector<double>& rho,
                    const LipFunction& f);

struct RnmOptions {
  double tol = kDefaultTolerance;
  std::size_t test_functions = 8;
  std::uint64_t seed = 1;
  OperatorNormOptions norm{PairSweep::essential, {}};
};

struct RnmResult {
  Certificate certificate;
  double admission = 0.0;
  double radius = 0.0;
  double bound = 0.0;
  Sandwich w12;
  std::vector<double> rho;
  WeightOperator h;
  OperatorNormResult h_norm;
  double e_norm = 0.0;  // norm of the operator E on V for the metric e
};

// Never throws for a bad e: failures are recorded in the certificate.
RnmResult certify_rnm(const Section4Bundle& bundle, const Matrix& e, const RnmOptions& opts = {});

}  // namespace lipfree
