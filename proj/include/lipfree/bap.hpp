#pragma once

// Almost-extension defects of operators Lip0(M_n) -> Lip0(M) and finite
// sequences of them. Uniformly bounded norms with vanishing defects are what
// the bounded approximation property asks for.

#include <string>
#include <vector>

#include "lipfree/certificate.hpp"
#include "lipfree/free_norm.hpp"

namespace lipfree {

struct DefectReport {
  std::vector<Index> net;  // M_n, the operator's domain
  double norm = 0.0;       // operator norm (0 unless requested)
  double defect = 0.0;
  Index witness = 0;       // point of M_n attaining the defect
};

// max over x in M_n of || row(x) - delta_x || in F(M_n, d restricted to M_n):
// the sup over the unit ball of Lip0(M_n) of max_x |T(f)(x) - f(x)|.
// Throws Error if the base point is not in M_n.
DefectReport godefroy_defect(const WeightOperator& op, const Matrix& d, Index base, bool with_norm = false,
                             const OperatorNormOptions& opts = {PairSweep::essential, {}});

struct BapStage {
  std::size_t n = 0;
  double eps_n = 0.0;  // density required of M_n
  WeightOperator op;
  std::string label;
};

struct BapRow {
  std::size_t n = 0;
  std::size_t net_size = 0;
  double eps_n = 0.0;
  double density = 0.0;  // max_x d(x, M_n)
  double norm = 0.0;
  double defect = 0.0;
  Index witness = 0;
  bool pass = false;
};

struct BapOptions {
  double lambda = 0.0;        // claimed norm bound
  double envelope = 4.0;      // defect(n) <= envelope * eps_n
  double tol = kDefaultTolerance;
  OperatorNormOptions norm{PairSweep::essential, {}};
};

struct BapReport {
  std::vector<BapRow> rows;
  Certificate certificate;
};

// Each stage must have an eps_n-dense domain; failures of the density
// precondition throw Error.
BapReport bap_certificate(const std::vector<BapStage>& stages, const Matrix& d, Index base, const BapOptions& opts);

std::string bap_csv(const BapReport& report);

}  // namespace lipfree
