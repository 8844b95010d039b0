#include "lipfree/bap.hpp"

#include <algorithm>
#include <sstream>

#include "lipfree/parallel.hpp"

namespace lipfree {

DefectReport godefroy_defect(const WeightOperator& op, const Matrix& d, Index base, bool with_norm,
                             const OperatorNormOptions& opts) {
  if (op.rows.size() != d.rows()) throw Error("godefroy_defect: operator and metric sizes differ");
  const auto base_it = std::find(op.domain.begin(), op.domain.end(), base);
  if (base_it == op.domain.end()) throw Error("godefroy_defect: the base point is not in M_n");
  const std::size_t base_col = std::size_t(base_it - op.domain.begin());
  const Matrix d_net = d.restrict_to(op.domain);

  std::vector<double> per_point(op.domain.size(), 0.0);
  parallel_for(op.domain.size(), [&](std::size_t c) {
    std::vector<Term> terms;
    for (const auto& w : op.rows[op.domain[c]]) terms.push_back({w.column, w.value});
    terms.push_back({c, -1.0});
    per_point[c] = free_space_norm(FreeElement::from_terms(std::move(terms)), d_net, base_col, opts.free_norm);
  });
  DefectReport r;
  r.net = op.domain;
  for (std::size_t c = 0; c < per_point.size(); ++c) {
    if (per_point[c] > r.defect) {
      r.defect = per_point[c];
      r.witness = op.domain[c];
    }
  }
  if (with_norm) r.norm = operator_norm(op, d_net, d, base_col, opts).norm;
  return r;
}

BapReport bap_certificate(const std::vector<BapStage>& stages, const Matrix& d, Index base, const BapOptions& opts) {
  BapReport rep;
  Json inputs = {{"lambda", opts.lambda}, {"envelope", opts.envelope}, {"points", d.rows()}, {"base", base},
                 {"metric_hash", hash_hex(fnv1a_hash(Json(d.to_rows())))}};
  Json stage_inputs = Json::array();
  for (const auto& s : stages) stage_inputs.push_back({{"n", s.n}, {"eps_n", s.eps_n}, {"net", s.op.domain}});
  inputs["stages"] = stage_inputs;
  rep.certificate = Certificate("bap", std::move(inputs));
  Certificate& cert = rep.certificate;

  for (const auto& s : stages) {
    const IndexSet net = make_index_set(s.op.domain, d.rows());
    const auto density = is_eps_dense(d, net, s.eps_n);
    if (!density.dense) {
      throw Error("bap_certificate: stage n = " + std::to_string(s.n) + " net is not " + std::to_string(s.eps_n) +
                  "-dense (point " + std::to_string(density.witness) + " at " +
                  std::to_string(density.max_distance) + ")");
    }
    const auto dr = godefroy_defect(s.op, d, base, true, opts.norm);
    BapRow row{s.n, s.op.domain.size(), s.eps_n, density.max_distance, dr.norm, dr.defect, dr.witness, false};
    const std::string tag = "n=" + std::to_string(s.n) + (s.label.empty() ? "" : " " + s.label) + ": ";
    const bool norm_ok = cert.add(tag + "norm <= lambda", Bound::less_equal, dr.norm, opts.lambda, opts.tol);
    const bool defect_ok = cert.add(tag + "defect <= envelope * eps_n", Bound::less_equal, dr.defect,
                                    opts.envelope * s.eps_n, opts.tol, {"point " + std::to_string(dr.witness)});
    row.pass = norm_ok && defect_ok;
    rep.rows.push_back(row);
  }
  Json table = Json::array();
  for (const auto& r : rep.rows) {
    table.push_back({{"n", r.n},
                     {"net_size", r.net_size},
                     {"eps_n", r.eps_n},
                     {"density", r.density},
                     {"norm", r.norm},
                     {"defect", r.defect},
                     {"witness", r.witness}});
  }
  cert.payload()["table"] = table;
  return rep;
}

std::string bap_csv(const BapReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "n,net_size,eps_n,norm,defect,witness\n";
  for (const auto& r : report.rows) {
    out << r.n << ',' << r.net_size << ',' << r.eps_n << ',' << r.norm << ',' << r.defect << ',' << r.witness << '\n';
  }
  return out.str();
}

}  // namespace lipfree
