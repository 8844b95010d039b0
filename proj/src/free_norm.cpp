#include "lipfree/free_norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "lipfree/kernels.hpp"
#include "lipfree/parallel.hpp"

namespace lipfree {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Terms with the base point removed; the base weight never affects <mu, f>
// for f vanishing at the base.
std::vector<Term> off_base(const FreeElement& mu, Index base) {
  std::vector<Term> out;
  out.reserve(mu.terms.size());
  for (const auto& t : mu.terms) {
    if (t.point != base) out.push_back(t);
  }
  return out;
}

lp::LinearProgram build_program(const std::vector<Term>& terms, const Matrix& d, Index base,
                                const std::vector<Index>& points, bool prune) {
  // points[0] is the base; variables g_k = f(points[k]) + d(points[k], base)
  // for k >= 1 keep the all-slack basis feasible.
  const std::size_t k = points.size();
  const std::size_t vars = k - 1;
  lp::LinearProgram prog;
  prog.sense = lp::Sense::maximize;
  prog.objective.assign(vars, 0.0);
  std::map<Index, std::size_t> position;
  for (std::size_t p = 0; p < k; ++p) position[points[p]] = p;
  for (const auto& t : terms) prog.objective[position.at(t.point) - 1] += t.weight;

  bool metric = true;
  for (std::size_t a = 0; a < k && metric; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      if (!(d(points[a], points[b]) > 0.0)) {
        metric = false;
        break;
      }
    }
  }
  prune = prune && metric;

  auto redundant = [&](std::size_t a, std::size_t b) {
    const double dab = d(points[a], points[b]);
    for (std::size_t z = 0; z < k; ++z) {
      if (z == a || z == b) continue;
      if (d(points[a], points[z]) + d(points[z], points[b]) <= dab) return true;
    }
    return false;
  };

  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      if (prune && redundant(a, b)) continue;
      const double dab = d(points[a], points[b]);
      const double ha = d(points[a], base);
      const double hb = d(points[b], base);
      // f_a - f_b <= d_ab  and  f_b - f_a <= d_ab
      for (int dir = 0; dir < 2; ++dir) {
        const std::size_t hi = dir == 0 ? a : b;
        const std::size_t lo = dir == 0 ? b : a;
        const double hhi = dir == 0 ? ha : hb;
        const double hlo = dir == 0 ? hb : ha;
        if (hi == 0) continue;  // -g_lo <= 0 duplicates the bound g >= 0
        lp::Constraint c;
        c.coefficients.assign(vars, 0.0);
        c.coefficients[hi - 1] = 1.0;
        if (lo != 0) c.coefficients[lo - 1] = -1.0;
        c.relation = lp::Relation::less_equal;
        c.rhs = dab + hhi - hlo;
        prog.constraints.push_back(std::move(c));
      }
    }
  }
  return prog;
}

std::vector<Index> program_points(const std::vector<Term>& terms, std::size_t n, Index base, bool restrict) {
  std::vector<Index> points{base};
  if (restrict) {
    for (const auto& t : terms) points.push_back(t.point);
  } else {
    for (Index x = 0; x < n; ++x) {
      if (x != base) points.push_back(x);
    }
  }
  return points;
}

double constant_offset(const std::vector<Term>& terms, const Matrix& d, Index base) {
  double c = 0.0;
  for (const auto& t : terms) c += t.weight * d(t.point, base);
  return c;
}

}  // namespace

FreeElement FreeElement::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.point < b.point; });
  std::vector<Term> merged;
  for (const auto& t : terms) {
    if (!merged.empty() && merged.back().point == t.point) {
      merged.back().weight += t.weight;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.weight == 0.0; });
  return FreeElement{std::move(merged)};
}

double FreeElement::evaluate(const LipFunction& f) const {
  double s = 0.0;
  for (const auto& t : terms) s += t.weight * f.at(t.point);
  return s;
}

lp::LinearProgram free_norm_program(const FreeElement& mu, const Matrix& d, Index base) {
  const auto terms = off_base(mu, base);
  return build_program(terms, d, base, program_points(terms, d.rows(), base, false), false);
}

double free_space_norm(const FreeElement& mu, const Matrix& d, Index base, const FreeNormOptions& opts) {
  if (!d.is_square()) throw Error("free_space_norm: metric must be square");
  if (base >= d.rows()) throw Error("free_space_norm: base point out of range");
  for (const auto& t : mu.terms) {
    if (t.point >= d.rows()) throw Error("free_space_norm: support point out of range");
  }
  const auto terms = off_base(mu, base);
  if (terms.empty()) return 0.0;
  if (opts.closed_form) {
    if (terms.size() == 1) return std::abs(terms[0].weight) * d(terms[0].point, base);
    if (terms.size() == 2 && terms[0].weight == -terms[1].weight) {
      return std::abs(terms[0].weight) * d(terms[0].point, terms[1].point);
    }
  }
  const auto points = program_points(terms, d.rows(), base, opts.restrict_to_support);
  const auto prog = build_program(terms, d, base, points, opts.prune_redundant_pairs);
  const auto sol = lp::solve(prog, opts.solver);
  if (sol.status != lp::Status::optimal) {
    throw Error("free_space_norm: LP " + lp::to_string(sol.status) + ": " + lp::to_debug_json(prog));
  }
  return sol.value - constant_offset(terms, d, base);
}

LipschitzWitness lipschitz_constant_witness(const LipFunction& f, const Matrix& d) {
  if (f.size() != d.rows()) throw Error("lipschitz_constant: function and metric sizes differ");
  LipschitzWitness w;
  for (Index x = 0; x < f.size(); ++x) {
    for (Index y = x + 1; y < f.size(); ++y) {
      const double df = std::abs(f[x] - f[y]);
      if (df == 0.0) continue;
      const double dd = d(x, y);
      const double ratio = dd > 0.0 ? df / dd : kInf;
      if (ratio > w.constant) w = {ratio, x, y};
    }
  }
  return w;
}

double lipschitz_constant(const LipFunction& f, const Matrix& d) { return lipschitz_constant_witness(f, d).constant; }

double lipschitz_constant_on(const LipFunction& f, const Matrix& d, const std::vector<Index>& points) {
  double best = 0.0;
  for (std::size_t a = 0; a < points.size(); ++a) {
    for (std::size_t b = a + 1; b < points.size(); ++b) {
      const double df = std::abs(f.at(points[a]) - f.at(points[b]));
      if (df == 0.0) continue;
      const double dd = d(points[a], points[b]);
      best = std::max(best, dd > 0.0 ? df / dd : kInf);
    }
  }
  return best;
}

LipFunction mcshane_extend(const std::vector<Index>& domain, const std::vector<double>& values, double lipschitz,
                           const Matrix& d, double tol) {
  if (domain.empty()) throw Error("mcshane_extend: empty domain");
  if (domain.size() != values.size()) throw Error("mcshane_extend: domain and values differ in length");
  if (!(lipschitz >= 0.0)) throw Error("mcshane_extend: Lipschitz bound must be nonnegative");
  for (std::size_t a = 0; a < domain.size(); ++a) {
    for (std::size_t b = a + 1; b < domain.size(); ++b) {
      const double gap = std::abs(values[a] - values[b]) - lipschitz * d(domain[a], domain[b]);
      if (gap > tol) {
        throw Error("mcshane_extend: values are not " + std::to_string(lipschitz) + "-Lipschitz on the domain");
      }
    }
  }
  LipFunction out(d.rows(), kInf);
  for (std::size_t a = 0; a < domain.size(); ++a) {
    const auto row = d.row(domain[a]);
    for (Index x = 0; x < out.size(); ++x) out[x] = std::min(out[x], values[a] + lipschitz * row[x]);
  }
  for (std::size_t a = 0; a < domain.size(); ++a) out[domain[a]] = values[a];
  return out;
}

WeightRow make_weight_row(std::vector<Weight> entries) {
  std::sort(entries.begin(), entries.end(), [](const Weight& a, const Weight& b) { return a.column < b.column; });
  WeightRow row;
  for (const auto& e : entries) {
    if (!row.empty() && row.back().column == e.column) {
      row.back().value += e.value;
    } else {
      row.push_back(e);
    }
  }
  std::erase_if(row, [](const Weight& w) { return w.value == 0.0; });
  return row;
}

std::vector<double> WeightOperator::dense_row(Index x) const {
  std::vector<double> out(domain.size(), 0.0);
  for (const auto& w : rows.at(x)) out[w.column] = w.value;
  return out;
}

FreeElement WeightOperator::row_difference(Index x, Index y) const {
  std::vector<Term> terms;
  for (const auto& w : rows.at(x)) terms.push_back({w.column, w.value});
  for (const auto& w : rows.at(y)) terms.push_back({w.column, -w.value});
  return FreeElement::from_terms(std::move(terms));
}

WeightOperator identity_operator(std::size_t n) {
  WeightOperator w;
  w.partition_type = true;
  for (Index i = 0; i < n; ++i) {
    w.domain.push_back(i);
    w.rows.push_back({{i, 1.0}});
  }
  return w;
}

LipFunction apply_weight_operator(const WeightOperator& w, const std::vector<double>& f) {
  if (f.size() != w.domain.size()) {
    throw Error("apply_weight_operator: function has " + std::to_string(f.size()) + " values, domain has " +
                std::to_string(w.domain.size()) + " points");
  }
  LipFunction out(w.rows.size(), 0.0);
  for (Index x = 0; x < w.rows.size(); ++x) {
    double s = 0.0;
    for (const auto& e : w.rows[x]) s += e.value * f[e.column];
    out[x] = s;
  }
  return out;
}

bool is_partition_type(const WeightOperator& w, double tol) {
  for (const auto& row : w.rows) {
    double s = 0.0;
    for (const auto& e : row) {
      if (e.value < 0.0) return false;
      s += e.value;
    }
    if (std::abs(s - 1.0) > tol) return false;
  }
  return true;
}

double extension_defect(const WeightOperator& w) {
  double worst = 0.0;
  for (std::size_t i = 0; i < w.domain.size(); ++i) {
    const auto row = w.dense_row(w.domain[i]);
    for (std::size_t j = 0; j < row.size(); ++j) worst = std::max(worst, std::abs(row[j] - (i == j ? 1.0 : 0.0)));
  }
  return worst;
}

OperatorNormResult operator_norm(const WeightOperator& w, const Matrix& d_domain, const Matrix& d_target,
                                 std::size_t base_column, const OperatorNormOptions& opts) {
  const std::size_t n = w.rows.size();
  if (d_target.rows() != n || !d_target.is_square()) throw Error("operator_norm: target metric size mismatch");
  if (d_domain.rows() != w.domain.size() || !d_domain.is_square()) {
    throw Error("operator_norm: domain metric size mismatch");
  }
  if (base_column >= w.domain.size()) throw Error("operator_norm: base column out of range");

  // Points with identical rows give identical functionals, so group them and
  // solve one program per pair of classes at the closest member distance.
  std::map<WeightRow, std::size_t, decltype([](const WeightRow& a, const WeightRow& b) {
             return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [](const Weight& p, const Weight& q) {
               return p.column != q.column ? p.column < q.column : p.value < q.value;
             });
           })>
      classes;
  std::vector<std::size_t> class_of(n);
  std::vector<Index> representative;
  for (Index x = 0; x < n; ++x) {
    auto [it, inserted] = classes.emplace(w.rows[x], representative.size());
    if (inserted) representative.push_back(x);
    class_of[x] = it->second;
  }

  struct Closest {
    double distance = kInf;
    Index x = 0;
    Index y = 0;
  };
  std::unordered_map<std::uint64_t, Closest> closest;
  OperatorNormResult result;
  auto visit = [&](Index x, Index y) {
    ++result.pairs;
    std::size_t a = class_of[x];
    std::size_t b = class_of[y];
    if (a == b) return;
    if (a > b) std::swap(a, b);
    const std::uint64_t key = (std::uint64_t(a) << 32) | std::uint64_t(b);
    auto& c = closest[key];
    const double dist = d_target(x, y);
    if (dist < c.distance) c = {dist, x, y};
  };
  if (opts.sweep == PairSweep::essential) {
    for (auto [x, y] : essential_pairs(d_target)) visit(x, y);
  } else {
    for (Index x = 0; x < n; ++x) {
      for (Index y = x + 1; y < n; ++y) visit(x, y);
    }
  }

  std::vector<std::pair<std::uint64_t, Closest>> work(closest.begin(), closest.end());
  std::sort(work.begin(), work.end(), [](const auto& p, const auto& q) { return p.first < q.first; });
  std::vector<double> ratios(work.size(), 0.0);
  parallel_for(work.size(), [&](std::size_t i) {
    const auto& c = work[i].second;
    const auto mu = w.row_difference(c.x, c.y);
    const double norm = free_space_norm(mu, d_domain, base_column, opts.free_norm);
    if (norm == 0.0) return;
    ratios[i] = c.distance > 0.0 ? norm / c.distance : kInf;
  });
  result.programs = work.size();
  for (std::size_t i = 0; i < work.size(); ++i) {
    if (ratios[i] > result.norm) {
      result.norm = ratios[i];
      result.x = work[i].second.x;
      result.y = work[i].second.y;
    }
  }
  return result;
}

namespace {

void check_extension_inputs(const Matrix& d, const IndexSet& s, const Matrix& rho) {
  if (!d.is_square()) throw Error("metric extension: d must be square");
  if (s.empty()) throw Error("metric extension: empty subset");
  if (s.back() >= d.rows()) throw Error("metric extension: subset index out of range");
  if (rho.rows() != s.size() || !rho.is_square()) throw Error("metric extension: rho must be |S| x |S|");
  const auto report = validate_metric(rho);
  if (!report.valid()) {
    const auto& v = report.violations.front();
    throw Error("metric extension: rho is not a metric on S (" + to_string(v.axiom) + " at " +
                std::to_string(v.i) + "," + std::to_string(v.k) + "," + std::to_string(v.j) + ")");
  }
}

// Writes rho onto S x S of m.
void pin_subset(Matrix& m, const IndexSet& s, const Matrix& rho) {
  for (std::size_t a = 0; a < s.size(); ++a) {
    for (std::size_t b = 0; b < s.size(); ++b) m(s[a], s[b]) = rho(a, b);
  }
}

}  // namespace

MetricExtension metric_extension_lp(const Matrix& d, const IndexSet& s, const Matrix& rho,
                                    const lp::SolverOptions& solver) {
  check_extension_inputs(d, s, rho);
  const std::size_t n = d.rows();
  std::vector<long> pos_in_s(n, -1);
  for (std::size_t a = 0; a < s.size(); ++a) pos_in_s[s[a]] = long(a);

  double min_positive = kInf;
  for (Index x = 0; x < n; ++x) {
    for (Index y = x + 1; y < n; ++y) {
      if (d(x, y) > 0.0) min_positive = std::min(min_positive, d(x, y));
    }
  }
  const double floor = std::isfinite(min_positive) ? 1e-9 * min_positive : 1e-9;

  // One variable per pair not inside S x S, plus t (the last variable).
  Matrix var_of(n, n, -1.0);
  std::vector<std::pair<Index, Index>> pairs;
  for (Index x = 0; x < n; ++x) {
    for (Index y = x + 1; y < n; ++y) {
      if (pos_in_s[x] >= 0 && pos_in_s[y] >= 0) continue;
      var_of(x, y) = var_of(y, x) = double(pairs.size());
      pairs.emplace_back(x, y);
    }
  }
  const std::size_t t_var = pairs.size();
  const std::size_t vars = t_var + 1;

  lp::LinearProgram prog;
  prog.sense = lp::Sense::minimize;
  prog.objective.assign(vars, 0.0);
  prog.objective[t_var] = 1.0;
  prog.bounds.assign(vars, lp::VariableBounds{floor, kInf});
  prog.bounds[t_var] = {0.0, kInf};

  auto fixed = [&](Index x, Index y) { return rho(std::size_t(pos_in_s[x]), std::size_t(pos_in_s[y])); };
  // lhs pair <= pair1 + pair2, moving constants to the rhs.
  auto add_triangle = [&](Index x, Index y, Index z) {
    lp::Constraint c;
    c.coefficients.assign(vars, 0.0);
    c.relation = lp::Relation::less_equal;
    double rhs = 0.0;
    auto put = [&](Index u, Index v, double sign) {
      if (var_of(u, v) >= 0.0) {
        c.coefficients[std::size_t(var_of(u, v))] += sign;
      } else {
        rhs -= sign * fixed(u, v);
      }
    };
    put(x, y, 1.0);
    put(x, z, -1.0);
    put(z, y, -1.0);
    bool any = false;
    for (double a : c.coefficients) any = any || a != 0.0;
    if (!any) return;
    c.rhs = rhs;
    prog.constraints.push_back(std::move(c));
  };
  for (Index x = 0; x < n; ++x) {
    for (Index y = x + 1; y < n; ++y) {
      for (Index z = y + 1; z < n; ++z) {
        add_triangle(x, y, z);
        add_triangle(x, z, y);
        add_triangle(y, z, x);
      }
    }
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [x, y] = pairs[p];
    lp::Constraint up;
    up.coefficients.assign(vars, 0.0);
    up.coefficients[p] = 1.0;
    up.coefficients[t_var] = -1.0;
    up.relation = lp::Relation::less_equal;
    up.rhs = d(x, y);
    prog.constraints.push_back(up);
    lp::Constraint down = up;
    down.coefficients[p] = -1.0;
    down.rhs = -d(x, y);
    prog.constraints.push_back(std::move(down));
  }

  const auto sol = lp::solve(prog, solver);
  if (sol.status != lp::Status::optimal) {
    throw Error("metric_extension_lp: LP " + lp::to_string(sol.status));
  }
  MetricExtension out;
  out.metric = Matrix::square(n);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [x, y] = pairs[p];
    out.metric(x, y) = out.metric(y, x) = sol.assignment[p];
  }
  pin_subset(out.metric, s, rho);
  out.distortion = sup_distance(out.metric, d);
  out.bound = sup_distance(rho, d.restrict_to(s));
  out.pivots = sol.pivots;
  return out;
}

MetricExtension metric_extension_paths(const Matrix& d, const IndexSet& s, const Matrix& rho) {
  check_extension_inputs(d, s, rho);
  const double delta = sup_distance(rho, d.restrict_to(s));
  Matrix w = d;
  for (double& v : w.data()) v += delta;
  pin_subset(w, s, rho);
  MetricExtension out;
  out.metric = shortest_path_closure(std::move(w));
  pin_subset(out.metric, s, rho);
  out.distortion = sup_distance(out.metric, d);
  out.bound = delta;
  return out;
}

}  // namespace lipfree
