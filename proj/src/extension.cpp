#include "lipfree/extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "lipfree/parallel.hpp"

namespace lipfree {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct RowLess {
  bool operator()(const WeightRow& a, const WeightRow& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [](const Weight& p, const Weight& q) {
      return p.column != q.column ? p.column < q.column : p.value < q.value;
    });
  }
};

std::string pt(Index x) { return "point " + std::to_string(x); }

// Largest Lipschitz constant over the columns of w, with the column index.
std::pair<double, std::size_t> max_column_lipschitz(const WeightOperator& w, const Matrix& metric) {
  std::pair<double, std::size_t> best{0.0, 0};
  std::vector<double> column(w.rows.size());
  for (std::size_t i = 0; i < w.domain.size(); ++i) {
    for (Index x = 0; x < w.rows.size(); ++x) {
      double v = 0.0;
      for (const auto& e : w.rows[x]) {
        if (e.column == i) v = e.value;
      }
      column[x] = v;
    }
    const double lip = lipschitz_constant(column, metric);
    if (lip > best.first) best = {lip, i};
  }
  return best;
}

IndexSet sorted_net(const NetAndCover& nc, std::size_t n) { return make_index_set(nc.net, n); }

}  // namespace

WeightOperator partition_of_unity(const Matrix& d, const std::vector<Index>& net, const std::vector<IndexSet>& sets) {
  const std::size_t n = d.rows();
  if (net.size() != sets.size()) throw Error("partition_of_unity: net and cover differ in length");
  if (sets.empty()) throw Error("partition_of_unity: empty cover");
  std::vector<std::vector<double>> far(sets.size());
  std::vector<char> full(sets.size(), 0);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const IndexSet comp = complement(sets[i], n);
    if (comp.empty()) {
      full[i] = 1;
    } else {
      far[i] = dist_to_set_all(d, comp);
    }
  }
  const auto full_count = std::count(full.begin(), full.end(), 1);

  WeightOperator w;
  w.domain = net;
  w.partition_type = true;
  w.rows.resize(n);
  for (Index x = 0; x < n; ++x) {
    std::vector<Weight> entries;
    if (full_count > 0) {
      for (std::size_t i = 0; i < sets.size(); ++i) {
        if (full[i]) entries.push_back({i, 1.0 / double(full_count)});
      }
    } else {
      double total = 0.0;
      for (std::size_t i = 0; i < sets.size(); ++i) total += far[i][x];
      if (!(total > 0.0)) throw Error("partition_of_unity: " + pt(x) + " lies in no cover set");
      for (std::size_t i = 0; i < sets.size(); ++i) {
        if (far[i][x] > 0.0) entries.push_back({i, far[i][x] / total});
      }
    }
    w.rows[x] = make_weight_row(std::move(entries));
  }
  return w;
}

PseudometricMatrix tilde_metric(const WeightOperator& w, const Matrix& d_net, std::size_t base_column,
                                const FreeNormOptions& opts) {
  const std::size_t n = w.rows.size();
  std::map<WeightRow, std::size_t, RowLess> classes;
  std::vector<std::size_t> class_of(n);
  std::vector<Index> representative;
  for (Index x = 0; x < n; ++x) {
    auto [it, inserted] = classes.emplace(w.rows[x], representative.size());
    if (inserted) representative.push_back(x);
    class_of[x] = it->second;
  }
  const std::size_t k = representative.size();
  Matrix by_class = Matrix::square(k);
  parallel_for(k, [&](std::size_t a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const auto mu = w.row_difference(representative[a], representative[b]);
      by_class(a, b) = free_space_norm(mu, d_net, base_column, opts);
    }
  });
  PseudometricMatrix out = Matrix::square(n);
  for (Index x = 0; x < n; ++x) {
    for (Index y = 0; y < n; ++y) {
      const std::size_t a = class_of[x];
      const std::size_t b = class_of[y];
      out(x, y) = a == b ? 0.0 : by_class(std::min(a, b), std::max(a, b));
    }
  }
  return out;
}

Certificate verify_sum_dist_bound(const Prop33Bundle& bundle, double tol) {
  const std::size_t n = bundle.bar_d.rows();
  std::vector<double> total(n, 0.0);
  for (const auto& u : bundle.nc.sets) {
    const IndexSet comp = complement(u, n);
    if (comp.empty()) {
      std::fill(total.begin(), total.end(), kInf);
      continue;
    }
    const auto far = dist_to_set_all(bundle.bar_d, comp);
    for (Index x = 0; x < n; ++x) total[x] += far[x];
  }
  const auto it = std::min_element(total.begin(), total.end());
  Certificate cert("sum-dist-bound", {{"eps", bundle.eps}, {"points", n}, {"sets", bundle.nc.sets.size()}});
  cert.add("sum_i bar_d(x, U_i^c) >= eps/3", Bound::greater_equal, *it, bundle.eps / 3.0, tol,
           {pt(Index(it - total.begin()))});
  return cert;
}

Prop33Bundle build_prop33(const Matrix& d, Index base, const NetAndCover& nc, const ExtensionOptions& opts) {
  const auto cover_cert = verify_net_cover(nc, d, base);
  if (const Check* bad = cover_cert.first_failure()) {
    throw Error("build_prop33: net and cover fail '" + bad->name + "'");
  }
  Prop33Bundle b;
  b.d = d;
  b.base = base;
  b.nc = nc;
  b.r = nc.order_bound;
  b.eps = nc.eps;
  const double eps = nc.eps;
  const std::size_t n = d.rows();

  b.lambda = partition_of_unity(d, nc.net, nc.sets);
  const Matrix d_net = d.restrict_to(nc.net);
  b.tilde_d = tilde_metric(b.lambda, d_net, 0, opts.norm.free_norm);
  b.hat_d = hat_metric(d, sorted_net(nc, n));
  b.bar_d = add_pseudometrics(b.tilde_d, b.hat_d);

  Json inputs = {{"eps", eps}, {"r", b.r}, {"base", base}, {"net", nc.net}, {"sets", nc.sets}, {"points", n},
                 {"metric_hash", hash_hex(fnv1a_hash(Json(d.to_rows())))}};
  Certificate& cert = b.certificate;
  cert = Certificate("prop33", std::move(inputs));
  cert.absorb(cover_cert, "cover: ");

  const auto report = validate_metric(b.bar_d);
  std::vector<std::string> why;
  if (!report.valid()) {
    const auto& v = report.violations.front();
    why.push_back(to_string(v.axiom) + " at " + std::to_string(v.i) + "," + std::to_string(v.k) + "," +
                  std::to_string(v.j));
  }
  cert.add_fact("bar_d is a metric", report.valid(), why);
  cert.add("sup |d - bar_d| < 4 eps", Bound::less, sup_distance(d, b.bar_d), 4.0 * eps);
  cert.add("sup |tilde_d - d| < 3 eps", Bound::less, sup_distance(b.tilde_d, d), 3.0 * eps);
  double hat_sup = 0.0;
  for (double v : b.hat_d.data()) hat_sup = std::max(hat_sup, v);
  cert.add("sup hat_d <= eps", Bound::less_equal, hat_sup, eps, opts.tol);
  cert.add("bar_d = d on net pairs", Bound::equal, sup_distance(b.bar_d.restrict_to(nc.net), d_net), 0.0, 0.0);

  cert.add_fact("lambda is a partition of unity", is_partition_type(b.lambda));
  cert.add("E extends (max |lambda_j(a_i) - [i = j]|)", Bound::equal, extension_defect(b.lambda), 0.0, 0.0);

  const auto lip = max_column_lipschitz(b.lambda, b.bar_d);
  cert.add("Lip_bar_d(lambda_i) <= 3/eps", Bound::less_equal, lip.first, 3.0 / eps, opts.tol,
           {"i = " + std::to_string(lip.second)});
  cert.absorb(verify_sum_dist_bound(b, opts.tol), "");

  if (opts.measure_norms) {
    b.e_norm = operator_norm(b.lambda, d_net, b.bar_d, 0, opts.norm);
    // Lip0 of a one-point net is {0}, so E is the zero operator there.
    const double expected = nc.size() > 1 ? 1.0 : 0.0;
    cert.add(nc.size() > 1 ? "norm(E) = 1" : "norm(E) = 0 (one-point net)", Bound::equal, b.e_norm.norm, expected,
             opts.norm_tol, {pt(b.e_norm.x) + ", " + pt(b.e_norm.y)});
  }
  return b;
}

double perturbed_norm_bound(int r) { return 88.0 * (r + 1) * (2.0 * r + 3); }

double admission_radius(const Prop33Bundle& bundle) { return bundle.eps / (12.0 * (bundle.r + 1)); }

PerturbedBundle build_perturbed_G(const Prop33Bundle& bundle, const Matrix& e, const ExtensionOptions& opts) {
  if (e.rows() != bundle.bar_d.rows() || !e.is_square()) throw Error("build_perturbed_G: e has the wrong shape");
  const auto report = validate_metric(e);
  if (!report.valid()) throw Error("build_perturbed_G: e is not a metric (" + to_string(report.violations[0].axiom) + ")");
  PerturbedBundle p;
  p.e = e;
  p.admission = sup_distance(e, bundle.bar_d);
  p.radius = admission_radius(bundle);
  if (!(p.admission <= p.radius)) {
    throw Error("build_perturbed_G: sup |e - bar_d| = " + std::to_string(p.admission) +
                " exceeds the admission radius " + std::to_string(p.radius));
  }
  const int r = bundle.r;
  const double eps = bundle.eps;
  p.claimed_bound = perturbed_norm_bound(r);
  p.mu = partition_of_unity(e, bundle.nc.net, bundle.nc.sets);
  const Matrix e_net = e.restrict_to(bundle.nc.net);

  p.certificate = Certificate("perturbed-G", {{"eps", eps},
                                              {"r", r},
                                              {"radius", p.radius},
                                              {"bundle", bundle.certificate.inputs()},
                                              {"metric_hash", hash_hex(fnv1a_hash(Json(e.to_rows())))}});
  Certificate& cert = p.certificate;
  cert.add("sup |e - bar_d| <= eps/(12(r+1))", Bound::less_equal, p.admission, p.radius, 0.0);
  cert.add_fact("mu is a partition of unity", is_partition_type(p.mu));
  cert.add("G extends (max |mu_j(a_i) - [i = j]|)", Bound::equal, extension_defect(p.mu), 0.0, 0.0);
  const auto lip = max_column_lipschitz(p.mu, e);
  cert.add("Lip_e(mu_i) <= 4(2r+3)/eps", Bound::less_equal, lip.first, 4.0 * (2 * r + 3) / eps, opts.tol,
           {"i = " + std::to_string(lip.second)});

  double interior = 1.0;
  const Matrix bar_net = bundle.bar_d.restrict_to(bundle.nc.net);
  for (std::size_t i = 0; i < e_net.rows(); ++i) {
    for (std::size_t j = i + 1; j < e_net.rows(); ++j) interior = std::max(interior, e_net(i, j) / bar_net(i, j));
  }
  cert.add("Lip_bar_d over the unit ball of Lip0(A, e) <= 1 + 1/(4(r+1))", Bound::less_equal, interior,
           1.0 + 1.0 / (4.0 * (r + 1)), opts.tol);

  if (opts.measure_norms) {
    p.g_norm = operator_norm(p.mu, e_net, e, 0, opts.norm);
    cert.add("norm(G) <= 88(r+1)(2r+3)", Bound::less_equal, p.g_norm.norm, p.claimed_bound, opts.tol,
             {pt(p.g_norm.x) + ", " + pt(p.g_norm.y)});
  }
  return p;
}

Perturbation perturb_metric(const Matrix& m, double amplitude, double radius, std::uint64_t seed) {
  if (!m.is_square()) throw Error("perturb_metric: metric must be square");
  if (!(amplitude >= 0.0) || !(radius >= 0.0)) throw Error("perturb_metric: amplitude and radius must be nonnegative");
  const std::size_t n = m.rows();
  std::mt19937_64 rng(seed);
  Perturbation out;
  out.amplitude = amplitude;
  for (;; ++out.halvings) {
    std::uniform_real_distribution<double> noise(-out.amplitude, out.amplitude);
    Matrix w = m;
    for (Index x = 0; x < n; ++x) {
      for (Index y = x + 1; y < n; ++y) {
        const double v = std::max(m(x, y) + (out.amplitude > 0.0 ? noise(rng) : 0.0), m(x, y) / 2.0);
        w(x, y) = w(y, x) = v;
      }
    }
    out.metric = shortest_path_closure(std::move(w));
    out.distance = sup_distance(out.metric, m);
    if (out.distance <= radius) return out;
    if (out.halvings >= 60) break;
    out.amplitude /= 2.0;
  }
  out.metric = m;
  out.amplitude = 0.0;
  out.distance = 0.0;
  return out;
}

}  // namespace lipfree
