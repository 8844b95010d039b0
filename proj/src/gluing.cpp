#include "lipfree/gluing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace lipfree {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string pt(Index x) { return "point " + std::to_string(x); }

bool subset_of(const IndexSet& a, const IndexSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Index> positions_in(const IndexSet& universe, const std::vector<Index>& members) {
  std::vector<Index> out;
  out.reserve(members.size());
  for (Index x : members) {
    auto it = std::lower_bound(universe.begin(), universe.end(), x);
    if (it == universe.end() || *it != x) throw Error("internal: point " + std::to_string(x) + " missing from subset");
    out.push_back(Index(it - universe.begin()));
  }
  return out;
}

IndexSet sublevel(const std::vector<double>& values, double threshold, bool strict) {
  IndexSet out;
  for (Index x = 0; x < values.size(); ++x) {
    if (strict ? values[x] < threshold : values[x] <= threshold) out.push_back(x);
  }
  return out;
}

// Brick cover of K in K-local indices. K must be a lattice box of the grid
// (possibly flat along some axes) whose lattice dimension is at most dimK,
// or else the ambient bricks restricted to K must already have order at
// most dimK.
CoverFamily k_refiner(const FiniteMetricSpace& space, const IndexSet& k, double eps, int dim_k) {
  if (!space.grid) throw Error("build_section4: the space needs grid structure to cover K");
  const GridInfo& grid = *space.grid;
  const std::size_t axes = grid.dims.size();
  std::vector<std::size_t> lo(axes, std::numeric_limits<std::size_t>::max()), hi(axes, 0);
  std::vector<std::vector<std::size_t>> coords;
  for (Index x : k) {
    coords.push_back(grid.lattice(x));
    for (std::size_t a = 0; a < axes; ++a) {
      lo[a] = std::min(lo[a], coords.back()[a]);
      hi[a] = std::max(hi[a], coords.back()[a]);
    }
  }
  std::size_t box = 1;
  std::vector<std::size_t> live;
  for (std::size_t a = 0; a < axes; ++a) {
    box *= hi[a] - lo[a] + 1;
    if (hi[a] > lo[a]) live.push_back(a);
  }

  CoverFamily family;
  if (box == k.size()) {
    if (int(live.size()) > dim_k) {
      throw Error("build_section4: K is a lattice box of dimension " + std::to_string(live.size()) +
                  " but dimK = " + std::to_string(dim_k));
    }
    if (live.empty()) {
      family.sets = {IndexSet{0}};
      family.order_bound = 0;
      family.is_cover = family.verified = true;
      return family;
    }
    GridInfo sub;
    sub.spacing = grid.spacing;
    sub.ground = grid.ground;
    for (std::size_t a : live) sub.dims.push_back(hi[a] - lo[a] + 1);
    FiniteMetricSpace tmp{{}, Matrix::square(k.size()), 0, sub};
    std::vector<Index> local_of(k.size());
    for (std::size_t q = 0; q < k.size(); ++q) {
      std::vector<std::size_t> c;
      for (std::size_t a : live) c.push_back(coords[q][a] - lo[a]);
      local_of[sub.index_of(c)] = q;
    }
    CoverFamily bricks = brick_cover(tmp, eps);
    for (auto& s : bricks.sets) {
      IndexSet mapped;
      for (Index y : s) mapped.push_back(local_of[y]);
      std::sort(mapped.begin(), mapped.end());
      family.sets.push_back(std::move(mapped));
    }
    family.order_bound = int(live.size());
    family.is_cover = family.verified = true;
    return family;
  }

  CoverFamily ambient = brick_cover(space, eps);
  for (const auto& s : ambient.sets) {
    IndexSet local;
    for (Index x : s) {
      auto it = std::lower_bound(k.begin(), k.end(), x);
      if (it != k.end() && *it == x) local.push_back(Index(it - k.begin()));
    }
    if (!local.empty()) family.sets.push_back(std::move(local));
  }
  const int ord = order(family.sets, k.size());
  if (ord > dim_k) {
    throw Error("build_section4: bricks restricted to K have order " + std::to_string(ord) + " > dimK = " +
                std::to_string(dim_k));
  }
  family.order_bound = dim_k;
  family.is_cover = family.verified = true;
  return family;
}

}  // namespace

void validate(const GluingConfig& cfg) {
  const std::size_t n = cfg.space.size();
  if (cfg.k.empty()) throw Error("gluing: K is empty");
  for (Index x : cfg.k) {
    if (x >= n) throw Error("gluing: K member " + std::to_string(x) + " out of range");
  }
  if (!std::is_sorted(cfg.k.begin(), cfg.k.end()) || std::adjacent_find(cfg.k.begin(), cfg.k.end()) != cfg.k.end()) {
    throw Error("gluing: K must be sorted and duplicate-free");
  }
  if (!contains(cfg.k, cfg.space.base)) throw Error("gluing: the base point must lie in K");
  if (cfg.dim_k < 0) throw Error("gluing: dimK must be nonnegative");
  if (cfg.thresholds.empty()) throw Error("gluing: no thresholds");
  for (std::size_t i = 0; i < cfg.thresholds.size(); ++i) {
    if (!(cfg.thresholds[i] > 0.0)) throw Error("gluing: thresholds must be positive");
    if (i > 0 && !(cfg.thresholds[i] < cfg.thresholds[i - 1])) {
      throw Error("gluing: thresholds must be strictly decreasing");
    }
  }
}

std::vector<IndexSet> build_exhaustion(const GluingConfig& cfg) {
  validate(cfg);
  const auto to_k = dist_to_set_all(cfg.space.dist, cfg.k);
  std::vector<IndexSet> out;
  for (double t : cfg.thresholds) {
    IndexSet c;
    for (Index x = 0; x < to_k.size(); ++x) {
      if (to_k[x] >= t) c.push_back(x);
    }
    out.push_back(std::move(c));
  }
  const IndexSet outside = complement(cfg.k, cfg.space.size());
  if (!subset_of(outside, out.back())) {
    Index witness = 0;
    for (Index x : outside) {
      if (!contains(out.back(), x)) {
        witness = x;
        break;
      }
    }
    throw Error("build_exhaustion: " + pt(witness) + " at distance " + std::to_string(to_k[witness]) +
                " from K lies below the last threshold " + std::to_string(cfg.thresholds.back()));
  }
  return out;
}

Sandwich sandwich_sets(const Matrix& m, const IndexSet& k, double inner_threshold, double outer_threshold) {
  const auto to_k = dist_to_set_all(m, k);
  return {sublevel(to_k, inner_threshold, false), sublevel(to_k, outer_threshold, true)};
}

Sandwich v_sets(const Matrix& bar_d, const IndexSet& k, double eps, int dim_k) {
  return sandwich_sets(bar_d, k, eps / (32.0 * (dim_k + 1)), eps / (14.0 * (dim_k + 1)));
}

Sandwich w_sets(const Matrix& e, const IndexSet& k, double eps, int dim_k) {
  return sandwich_sets(e, k, eps / (30.0 * (dim_k + 1)), eps / (15.0 * (dim_k + 1)));
}

std::vector<double> cutoff_rho(const Matrix& e, const IndexSet& w1, double eps, int dim_k) {
  if (w1.empty()) throw Error("cutoff_rho: W1 is empty");
  const double slope = 30.0 * (dim_k + 1) / eps;
  auto rho = dist_to_set_all(e, w1);
  for (double& v : rho) v = std::min(1.0, slope * v);
  return rho;
}

double gamma_constant(int dim_k) { return 88.0 * (dim_k + 1) * (2.0 * dim_k + 3); }
double rnm_bound(int dim_k) { return (150.0 * dim_k + 152) * (gamma_constant(dim_k) + 1); }
double rnm_admission_radius(double eps, int dim_k) { return eps / (480.0 * (dim_k + 1)); }

Section4Bundle build_section4(const GluingConfig& cfg, std::size_t n, double nu, const Section4Options& opts) {
  if (n == 0 || n > cfg.thresholds.size()) {
    throw Error("build_section4: n must lie in 1.." + std::to_string(cfg.thresholds.size()));
  }
  if (!(nu > 0.0)) throw Error("build_section4: nu must be positive");
  Section4Bundle b;
  b.cfg = cfg;
  b.n = n;
  b.nu = nu;
  b.exhaustion = build_exhaustion(cfg);
  const Matrix& d = cfg.space.dist;
  const std::size_t size = d.rows();
  const IndexSet& k = cfg.k;
  const int dk = cfg.dim_k;
  const Index base = cfg.space.base;
  const auto to_k = dist_to_set_all(d, k);

  double k_to_cn = kInf;
  for (Index x : b.exhaustion[n - 1]) k_to_cn = std::min(k_to_cn, to_k[x]);
  b.eps = std::min(nu / 5.0, k_to_cn);
  b.gamma = gamma_constant(dk);
  const double eps = b.eps;

  Json inputs = {{"points", size},
                 {"K", k},
                 {"dimK", dk},
                 {"base", base},
                 {"thresholds", cfg.thresholds},
                 {"n", n},
                 {"nu", nu},
                 {"metric_hash", hash_hex(fnv1a_hash(Json(d.to_rows())))}};
  b.certificate = Certificate("section4", inputs);
  Certificate& cert = b.certificate;
  cert.add("eps = min(nu/5, d(K, C_n))", Bound::equal, eps, std::min(nu / 5.0, k_to_cn), 0.0);

  // Net and cover of K, in indices of T.
  const Matrix d_k = d.restrict_to(k);
  const Index base_k = positions_in(k, {base})[0];
  const CoverFamily refiner = k_refiner(cfg.space, k, eps, dk);
  NetAndCover local = build_net_cover(d_k, base_k, eps, refiner);
  cert.absorb(verify_net_cover(local, d_k, base_k), "K cover: ");
  b.k_cover.eps = eps;
  b.k_cover.order_bound = dk;
  for (Index a : local.net) b.k_cover.net.push_back(k[a]);
  for (const auto& u : local.sets) {
    IndexSet g;
    for (Index x : u) g.push_back(k[x]);
    b.k_cover.sets.push_back(std::move(g));
  }
  const auto& net = b.k_cover.net;
  const auto& u_sets = b.k_cover.sets;
  const std::size_t members = net.size();

  // Lebesgue number of the K cover and the shrunken sets U_i'.
  std::vector<std::vector<double>> to_rest(members);
  for (std::size_t i = 0; i < members; ++i) {
    IndexSet rest;
    std::set_difference(k.begin(), k.end(), u_sets[i].begin(), u_sets[i].end(), std::back_inserter(rest));
    to_rest[i] = rest.empty() ? std::vector<double>(size, kInf) : dist_to_set_all(d, rest);
  }
  b.xi = kInf;
  for (Index x : k) {
    double best = 0.0;
    for (std::size_t i = 0; i < members; ++i) best = std::max(best, to_rest[i][x]);
    b.xi = std::min(b.xi, best);
  }
  for (std::size_t i = 0; i < members; ++i) {
    IndexSet shrunk;
    for (Index x : u_sets[i]) {
      if (to_rest[i][x] >= b.xi) shrunk.push_back(x);
    }
    b.u_shrunk.push_back(std::move(shrunk));
  }
  {
    IndexSet cover_k;
    for (const auto& s : b.u_shrunk) cover_k = set_union(cover_k, s);
    cert.add_fact("shrunken sets cover K", subset_of(k, cover_k));
  }

  // Dilate U_i' into T by the largest radius keeping the order <= dimK.
  std::vector<std::vector<double>> to_shrunk(members);
  std::set<double> radii;
  for (std::size_t i = 0; i < members; ++i) {
    to_shrunk[i] = dist_to_set_all(d, b.u_shrunk[i]);
    for (double v : to_shrunk[i]) {
      if (v > 0.0 && v <= eps / 2.0) radii.insert(v);
    }
  }
  radii.insert(eps / 2.0);
  const std::vector<double> candidates(radii.begin(), radii.end());
  auto dilated = [&](double s) {
    std::vector<IndexSet> sets(members);
    for (std::size_t i = 0; i < members; ++i) sets[i] = sublevel(to_shrunk[i], s, true);
    return sets;
  };
  auto order_ok = [&](double s) { return order(dilated(s), size) <= dk; };
  if (!order_ok(candidates.front())) {
    throw Error("build_section4: even the smallest dilation of the K cover exceeds order dimK");
  }
  std::size_t lo = 0, hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi + 1) / 2;
    if (order_ok(candidates[mid])) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  b.dilation = candidates[lo];

  // V_i: inside the dilation, closer to U_i' than every other net point, and
  // inside the open eps/2 ball around a_i.
  std::vector<std::string> leaks;
  for (std::size_t i = 0; i < members; ++i) {
    double eta_i = kInf;
    for (std::size_t j = 0; j < members; ++j) {
      if (j != i) eta_i = std::min(eta_i, to_shrunk[i][net[j]]);
    }
    const double reach = std::min(b.dilation, eta_i);
    IndexSet vi;
    for (Index x = 0; x < size; ++x) {
      if (to_shrunk[i][x] < reach && d(x, net[i]) < eps / 2.0) vi.push_back(x);
    }
    for (std::size_t j = 0; j < members; ++j) {
      if (contains(vi, net[j]) != (i == j)) leaks.push_back("net " + std::to_string(j) + " vs V_" + std::to_string(i));
    }
    b.v_members.push_back(std::move(vi));
  }
  cert.add_fact("net point i lies exactly in V_i", leaks.empty(), leaks);
  cert.add("order of (V_i) <= dimK", Bound::less_equal, double(order(b.v_members, size)), double(dk));

  // eta: the largest level of d(., K) below eps/2 whose sublevel set stays
  // inside the union of the V_i.
  IndexSet v_union;
  for (const auto& s : b.v_members) v_union = set_union(v_union, s);
  std::set<double> levels;
  for (double v : to_k) {
    if (v > 0.0 && v < eps / 2.0) levels.insert(v);
  }
  b.eta = 0.0;
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    if (subset_of(sublevel(to_k, *it, false), v_union)) {
      b.eta = *it;
      break;
    }
  }
  if (b.eta == 0.0) {
    double smallest = eps / 2.0;
    for (double v : to_k) {
      if (v > 0.0) smallest = std::min(smallest, v);
    }
    b.eta = smallest / 2.0;
  }
  b.v = sublevel(to_k, b.eta, false);
  cert.add("eta > 0", Bound::greater, b.eta, 0.0);
  cert.add("eta < eps/2", Bound::less, b.eta, eps / 2.0);
  cert.add_fact("K inside V inside the union of V_i", subset_of(k, b.v) && subset_of(b.v, v_union));

  // Extension operator on V.
  NetAndCover nc_v;
  nc_v.eps = eps;
  nc_v.order_bound = dk;
  nc_v.net = positions_in(b.v, net);
  for (const auto& vi : b.v_members) {
    IndexSet inside;
    std::set_intersection(vi.begin(), vi.end(), b.v.begin(), b.v.end(), std::back_inserter(inside));
    nc_v.sets.push_back(positions_in(b.v, inside));
  }
  const Matrix d_v = d.restrict_to(b.v);
  b.inner = build_prop33(d_v, positions_in(b.v, {base})[0], nc_v, opts.extension);
  cert.absorb(b.inner.certificate, "V: ");

  // d2 extends d1 = inner bar_d from V to T.
  const Matrix& d1 = b.inner.bar_d;
  b.extension = opts.extension_by_lp ? metric_extension_lp(d, b.v, d1) : metric_extension_paths(d, b.v, d1);
  const double d1_gap = sup_distance(d1, d_v);
  cert.add("sup |d2 - d| <= sup |d1 - d on V|", Bound::less_equal, b.extension.distortion, d1_gap,
           opts.extension.tol);
  cert.add("sup |d2 - d| < 4 eps", Bound::less, b.extension.distortion, 4.0 * eps);
  cert.add("d2 = d1 on V", Bound::equal, sup_distance(b.extension.metric.restrict_to(b.v), d1), 0.0, 0.0);
  cert.add_fact("d2 is a metric", validate_metric(b.extension.metric).valid());

  // bar_d = d2 + eps e1 / (14 eta (dimK + 1)).
  b.e1 = truncate(d, b.eta);
  Matrix scaled = b.e1;
  const double weight = eps / (14.0 * b.eta * (dk + 1));
  for (double& v : scaled.data()) v *= weight;
  b.bar_d = add_pseudometrics(b.extension.metric, scaled);
  cert.add_fact("bar_d is a metric", validate_metric(b.bar_d).valid());
  cert.add("sup |bar_d - d2| <= eps/(14(dimK+1))", Bound::less_equal, sup_distance(b.bar_d, b.extension.metric),
           eps / (14.0 * (dk + 1)), opts.extension.tol);
  cert.add("sup |bar_d - d| < 5 eps", Bound::less, sup_distance(b.bar_d, d), 5.0 * eps);
  cert.add("5 eps <= nu", Bound::less_equal, 5.0 * eps, nu, opts.extension.tol);

  b.v12 = v_sets(b.bar_d, k, eps, dk);
  cert.add_fact("V2 inside V", subset_of(b.v12.outer, b.v));
  b.m = 0;
  for (std::size_t m = n; m <= b.exhaustion.size(); ++m) {
    if (set_union(b.exhaustion[m - 1], b.v12.inner).size() == size) {
      b.m = m;
      break;
    }
  }
  if (b.m == 0) {
    throw Error("build_section4: no m >= n with C_m and V1 covering T; add smaller thresholds");
  }
  cert.add_fact("C_m and V1 cover T", true);
  cert.payload()["m"] = b.m;
  cert.payload()["eps"] = eps;
  cert.payload()["eta"] = b.eta;
  cert.payload()["xi"] = number_to_json(b.xi);
  cert.payload()["dilation"] = b.dilation;
  cert.payload()["net"] = net;
  cert.payload()["V"] = b.v;
  cert.payload()["admission_radius"] = rnm_admission_radius(eps, dk);
  return b;
}

WeightOperator build_H_operator(const Section4Bundle& bundle, const PerturbedBundle& e_on_v,
                                const std::vector<double>& rho) {
  const std::size_t size = bundle.cfg.space.size();
  const IndexSet& cm = bundle.exhaustion[bundle.m - 1];
  const auto& net = bundle.k_cover.net;
  const IndexSet domain = set_union(cm, make_index_set(net, size));
  const auto net_cols = positions_in(domain, net);

  WeightOperator h;
  h.domain = domain;
  h.rows.resize(size);
  for (Index x = 0; x < size; ++x) {
    std::vector<Weight> entries;
    if (rho[x] < 1.0) {
      auto it = std::lower_bound(bundle.v.begin(), bundle.v.end(), x);
      if (it == bundle.v.end() || *it != x) throw Error("build_H: rho < 1 at " + pt(x) + " outside V");
      for (const auto& w : e_on_v.mu.rows[Index(it - bundle.v.begin())]) {
        entries.push_back({net_cols[w.column], (1.0 - rho[x]) * w.value});
      }
    }
    if (rho[x] > 0.0) {
      auto it = std::lower_bound(domain.begin(), domain.end(), x);
      if (it == domain.end() || *it != x || !contains(cm, x)) {
        throw Error("build_H: rho > 0 at " + pt(x) + " outside C_m");
      }
      entries.push_back({Index(it - domain.begin()), rho[x]});
    }
    h.rows[x] = make_weight_row(std::move(entries));
  }
  return h;
}

LipFunction build_H(const Section4Bundle& bundle, const PerturbedBundle& e_on_v, const std::vector<double>& rho,
                    const LipFunction& f) {
  const auto h = build_H_operator(bundle, e_on_v, rho);
  std::vector<double> on_domain;
  for (Index x : h.domain) on_domain.push_back(f.at(x));
  return apply_weight_operator(h, on_domain);
}

RnmResult certify_rnm(const Section4Bundle& bundle, const Matrix& e, const RnmOptions& opts) {
  RnmResult res;
  const auto& cfg = bundle.cfg;
  const std::size_t size = cfg.space.size();
  const int dk = cfg.dim_k;
  const double eps = bundle.eps;
  res.bound = rnm_bound(dk);
  res.radius = rnm_admission_radius(eps, dk);

  Json inputs = {{"section4", bundle.certificate.inputs()},
                 {"n", bundle.n},
                 {"m", bundle.m},
                 {"dimK", dk},
                 {"eps", eps},
                 {"metric_hash", hash_hex(fnv1a_hash(Json(e.to_rows())))},
                 {"seed", opts.seed}};
  res.certificate = Certificate("rnm", std::move(inputs));
  Certificate& cert = res.certificate;
  cert.payload()["bound"] = res.bound;
  cert.payload()["admission_radius"] = res.radius;
  cert.payload()["n"] = bundle.n;
  cert.payload()["m"] = bundle.m;

  if (e.rows() != size || !e.is_square()) {
    cert.add_fact("e has the shape of d", false);
    return res;
  }
  const bool metric = validate_metric(e).valid();
  cert.add_fact("e is a metric", metric);
  res.admission = sup_distance(e, bundle.bar_d);
  cert.add("sup |e - bar_d| < eps/(480(dimK+1))", Bound::less, res.admission, res.radius);
  if (!metric || !(res.admission < res.radius)) return res;

  res.w12 = w_sets(e, cfg.k, eps, dk);
  const auto& v1 = bundle.v12.inner;
  const auto& v2 = bundle.v12.outer;
  const auto& w1 = res.w12.inner;
  const auto& w2 = res.w12.outer;
  cert.add_fact("V1 inside W1", subset_of(v1, w1));
  cert.add_fact("W1 inside W2", subset_of(w1, w2));
  cert.add_fact("W2 inside V2", subset_of(w2, v2));
  cert.add_fact("V2 inside V", subset_of(v2, bundle.v));

  // E on V for the metric e.
  const Matrix e_v = e.restrict_to(bundle.v);
  ExtensionOptions ext;
  ext.tol = opts.tol;
  ext.norm = opts.norm;
  PerturbedBundle g;
  try {
    g = build_perturbed_G(bundle.inner, e_v, ext);
  } catch (const Error& ex) {
    cert.add_fact("E on V is admissible", false, {ex.what()});
    return res;
  }
  cert.absorb(g.certificate, "E on V: ");
  res.e_norm = g.g_norm.norm;
  cert.add("norm(E) <= Gamma", Bound::less_equal, res.e_norm, bundle.gamma, opts.tol);

  // Cutoff.
  const IndexSet& cn = bundle.exhaustion[bundle.n - 1];
  const IndexSet& cm = bundle.exhaustion[bundle.m - 1];
  res.rho = cutoff_rho(e, w1, eps, dk);
  const auto& rho = res.rho;
  cert.add("Lip_e(rho) <= 30(dimK+1)/eps", Bound::less_equal, lipschitz_constant(rho, e), 30.0 * (dk + 1) / eps,
           opts.tol);
  std::vector<std::string> off_cm, off_cn, off_v;
  for (Index x = 0; x < size; ++x) {
    if (!contains(cm, x) && rho[x] != 0.0) off_cm.push_back(pt(x));
    if (contains(cn, x) && rho[x] != 1.0) off_cn.push_back(pt(x));
    if (!contains(bundle.v, x) && rho[x] != 1.0) off_v.push_back(pt(x));
  }
  cert.add_fact("rho = 0 outside C_m", off_cm.empty(), off_cm);
  cert.add_fact("rho = 1 on C_n", off_cn.empty(), off_cn);
  cert.add_fact("rho = 1 outside V", off_v.empty(), off_v);

  // Glued operator and its norm.
  try {
    res.h = build_H_operator(bundle, g, rho);
  } catch (const Error& ex) {
    cert.add_fact("H is defined", false, {ex.what()});
    return res;
  }
  const IndexSet& domain = res.h.domain;
  const Index base_col = positions_in(domain, {cfg.space.base})[0];
  const Matrix e_dom = e.restrict_to(domain);
  res.h_norm = operator_norm(res.h, e_dom, e, base_col, opts.norm);
  cert.add("norm(H) <= (150 dimK + 152)(Gamma + 1)", Bound::less_equal, res.h_norm.norm, res.bound, opts.tol,
           {pt(res.h_norm.x) + ", " + pt(res.h_norm.y)});
  cert.add_fact("dual operator condition (automatic in finite dimension)", true);

  // Test family: McShane extensions of random +-1 seeds on C_m u A.
  const IndexSet fixed_set = set_union(cn, make_index_set(bundle.k_cover.net, size));
  std::mt19937_64 rng(opts.seed);
  double worst_restriction = 0.0, worst_base = 0.0, worst_lip_excess = -kInf, worst_product = 0.0,
         worst_formula = 0.0;
  const double product_factor = 150.0 * dk + 151.0;
  for (std::size_t t = 0; t < opts.test_functions; ++t) {
    std::vector<Index> seeds{base_col};
    std::vector<double> values{0.0};
    std::uniform_int_distribution<std::size_t> pick(0, domain.size() - 1);
    const std::size_t count = std::min<std::size_t>(domain.size() - 1, 6);
    while (seeds.size() < count + 1) {
      const Index c = pick(rng);
      if (std::find(seeds.begin(), seeds.end(), c) != seeds.end()) continue;
      seeds.push_back(c);
      values.push_back(rng() % 2 ? 1.0 : -1.0);
    }
    const double seed_lip = lipschitz_constant_on(
        [&] {
          std::vector<double> f(domain.size(), 0.0);
          for (std::size_t s = 0; s < seeds.size(); ++s) f[seeds[s]] = values[s];
          return f;
        }(),
        e_dom, seeds);
    std::vector<double> f = mcshane_extend(seeds, values, seed_lip, e_dom);
    const double lip_f = lipschitz_constant(f, e_dom);
    if (lip_f > 0.0) {
      for (double& v : f) v /= lip_f;
    }
    const auto hf = apply_weight_operator(res.h, f);

    for (Index x : fixed_set) {
      const Index c = positions_in(domain, {x})[0];
      worst_restriction = std::max(worst_restriction, std::abs(hf[x] - f[c]));
    }
    worst_base = std::max(worst_base, std::abs(hf[cfg.space.base]));
    worst_lip_excess = std::max(worst_lip_excess, lipschitz_constant(hf, e) - res.h_norm.norm);

    // u = f~ - g~, with f~ and g~ McShane extensions to T of f and E(f|A).
    std::vector<double> f_net;
    for (Index a : bundle.k_cover.net) f_net.push_back(f[positions_in(domain, {a})[0]]);
    const auto g_on_v = apply_weight_operator(g.mu, f_net);
    const auto f_tilde = mcshane_extend(domain, f, lipschitz_constant(f, e_dom), e, 1e-9);
    const auto g_tilde = mcshane_extend(bundle.v, g_on_v, lipschitz_constant(g_on_v, e_v), e, 1e-9);
    std::vector<double> u(size), u_rho(size);
    for (Index x = 0; x < size; ++x) {
      u[x] = f_tilde[x] - g_tilde[x];
      u_rho[x] = u[x] * rho[x];
      const double h_formula = (1.0 - rho[x]) * g_tilde[x] + rho[x] * f_tilde[x];
      worst_formula = std::max(worst_formula, std::abs(h_formula - hf[x]));
    }
    const double lip_u = lipschitz_constant(u, e);
    const double lip_u_rho = lipschitz_constant(u_rho, e);
    if (lip_u > 0.0) worst_product = std::max(worst_product, lip_u_rho / lip_u);
  }
  if (opts.test_functions > 0) {
    cert.add("H(f) = f on C_n and A", Bound::equal, worst_restriction, 0.0, 0.0);
    cert.add("H(f)(a0) = 0", Bound::equal, worst_base, 0.0, 0.0);
    cert.add("Lip_e(H f) <= norm(H) on the test family", Bound::less_equal, worst_lip_excess, 0.0, opts.tol);
    cert.add("Lip_e(u rho) <= (150 dimK + 151) Lip_e(u)", Bound::less_equal, worst_product, product_factor,
             opts.tol);
    cert.add("H(f) = (1 - rho) g~ + rho f~", Bound::equal, worst_formula, 0.0, 1e-9);
  }
  cert.payload()["norm_H"] = res.h_norm.norm;
  cert.payload()["norm_E"] = res.e_norm;
  cert.payload()["headroom"] = res.bound / std::max(res.h_norm.norm, 1e-300);
  return res;
}

}  // namespace lipfree
