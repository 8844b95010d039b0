#include "lipfree/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lipfree/bap.hpp"
#include "lipfree/cover.hpp"
#include "lipfree/extension.hpp"
#include "lipfree/gluing.hpp"
#include "lipfree/io.hpp"

namespace lipfree {

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

CoverFamily default_refiner(const FiniteMetricSpace& space, double eps) {
  if (space.grid) return brick_cover(space, eps);
  CoverFamily singletons;
  for (Index x = 0; x < space.size(); ++x) singletons.sets.push_back({x});
  singletons.order_bound = 0;
  singletons.is_cover = singletons.verified = true;
  return singletons;
}

int nominal_order(const FiniteMetricSpace& space) { return space.grid ? int(space.grid->dims.size()) : 0; }

std::uint64_t derive_seed(std::uint64_t seed, std::size_t stage, std::size_t j) {
  return seed * 1000003ULL + stage * 1009ULL + j;
}

void emit(RunSummary& sum, const RunOptions& run, const std::string& pipeline, std::size_t n, const Certificate& cert,
          const std::string& csv = {}) {
  const auto name = certificate_file_name(pipeline, run.seed, n);
  if (run.write_files) {
    const auto path = run.out_dir / name;
    write_text_file(path, cert.to_json().dump(1) + "\n");
    sum.files.push_back(path);
    if (run.format == Format::csv) {
      auto csv_path = path;
      csv_path.replace_extension(".csv");
      write_text_file(csv_path, csv.empty() ? certificate_csv(cert) : csv);
      sum.files.push_back(csv_path);
    }
  }
  std::string line = name + ": " + (cert.passed() ? "PASS" : "FAIL");
  if (const Check* bad = cert.first_failure()) line += " (" + bad->name + ": measured " + fmt(bad->measured) + ")";
  if (cert.has_warnings()) line += " [warnings]";
  sum.lines.push_back(line);
  sum.certificates.push_back(cert);
}

}  // namespace

bool RunSummary::all_pass() const {
  return !certificates.empty() &&
         std::all_of(certificates.begin(), certificates.end(), [](const Certificate& c) { return c.passed(); });
}

std::string certificate_file_name(const std::string& pipeline, std::uint64_t seed, std::size_t n) {
  return pipeline + "-" + std::to_string(seed) + "-" + std::to_string(n) + ".json";
}

RunSummary run_build_cover(const BuildCoverConfig& cfg, const RunOptions& run) {
  const auto space = space_from_json(cfg.space, run.tol);
  const CoverFamily refiner = cfg.refiner ? cover_from_json(*cfg.refiner) : default_refiner(space, cfg.eps);
  const auto nc = build_net_cover(space.dist, space.base, cfg.eps, refiner);
  Certificate cert("build-cover", {{"space", cfg.space}, {"eps", cfg.eps}, {"refiner", cover_to_json(refiner)}});
  cert.absorb(verify_net_cover(nc, space.dist, space.base), "");
  const int refiner_order = order(refiner.sets, space.size());
  cert.add("merged order <= refiner order", Bound::less_equal, double(order(nc.sets, space.size())),
           double(refiner_order));
  cert.add("net is eps/2-dense", Bound::less_equal,
           is_eps_dense(space.dist, make_index_set(nc.net, space.size()), cfg.eps / 2.0).max_distance, cfg.eps / 2.0,
           run.tol);
  cert.payload()["net_cover"] = net_cover_to_json(nc);
  RunSummary sum;
  emit(sum, run, "build-cover", 1, cert);
  return sum;
}

RunSummary run_prop33(const Prop33Config& cfg, const RunOptions& run) {
  const auto space = space_from_json(cfg.space, run.tol);
  std::vector<double> eps_values = cfg.eps;
  if (eps_values.empty()) {
    for (std::size_t n : cfg.n_values) {
      if (n == 0) throw Error("prop33: n must be positive");
      eps_values.push_back(std::min(cfg.nu / 4.0, 1.0 / (10.0 * double(n))));
    }
  }
  if (eps_values.empty()) throw Error("prop33: give eps values or n values");

  RunSummary sum;
  ExtensionOptions ext;
  ext.tol = run.tol;
  for (std::size_t stage = 0; stage < eps_values.size(); ++stage) {
    const double eps = eps_values[stage];
    const std::size_t n_param = cfg.eps.empty() ? cfg.n_values[stage] : 0;
    Json inputs = {{"space", cfg.space}, {"eps", eps}, {"perturbations", cfg.perturbations}, {"seed", run.seed}};
    if (n_param > 0) inputs["n"] = n_param, inputs["nu"] = cfg.nu;
    Certificate cert("prop33-stage", inputs);
    if (n_param > 0) {
      cert.add("eps = min(nu/4, 1/(10n))", Bound::equal, eps, std::min(cfg.nu / 4.0, 1.0 / (10.0 * double(n_param))),
               0.0);
    }

    const auto refiner = default_refiner(space, eps);
    const auto nc = build_net_cover(space.dist, space.base, eps, refiner);
    cert.add("merged order <= refiner order", Bound::less_equal, double(order(nc.sets, space.size())),
             double(order(refiner.sets, space.size())));
    const auto bundle = build_prop33(space.dist, space.base, nc, ext);
    cert.absorb(bundle.certificate, "");
    cert.payload()["bundle"] = prop33_to_json(bundle, run.embed_matrices);

    // Any admissible e keeps A dense: diam_e(U_i) < 6 eps, so A is
    // 1/n-dense when 6 eps <= 1/n.
    const double density_target = n_param > 0 ? 1.0 / double(n_param) : 6.0 * eps;
    const double radius = admission_radius(bundle);
    Json sweep = Json::array();
    double worst_norm = 0.0;
    for (std::size_t j = 0; j < cfg.perturbations; ++j) {
      const auto pert = perturb_metric(bundle.bar_d, radius, radius, derive_seed(run.seed, stage, j));
      const auto pb = build_perturbed_G(bundle, pert.metric, ext);
      const std::string tag = "e" + std::to_string(j + 1) + ": ";
      cert.absorb(pb.certificate, tag);
      const auto density = is_eps_dense(pert.metric, make_index_set(nc.net, space.size()), density_target);
      cert.add(tag + "net dense for e", Bound::less_equal, density.max_distance, density_target, run.tol,
               {"point " + std::to_string(density.witness)});
      worst_norm = std::max(worst_norm, pb.g_norm.norm);
      Json entry = perturbed_to_json(pb, run.embed_matrices);
      entry["seed"] = derive_seed(run.seed, stage, j);
      entry["amplitude"] = pert.amplitude;
      sweep.push_back(std::move(entry));
    }
    cert.payload()["perturbations"] = sweep;
    cert.payload()["worst_norm_G"] = worst_norm;
    cert.payload()["bound_G"] = perturbed_norm_bound(bundle.r);
    cert.payload()["headroom"] = perturbed_norm_bound(bundle.r) / std::max(worst_norm, 1e-300);
    emit(sum, run, "prop33", stage + 1, cert);
  }
  return sum;
}

RunSummary run_section4(const Section4Config& cfg, const RunOptions& run) {
  GluingConfig g;
  g.space = space_from_json(cfg.space, run.tol);
  g.k = make_index_set(cfg.k, g.space.size());
  g.dim_k = cfg.dim_k;
  g.thresholds = cfg.thresholds;
  Section4Options opts;
  opts.extension.tol = run.tol;
  validate(g);
  if (g.k.size() == g.space.size()) {
    // Nothing lies outside K, so the construction collapses to a single
    // K covers everything: the single-scale extension bundle on the whole space.
    const double eps = cfg.nu / 5.0;
    Certificate cert("section4-run", {{"config", gluing_config_to_json(g, cfg.space)},
                                       {"n", cfg.n},
                                       {"nu", cfg.nu},
                                       {"seed", run.seed}});
    cert.add_fact("K = T: single-scale extension fallback", true);
    const auto nc = build_net_cover(g.space.dist, g.space.base, eps, default_refiner(g.space, eps));
    const auto bundle = build_prop33(g.space.dist, g.space.base, nc, opts.extension);
    cert.absorb(bundle.certificate, "");
    cert.payload()["fallback"] = "prop33";
    cert.payload()["bundle"] = prop33_to_json(bundle, run.embed_matrices);
    RunSummary sum;
    emit(sum, run, "section4", cfg.n, cert);
    return sum;
  }
  const auto bundle = build_section4(g, cfg.n, cfg.nu, opts);

  Certificate cert("section4-run", {{"config", gluing_config_to_json(g, cfg.space)},
                                     {"n", cfg.n},
                                     {"nu", cfg.nu},
                                     {"perturbations", cfg.perturbations},
                                     {"radius_fraction", cfg.radius_fraction},
                                     {"seed", run.seed}});
  cert.absorb(bundle.certificate, "");
  const double radius = rnm_admission_radius(bundle.eps, g.dim_k);
  RnmOptions ropts;
  ropts.tol = run.tol;
  ropts.test_functions = cfg.test_functions;
  Json runs = Json::array();
  for (std::size_t j = 0; j <= cfg.perturbations; ++j) {
    Matrix e = bundle.bar_d;
    double amplitude = 0.0;
    if (j > 0) {
      const auto pert = perturb_metric(bundle.bar_d, cfg.radius_fraction * radius, radius * (1.0 - 1e-9),
                                       derive_seed(run.seed, cfg.n, j));
      e = pert.metric;
      amplitude = pert.amplitude;
    }
    ropts.seed = derive_seed(run.seed, cfg.n, 100 + j);
    const auto res = certify_rnm(bundle, e, ropts);
    cert.absorb(res.certificate, (j == 0 ? std::string("e = bar_d: ") : "e" + std::to_string(j) + ": "));
    runs.push_back({{"amplitude", amplitude},
                    {"admission", res.admission},
                    {"norm_H", res.h_norm.norm},
                    {"norm_E", res.e_norm},
                    {"pairs", res.h_norm.pairs},
                    {"programs", res.h_norm.programs},
                    {"pass", res.certificate.passed()}});
  }
  cert.payload()["bundle"] = section4_to_json(bundle, run.embed_matrices);
  cert.payload()["runs"] = runs;
  cert.payload()["m"] = bundle.m;
  cert.payload()["admission_radius"] = radius;
  cert.payload()["bound"] = rnm_bound(g.dim_k);
  RunSummary sum;
  emit(sum, run, "section4", cfg.n, cert);
  return sum;
}

RunSummary run_bap(const BapConfig& cfg, const RunOptions& run) {
  const auto space = space_from_json(cfg.space, run.tol);
  const int r = nominal_order(space);
  BapOptions opts;
  opts.lambda = cfg.lambda.value_or(perturbed_norm_bound(r));
  opts.envelope = cfg.envelope;
  opts.tol = run.tol;
  if (cfg.family != "extension" && cfg.family != "ball") throw Error("bap: family must be 'extension' or 'ball'");

  std::vector<BapStage> stages;
  for (std::size_t n : cfg.n_values) {
    if (n == 0) throw Error("bap: n must be positive");
    const double eps = std::min(cfg.nu / 4.0, 1.0 / (10.0 * double(n)));
    const auto nc = build_net_cover(space.dist, space.base, eps, default_refiner(space, eps));
    BapStage stage;
    stage.n = n;
    stage.eps_n = 1.0 / double(n);
    stage.label = cfg.family;
    if (cfg.family == "extension") {
      stage.op = partition_of_unity(space.dist, nc.net, nc.sets);
    } else {
      // Open eps/2 balls around the net, with the base point kept out of
      // every ball but its own.
      std::vector<IndexSet> balls;
      for (std::size_t i = 0; i < nc.net.size(); ++i) {
        IndexSet b = ball(space.dist, nc.net[i], eps / 2.0);
        if (i > 0) std::erase(b, space.base);
        balls.push_back(std::move(b));
      }
      stage.op = partition_of_unity(space.dist, nc.net, balls);
    }
    stages.push_back(std::move(stage));
  }
  auto report = bap_certificate(stages, space.dist, space.base, opts);
  Certificate cert("bap-run", {{"space", cfg.space},
                               {"n_values", cfg.n_values},
                               {"nu", cfg.nu},
                               {"family", cfg.family},
                               {"envelope", cfg.envelope},
                               {"lambda", opts.lambda}});
  cert.absorb(report.certificate, "");
  cert.payload() = report.certificate.payload();
  RunSummary sum;
  emit(sum, run, "bap", cfg.n_values.size(), cert, bap_csv(report));
  return sum;
}

RunSummary run_perturb(const PerturbConfig& cfg, const RunOptions& run) {
  const auto space = space_from_json(cfg.space, run.tol);
  ExtensionOptions ext;
  ext.tol = run.tol;
  const auto nc = build_net_cover(space.dist, space.base, cfg.eps, default_refiner(space, cfg.eps));
  const auto bundle = build_prop33(space.dist, space.base, nc, ext);
  const double radius = admission_radius(bundle);
  RunSummary sum;
  for (std::size_t j = 0; j < cfg.count; ++j) {
    const std::uint64_t seed = derive_seed(run.seed, 0, j);
    Certificate cert("perturb", {{"space", cfg.space},
                                 {"eps", cfg.eps},
                                 {"amplitude_fraction", cfg.amplitude_fraction},
                                 {"radius_fraction", cfg.radius_fraction},
                                 {"seed", seed}});
    const auto pert = perturb_metric(bundle.bar_d, cfg.amplitude_fraction * radius, cfg.radius_fraction * radius, seed);
    cert.payload()["distance"] = pert.distance;
    cert.payload()["radius"] = radius;
    try {
      const auto pb = build_perturbed_G(bundle, pert.metric, ext);
      cert.absorb(pb.certificate, "");
      cert.payload()["perturbed"] = perturbed_to_json(pb, run.embed_matrices);
    } catch (const Error& ex) {
      cert.add("sup |e - bar_d| <= eps/(12(r+1))", Bound::less_equal, pert.distance, radius, 0.0, {ex.what()});
    }
    emit(sum, run, "perturb", j + 1, cert);
  }
  return sum;
}

Section4Config section4_config_from_json(const Json& j) {
  Section4Config c;
  c.space = j.at("space");
  c.k = j.at("K").get<IndexSet>();
  c.dim_k = j.value("dimK", 1);
  c.thresholds = j.at("thresholds").get<std::vector<double>>();
  c.n = j.value("n", std::size_t{1});
  c.nu = j.value("nu", 0.5);
  c.perturbations = j.value("perturbations", std::size_t{5});
  c.radius_fraction = j.value("radius_fraction", 0.9);
  c.test_functions = j.value("test_functions", std::size_t{8});
  return c;
}

namespace {

void compare_measurement(Reverification& r, const Certificate& stored, const std::string& name, double fresh,
                         double tol) {
  const Check* c = stored.find(name);
  if (!c) return;
  if (!(std::abs(c->measured - fresh) <= tol * std::max(1.0, std::abs(fresh))) &&
      !(std::isinf(c->measured) && c->measured == fresh)) {
    r.problems.push_back("re-measured '" + name + "' = " + fmt(fresh) + " but the certificate records " +
                         fmt(c->measured));
  }
}

}  // namespace

Reverification reverify(const Json& certificate_json, double tol) {
  Reverification r = recheck(certificate_json);
  Certificate stored;
  try {
    stored = Certificate::from_json(certificate_json);
  } catch (const std::exception&) {
    return r;
  }
  try {
    const auto& inputs = stored.inputs();
    if (stored.kind() == "build-cover" && stored.payload().contains("net_cover")) {
      const auto space = space_from_json(inputs.at("space"), tol);
      const auto nc = net_cover_from_json(stored.payload().at("net_cover"));
      const auto fresh = verify_net_cover(nc, space.dist, space.base);
      for (const auto& c : fresh.checks()) {
        compare_measurement(r, stored, c.name, c.measured, tol);
        const Check* s = stored.find(c.name);
        if (s && s->pass != c.pass) r.problems.push_back("re-judged '" + c.name + "' differs from the certificate");
      }
    }
    if (stored.kind() == "prop33-stage" && stored.payload().contains("bundle") &&
        stored.payload().at("bundle").contains("bar_d")) {
      const auto space = space_from_json(inputs.at("space"), tol);
      const auto& bj = stored.payload().at("bundle");
      const Matrix bar_d = matrix_from_json(bj.at("bar_d"));
      const auto nc = net_cover_from_json(bj.at("net_cover"));
      compare_measurement(r, stored, "sup |d - bar_d| < 4 eps", sup_distance(space.dist, bar_d), tol);
      compare_measurement(r, stored, "bar_d = d on net pairs",
                          sup_distance(bar_d.restrict_to(nc.net), space.dist.restrict_to(nc.net)), tol);
      Prop33Bundle shell;
      shell.bar_d = bar_d;
      shell.nc = nc;
      shell.eps = nc.eps;
      compare_measurement(r, stored, "sum_i bar_d(x, U_i^c) >= eps/3",
                          verify_sum_dist_bound(shell, tol).checks().front().measured, tol);
    }
  } catch (const std::exception& ex) {
    r.problems.push_back(std::string("re-measurement failed: ") + ex.what());
  }
  r.pass = r.problems.empty();
  return r;
}

}  // namespace lipfree
