// lipfree: command-line front end for the finite-space pipelines.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <sstream>

#include "lipfree/io.hpp"
#include "lipfree/pipelines.hpp"

using namespace lipfree;

namespace {

struct SpaceFlags {
  std::string file;
  std::vector<std::size_t> grid;
  double spacing = 1.0 / 64.0;
  std::string ground = "linf";
  std::size_t random = 0;
  std::uint64_t random_seed = 0;
  std::optional<Index> base;

  void attach(CLI::App* app) {
    app->add_option("--space", file, "space JSON file (inline metric or generator)");
    app->add_option("--grid", grid, "lattice dimensions, e.g. --grid 33 17")->delimiter(',');
    app->add_option("--spacing", spacing, "lattice spacing");
    app->add_option("--ground", ground, "ground metric of the lattice")->check(CLI::IsMember({"linf", "l1", "l2"}));
    app->add_option("--random", random, "random metric space with this many points");
    app->add_option("--space-seed", random_seed, "seed of the random space");
    app->add_option("--base", base, "base point index");
  }

  // Precedence: explicit flags, then the config file, then `fallback`.
  Json resolve(const Json& config, const Json& fallback) const {
    Json space;
    if (!file.empty()) {
      space = read_json_file(file);
    } else if (!grid.empty()) {
      space = {{"generator", "grid"}, {"dims", grid}, {"spacing", spacing}, {"ground", ground}};
    } else if (random > 0) {
      space = {{"generator", "random"}, {"n", random}, {"seed", random_seed}};
    } else if (config.contains("space")) {
      space = config.at("space");
    } else {
      space = fallback;
    }
    if (base) space["base_point"] = *base;
    return space;
  }
};

template <class T>
void take(const Json& config, const char* key, T& target, const CLI::Option* flag) {
  if (flag && flag->count() > 0) return;
  if (config.contains(key)) target = config.at(key).get<T>();
}

Json load_config(const std::string& path) { return path.empty() ? Json::object() : read_json_file(path); }

int report(const RunSummary& sum) {
  for (const auto& line : sum.lines) std::cout << line << '\n';
  const bool ok = sum.all_pass();
  std::cout << (ok ? "all certificates passed" : "some certificates FAILED") << " (" << sum.certificates.size()
            << " certificates)\n";
  return ok ? 0 : 1;
}

const Json kDefaultGrid1D = {{"generator", "grid"}, {"dims", {65}}, {"spacing", 1.0 / 64.0}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified constructions on finite metric spaces and their Lipschitz-free spaces"};
  app.require_subcommand(1);

  RunOptions run;
  std::string format = "json";
  std::string out_dir = ".";
  app.add_option("--tol", run.tol, "numerical tolerance for non-strict checks")->capture_default_str();
  app.add_option("--seed", run.seed, "seed for every randomized step")->capture_default_str();
  app.add_option("--out-dir", out_dir, "directory receiving certificates")->capture_default_str();
  app.add_option("--format", format, "json, or csv in addition to json")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_flag("--embed-matrices", run.embed_matrices, "store metrics and operators inside certificates");

  // build-cover
  auto* cover_cmd = app.add_subcommand("build-cover", "net and merged cover of order <= r");
  SpaceFlags cover_space;
  cover_space.attach(cover_cmd);
  std::string cover_config;
  BuildCoverConfig cover_cfg;
  std::string refiner_file;
  cover_cmd->add_option("--config", cover_config, "JSON config {space, eps, refiner}");
  auto* cover_eps = cover_cmd->add_option("--eps", cover_cfg.eps, "scale eps");
  cover_cmd->add_option("--refiner", refiner_file, "cover JSON to refine (bricks by default)");

  // prop33
  auto* p33_cmd = app.add_subcommand("prop33", "extension operators E and perturbed G with norm certificates");
  SpaceFlags p33_space;
  p33_space.attach(p33_cmd);
  std::string p33_config;
  Prop33Config p33_cfg;
  p33_cmd->add_option("--config", p33_config, "JSON config {space, eps | n, nu, perturbations}");
  auto* p33_eps = p33_cmd->add_option("--eps", p33_cfg.eps, "eps schedule")->delimiter(',');
  auto* p33_n = p33_cmd->add_option("--n", p33_cfg.n_values, "n values, eps = min(nu/4, 1/(10n))")->delimiter(',');
  auto* p33_nu = p33_cmd->add_option("--nu", p33_cfg.nu, "nu");
  auto* p33_pert = p33_cmd->add_option("--perturbations", p33_cfg.perturbations, "admissible perturbations per eps");

  // section4
  auto* s4_cmd = app.add_subcommand("section4", "glued operator H and its R_{n,m} certificate");
  std::string s4_config;
  s4_cmd->add_option("--config", s4_config, "JSON config {space, K, thresholds, dimK, n, nu, ...}");
  std::optional<std::size_t> s4_n, s4_pert;
  std::optional<double> s4_nu, s4_frac;
  s4_cmd->add_option("--n", s4_n, "exhaustion index n");
  s4_cmd->add_option("--nu", s4_nu, "nu");
  s4_cmd->add_option("--perturbations", s4_pert, "perturbed metrics to certify besides bar_d");
  s4_cmd->add_option("--radius-fraction", s4_frac, "noise amplitude relative to the admission radius");

  // bap
  auto* bap_cmd = app.add_subcommand("bap", "almost-extension defects of operator sequences");
  SpaceFlags bap_space;
  bap_space.attach(bap_cmd);
  std::string bap_config;
  BapConfig bap_cfg;
  double bap_lambda = 0.0;
  bap_cmd->add_option("--config", bap_config, "JSON config {space, n_values, nu, family, envelope, lambda}");
  auto* bap_n = bap_cmd->add_option("--n", bap_cfg.n_values, "n values (nets of density 1/n)")->delimiter(',');
  auto* bap_nu = bap_cmd->add_option("--nu", bap_cfg.nu, "nu");
  auto* bap_family = bap_cmd->add_option("--family", bap_cfg.family, "operator family")
                         ->check(CLI::IsMember({"extension", "ball"}));
  auto* bap_env = bap_cmd->add_option("--envelope", bap_cfg.envelope, "C in defect(n) <= C / n");
  auto* bap_lam = bap_cmd->add_option("--lambda", bap_lambda, "norm bound (88(r+1)(2r+3) by default)");

  // perturb
  auto* pert_cmd = app.add_subcommand("perturb", "random admissible perturbations of bar_d and their G operators");
  SpaceFlags pert_space;
  pert_space.attach(pert_cmd);
  std::string pert_config;
  PerturbConfig pert_cfg;
  pert_cmd->add_option("--config", pert_config, "JSON config {space, eps, count, amplitude_fraction, radius_fraction}");
  auto* pert_eps = pert_cmd->add_option("--eps", pert_cfg.eps, "scale eps");
  auto* pert_count = pert_cmd->add_option("--count", pert_cfg.count, "number of perturbations");
  auto* pert_amp = pert_cmd->add_option("--amplitude-fraction", pert_cfg.amplitude_fraction,
                                        "noise amplitude in units of eps/(12(r+1))");
  auto* pert_rad = pert_cmd->add_option("--radius-fraction", pert_cfg.radius_fraction,
                                        "target distance in units of eps/(12(r+1)); above 1 tests rejection");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "re-check certificates from their JSON alone");
  std::vector<std::string> verify_files;
  verify_cmd->add_option("certificate", verify_files, "certificate JSON files")->required();

  CLI11_PARSE(app, argc, argv);
  run.out_dir = out_dir;
  run.format = format == "csv" ? Format::csv : Format::json;

  try {
    if (*cover_cmd) {
      const Json config = load_config(cover_config);
      take(config, "eps", cover_cfg.eps, cover_eps);
      cover_cfg.space = cover_space.resolve(config, kDefaultGrid1D);
      if (!refiner_file.empty()) {
        cover_cfg.refiner = read_json_file(refiner_file);
      } else if (config.contains("refiner")) {
        cover_cfg.refiner = config.at("refiner");
      }
      return report(run_build_cover(cover_cfg, run));
    }
    if (*p33_cmd) {
      const Json config = load_config(p33_config);
      take(config, "eps", p33_cfg.eps, p33_eps);
      take(config, "n_values", p33_cfg.n_values, p33_n);
      take(config, "nu", p33_cfg.nu, p33_nu);
      take(config, "perturbations", p33_cfg.perturbations, p33_pert);
      if (p33_cfg.eps.empty() && p33_cfg.n_values.empty()) p33_cfg.eps = {0.25, 0.125, 0.0625};
      if (p33_eps->count() > 0) p33_cfg.n_values.clear();
      if (p33_n->count() > 0 && p33_eps->count() == 0) p33_cfg.eps.clear();
      p33_cfg.space = p33_space.resolve(config, kDefaultGrid1D);
      return report(run_prop33(p33_cfg, run));
    }
    if (*s4_cmd) {
      Json config = load_config(s4_config);
      if (config.empty()) {
        config = {{"space", {{"generator", "grid"}, {"dims", {33, 17}}, {"spacing", 1.0 / 64.0}}},
                  {"thresholds", {0.125, 0.0625, 0.03125, 0.015625}},
                  {"dimK", 1}};
        IndexSet k;
        for (Index x = 0; x < 33; ++x) k.push_back(x);
        config["K"] = k;
      }
      auto cfg = section4_config_from_json(config);
      if (s4_n) cfg.n = *s4_n;
      if (s4_nu) cfg.nu = *s4_nu;
      if (s4_pert) cfg.perturbations = *s4_pert;
      if (s4_frac) cfg.radius_fraction = *s4_frac;
      return report(run_section4(cfg, run));
    }
    if (*bap_cmd) {
      const Json config = load_config(bap_config);
      take(config, "n_values", bap_cfg.n_values, bap_n);
      take(config, "nu", bap_cfg.nu, bap_nu);
      take(config, "family", bap_cfg.family, bap_family);
      take(config, "envelope", bap_cfg.envelope, bap_env);
      if (bap_lam->count() > 0) {
        bap_cfg.lambda = bap_lambda;
      } else if (config.contains("lambda")) {
        bap_cfg.lambda = config.at("lambda").get<double>();
      }
      bap_cfg.space = bap_space.resolve(config, kDefaultGrid1D);
      return report(run_bap(bap_cfg, run));
    }
    if (*pert_cmd) {
      const Json config = load_config(pert_config);
      take(config, "eps", pert_cfg.eps, pert_eps);
      take(config, "count", pert_cfg.count, pert_count);
      take(config, "amplitude_fraction", pert_cfg.amplitude_fraction, pert_amp);
      take(config, "radius_fraction", pert_cfg.radius_fraction, pert_rad);
      pert_cfg.space = pert_space.resolve(config, kDefaultGrid1D);
      return report(run_perturb(pert_cfg, run));
    }
    if (*verify_cmd) {
      bool ok = true;
      for (const auto& file : verify_files) {
        const auto r = reverify(read_json_file(file), run.tol);
        std::cout << file << ": " << (r.pass ? "PASS" : "FAIL") << '\n';
        for (const auto& p : r.problems) std::cout << "  " << p << '\n';
        ok = ok && r.pass;
      }
      return ok ? 0 : 1;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    const auto* sub = app.get_subcommands().front();
    if (sub->get_name() != "verify") {
      const auto path = run.out_dir / (sub->get_name() + "-" + std::to_string(run.seed) + "-diagnostic.json");
      try {
        write_text_file(path, Json{{"pipeline", sub->get_name()}, {"seed", run.seed}, {"error", ex.what()}}.dump(1) + "\n");
        std::cerr << "diagnostic written to " << path.string() << '\n';
      } catch (const std::exception&) {
      }
    }
    return 2;
  }
  return 0;
}
