#pragma once

// End-to-end experiment pipelines behind the command-line tool. Each run
// writes {pipeline}-{seed}-{n}.json certificates into the output directory
// and reports whether every certificate passed.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lipfree/certificate.hpp"
#include "lipfree/metric.hpp"

namespace lipfree {

enum class Format { json, csv };

struct RunOptions {
  double tol = kDefaultTolerance;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = ".";
  Format format = Format::json;
  bool embed_matrices = false;  // store metrics and operators in payloads
  bool write_files = true;
};

struct RunSummary {
  std::vector<std::filesystem::path> files;
  std::vector<Certificate> certificates;
  std::vector<std::string> lines;  // one human-readable line per certificate
  bool all_pass() const;
};

std::string certificate_file_name(const std::string& pipeline, std::uint64_t seed, std::size_t n);

struct BuildCoverConfig {
  Json space;
  double eps = 0.25;
  std::optional<Json> refiner;  // CoverFamily JSON; bricks when absent
};
RunSummary run_build_cover(const BuildCoverConfig& cfg, const RunOptions& run);

struct Prop33Config {
  Json space;
  // Either explicit eps values, or n values with nu giving
  // eps = min(nu/4, 1/(10 n)).
  std::vector<double> eps;
  std::vector<std::size_t> n_values;
  double nu = 1.0;
  std::size_t perturbations = 20;
};
RunSummary run_prop33(const Prop33Config& cfg, const RunOptions& run);

struct Section4Config {
  Json space;
  IndexSet k;
  int dim_k = 1;
  std::vector<double> thresholds;
  std::size_t n = 1;
  double nu = 0.5;
  std::size_t perturbations = 5;
  double radius_fraction = 0.9;  // noise amplitude relative to the admission radius
  std::size_t test_functions = 8;
};
RunSummary run_section4(const Section4Config& cfg, const RunOptions& run);

struct BapConfig {
  Json space;
  std::vector<std::size_t> n_values{2, 4, 8};
  double nu = 1.0;
  std::string family = "extension";  // extension | ball
  double envelope = 4.0;
  std::optional<double> lambda;       // defaults to 88(r+1)(2r+3)
};
RunSummary run_bap(const BapConfig& cfg, const RunOptions& run);

struct PerturbConfig {
  Json space;
  double eps = 0.25;
  std::size_t count = 5;
  // Noise amplitude and acceptance radius as multiples of eps/(12(r+1));
  // a radius above 1 exercises the admission check.
  double amplitude_fraction = 1.0;
  double radius_fraction = 1.0;
};
RunSummary run_perturb(const PerturbConfig& cfg, const RunOptions& run);

// Recomputes verdicts and the inputs hash; for certificates that embed
// their data, re-measures the recorded quantities as well.
Reverification reverify(const Json& certificate_json, double tol = kDefaultTolerance);

// Gluing configuration read from JSON (keys as in Section4Config).
Section4Config section4_config_from_json(const Json& j);

}  // namespace lipfree
