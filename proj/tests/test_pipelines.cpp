#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lipfree/io.hpp"
#include "lipfree/pipelines.hpp"

using namespace lipfree;
namespace fs = std::filesystem;

namespace {

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& name) : path_(fs::temp_directory_path() / ("lipfree-test-" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json line_space(std::size_t n, double h) { return {{"generator", "grid"}, {"dims", {n}}, {"spacing", h}}; }

TEST(FileNames, FollowThePattern) {
  EXPECT_EQ(certificate_file_name("prop33", 7, 3), "prop33-7-3.json");
  EXPECT_EQ(certificate_file_name("bap", 0, 1), "bap-0-1.json");
}

TEST(BuildCover, WritesAVerifiableCertificate) {
  ScratchDir dir("build-cover");
  RunOptions run;
  run.out_dir = dir.path();
  run.seed = 5;
  run.embed_matrices = true;
  const auto sum = run_build_cover({line_space(65, 1.0 / 64.0), 0.25, std::nullopt}, run);
  ASSERT_TRUE(sum.all_pass());
  ASSERT_EQ(sum.files.size(), 1u);
  EXPECT_EQ(sum.files[0].filename(), "build-cover-5-1.json");
  Json j = read_json_file(sum.files[0]);
  EXPECT_TRUE(reverify(j).pass);

  // Moving a net point is caught by re-measurement even with consistent verdicts.
  auto& net = j["payload"]["net_cover"]["net"];
  net[1] = net[0].get<Index>() + 1;
  const auto r = reverify(j);
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.problems.empty());
}

TEST(Prop33Pipeline, EpsFromNAndNu) {
  RunOptions run;
  run.write_files = false;
  Prop33Config cfg;
  cfg.space = line_space(129, 1.0 / 128.0);
  cfg.n_values = {2, 4};
  cfg.nu = 0.5;
  cfg.perturbations = 1;
  const auto sum = run_prop33(cfg, run);
  ASSERT_TRUE(sum.all_pass());
  ASSERT_EQ(sum.certificates.size(), 2u);
  EXPECT_EQ(sum.certificates[0].inputs().at("eps").get<double>(), 0.05);
  EXPECT_EQ(sum.certificates[1].inputs().at("eps").get<double>(), 0.025);
  EXPECT_NE(sum.certificates[0].find("eps = min(nu/4, 1/(10n))"), nullptr);
}

TEST(Prop33Pipeline, DeterministicRerunsAreByteIdentical) {
  ScratchDir a("prop33-a"), b("prop33-b");
  Prop33Config cfg;
  cfg.space = line_space(65, 1.0 / 64.0);
  cfg.eps = {0.25, 0.125};
  cfg.perturbations = 2;
  RunOptions run;
  run.seed = 11;
  run.embed_matrices = true;
  run.format = Format::csv;
  run.out_dir = a.path();
  const auto first = run_prop33(cfg, run);
  run.out_dir = b.path();
  const auto second = run_prop33(cfg, run);
  ASSERT_TRUE(first.all_pass());
  ASSERT_EQ(first.files.size(), 4u);  // json and csv per stage
  for (std::size_t i = 0; i < first.files.size(); ++i) {
    EXPECT_EQ(first.files[i].filename(), second.files[i].filename());
    EXPECT_EQ(slurp(first.files[i]), slurp(second.files[i]));
  }
  const Json j = read_json_file(a.path() / "prop33-11-2.json");
  EXPECT_TRUE(reverify(j).pass);
  Json tampered = j;
  tampered["payload"]["bundle"]["bar_d"][0][1] = 0.5;
  EXPECT_FALSE(reverify(tampered).pass);
}

TEST(Section4Pipeline, WholeSpaceKUsesTheSingleScaleFallback) {
  Section4Config cfg;
  cfg.space = line_space(9, 0.125);
  for (Index x = 0; x < 9; ++x) cfg.k.push_back(x);
  cfg.thresholds = {0.5, 0.25};
  RunOptions run;
  run.write_files = false;
  const auto sum = run_section4(cfg, run);
  ASSERT_EQ(sum.certificates.size(), 1u);
  EXPECT_TRUE(sum.all_pass());
  EXPECT_EQ(sum.certificates[0].payload().at("fallback"), "prop33");
}

TEST(Section4Pipeline, ConfigFromJsonFillsDefaults) {
  const auto c = section4_config_from_json(
      {{"space", line_space(9, 0.125)}, {"K", {0}}, {"thresholds", {0.5, 0.25, 0.125}}});
  EXPECT_EQ(c.dim_k, 1);
  EXPECT_EQ(c.n, 1u);
  EXPECT_EQ(c.nu, 0.5);
  EXPECT_EQ(c.perturbations, 5u);
  EXPECT_EQ(c.k, (IndexSet{0}));
}

TEST(PerturbPipeline, AdmissibleNoisePassesAndOversizedNoiseFails) {
  RunOptions run;
  run.write_files = false;
  PerturbConfig cfg;
  cfg.space = line_space(65, 1.0 / 64.0);
  cfg.count = 3;
  EXPECT_TRUE(run_perturb(cfg, run).all_pass());
  cfg.amplitude_fraction = 4.0;
  cfg.radius_fraction = 4.0;
  const auto sum = run_perturb(cfg, run);
  EXPECT_FALSE(sum.all_pass());
  for (const auto& line : sum.lines) {
    if (line.find("FAIL") != std::string::npos) {
      EXPECT_NE(line.find("sup |e - bar_d|"), std::string::npos);
    }
  }
}

TEST(BapPipeline, BothFamiliesPass) {
  RunOptions run;
  run.write_files = false;
  BapConfig cfg;
  cfg.space = line_space(257, 1.0 / 256.0);
  EXPECT_TRUE(run_bap(cfg, run).all_pass());
  cfg.family = "ball";
  EXPECT_TRUE(run_bap(cfg, run).all_pass());
  cfg.family = "unknown";
  EXPECT_THROW(run_bap(cfg, run), Error);
}

TEST(Summary, EmptyRunDoesNotPass) { EXPECT_FALSE(RunSummary{}.all_pass()); }

}  // namespace
