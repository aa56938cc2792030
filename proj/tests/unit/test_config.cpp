#include <gtest/gtest.h>

#include <sstream>

#include "bodyfit/config.hpp"
#include "bodyfit/error.hpp"

namespace bodyfit {
namespace {

CliConfig parse(const std::string& text) {
  CliConfig cfg;
  std::istringstream in(text);
  parse_config(in, cfg);
  return cfg;
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, EmptyKeepsDefaults) {
  const CliConfig cfg = parse("# nothing here\n\n");
  EXPECT_EQ(cfg.eval.weights, WeightConfig::table());
  EXPECT_EQ(cfg.ga.population_size, 30u);
  EXPECT_EQ(cfg.subjects, 10u);
}

TEST(Config, AllSectionsParse) {
  const CliConfig cfg = parse(R"(
[weights]
head = 1.5   # trailing comment
hand = 0
height = 2
front = 1
side = 1

[ga]
population = 40
cull = 12
mutants = 4
genes_per_mutant = 3
iterations = 7
elitism = false
mutation = true
early_stop = true
seed = 99
threads = 2

[render]
width = 320
height = 240

[registration]
max_iters = 20
tol = 1e-6
rotation_search_deg = 30
rotation_step_deg = 10
rotation_refine_deg = 0.5

[eval]
subjects = 3
reference_height = 1800
)");
  EXPECT_EQ(cfg.eval.weights.part_weight(BodyPart::kHead), 1.5);
  EXPECT_EQ(cfg.eval.weights.part_weight(BodyPart::kHand), 0.0);
  EXPECT_EQ(cfg.eval.weights.part_weight(BodyPart::kChest), 5.0);
  EXPECT_EQ(cfg.eval.weights.top, 2.0);
  EXPECT_EQ(cfg.eval.weights.bottom, 2.0);
  EXPECT_EQ(cfg.eval.weights.front, 1.0);
  EXPECT_EQ(cfg.ga.population_size, 40u);
  EXPECT_EQ(cfg.ga.cull_count, 12u);
  EXPECT_EQ(cfg.ga.mutant_count, 4u);
  EXPECT_EQ(cfg.ga.genes_per_mutant, 3u);
  EXPECT_EQ(cfg.ga.max_iterations, 7);
  EXPECT_FALSE(cfg.ga.elitism);
  EXPECT_TRUE(cfg.ga.early_stop);
  EXPECT_EQ(cfg.ga.seed, 99u);
  EXPECT_EQ(cfg.ga.threads, 2u);
  EXPECT_EQ(cfg.eval.render.width, 320);
  EXPECT_EQ(cfg.eval.render.height, 240);
  EXPECT_EQ(cfg.eval.registration.max_iters, 20);
  EXPECT_EQ(cfg.eval.registration.tol, 1e-6);
  EXPECT_EQ(cfg.eval.registration.rotation_search_deg, 30.0);
  EXPECT_EQ(cfg.eval.registration.rotation_step_deg, 10.0);
  EXPECT_EQ(cfg.eval.registration.rotation_refine_deg, 0.5);
  EXPECT_EQ(cfg.subjects, 3u);
  EXPECT_EQ(cfg.reference_height, 1800.0);
}

TEST(Config, ExplicitExtremeWeightBeatsHeight) {
  const CliConfig a = parse("[weights]\nheight = 1\nlowest_point = 7\n");
  EXPECT_EQ(a.eval.weights.top, 1.0);
  EXPECT_EQ(a.eval.weights.bottom, 7.0);
  const CliConfig b = parse("[weights]\nlowest_point = 7\nheight = 1\n");
  EXPECT_EQ(b.eval.weights.bottom, 7.0);
}

TEST(Config, ErrorsNameTheLine) {
  EXPECT_NE(error_of("[weights]\nshoulder = 1\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("[ga]\nseed = 1\n\nseed = 2\n").find("line 4"), std::string::npos);
  EXPECT_NE(error_of("head = 1\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of("[weights]\nhead = -1\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("[weights]\nhead = abc\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("[ga]\nelitism = yes\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("[render]\nwidth = 10\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("[ga\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of("[ga]\njust text\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("[registration]\nrotation_refine_deg = 0\n").find("line 2"),
            std::string::npos);
}

TEST(Config, InconsistentGaSettingsRejected) {
  EXPECT_THROW(parse("[ga]\npopulation = 5\ncull = 10\n"), ConfigError);
}

TEST(Config, WriteThenParseRoundTrips) {
  CliConfig cfg;
  cfg.eval.weights = WeightConfig::uniform();
  cfg.eval.weights.top = 0.25;
  cfg.ga.max_iterations = 3;
  cfg.ga.seed = 1234567890123ULL;
  cfg.eval.render.width = 800;
  cfg.subjects = 4;
  cfg.eval.registration.rotation_refine_deg = 0.05;
  std::stringstream ss;
  write_config(cfg, ss);
  CliConfig back;
  parse_config(ss, back);
  EXPECT_EQ(back.eval.weights, cfg.eval.weights);
  EXPECT_EQ(back.ga.max_iterations, 3);
  EXPECT_EQ(back.ga.seed, cfg.ga.seed);
  EXPECT_EQ(back.eval.render.width, 800);
  EXPECT_EQ(back.subjects, 4u);
  EXPECT_EQ(back.eval.registration.rotation_refine_deg, 0.05);
}

TEST(Config, MissingFileThrows) {
  CliConfig cfg;
  EXPECT_THROW(load_config("/nonexistent/bodyfit.toml", cfg), ConfigError);
}

}  // namespace
}  // namespace bodyfit
