#pragma once

#include <filesystem>
#include <iosfwd>

#include "bodyfit/experiment.hpp"

namespace bodyfit {

/// Settings shared by the command-line tools.
struct CliConfig {
  EvalSettings eval;
  GAConfig ga;
  std::size_t subjects = 10;
  double reference_height = kReferenceHeight;
};

/// Reads a small TOML-style file into `cfg`:
///
///   [weights]  head chest waist hip leg foot arm elbow hand
///              highest_point lowest_point height front side
///   [ga]       population cull mutants genes_per_mutant iterations
///              elitism mutation early_stop seed threads
///   [render]   width height
///   [registration] max_iters tol rotation_search_deg rotation_step_deg
///              rotation_refine_deg
///   [eval]     subjects reference_height
///
/// `height` sets both extreme-point weights unless they are given
/// explicitly. Keys not listed, repeated keys and malformed values throw
/// ConfigError naming the line. Unset keys keep their current value.
void parse_config(std::istream& in, CliConfig& cfg);
void load_config(const std::filesystem::path& path, CliConfig& cfg);

/// Writes every setting back in the same format.
void write_config(const CliConfig& cfg, std::ostream& out);

}  // namespace bodyfit
