#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "bodyfit/shape_model.hpp"

namespace bodyfit {

using Genes = std::array<double, kGeneCount>;
using GaRng = std::mt19937_64;

/// Lower and upper bound of gene g (0-based).
double gene_min(std::size_t g);
double gene_max(std::size_t g);
/// Clamps every gene into its range.
void clamp_genes(Genes& genes);

struct Chromosome {
  Genes genes{};
  std::optional<double> cost;  // empty until evaluated

  bool evaluated() const { return cost.has_value(); }
};

using Population = std::vector<Chromosome>;

struct GAConfig {
  std::size_t population_size = 30;
  std::size_t cull_count = 10;
  std::size_t mutant_count = 3;
  std::size_t genes_per_mutant = 5;
  int max_iterations = 25;
  bool elitism = true;
  bool mutation = true;
  /// Stop once the best cost improves by less than `early_stop_tol` for
  /// `early_stop_patience` consecutive iterations.
  bool early_stop = false;
  double early_stop_tol = 1e-6;
  int early_stop_patience = 5;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0 = hardware concurrency

  /// Throws InvalidArgument on inconsistent settings.
  void validate() const;
};

/// Shape genes uniform in [-3, 3], pose genes uniform in [0, 30].
Population init_population(const GAConfig& cfg, GaRng& rng);
Population init_population(const GAConfig& cfg);

enum class CrossoverKind { kOnePoint, kTwoPoint };

struct Offspring {
  std::size_t parent_a = 0;  // indices into the sorted survivors
  std::size_t parent_b = 0;
  CrossoverKind kind = CrossoverKind::kOnePoint;
  std::size_t cut1 = 0;
  std::size_t cut2 = 0;  // == kGeneCount for one-point
};

struct Mutation {
  std::size_t chromosome = 0;  // index in the new population
  std::vector<std::size_t> genes;
};

/// What one generation step did, for diagnostics and tests.
struct StepRecord {
  std::vector<std::size_t> culled;    // indices into the input population
  std::vector<Offspring> offspring;
  std::vector<Mutation> mutations;
};

/// One generation: sort by cost (ascending, ties by index), drop the
/// `cull_count` highest-cost chromosomes, refill with one- or two-point
/// crossover children of uniformly drawn survivors, then reset
/// `genes_per_mutant` random genes of `mutant_count` random non-elite
/// chromosomes. Survivors keep their cost; new or changed chromosomes are
/// unevaluated. Throws InvalidArgument if any input chromosome is
/// unevaluated.
Population step(const Population& population, const GAConfig& cfg, GaRng& rng,
                StepRecord* record = nullptr);

using FitnessFn = std::function<double(const Genes&)>;

/// Evaluates every chromosome without a cost, in parallel when allowed.
/// Results are stored by index, so the outcome does not depend on thread
/// scheduling. NaN costs are stored as +infinity.
void evaluate_population(Population& population, const FitnessFn& fitness,
                         unsigned threads = 0);

struct GenerationRecord {
  int iteration = 0;  // 0 = initial population
  double best_cost = 0.0;
  double mean_cost = 0.0;  // over finite costs
  Genes best_genes{};
  std::size_t evaluations = 0;  // fitness calls made this iteration
};

struct RunHistory {
  std::vector<GenerationRecord> generations;

  /// One JSON object per line.
  void write_jsonl(std::ostream& out) const;
  /// iteration,best,mean
  void write_csv(std::ostream& out) const;
};

struct GAResult {
  Genes best_genes{};
  double best_cost = 0.0;
  RunHistory history;

  ParamVector best_params() const { return ParamVector::from_genes(best_genes); }
};

/// init -> evaluate -> (step -> evaluate) x max_iterations. The history
/// holds the initial population as iteration 0. Returns the lowest-cost
/// chromosome ever evaluated.
GAResult run_ga(const FitnessFn& fitness, const GAConfig& cfg);

}  // namespace bodyfit
