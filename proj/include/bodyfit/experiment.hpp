#pragma once

#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "bodyfit/anthropometry.hpp"
#include "bodyfit/ga.hpp"
#include "bodyfit/pipeline.hpp"

namespace bodyfit {

struct BatchConfig {
  std::size_t subjects = 10;
  std::uint64_t seed = 1;
  EvalSettings eval;
  GAConfig ga;
  double reference_height = kReferenceHeight;
  MeasurementSpec spec = MeasurementSpec::standard();
};

/// Ground-truth chromosome: shape genes ~ N(0, 1) clamped to [-3, 3], pose
/// genes uniform in [0, 30].
ParamVector draw_ground_truth(std::mt19937_64& rng);

/// Ground truth and GA seed for subject `index` of a batch.
struct SubjectSeed {
  ParamVector truth;
  std::uint64_t ga_seed = 0;
};
SubjectSeed subject_seed(std::uint64_t batch_seed, std::size_t index);

/// Cost of the true chromosome against targets rendered 10% larger: the
/// residual that pixel quantisation alone leaves.
double self_matching_floor(const StatModel& model, const ParamVector& truth,
                           const EvalSettings& settings);

struct SubjectResult {
  std::size_t index = 0;
  bool ok = false;
  std::string failure;
  ParamVector truth;
  ParamVector estimate;
  Measurements truth_measures{};
  Measurements estimate_measures{};
  double key_error = 0.0;  // mean absolute error over the key measures
  double best_cost = 0.0;
  /// Mean absolute error over all 16 measures for the best chromosome of
  /// each recorded iteration.
  std::vector<double> measure_curve;
  RunHistory history;
};

struct BatchResult {
  std::vector<SubjectResult> subjects;
  std::size_t failures = 0;
  ErrorStats stats;  // over successful subjects
  /// Across-subject mean of measure_curve per iteration.
  std::vector<double> convergence;

  /// Mean over successful subjects of their mean error on `indices`.
  double mean_subset_error(std::span<const std::size_t> indices) const;
};

/// Replaces the GA for a subject (test hook). Receives the targets, the
/// true chromosome and the GA seed.
using SubjectSolver = std::function<GAResult(
    const FitTargets& targets, const ParamVector& truth, std::uint64_t ga_seed)>;

/// For each subject: draw a ground truth, render both views, fit, and
/// compare the 16 measurements of the true and fitted rest-pose bodies.
BatchResult batch_experiment(const StatModel& model, const BatchConfig& cfg,
                             const SubjectSolver& solver = {});

struct AblationResult {
  BatchResult weighted;
  BatchResult uniform;
  double weighted_torso_error = 0.0;  // chest, waist, pelvis
  double uniform_torso_error = 0.0;
};

/// Same subjects and seeds under the configured weights and under
/// all-ones weights.
AblationResult weight_ablation(const StatModel& model, const BatchConfig& cfg);

/// iteration,mean_measure_error
void write_convergence_csv(const BatchResult& result, std::ostream& out);
/// subject,measure,truth,estimate,abs_error for every successful subject.
void write_raw_errors_csv(const BatchResult& result, const MeasurementSpec& spec,
                          std::ostream& out);

}  // namespace bodyfit
