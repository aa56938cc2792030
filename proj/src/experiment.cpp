#include "bodyfit/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "bodyfit/error.hpp"
#include "text_util.hpp"

namespace bodyfit {

ParamVector draw_ground_truth(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, kPoseMaxDeg);
  std::array<double, kShapeGenes> shape;
  std::array<double, kPoseGenes> pose;
  for (double& s : shape) s = std::clamp(normal(rng), -kShapeBound, kShapeBound);
  for (double& p : pose) p = angle(rng);
  return {shape, pose};
}

SubjectSeed subject_seed(std::uint64_t batch_seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(batch_seed),
                    static_cast<std::uint32_t>(batch_seed >> 32),
                    static_cast<std::uint32_t>(index), 0x5eedu};
  std::mt19937_64 rng(seq);
  SubjectSeed s;
  s.truth = draw_ground_truth(rng);
  s.ga_seed = rng();
  return s;
}

double self_matching_floor(const StatModel& model, const ParamVector& truth,
                           const EvalSettings& settings) {
  RenderConfig finer = settings.render;
  finer.width = static_cast<int>(std::lround(finer.width * 1.1));
  finer.height = static_cast<int>(std::lround(finer.height * 1.1));
  const FitTargets targets = render_targets(model, truth, finer);
  return evaluate_params(truth, model, targets, settings).f;
}

double BatchResult::mean_subset_error(std::span<const std::size_t> indices) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const SubjectResult& s : subjects) {
    if (!s.ok) continue;
    sum += subset_error(s.truth_measures, s.estimate_measures, indices);
    ++n;
  }
  if (n == 0) throw Error("no successful subjects");
  return sum / static_cast<double>(n);
}

namespace {

double mean_abs_error(const Measurements& a, const Measurements& b) {
  double sum = 0.0;
  for (std::size_t m = 0; m < kMeasureCount; ++m) sum += std::abs(a[m] - b[m]);
  return sum / static_cast<double>(kMeasureCount);
}

SubjectResult run_subject(const StatModel& model, const BatchConfig& cfg,
                          std::size_t index, const SubjectSolver& solver) {
  SubjectResult r;
  r.index = index;
  const SubjectSeed seed = subject_seed(cfg.seed, index);
  r.truth = seed.truth;
  try {
    const FitTargets targets = render_targets(model, r.truth, cfg.eval.render);
    GAResult fit;
    if (solver) {
      fit = solver(targets, r.truth, seed.ga_seed);
    } else {
      GAConfig ga = cfg.ga;
      ga.seed = seed.ga_seed;
      fit = run_ga(
          [&](const Genes& g) {
            return evaluate_params(ParamVector::from_genes(g), model, targets,
                                   cfg.eval).f;
          },
          ga);
    }
    r.estimate = fit.best_params();
    r.best_cost = fit.best_cost;
    r.history = fit.history;
    r.truth_measures = measure_params(model, r.truth, cfg.spec, cfg.reference_height);
    r.estimate_measures =
        measure_params(model, r.estimate, cfg.spec, cfg.reference_height);
    r.key_error = subset_error(r.truth_measures, r.estimate_measures, kKeyMeasures);

    const Genes* last = nullptr;
    double last_err = 0.0;
    for (const GenerationRecord& g : r.history.generations) {
      if (!last || *last != g.best_genes) {
        last_err = mean_abs_error(
            r.truth_measures,
            measure_params(model, ParamVector::from_genes(g.best_genes), cfg.spec,
                           cfg.reference_height));
        last = &g.best_genes;
      }
      r.measure_curve.push_back(last_err);
    }
    r.ok = true;
  } catch (const std::exception& ex) {
    r.ok = false;
    r.failure = ex.what();
  }
  return r;
}

}  // namespace

BatchResult batch_experiment(const StatModel& model, const BatchConfig& cfg,
                             const SubjectSolver& solver) {
  if (cfg.subjects == 0) throw InvalidArgument("batch needs at least one subject");
  cfg.ga.validate();
  cfg.eval.weights.validate();
  cfg.spec.validate();

  BatchResult out;
  std::vector<Measurements> truth, estimate;
  for (std::size_t i = 0; i < cfg.subjects; ++i) {
    SubjectResult r = run_subject(model, cfg, i, solver);
    if (r.ok) {
      truth.push_back(r.truth_measures);
      estimate.push_back(r.estimate_measures);
    } else {
      ++out.failures;
    }
    out.subjects.push_back(std::move(r));
  }
  if (truth.empty()) throw Error("every subject in the batch failed");
  out.stats = error_stats(truth, estimate);

  std::size_t iterations = 0;
  for (const SubjectResult& s : out.subjects) {
    if (s.ok) iterations = std::max(iterations, s.measure_curve.size());
  }
  out.convergence.assign(iterations, 0.0);
  for (std::size_t it = 0; it < iterations; ++it) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const SubjectResult& s : out.subjects) {
      if (!s.ok || s.measure_curve.empty()) continue;
      // Runs that stopped early hold their final value.
      sum += s.measure_curve[std::min(it, s.measure_curve.size() - 1)];
      ++n;
    }
    out.convergence[it] = n ? sum / static_cast<double>(n) : 0.0;
  }
  return out;
}

AblationResult weight_ablation(const StatModel& model, const BatchConfig& cfg) {
  AblationResult a;
  a.weighted = batch_experiment(model, cfg);
  BatchConfig flat = cfg;
  flat.eval.weights = WeightConfig::uniform();
  a.uniform = batch_experiment(model, flat);
  a.weighted_torso_error = a.weighted.mean_subset_error(kTorsoMeasures);
  a.uniform_torso_error = a.uniform.mean_subset_error(kTorsoMeasures);
  return a;
}

void write_convergence_csv(const BatchResult& result, std::ostream& out) {
  out << "iteration,mean_measure_error\n";
  for (std::size_t i = 0; i < result.convergence.size(); ++i) {
    out << i << ',' << detail::format_double(result.convergence[i]) << '\n';
  }
}

void write_raw_errors_csv(const BatchResult& result, const MeasurementSpec& spec,
                          std::ostream& out) {
  using detail::format_double;
  out << "subject,measure,truth,estimate,abs_error\n";
  for (const SubjectResult& s : result.subjects) {
    if (!s.ok) continue;
    for (std::size_t m = 0; m < kMeasureCount; ++m) {
      out << s.index << ',' << spec.measures[m].id << ','
          << format_double(s.truth_measures[m]) << ','
          << format_double(s.estimate_measures[m]) << ','
          << format_double(std::abs(s.estimate_measures[m] - s.truth_measures[m]))
          << '\n';
    }
  }
}

}  // namespace bodyfit
