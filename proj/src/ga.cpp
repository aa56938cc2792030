#include "bodyfit/ga.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "bodyfit/error.hpp"
#include "text_util.hpp"

namespace bodyfit {

double gene_min(std::size_t g) { return g < kShapeGenes ? -kShapeBound : 0.0; }
double gene_max(std::size_t g) { return g < kShapeGenes ? kShapeBound : kPoseMaxDeg; }

void clamp_genes(Genes& genes) {
  for (std::size_t g = 0; g < kGeneCount; ++g) {
    genes[g] = std::clamp(genes[g], gene_min(g), gene_max(g));
  }
}

void GAConfig::validate() const {
  if (population_size < 2) throw InvalidArgument("population needs at least 2 chromosomes");
  if (cull_count >= population_size) {
    throw InvalidArgument("cull count must be smaller than the population");
  }
  if (genes_per_mutant > kGeneCount) {
    throw InvalidArgument("genes per mutant cannot exceed the gene count");
  }
  const std::size_t eligible = population_size - (elitism ? 1 : 0);
  if (mutation && mutant_count > eligible) {
    throw InvalidArgument("more mutants requested than non-elite chromosomes");
  }
  if (max_iterations < 0) throw InvalidArgument("iteration count must be non-negative");
  if (early_stop && early_stop_patience < 1) {
    throw InvalidArgument("early-stop patience must be positive");
  }
}

namespace {

double draw_gene(std::size_t g, GaRng& rng) {
  return std::uniform_real_distribution<double>(gene_min(g), gene_max(g))(rng);
}

std::size_t draw_index(std::size_t n, GaRng& rng) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// k distinct values from [lo, hi), in draw order (partial Fisher-Yates).
std::vector<std::size_t> draw_distinct(std::size_t lo, std::size_t hi,
                                       std::size_t k, GaRng& rng) {
  std::vector<std::size_t> pool(hi - lo);
  std::iota(pool.begin(), pool.end(), lo);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + draw_index(pool.size() - i, rng);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

double sort_key(const Chromosome& c) {
  return std::isnan(*c.cost) ? std::numeric_limits<double>::infinity() : *c.cost;
}

}  // namespace

Population init_population(const GAConfig& cfg, GaRng& rng) {
  cfg.validate();
  Population pop(cfg.population_size);
  for (Chromosome& c : pop) {
    for (std::size_t g = 0; g < kGeneCount; ++g) c.genes[g] = draw_gene(g, rng);
  }
  return pop;
}

Population init_population(const GAConfig& cfg) {
  GaRng rng(cfg.seed);
  return init_population(cfg, rng);
}

Population step(const Population& population, const GAConfig& cfg, GaRng& rng,
                StepRecord* record) {
  cfg.validate();
  if (population.size() != cfg.population_size) {
    throw InvalidArgument("population size does not match the configuration");
  }
  for (const Chromosome& c : population) {
    if (!c.evaluated()) throw InvalidArgument("step requires an evaluated population");
  }

  std::vector<std::size_t> order(population.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sort_key(population[a]) < sort_key(population[b]);
  });
  const std::size_t keep = cfg.population_size - cfg.cull_count;

  Population next;
  next.reserve(cfg.population_size);
  for (std::size_t i = 0; i < keep; ++i) next.push_back(population[order[i]]);
  if (record) {
    *record = {};
    record->culled.assign(order.begin() + static_cast<std::ptrdiff_t>(keep), order.end());
  }

  for (std::size_t i = 0; i < cfg.cull_count; ++i) {
    Offspring o;
    o.parent_a = draw_index(keep, rng);
    o.parent_b = draw_index(keep, rng);
    o.kind = std::uniform_int_distribution<int>(0, 1)(rng) == 0
                 ? CrossoverKind::kOnePoint
                 : CrossoverKind::kTwoPoint;
    if (o.kind == CrossoverKind::kOnePoint) {
      o.cut1 = 1 + draw_index(kGeneCount - 1, rng);
      o.cut2 = kGeneCount;
    } else {
      auto cuts = draw_distinct(1, kGeneCount, 2, rng);
      o.cut1 = std::min(cuts[0], cuts[1]);
      o.cut2 = std::max(cuts[0], cuts[1]);
    }
    Chromosome child;
    const Genes& a = next[o.parent_a].genes;
    const Genes& b = next[o.parent_b].genes;
    for (std::size_t g = 0; g < kGeneCount; ++g) {
      child.genes[g] = (g >= o.cut1 && g < o.cut2) ? b[g] : a[g];
    }
    clamp_genes(child.genes);
    next.push_back(child);
    if (record) record->offspring.push_back(o);
  }

  if (cfg.mutation && cfg.mutant_count > 0 && cfg.genes_per_mutant > 0) {
    const std::size_t first = cfg.elitism ? 1 : 0;
    for (std::size_t idx : draw_distinct(first, next.size(), cfg.mutant_count, rng)) {
      Mutation m;
      m.chromosome = idx;
      m.genes = draw_distinct(0, kGeneCount, cfg.genes_per_mutant, rng);
      for (std::size_t g : m.genes) next[idx].genes[g] = draw_gene(g, rng);
      clamp_genes(next[idx].genes);
      next[idx].cost.reset();
      if (record) record->mutations.push_back(std::move(m));
    }
  }
  return next;
}

void evaluate_population(Population& population, const FitnessFn& fitness,
                         unsigned threads) {
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < population.size(); ++i) {
    if (!population[i].evaluated()) todo.push_back(i);
  }
  if (todo.empty()) return;
  auto eval_one = [&](std::size_t i) {
    const double c = fitness(population[i].genes);
    population[i].cost = std::isnan(c) ? std::numeric_limits<double>::infinity() : c;
  };

  unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, todo.size()));
  if (n <= 1) {
    for (std::size_t i : todo) eval_one(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) {
    pool.emplace_back([&] {
      for (std::size_t k; (k = next.fetch_add(1)) < todo.size();) {
        if (failed) return;
        try {
          eval_one(todo[k]);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

GenerationRecord summarize(int iteration, const Population& pop, std::size_t evals) {
  GenerationRecord r;
  r.iteration = iteration;
  r.evaluations = evals;
  const Chromosome* best = &pop.front();
  double sum = 0.0;
  std::size_t finite = 0;
  for (const Chromosome& c : pop) {
    if (sort_key(c) < sort_key(*best)) best = &c;
    if (std::isfinite(*c.cost)) {
      sum += *c.cost;
      ++finite;
    }
  }
  r.best_cost = sort_key(*best);
  r.best_genes = best->genes;
  r.mean_cost = finite ? sum / static_cast<double>(finite)
                       : std::numeric_limits<double>::infinity();
  return r;
}

std::size_t pending(const Population& pop) {
  return static_cast<std::size_t>(std::count_if(
      pop.begin(), pop.end(), [](const Chromosome& c) { return !c.evaluated(); }));
}

}  // namespace

GAResult run_ga(const FitnessFn& fitness, const GAConfig& cfg) {
  cfg.validate();
  GaRng rng(cfg.seed);
  Population pop = init_population(cfg, rng);
  std::size_t evals = pending(pop);
  evaluate_population(pop, fitness, cfg.threads);

  GAResult result;
  result.history.generations.push_back(summarize(0, pop, evals));
  result.best_cost = result.history.generations.back().best_cost;
  result.best_genes = result.history.generations.back().best_genes;

  int stalled = 0;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    pop = step(pop, cfg, rng);
    evals = pending(pop);
    evaluate_population(pop, fitness, cfg.threads);
    const GenerationRecord rec = summarize(it, pop, evals);
    const double gain = result.best_cost - rec.best_cost;
    if (rec.best_cost < result.best_cost) {
      result.best_cost = rec.best_cost;
      result.best_genes = rec.best_genes;
    }
    result.history.generations.push_back(rec);
    if (cfg.early_stop) {
      stalled = gain < cfg.early_stop_tol ? stalled + 1 : 0;
      if (stalled >= cfg.early_stop_patience) break;
    }
  }
  return result;
}

void RunHistory::write_jsonl(std::ostream& out) const {
  for (const GenerationRecord& r : generations) {
    nlohmann::json j = {{"iteration", r.iteration},
                        {"best", r.best_cost},
                        {"mean", r.mean_cost},
                        {"evaluations", r.evaluations},
                        {"genes", r.best_genes}};
    out << j.dump() << '\n';
  }
}

void RunHistory::write_csv(std::ostream& out) const {
  out << "iteration,best,mean\n";
  for (const GenerationRecord& r : generations) {
    out << r.iteration << ',' << detail::format_double(r.best_cost) << ','
        << detail::format_double(r.mean_cost) << '\n';
  }
}

}  // namespace bodyfit
