// bodyfit: model generation, rendering, fitting, evaluation and mesh
// comparison from the command line.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bodyfit/anthropometry.hpp"
#include "bodyfit/config.hpp"
#include "bodyfit/error.hpp"
#include "bodyfit/experiment.hpp"
#include "bodyfit/ga.hpp"
#include "bodyfit/image.hpp"
#include "bodyfit/mesh.hpp"
#include "bodyfit/pipeline.hpp"
#include "bodyfit/shape_model.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace bodyfit {
namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kParse = 3,
  kModelFormat = 4,
  kEmptySilhouette = 5,
  kConfig = 6,
  kInvalidArgument = 7,
};

// Options shared by the subcommands that load settings.
struct Common {
  std::string model;
  std::string config;
  std::string weights;
  std::optional<std::uint64_t> seed;
  std::optional<int> iters;
  std::string resolution;
  std::string out;
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory " + dir.string() + ": " + ec.message());
}

RenderConfig parse_resolution(const std::string& text, RenderConfig base) {
  if (text.empty()) return base;
  int w = 0, h = 0;
  char x = 0;
  std::istringstream in(text);
  if (!(in >> w >> x >> h) || (x != 'x' && x != 'X') || !in.eof() || w < 64 || h < 64 ||
      w > 16384 || h > 16384) {
    throw InvalidArgument("resolution must look like 640x480 with both sides in [64, 16384]");
  }
  return {w, h};
}

CliConfig load_settings(const Common& c) {
  CliConfig cfg;
  if (!c.config.empty()) load_config(c.config, cfg);
  if (!c.weights.empty()) load_config(c.weights, cfg);
  if (c.seed) cfg.ga.seed = *c.seed;
  if (c.iters) {
    if (*c.iters < 0) throw ConfigError("--iters must be non-negative");
    cfg.ga.max_iterations = *c.iters;
  }
  cfg.eval.render = parse_resolution(c.resolution, cfg.eval.render);
  try {
    cfg.eval.weights.validate();
    cfg.ga.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

std::string weight_summary(const WeightConfig& w) {
  std::ostringstream os;
  for (BodyPart p : kAllBodyParts) os << to_string(p) << '=' << w.part_weight(p) << ' ';
  os << "highest_point=" << w.top << " lowest_point=" << w.bottom << " front=" << w.front
     << " side=" << w.side;
  return os.str();
}

json params_json(const ParamVector& p) {
  return {{"shape", p.shape()}, {"pose", p.pose()}};
}

ParamVector read_params(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open params file " + path.string());
  try {
    const json j = json::parse(in);
    const auto shape = j.at("shape").get<std::vector<double>>();
    const auto pose = j.at("pose").get<std::vector<double>>();
    if (shape.size() != kShapeGenes || pose.size() != kPoseGenes) {
      throw ParseError("params file needs 20 shape and 4 pose values: " + path.string());
    }
    std::vector<double> genes = shape;
    genes.insert(genes.end(), pose.begin(), pose.end());
    return ParamVector::from_genes(genes);
  } catch (const json::exception& e) {
    throw ParseError("bad params file " + path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

// ---- gen-model ----

int cmd_gen_model(std::uint64_t seed, std::size_t budget, const std::string& out) {
  const StatModel model = build_synthetic_model(seed, budget);
  save_model(model, out);
  std::printf("wrote %s: %zu vertices, %zu faces, %zu components\n", out.c_str(),
              model.vertex_count(), model.faces.size(), model.component_count());
  return kOk;
}

// ---- render ----

int cmd_render(const Common& c, const std::string& params_path) {
  const CliConfig cfg = load_settings(c);
  const StatModel model = load_model(c.model);
  ParamVector params;
  if (!params_path.empty()) {
    params = read_params(params_path);
  } else if (c.seed) {
    std::mt19937_64 rng(*c.seed);
    params = draw_ground_truth(rng);
  }
  const Mesh body = synthesize(model, params);
  const std::string prefix = c.out.empty() ? "render" : c.out;
  if (const fs::path parent = fs::path(prefix).parent_path(); !parent.empty()) ensure_dir(parent);
  for (const auto& [name, view] : {std::pair{"front", ViewSpec::front()},
                                   std::pair{"side", ViewSpec::side()}}) {
    const RenderedView r = render_view(body, view, cfg.eval.render);
    write_pbm(r.image, prefix + "_" + name + ".pbm");
    auto csv = open_out(prefix + "_" + name + "_boundary.csv");
    write_boundary_csv(r.boundary, csv);
    std::printf("%s: %zu foreground pixels, %zu boundary points\n", name, r.image.count(),
                r.boundary.size());
  }
  write_json_file(prefix + "_params.json", params_json(params));
  return kOk;
}

// ---- fit ----

int cmd_fit(const Common& c, const std::string& front_path, const std::string& side_path) {
  const CliConfig cfg = load_settings(c);
  const StatModel model = load_model(c.model);
  const BinaryImage front = read_silhouette(front_path);
  const BinaryImage side = read_silhouette(side_path);
  const FitTargets targets = make_targets(front, side);

  std::fprintf(stderr, "weights: %s\n", weight_summary(cfg.eval.weights).c_str());
  const EvalSettings& settings = cfg.eval;
  const GAResult result = run_ga(
      [&](const Genes& g) {
        return evaluate_params(ParamVector::from_genes(g), model, targets, settings).f;
      },
      cfg.ga);
  for (const GenerationRecord& g : result.history.generations) {
    std::fprintf(stderr, "iteration %2d  best %.6f  mean %.6f\n", g.iteration, g.best_cost,
                 g.mean_cost);
  }

  const fs::path dir = c.out.empty() ? "fit" : c.out;
  ensure_dir(dir);
  const ParamVector best = result.best_params();
  write_json_file(dir / "params.json", params_json(best));
  save_mesh(synthesize(model, best), dir / "mesh.obj");
  {
    auto out = open_out(dir / "breakdown.json");
    write_breakdown_json(evaluate_params(best, model, targets, settings), out);
  }
  {
    auto out = open_out(dir / "history.csv");
    result.history.write_csv(out);
  }
  {
    auto out = open_out(dir / "history.jsonl");
    result.history.write_jsonl(out);
  }
  {
    auto out = open_out(dir / "config_used.toml");
    write_config(cfg, out);
  }
  std::printf("best cost %.6f after %zu iterations; results in %s\n", result.best_cost,
              result.history.generations.size() - 1, dir.string().c_str());
  return kOk;
}

// ---- eval ----

void write_batch(const fs::path& dir, const BatchResult& r, const MeasurementSpec& spec,
                 const CliConfig& cfg) {
  ensure_dir(dir);
  {
    auto out = open_out(dir / "report.md");
    out << "# Measurement errors\n\n"
        << r.subjects.size() << " subjects, " << r.failures << " failed, "
        << cfg.ga.max_iterations << " iterations, " << cfg.eval.render.width << "x"
        << cfg.eval.render.height << " renders.\n\n"
        << "Weights: " << weight_summary(cfg.eval.weights) << "\n\n";
    if (r.stats.subjects > 0) write_stats_markdown(r.stats, spec, out);
    for (const SubjectResult& s : r.subjects) {
      if (!s.ok) out << "\nSubject " << s.index << " failed: " << s.failure << '\n';
    }
  }
  if (r.stats.subjects > 0) {
    auto out = open_out(dir / "stats.csv");
    write_stats_csv(r.stats, spec, out);
  }
  {
    auto out = open_out(dir / "raw_errors.csv");
    write_raw_errors_csv(r, spec, out);
  }
  {
    auto out = open_out(dir / "convergence.csv");
    write_convergence_csv(r, out);
  }
  {
    auto out = open_out(dir / "config_used.toml");
    write_config(cfg, out);
  }
}

int cmd_eval(const Common& c, std::optional<std::size_t> subjects, bool ablation,
             const std::string& spec_path) {
  CliConfig cfg = load_settings(c);
  if (subjects) cfg.subjects = *subjects;
  const StatModel model = load_model(c.model);
  BatchConfig batch;
  batch.subjects = cfg.subjects;
  batch.seed = cfg.ga.seed;
  batch.eval = cfg.eval;
  batch.ga = cfg.ga;
  batch.reference_height = cfg.reference_height;
  if (!spec_path.empty()) batch.spec = MeasurementSpec::load(spec_path);

  const fs::path dir = c.out.empty() ? "eval" : c.out;
  const BatchResult weighted = batch_experiment(model, batch);
  write_batch(dir, weighted, batch.spec, cfg);
  std::printf("%zu/%zu subjects ok", weighted.subjects.size() - weighted.failures,
              weighted.subjects.size());
  if (weighted.stats.subjects > 0) {
    std::printf(", key-measure error %.2f +/- %.2f mm", weighted.stats.key_subset.mean,
                weighted.stats.key_subset.std);
  }
  std::printf("\n");

  if (ablation) {
    CliConfig flat = cfg;
    flat.eval.weights = WeightConfig::uniform();
    BatchConfig flat_batch = batch;
    flat_batch.eval.weights = flat.eval.weights;
    const BatchResult uniform = batch_experiment(model, flat_batch);
    write_batch(dir / "uniform", uniform, batch.spec, flat);
    auto out = open_out(dir / "ablation.md");
    out << "# Weight ablation\n\n| Measure | Configured weights (mm) | Uniform weights (mm) |\n"
        << "|---|---:|---:|\n";
    char buf[64];
    for (std::size_t m = 0; m < kMeasureCount && weighted.stats.subjects && uniform.stats.subjects;
         ++m) {
      std::snprintf(buf, sizeof buf, " | %.2f | %.2f |\n", weighted.stats.per_measure[m].mean,
                    uniform.stats.per_measure[m].mean);
      out << "| " << batch.spec.measures[m].id << '.' << batch.spec.measures[m].name << buf;
    }
    if (weighted.stats.subjects && uniform.stats.subjects) {
      std::snprintf(buf, sizeof buf, " | %.2f | %.2f |\n",
                    weighted.mean_subset_error(kTorsoMeasures),
                    uniform.mean_subset_error(kTorsoMeasures));
      out << "| Chest, waist, pelvis" << buf;
    }
  }
  return kOk;
}

// ---- measure ----

int cmd_measure(const Common& c, const std::string& params_path, const std::string& spec_path) {
  const CliConfig cfg = load_settings(c);
  const StatModel model = load_model(c.model);
  const ParamVector params = params_path.empty() ? ParamVector{} : read_params(params_path);
  const MeasurementSpec spec =
      spec_path.empty() ? MeasurementSpec::standard() : MeasurementSpec::load(spec_path);
  const Measurements m = measure_params(model, params, spec, cfg.reference_height);
  json j = json::object();
  for (std::size_t i = 0; i < kMeasureCount; ++i) {
    j[std::string(1, spec.measures[i].id)] = {{"name", spec.measures[i].name}, {"mm", m[i]}};
    std::printf("%c  %-28s %9.2f mm\n", spec.measures[i].id, spec.measures[i].name.c_str(), m[i]);
  }
  if (!c.out.empty()) write_json_file(c.out, j);
  return kOk;
}

// ---- compare ----

int cmd_compare(const std::string& a_path, const std::string& b_path, const std::string& out) {
  const Mesh a = load_mesh(a_path);
  const Mesh b = load_mesh(b_path);
  const double h = hausdorff_distance(a, b);
  std::printf("hausdorff %.6f\n", h);
  if (!out.empty()) {
    auto csv = open_out(out);
    csv << "mesh,vertex,distance\n";
    const auto ab = vertex_to_surface_distances(a, b);
    const auto ba = vertex_to_surface_distances(b, a);
    for (std::size_t i = 0; i < ab.size(); ++i) csv << "A," << i << ',' << ab[i] << '\n';
    for (std::size_t i = 0; i < ba.size(); ++i) csv << "B," << i << ',' << ba[i] << '\n';
  }
  return kOk;
}

void add_common(CLI::App* sub, Common& c, bool needs_model) {
  auto* model = sub->add_option("--model", c.model, "Model container file");
  if (needs_model) model->required();
  sub->add_option("--config", c.config, "Settings file");
  sub->add_option("--weights", c.weights, "Settings file applied after --config");
  sub->add_option("--seed", c.seed, "Seed for all randomness");
  sub->add_option("--iters", c.iters, "GA iterations");
  sub->add_option("--resolution", c.resolution, "Render size, e.g. 640x480");
  sub->add_option("--out", c.out, "Output path or prefix");
}

int run(int argc, char** argv) {
  CLI::App app{"Fit a statistical body model to front and side silhouettes"};
  app.require_subcommand(1);
  Common common;

  std::uint64_t gen_seed = 1;
  std::size_t budget = 6449;
  std::string gen_out = "model.bfm";
  auto* gen = app.add_subcommand("gen-model", "Build the synthetic shape model");
  gen->add_option("--seed", gen_seed, "Model seed");
  gen->add_option("--vertices", budget, "Vertex budget");
  gen->add_option("--out", gen_out, "Output container");

  std::string params_path;
  auto* render = app.add_subcommand("render", "Render front and side silhouettes");
  add_common(render, common, true);
  render->add_option("--params", params_path, "Params JSON (default: zero, or drawn from --seed)");

  std::string front_path, side_path;
  auto* fit = app.add_subcommand("fit", "Fit the model to two silhouettes");
  add_common(fit, common, true);
  fit->add_option("--front", front_path, "Front silhouette (PBM/PGM/PPM)")->required();
  fit->add_option("--side", side_path, "Side silhouette (PBM/PGM/PPM)")->required();

  std::optional<std::size_t> subjects;
  bool ablation = false;
  std::string spec_path;
  auto* eval = app.add_subcommand("eval", "Batch round-trip experiment");
  add_common(eval, common, true);
  eval->add_option("--subjects", subjects, "Number of synthetic subjects");
  eval->add_flag("--ablation", ablation, "Also run with uniform weights");
  eval->add_option("--spec", spec_path, "Measurement spec JSON");

  auto* meas = app.add_subcommand("measure", "The 16 measurements of a parameter vector");
  add_common(meas, common, true);
  meas->add_option("--params", params_path, "Params JSON (default: zero)");
  meas->add_option("--spec", spec_path, "Measurement spec JSON");

  std::string mesh_a, mesh_b, cmp_out;
  auto* cmp = app.add_subcommand("compare", "Hausdorff distance between two meshes");
  cmp->add_option("mesh_a", mesh_a, "First mesh (OBJ)")->required();
  cmp->add_option("mesh_b", mesh_b, "Second mesh (OBJ)")->required();
  cmp->add_option("--out", cmp_out, "Per-vertex distance CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (*gen) return cmd_gen_model(gen_seed, budget, gen_out);
  if (*render) return cmd_render(common, params_path);
  if (*fit) return cmd_fit(common, front_path, side_path);
  if (*eval) return cmd_eval(common, subjects, ablation, spec_path);
  if (*meas) return cmd_measure(common, params_path, spec_path);
  if (*cmp) return cmd_compare(mesh_a, mesh_b, cmp_out);
  return kUsage;
}

int fail(const char* kind, const std::exception& e, int code) {
  std::fprintf(stderr, "bodyfit: %s: %s\n", kind, e.what());
  return code;
}

}  // namespace
}  // namespace bodyfit

int main(int argc, char** argv) {
  using namespace bodyfit;
  try {
    return run(argc, argv);
  } catch (const ParseError& e) {
    return fail("parse error", e, kParse);
  } catch (const ModelFormatError& e) {
    return fail("model error", e, kModelFormat);
  } catch (const EmptySilhouetteError& e) {
    return fail("empty silhouette", e, kEmptySilhouette);
  } catch (const ConfigError& e) {
    return fail("config error", e, kConfig);
  } catch (const InvalidArgument& e) {
    return fail("invalid argument", e, kInvalidArgument);
  } catch (const std::exception& e) {
    return fail("error", e, kFailure);
  }
}
