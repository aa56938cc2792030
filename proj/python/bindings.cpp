// Python bindings: models, rendering, fitting, measurement and batch runs.

#include <sstream>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "bodyfit/anthropometry.hpp"
#include "bodyfit/config.hpp"
#include "bodyfit/error.hpp"
#include "bodyfit/experiment.hpp"
#include "bodyfit/ga.hpp"
#include "bodyfit/image.hpp"
#include "bodyfit/mesh.hpp"
#include "bodyfit/pipeline.hpp"
#include "bodyfit/shape_model.hpp"

namespace py = pybind11;
using namespace bodyfit;

namespace {

using BoolArray = py::array_t<bool, py::array::c_style>;
using PointArray = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

ParamVector make_params(const std::vector<double>& shape, const std::vector<double>& pose) {
  if (shape.size() != kShapeGenes || pose.size() != kPoseGenes) {
    throw InvalidArgument("expected 20 shape and 4 pose values");
  }
  std::vector<double> genes = shape;
  genes.insert(genes.end(), pose.begin(), pose.end());
  return ParamVector::from_genes(genes);
}

py::dict params_dict(const ParamVector& p) {
  py::dict d;
  d["shape"] = std::vector<double>(p.shape().begin(), p.shape().end());
  d["pose"] = std::vector<double>(p.pose().begin(), p.pose().end());
  return d;
}

BinaryImage to_image(const py::array& arr) {
  const auto a = py::array_t<bool, py::array::c_style | py::array::forcecast>::ensure(arr);
  if (!a || a.ndim() != 2) throw InvalidArgument("silhouette must be a 2-D array");
  BinaryImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  auto v = a.unchecked<2>();
  for (py::ssize_t y = 0; y < a.shape(0); ++y) {
    for (py::ssize_t x = 0; x < a.shape(1); ++x) img.set(int(x), int(y), v(y, x));
  }
  return img;
}

BoolArray from_image(const BinaryImage& img) {
  BoolArray out({img.height(), img.width()});
  auto v = out.mutable_unchecked<2>();
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) v(y, x) = img.at(x, y);
  }
  return out;
}

PointArray points(const Boundary& b) {
  PointArray m(static_cast<Eigen::Index>(b.size()), 2);
  for (std::size_t i = 0; i < b.size(); ++i) m.row(Eigen::Index(i)) = b.points[i].transpose();
  return m;
}

py::dict mesh_dict(const Mesh& mesh) {
  Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor> v(mesh.vertex_count(), 3);
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    v.row(Eigen::Index(i)) = mesh.vertices()[i].transpose();
  }
  Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor> f(mesh.face_count(), 3);
  for (std::size_t i = 0; i < mesh.face_count(); ++i) {
    for (int k = 0; k < 3; ++k) f(Eigen::Index(i), k) = int(mesh.faces()[i][k]);
  }
  py::dict d;
  d["vertices"] = v;
  d["faces"] = f;
  return d;
}

py::dict breakdown_dict(const FitnessBreakdown& b) {
  std::ostringstream os;
  write_breakdown_json(b, os);
  py::dict d;
  d["f"] = b.f;
  d["f_front"] = b.f_front;
  d["f_side"] = b.f_side;
  d["json"] = os.str();
  return d;
}

CliConfig settings(const std::string& config_path) {
  CliConfig cfg;
  if (!config_path.empty()) load_config(config_path, cfg);
  return cfg;
}

py::dict measure_dict(const Measurements& m, const MeasurementSpec& spec) {
  py::dict d;
  for (std::size_t i = 0; i < kMeasureCount; ++i) {
    d[py::str(std::string(1, spec.measures[i].id))] = m[i];
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Statistical body model fitting from front and side silhouettes";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ModelFormatError>(m, "ModelFormatError", base.ptr());
  py::register_exception<EmptySilhouetteError>(m, "EmptySilhouetteError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());

  m.attr("SHAPE_GENES") = kShapeGenes;
  m.attr("POSE_GENES") = kPoseGenes;

  py::class_<StatModel>(m, "Model")
      .def_property_readonly("vertex_count", &StatModel::vertex_count)
      .def_property_readonly("component_count", &StatModel::component_count)
      .def_property_readonly("eigenvalues",
                             [](const StatModel& s) { return Eigen::VectorXd(s.eigenvalues); })
      .def("save", [](const StatModel& s, const std::filesystem::path& p) { save_model(s, p); });

  m.def(
      "build_model",
      [](std::uint64_t seed, std::size_t budget) { return build_synthetic_model(seed, budget); },
      py::arg("seed") = 1,
      py::arg("vertex_budget") = 6449, "Generate the synthetic shape model.");
  m.def("load_model", &load_model, py::arg("path"));

  m.def(
      "synthesize",
      [](const StatModel& model, const std::vector<double>& shape,
         const std::vector<double>& pose) {
        return mesh_dict(synthesize(model, make_params(shape, pose)));
      },
      py::arg("model"), py::arg("shape"), py::arg("pose"),
      "Posed mesh as {'vertices': (N, 3), 'faces': (F, 3)}.");

  m.def(
      "render",
      [](const StatModel& model, const std::vector<double>& shape,
         const std::vector<double>& pose, int width, int height) {
        const Mesh body = synthesize(model, make_params(shape, pose));
        py::dict out;
        for (const auto& [name, view] : {std::pair{"front", ViewSpec::front()},
                                         std::pair{"side", ViewSpec::side()}}) {
          const RenderedView r = render_view(body, view, {width, height});
          py::dict d;
          d["image"] = from_image(r.image);
          d["boundary"] = points(r.boundary);
          out[name] = d;
        }
        return out;
      },
      py::arg("model"), py::arg("shape"), py::arg("pose"), py::arg("width") = kDefaultWidth,
      py::arg("height") = kDefaultHeight,
      "Front and side silhouettes (bool arrays, row = y) with traced boundaries.");

  m.def(
      "evaluate",
      [](const StatModel& model, const std::vector<double>& shape,
         const std::vector<double>& pose, const py::array& front, const py::array& side,
         const std::string& config) {
        const CliConfig cfg = settings(config);
        const FitTargets targets = make_targets(to_image(front), to_image(side));
        return breakdown_dict(evaluate_params(make_params(shape, pose), model, targets, cfg.eval));
      },
      py::arg("model"), py::arg("shape"), py::arg("pose"), py::arg("front"), py::arg("side"),
      py::arg("config") = "", "Fitness of a parameter vector against two silhouettes.");

  m.def(
      "fit",
      [](const StatModel& model, const py::array& front, const py::array& side,
         const std::string& config, std::optional<std::uint64_t> seed,
         std::optional<int> iterations) {
        CliConfig cfg = settings(config);
        if (seed) cfg.ga.seed = *seed;
        if (iterations) cfg.ga.max_iterations = *iterations;
        const FitTargets targets = make_targets(to_image(front), to_image(side));
        GAResult result;
        {
          py::gil_scoped_release release;
          result = run_ga(
              [&](const Genes& g) {
                return evaluate_params(ParamVector::from_genes(g), model, targets, cfg.eval).f;
              },
              cfg.ga);
        }
        py::dict d = params_dict(result.best_params());
        d["cost"] = result.best_cost;
        std::vector<double> best, mean;
        for (const GenerationRecord& g : result.history.generations) {
          best.push_back(g.best_cost);
          mean.push_back(g.mean_cost);
        }
        d["best_history"] = best;
        d["mean_history"] = mean;
        return d;
      },
      py::arg("model"), py::arg("front"), py::arg("side"), py::arg("config") = "",
      py::arg("seed") = py::none(), py::arg("iterations") = py::none(),
      "Run the GA; returns shape, pose, cost and per-iteration costs.");

  m.def(
      "measure",
      [](const StatModel& model, const std::vector<double>& shape,
         const std::vector<double>& pose, double reference_height) {
        const MeasurementSpec spec = MeasurementSpec::standard();
        return measure_dict(measure_params(model, make_params(shape, pose), spec, reference_height),
                            spec);
      },
      py::arg("model"), py::arg("shape"), py::arg("pose"),
      py::arg("reference_height") = kReferenceHeight,
      "The 16 measurements (mm, keyed 'A'..'P') of the rest-pose body.");

  m.def(
      "batch",
      [](const StatModel& model, std::size_t subjects, std::uint64_t seed,
         const std::string& config, std::optional<int> iterations) {
        const CliConfig cfg = settings(config);
        BatchConfig b;
        b.subjects = subjects;
        b.seed = seed;
        b.eval = cfg.eval;
        b.ga = cfg.ga;
        if (iterations) b.ga.max_iterations = *iterations;
        b.reference_height = cfg.reference_height;
        BatchResult r;
        {
          py::gil_scoped_release release;
          r = batch_experiment(model, b);
        }
        py::dict d;
        d["failures"] = r.failures;
        d["convergence"] = r.convergence;
        py::list errs;
        for (const SubjectResult& s : r.subjects) errs.append(s.ok ? py::cast(s.key_error) : py::none());
        d["key_errors"] = errs;
        if (r.stats.subjects > 0) {
          d["key_mean"] = r.stats.key_subset.mean;
          d["key_std"] = r.stats.key_subset.std;
        }
        return d;
      },
      py::arg("model"), py::arg("subjects") = 10, py::arg("seed") = 1, py::arg("config") = "",
      py::arg("iterations") = py::none(), "Round-trip experiment on synthetic subjects.");

  m.def(
      "read_silhouette",
      [](const std::filesystem::path& p) { return from_image(read_silhouette(p)); },
      py::arg("path"));
  m.def(
      "write_pbm",
      [](const py::array& img, const std::filesystem::path& p) { write_pbm(to_image(img), p); },
      py::arg("image"), py::arg("path"));
}
