#pragma once

#include "bodyfit/boundary.hpp"
#include "bodyfit/objective.hpp"
#include "bodyfit/projection.hpp"
#include "bodyfit/raster.hpp"
#include "bodyfit/registration.hpp"
#include "bodyfit/shape_model.hpp"

namespace bodyfit {

struct RenderConfig {
  int width = kDefaultWidth;
  int height = kDefaultHeight;
};

/// Registration defaults used inside the fitness loop. Both silhouettes are
/// upright, so the coarse rotation search is off.
inline RegistrationOptions fitting_registration() {
  RegistrationOptions o;
  o.rotation_search_deg = 0.0;
  return o;
}

struct EvalSettings {
  WeightConfig weights;
  RenderConfig render;
  RegistrationOptions registration = fitting_registration();
};

/// A rendered silhouette and its traced, labelled contour in pixel units.
struct RenderedView {
  BinaryImage image{1, 1};
  ImageFrame frame;
  Boundary boundary;
};

RenderedView render_view(const Mesh& mesh, const ViewSpec& view,
                         const RenderConfig& render = {});

/// Normalised subject contours for both views.
struct FitTargets {
  Boundary front;
  Boundary side;
};

/// Traces and normalises the two silhouettes.
FitTargets make_targets(const BinaryImage& front, const BinaryImage& side);

/// Targets rendered from a known chromosome.
FitTargets render_targets(const StatModel& model, const ParamVector& params,
                          const RenderConfig& render = {});

/// Registers the subject contour onto the model contour for one view and
/// scores the labelled correspondences.
ViewCost score_view(const Boundary& subject, const Boundary& model_contour,
                    const WeightConfig& weights,
                    const RegistrationOptions& registration);

/// Full fitness of a posed body against the targets. A body whose
/// silhouette degenerates scores +infinity in every field.
FitnessBreakdown evaluate_mesh(const Mesh& posed, const FitTargets& targets,
                               const EvalSettings& settings);

FitnessBreakdown evaluate_params(const ParamVector& params, const StatModel& model,
                                 const FitTargets& targets,
                                 const EvalSettings& settings);

}  // namespace bodyfit
