#include "bodyfit/pipeline.hpp"

#include <limits>

#include "bodyfit/kdtree.hpp"

namespace bodyfit {

RenderedView render_view(const Mesh& mesh, const ViewSpec& view,
                         const RenderConfig& render) {
  const Projection proj = project(mesh, view);
  RenderedView out;
  out.frame = fit_frame(proj.points, render.width, render.height);
  out.image = rasterize(proj.points, mesh.faces(), out.frame);
  out.boundary = trace_boundary(out.image);
  if (!proj.labels.empty()) {
    // Boundary points are integer pixel indices; pixel (c, r) is centred
    // at (c + 0.5, r + 0.5) in frame coordinates.
    std::vector<Vec2> sites(proj.points.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
      sites[i] = out.frame.to_pixel(proj.points[i]) - Vec2(0.5, 0.5);
    }
    label_boundary(out.boundary, sites, proj.labels);
  }
  return out;
}

FitTargets make_targets(const BinaryImage& front, const BinaryImage& side) {
  return {normalize_boundary(trace_boundary(front)),
          normalize_boundary(trace_boundary(side))};
}

FitTargets render_targets(const StatModel& model, const ParamVector& params,
                          const RenderConfig& render) {
  const Mesh body = synthesize(model, params);
  return {normalize_boundary(render_view(body, ViewSpec::front(), render).boundary),
          normalize_boundary(render_view(body, ViewSpec::side(), render).boundary)};
}

ViewCost score_view(const Boundary& subject, const Boundary& model_contour,
                    const WeightConfig& weights,
                    const RegistrationOptions& registration) {
  const KdTree2 index(model_contour.points);
  const RegistrationResult reg = rigid_register(subject, index, registration);
  const Boundary aligned = transform_boundary(subject, reg.transform);
  const CorrespondenceSet corr = pairwise_match(aligned, model_contour, index);
  return view_cost_detailed(corr, extreme_points(aligned, model_contour), weights);
}

FitnessBreakdown evaluate_mesh(const Mesh& posed, const FitTargets& targets,
                               const EvalSettings& settings) {
  FitnessBreakdown b;
  try {
    const Boundary front = normalize_boundary(
        render_view(posed, ViewSpec::front(), settings.render).boundary);
    const Boundary side = normalize_boundary(
        render_view(posed, ViewSpec::side(), settings.render).boundary);
    b.front = score_view(targets.front, front, settings.weights, settings.registration);
    b.side = score_view(targets.side, side, settings.weights, settings.registration);
  } catch (const Error&) {
    // Empty or collapsed silhouettes; the GA simply discards these.
    const double inf = std::numeric_limits<double>::infinity();
    b.f_front = b.f_side = b.f = inf;
    return b;
  }
  b.f_front = b.front.total;
  b.f_side = b.side.total;
  b.f = total_cost(b.f_front, b.f_side, settings.weights);
  return b;
}

FitnessBreakdown evaluate_params(const ParamVector& params, const StatModel& model,
                                 const FitTargets& targets,
                                 const EvalSettings& settings) {
  return evaluate_mesh(synthesize(model, params), targets, settings);
}

}  // namespace bodyfit
