#pragma once

#include <iosfwd>
#include <vector>

#include "bodyfit/image.hpp"
#include "bodyfit/mesh.hpp"

namespace bodyfit {

/// Ordered closed contour. Image-derived boundaries use pixel coordinates
/// with y growing downwards, so the "highest" point has the smallest y.
struct Boundary {
  std::vector<Vec2> points;
  bool closed = true;
  std::vector<BodyPart> labels;  // empty or one per point

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool labelled() const { return !labels.empty(); }
};

struct TraceResult {
  Boundary boundary;
  std::size_t steps = 0;  // Moore-neighbour moves performed
};

/// Moore-neighbour tracing of the largest 8-connected component. Tracing
/// stops once the first move out of the start pixel, with its backtrack,
/// is about to repeat. The start pixel is the first foreground pixel in
/// top-to-bottom, left-to-right order; neighbours are visited clockwise.
/// Throws EmptySilhouetteError on an empty image.
TraceResult trace_boundary_detailed(const BinaryImage& image);
Boundary trace_boundary(const BinaryImage& image);

/// Gives every boundary point the label of the nearest labelled point.
void label_boundary(Boundary& boundary, const std::vector<Vec2>& sites,
                    const std::vector<BodyPart>& site_labels);

void write_boundary_csv(const Boundary& boundary, std::ostream& out);

}  // namespace bodyfit
