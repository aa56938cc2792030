#pragma once

#include <span>
#include <vector>

#include "bodyfit/image.hpp"
#include "bodyfit/mesh.hpp"

namespace bodyfit {

inline constexpr int kDefaultWidth = 640;
inline constexpr int kDefaultHeight = 480;
inline constexpr double kRasterMargin = 0.05;

/// Similarity map from projected model coordinates to pixel coordinates.
struct ImageFrame {
  int width = kDefaultWidth;
  int height = kDefaultHeight;
  double scale = 1.0;
  Vec2 offset = Vec2::Zero();

  Vec2 to_pixel(const Vec2& p) const { return scale * p + offset; }
};

/// Fits the point set's bounding box into the image with a 5% margin on
/// every side, aspect ratio preserved, centred.
ImageFrame fit_frame(std::span<const Vec2> points, int width, int height);

/// Fills every projected triangle. A pixel is foreground when its centre
/// lies inside (or on the edge of) a triangle. Zero-area triangles are
/// skipped.
BinaryImage rasterize(std::span<const Vec2> points, std::span<const Face> faces,
                      const ImageFrame& frame);

BinaryImage rasterize(std::span<const Vec2> points, std::span<const Face> faces,
                      int width = kDefaultWidth, int height = kDefaultHeight);

}  // namespace bodyfit
