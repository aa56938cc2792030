#include "bodyfit/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bodyfit {

ImageFrame fit_frame(std::span<const Vec2> points, int width, int height) {
  if (points.empty()) throw InvalidArgument("cannot frame an empty point set");
  if (std::min(width, height) < 64) {
    throw InvalidArgument("render resolution must be at least 64 pixels on "
                          "the short side");
  }
  Vec2 lo = points.front(), hi = lo;
  for (const Vec2& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec2 extent = hi - lo;
  const double avail_w = width * (1.0 - 2.0 * kRasterMargin);
  const double avail_h = height * (1.0 - 2.0 * kRasterMargin);
  double scale = std::numeric_limits<double>::infinity();
  if (extent.x() > 0) scale = std::min(scale, avail_w / extent.x());
  if (extent.y() > 0) scale = std::min(scale, avail_h / extent.y());
  if (!std::isfinite(scale)) scale = 1.0;

  ImageFrame frame;
  frame.width = width;
  frame.height = height;
  frame.scale = scale;
  frame.offset = Vec2(width / 2.0, height / 2.0) - scale * (lo + hi) / 2.0;
  return frame;
}

BinaryImage rasterize(std::span<const Vec2> points, std::span<const Face> faces,
                      const ImageFrame& frame) {
  if (points.empty()) throw InvalidArgument("cannot rasterize an empty mesh");
  BinaryImage image(frame.width, frame.height);
  std::vector<Vec2> px(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) px[i] = frame.to_pixel(points[i]);

  for (const Face& f : faces) {
    const Vec2& a = px[f[0]];
    const Vec2& b = px[f[1]];
    const Vec2& c = px[f[2]];
    const double area = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
    if (area == 0.0 || !std::isfinite(area)) continue;
    const double sign = area > 0 ? 1.0 : -1.0;

    const double min_x = std::min({a.x(), b.x(), c.x()});
    const double max_x = std::max({a.x(), b.x(), c.x()});
    const double min_y = std::min({a.y(), b.y(), c.y()});
    const double max_y = std::max({a.y(), b.y(), c.y()});
    const int x0 = std::max(0, static_cast<int>(std::floor(min_x - 0.5)));
    const int x1 = std::min(frame.width - 1, static_cast<int>(std::ceil(max_x - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::floor(min_y - 0.5)));
    const int y1 = std::min(frame.height - 1, static_cast<int>(std::ceil(max_y - 0.5)));

    auto edge = [sign](const Vec2& p, const Vec2& q, double x, double y) {
      return sign * ((q.x() - p.x()) * (y - p.y()) - (q.y() - p.y()) * (x - p.x()));
    };
    for (int y = y0; y <= y1; ++y) {
      const double cy = y + 0.5;
      for (int x = x0; x <= x1; ++x) {
        const double cx = x + 0.5;
        if (edge(a, b, cx, cy) >= 0 && edge(b, c, cx, cy) >= 0 &&
            edge(c, a, cx, cy) >= 0) {
          image.set(x, y, true);
        }
      }
    }
  }
  return image;
}

BinaryImage rasterize(std::span<const Vec2> points, std::span<const Face> faces,
                      int width, int height) {
  return rasterize(points, faces, fit_frame(points, width, height));
}

}  // namespace bodyfit
