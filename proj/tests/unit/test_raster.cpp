#include <gtest/gtest.h>

#include <random>

#include "bodyfit/boundary.hpp"
#include "bodyfit/error.hpp"
#include "bodyfit/pipeline.hpp"
#include "bodyfit/raster.hpp"
#include "test_support.hpp"

namespace bodyfit {
namespace {

// Half-plane test written independently of the rasteriser.
bool inside_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  auto side = [](const Vec2& o, const Vec2& d, const Vec2& q) {
    return (d.x() - o.x()) * (q.y() - o.y()) - (d.y() - o.y()) * (q.x() - o.x());
  };
  const double s1 = side(a, b, p), s2 = side(b, c, p), s3 = side(c, a, p);
  return (s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0);
}

TEST(Rasterize, TriangleMatchesPointInTriangleOracle) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<Vec2> pts = {{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
    const std::vector<Face> faces = {{0, 1, 2}};
    const ImageFrame frame = fit_frame(pts, 160, 120);
    const BinaryImage img = rasterize(pts, faces, frame);
    const Vec2 a = frame.to_pixel(pts[0]), b = frame.to_pixel(pts[1]), c = frame.to_pixel(pts[2]);
    for (int y = 0; y < 120; ++y) {
      for (int x = 0; x < 160; ++x) {
        ASSERT_EQ(img.at(x, y), inside_triangle({x + 0.5, y + 0.5}, a, b, c))
            << "trial " << trial << " pixel " << x << "," << y;
      }
    }
  }
}

TEST(Rasterize, LargeTriangleCoversHalfPlane) {
  // The hypotenuse runs corner to corner of the framed square.
  const std::vector<Vec2> pts = {{0, 0}, {1, 0}, {0, 1}};
  const ImageFrame frame = fit_frame(pts, 100, 100);
  const BinaryImage img = rasterize(pts, std::vector<Face>{{0, 1, 2}}, frame);
  const Vec2 a = frame.to_pixel(pts[0]), b = frame.to_pixel(pts[1]), c = frame.to_pixel(pts[2]);
  std::size_t expected = 0;
  for (int y = 0; y < 100; ++y) {
    for (int x = 0; x < 100; ++x) expected += inside_triangle({x + 0.5, y + 0.5}, a, b, c);
  }
  EXPECT_EQ(img.count(), expected);
  EXPECT_NEAR(static_cast<double>(expected), 0.5 * 90 * 90, 100);
}

TEST(Rasterize, DegenerateTriangleSkipped) {
  const std::vector<Vec2> pts = {{0, 0}, {1, 1}, {2, 2}, {0, 1}};
  const BinaryImage img = rasterize(pts, std::vector<Face>{{0, 1, 2}}, 64, 64);
  EXPECT_EQ(img.count(), 0u);
}

TEST(Rasterize, EmptyPointsThrow) {
  EXPECT_THROW(rasterize(std::vector<Vec2>{}, std::vector<Face>{}, 640, 480), InvalidArgument);
}

TEST(Rasterize, ResolutionBelowMinimumThrows) {
  const std::vector<Vec2> pts = {{0, 0}, {1, 0}, {0, 1}};
  EXPECT_THROW(rasterize(pts, std::vector<Face>{{0, 1, 2}}, 32, 480), InvalidArgument);
}

TEST(Rasterize, FrameKeepsMarginAndAspect) {
  const std::vector<Vec2> pts = {{-1, -2}, {1, 2}};
  const ImageFrame f = fit_frame(pts, 640, 480);
  const Vec2 lo = f.to_pixel(pts[0]), hi = f.to_pixel(pts[1]);
  EXPECT_NEAR(lo.y(), 24.0, 1e-9);
  EXPECT_NEAR(hi.y(), 456.0, 1e-9);
  EXPECT_NEAR((hi.x() - lo.x()) / (hi.y() - lo.y()), 0.5, 1e-12);
  EXPECT_NEAR(0.5 * (lo.x() + hi.x()), 320.0, 1e-9);
}

TEST(Rasterize, DoublingResolutionQuadruplesArea) {
  const StatModel& model = testing::small_model();
  const Mesh body = mean_mesh(model);
  for (const ViewSpec& view : {ViewSpec::front(), ViewSpec::side()}) {
    const Projection p = project(body, view);
    const double a1 = static_cast<double>(rasterize(p.points, body.faces(), 640, 480).count());
    const double a2 = static_cast<double>(rasterize(p.points, body.faces(), 1280, 960).count());
    EXPECT_NEAR(a2 / a1, 4.0, 0.08);
  }
}

TEST(Rasterize, FrontAndSideSilhouettesEqualHeight) {
  const StatModel& model = testing::small_model();
  const Mesh body = synthesize(model, ParamVector{});
  auto rows = [](const BinaryImage& img) {
    int top = img.height(), bottom = -1;
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        if (img.at(x, y)) {
          top = std::min(top, y);
          bottom = std::max(bottom, y);
        }
      }
    }
    return bottom - top + 1;
  };
  // Both views share one frame scale when fitted on height, so compare
  // them through a common frame.
  const Projection f = project(body, ViewSpec::front());
  const Projection s = project(body, ViewSpec::side());
  std::vector<Vec2> all = f.points;
  all.insert(all.end(), s.points.begin(), s.points.end());
  const ImageFrame frame = fit_frame(all, 640, 480);
  const int hf = rows(rasterize(f.points, body.faces(), frame));
  const int hs = rows(rasterize(s.points, body.faces(), frame));
  EXPECT_LE(std::abs(hf - hs), 1);
}

TEST(Rasterize, ConvexMeshTracesToOneLoop) {
  const Mesh box = testing::box_mesh(Vec3(-1, -2, 0), Vec3(1, 2, 5));
  const Projection p = project(box, ViewSpec{20, 35, 10});
  const BinaryImage img = rasterize(p.points, box.faces(), 200, 200);
  EXPECT_EQ(largest_component(img), img);
  const Boundary b = trace_boundary(img);
  EXPECT_TRUE(b.closed);
  EXPECT_GT(b.size(), 8u);
}

}  // namespace
}  // namespace bodyfit
