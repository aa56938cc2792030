#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "bodyfit/projection.hpp"
#include "test_support.hpp"

namespace bodyfit {
namespace {

TEST(RotationMatrices, ZeroAnglesAreIdentity) {
  const RotationSet r = rotation_matrices({0, 0, 0});
  EXPECT_EQ(r.rx, Eigen::Matrix3d::Identity());
  EXPECT_EQ(r.ry, Eigen::Matrix3d::Identity());
  EXPECT_EQ(r.rz, Eigen::Matrix3d::Identity());
}

TEST(RotationMatrices, QuarterTurnAboutZ) {
  Eigen::Matrix3d expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  EXPECT_LT((rotation_matrices({0, 0, 90}).rz - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RotationMatrices, YCompositionAddsAngles) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng);
    const Eigen::Matrix3d lhs = rotation_y(a) * rotation_y(b);
    EXPECT_LT((lhs - rotation_y(a + b)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Project, OriginMapsToOrigin) {
  const Mesh m({Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY()}, {{0, 1, 2}});
  for (const ViewSpec& v : {ViewSpec::front(), ViewSpec::side(), ViewSpec{13, 27, 41}}) {
    EXPECT_LT(project(m, v).points[0].norm(), 1e-15);
  }
}

TEST(Project, IdentityViewDropsZ) {
  const Mesh m({Vec3(1, 2, 3), Vec3::UnitX(), Vec3::UnitY()}, {{0, 1, 2}});
  EXPECT_EQ(project(m, {0, 0, 0}).points[0], Vec2(1, 2));
}

TEST(Project, FrontAndSideShareVerticalCoordinate) {
  const StatModel& model = testing::small_model();
  const Mesh body = mean_mesh(model);
  const Projection f = project(body, ViewSpec::front());
  const Projection s = project(body, ViewSpec::side());
  // Matrix oracle: front keeps (x, -z), side keeps (y, -z) for a Z-up body.
  for (std::size_t i = 0; i < body.vertex_count(); ++i) {
    const Vec3& v = body.vertices()[i];
    EXPECT_NEAR(f.points[i].y(), s.points[i].y(), 1e-9);
    EXPECT_NEAR(f.points[i].y(), -v.z(), 1e-9);
    EXPECT_NEAR(f.points[i].x(), v.x(), 1e-9);
    EXPECT_NEAR(s.points[i].x(), v.y(), 1e-9);
  }
  EXPECT_EQ(f.labels, body.part_labels());
}

TEST(Project, IsLinear) {
  const StatModel& model = testing::small_model();
  const Mesh body = mean_mesh(model);
  const Mesh scaled = body.transformed([](const Vec3& p) { return Vec3(2.5 * p); });
  const ViewSpec view{30, 60, 10};
  const Projection a = project(body, view);
  const Projection b = project(scaled, view);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_NEAR((2.5 * a.points[i] - b.points[i]).norm(), 0.0, 1e-9);
  }
}

}  // namespace
}  // namespace bodyfit
