#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/LU>

#include "bodyfit/error.hpp"
#include "bodyfit/registration.hpp"

namespace bodyfit {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Irregular closed curve: no rotational symmetry, so the alignment is unique.
Boundary star_curve(int n) {
  Boundary b;
  for (int i = 0; i < n; ++i) {
    const double t = 2 * std::numbers::pi * i / n;
    const double r = 1.0 + 0.3 * std::cos(3 * t) + 0.15 * std::sin(5 * t + 0.4);
    b.points.emplace_back(0.6 * r * std::cos(t) + 0.1, r * std::sin(t));
  }
  return b;
}

Boundary apply(const Boundary& b, double angle, const Vec2& shift) {
  return transform_boundary(b, RigidTransform2D::from_angle(angle, shift));
}

TEST(RigidTransform, ComposeAndInverse) {
  const auto a = RigidTransform2D::from_angle(0.3, Vec2(1, -2));
  const auto b = RigidTransform2D::from_angle(-1.1, Vec2(0.5, 4));
  const Vec2 p(0.7, -0.2);
  EXPECT_LT((a.compose(b).apply(p) - a.apply(b.apply(p))).norm(), 1e-12);
  EXPECT_LT((a.inverse().apply(a.apply(p)) - p).norm(), 1e-12);
  EXPECT_NEAR(a.angle(), 0.3, 1e-12);
}

TEST(NormalizeBoundary, CentredUnitHeight) {
  const Boundary b = normalize_boundary(apply(star_curve(100), 0.2, {30, 40}));
  Vec2 c = Vec2::Zero();
  double lo = 1e9, hi = -1e9;
  for (const Vec2& p : b.points) {
    c += p;
    lo = std::min(lo, p.y());
    hi = std::max(hi, p.y());
  }
  EXPECT_LT((c / b.size()).norm(), 1e-12);
  EXPECT_NEAR(hi - lo, 1.0, 1e-12);
}

TEST(NormalizeBoundary, DegenerateInputsThrow) {
  Boundary one;
  one.points = {{1, 1}};
  EXPECT_THROW(normalize_boundary(one), InvalidArgument);
  Boundary flat;
  flat.points = {{0, 1}, {2, 1}, {3, 1}};
  EXPECT_THROW(normalize_boundary(flat), InvalidArgument);
}

TEST(RigidRegister, IdenticalInputsGiveIdentity) {
  const Boundary b = star_curve(200);
  const RegistrationResult r = rigid_register(b, b);
  EXPECT_LT((r.transform.rotation - Eigen::Matrix2d::Identity()).norm(), 1e-12);
  EXPECT_LT(r.transform.translation.norm(), 1e-12);
  EXPECT_EQ(r.final_error(), 0.0);
}

TEST(RigidRegister, RecoversRotationAndShift) {
  const Boundary target = star_curve(300);
  const double angle = 20 * kDeg;
  const Vec2 shift(0.3, -0.2);
  const Boundary source = apply(target, angle, shift);
  const RegistrationResult r = rigid_register(source, target);
  // Expected transform is the inverse of the applied one.
  const auto expected = RigidTransform2D::from_angle(angle, shift).inverse();
  EXPECT_LT((r.transform.rotation - expected.rotation).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((r.transform.translation - expected.translation).norm(), 1e-10);
  EXPECT_LT(r.final_error(), 1e-18);
}

TEST(RigidRegister, NoisyRecoveryWithinOneDegree) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0.0, 0.002);
  const Boundary target = star_curve(400);
  Boundary source = apply(target, -12 * kDeg, {0.05, 0.1});
  for (Vec2& p : source.points) p += Vec2(noise(rng), noise(rng));
  const RegistrationResult r = rigid_register(source, target);
  EXPECT_NEAR(r.transform.angle(), 12 * kDeg, 1 * kDeg);
}

TEST(RigidRegister, HistoryMonotoneAndRotationProper) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(-40 * kDeg, 40 * kDeg), sh(-0.3, 0.3);
  const Boundary target = star_curve(250);
  for (int trial = 0; trial < 20; ++trial) {
    const Boundary source = apply(star_curve(173), ang(rng), {sh(rng), sh(rng)});
    const RegistrationResult r = rigid_register(source, target);
    ASSERT_FALSE(r.error_history.empty());
    for (std::size_t i = 1; i < r.error_history.size(); ++i) {
      EXPECT_LE(r.error_history[i], r.error_history[i - 1]);
    }
    const Eigen::Matrix2d& rot = r.transform.rotation;
    EXPECT_LT((rot.transpose() * rot - Eigen::Matrix2d::Identity()).norm(), 1e-12);
    EXPECT_NEAR(rot.determinant(), 1.0, 1e-12);
  }
}

TEST(RigidRegister, TooFewPointsThrow) {
  Boundary two;
  two.points = {{0, 0}, {1, 1}};
  EXPECT_THROW(rigid_register(two, star_curve(10)), InvalidArgument);
  EXPECT_THROW(rigid_register(star_curve(10), two), InvalidArgument);
}

TEST(PairwiseMatch, MatchesBruteForce) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1, 1);
  Boundary subject, model;
  for (int i = 0; i < 300; ++i) subject.points.emplace_back(u(rng), u(rng));
  for (int i = 0; i < 500; ++i) {
    model.points.emplace_back(u(rng), u(rng));
    model.labels.push_back(kAllBodyParts[i % kBodyPartCount]);
  }
  const CorrespondenceSet set = pairwise_match(subject, model);
  ASSERT_EQ(set.pairs.size(), subject.size());
  double residual = 0;
  for (std::size_t i = 0; i < subject.size(); ++i) {
    std::uint32_t best = 0;
    double bd = 1e18;
    for (std::uint32_t j = 0; j < model.size(); ++j) {
      const double d = (subject.points[i] - model.points[j]).squaredNorm();
      if (d < bd) bd = d, best = j;
    }
    EXPECT_EQ(set.pairs[i].subject, i);
    EXPECT_EQ(set.pairs[i].model, best);
    EXPECT_NEAR(set.pairs[i].distance, std::sqrt(bd), 1e-15);
    EXPECT_EQ(set.pairs[i].label, model.labels[best]);
    residual += bd;
  }
  EXPECT_NEAR(set.residual, residual, 1e-12);
}

TEST(PairwiseMatch, ParallelLinesGiveOffset) {
  Boundary a, b;
  for (int i = 0; i <= 100; ++i) {
    a.points.emplace_back(0.0, i * 0.01);
    b.points.emplace_back(0.25, i * 0.01);
  }
  for (const Correspondence& c : pairwise_match(a, b).pairs) {
    EXPECT_NEAR(c.distance, 0.25, 1e-12);
  }
}

TEST(PairwiseMatch, LabelsFollowModelParts) {
  // Upper half of the model is head, lower half foot.
  Boundary model;
  for (int i = 0; i < 40; ++i) {
    model.points.emplace_back(0.0, i * 0.1);
    model.labels.push_back(i < 20 ? BodyPart::kHead : BodyPart::kFoot);
  }
  Boundary subject;
  subject.points = {{0.1, 0.5}, {0.1, 3.5}};
  const CorrespondenceSet set = pairwise_match(subject, model);
  EXPECT_EQ(set.pairs[0].label, BodyPart::kHead);
  EXPECT_EQ(set.pairs[1].label, BodyPart::kFoot);
}

TEST(PairwiseMatch, UnlabelledModelDefaultsToHead) {
  Boundary model = star_curve(30);
  const CorrespondenceSet set = pairwise_match(star_curve(10), model);
  for (const auto& c : set.pairs) EXPECT_EQ(c.label, BodyPart::kHead);
}

TEST(ExtremePoints, TopAndBottomGaps) {
  Boundary s, m;
  s.points = {{0, 0}, {1, 5}, {2, 10}, {-1, 0}};
  m.points = {{3, 4}, {0, 1}, {0, 12}};
  const ExtremePair e = extreme_points(s, m);
  // Subject top is (-1, 0) after the x tie-break.
  EXPECT_NEAR(e.top_gap, std::hypot(1.0, 1.0), 1e-12);
  EXPECT_NEAR(e.bottom_gap, std::hypot(2.0, 2.0), 1e-12);
}

TEST(Registration, CostInvariantUnderCommonRigidMotion) {
  const Boundary a = star_curve(220);
  const Boundary b = apply(star_curve(150), 0.1, {0.05, 0.02});
  const double e0 = pairwise_match(a, b).residual;
  const ExtremePair x0 = extreme_points(a, b);
  const auto t = RigidTransform2D::from_angle(0.0, Vec2(3.5, -8.0));
  EXPECT_NEAR(pairwise_match(transform_boundary(a, t), transform_boundary(b, t)).residual, e0, 1e-9);
  const auto rot = RigidTransform2D::from_angle(0.7, Vec2(1, 1));
  EXPECT_NEAR(pairwise_match(transform_boundary(a, rot), transform_boundary(b, rot)).residual, e0, 1e-9);
  const ExtremePair x1 = extreme_points(transform_boundary(a, t), transform_boundary(b, t));
  EXPECT_NEAR(x1.top_gap, x0.top_gap, 1e-12);
  EXPECT_NEAR(x1.bottom_gap, x0.bottom_gap, 1e-12);
}

TEST(Registration, CorrespondenceCsv) {
  Boundary s, m;
  s.points = {{0, 0}};
  m.points = {{3, 4}};
  m.labels = {BodyPart::kChest};
  std::ostringstream os;
  write_correspondence_csv(pairwise_match(s, m), s, m, os);
  EXPECT_NE(os.str().find("chest"), std::string::npos);
  EXPECT_NE(os.str().find('5'), std::string::npos);
}

}  // namespace
}  // namespace bodyfit
