#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "bodyfit/boundary.hpp"
#include "bodyfit/kdtree.hpp"

namespace bodyfit {

/// x -> rotation * x + translation.
struct RigidTransform2D {
  Eigen::Matrix2d rotation = Eigen::Matrix2d::Identity();
  Vec2 translation = Vec2::Zero();

  Vec2 apply(const Vec2& p) const { return rotation * p + translation; }
  double angle() const;  // radians
  /// (this ∘ other)(x) = this(other(x)).
  RigidTransform2D compose(const RigidTransform2D& other) const;
  RigidTransform2D inverse() const;

  static RigidTransform2D from_angle(double radians, const Vec2& t = Vec2::Zero());
};

Boundary transform_boundary(const Boundary& b, const RigidTransform2D& t);

/// Centroid to the origin, vertical extent scaled to 1. Labels kept.
/// Throws InvalidArgument with fewer than 2 points or zero vertical extent.
Boundary normalize_boundary(const Boundary& b);

struct RegistrationOptions {
  int max_iters = 50;
  double tol = 1e-8;
  /// Initial rotations tried around the source centroid, in degrees, at
  /// `rotation_step_deg` spacing within +/- this range. The start with the
  /// lowest matching error seeds the iteration.
  double rotation_search_deg = 60.0;
  double rotation_step_deg = 15.0;
  /// The best grid angle is then refined by halving the spacing down to
  /// this resolution.
  double rotation_refine_deg = 0.1;
};

struct RegistrationResult {
  RigidTransform2D transform;
  int iterations = 0;
  bool converged = false;
  /// Matching error after each accepted iteration, starting with the
  /// initial alignment. Non-increasing.
  std::vector<double> error_history;

  double final_error() const {
    return error_history.empty() ? 0.0 : error_history.back();
  }
};

/// Point-to-point ICP bringing `source` onto `target`: nearest-neighbour
/// correspondences through a k-d tree over the target, then the closed-form
/// least-squares rotation and translation. Stops when the error decrease
/// drops below `tol` or after `max_iters`.
RegistrationResult rigid_register(const Boundary& source, const Boundary& target,
                                  const RegistrationOptions& options = {});
RegistrationResult rigid_register(const Boundary& source, const KdTree2& target,
                                  const RegistrationOptions& options = {});

/// Sum of squared distances from each source point to its nearest target
/// point.
double match_error(const std::vector<Vec2>& source, const KdTree2& target);

struct Correspondence {
  std::uint32_t subject = 0;  // index into Z
  std::uint32_t model = 0;    // index into X
  double distance = 0.0;
  BodyPart label = BodyPart::kHead;
};

struct CorrespondenceSet {
  std::vector<Correspondence> pairs;
  double residual = 0.0;  // sum of squared distances
};

/// Pairs each subject point with its nearest model point and carries over
/// the model point's label (head if the model is unlabelled).
CorrespondenceSet pairwise_match(const Boundary& subject, const Boundary& model);
CorrespondenceSet pairwise_match(const Boundary& subject, const Boundary& model,
                                 const KdTree2& model_index);

struct ExtremePair {
  double top_gap = 0.0;
  double bottom_gap = 0.0;
};

/// Gaps between the highest (smallest y) and lowest (largest y) points of
/// two boundaries. Ties go to the smaller x.
ExtremePair extreme_points(const Boundary& subject, const Boundary& model);

void write_correspondence_csv(const CorrespondenceSet& set,
                              const Boundary& subject, const Boundary& model,
                              std::ostream& out);

}  // namespace bodyfit
