#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "bodyfit/mesh.hpp"

namespace bodyfit {

/// Projection angles in degrees about the X, Y and Z axes.
struct ViewSpec {
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;

  static constexpr ViewSpec front() { return {90.0, 0.0, 0.0}; }
  static constexpr ViewSpec side() { return {90.0, 90.0, 0.0}; }
};

struct RotationSet {
  Eigen::Matrix3d rx, ry, rz;
};

Eigen::Matrix3d rotation_x(double radians);
Eigen::Matrix3d rotation_y(double radians);
Eigen::Matrix3d rotation_z(double radians);

RotationSet rotation_matrices(const ViewSpec& view);

/// 2D points with the part label of the vertex each one came from.
struct Projection {
  std::vector<Vec2> points;
  std::vector<BodyPart> labels;  // empty if the mesh is unlabelled
};

/// Orthographic projection: v' = Rz * Ry * Rx * v, depth (third component)
/// dropped. For a Z-up body both standard views put the head at negative
/// image y, matching image row order.
Projection project(const Mesh& mesh, const ViewSpec& view);

}  // namespace bodyfit
