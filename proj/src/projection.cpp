#include "bodyfit/projection.hpp"

#include <cmath>
#include <numbers>

namespace bodyfit {

namespace {
double to_radians(double deg) { return deg * std::numbers::pi / 180.0; }
}  // namespace

Eigen::Matrix3d rotation_x(double t) {
  Eigen::Matrix3d r;
  r << 1, 0, 0,
       0, std::cos(t), -std::sin(t),
       0, std::sin(t), std::cos(t);
  return r;
}

Eigen::Matrix3d rotation_y(double t) {
  Eigen::Matrix3d r;
  r << std::cos(t), 0, std::sin(t),
       0, 1, 0,
       -std::sin(t), 0, std::cos(t);
  return r;
}

Eigen::Matrix3d rotation_z(double t) {
  Eigen::Matrix3d r;
  r << std::cos(t), -std::sin(t), 0,
       std::sin(t), std::cos(t), 0,
       0, 0, 1;
  return r;
}

RotationSet rotation_matrices(const ViewSpec& view) {
  return {rotation_x(to_radians(view.dx)), rotation_y(to_radians(view.dy)),
          rotation_z(to_radians(view.dz))};
}

Projection project(const Mesh& mesh, const ViewSpec& view) {
  const RotationSet r = rotation_matrices(view);
  const Eigen::Matrix3d m = r.rz * r.ry * r.rx;
  Projection out;
  out.points.reserve(mesh.vertex_count());
  for (const Vec3& v : mesh.vertices()) {
    const Vec3 p = m * v;
    out.points.emplace_back(p.x(), p.y());
  }
  out.labels = mesh.part_labels();
  return out;
}

}  // namespace bodyfit
