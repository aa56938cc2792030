#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "bodyfit/body_part.hpp"

namespace bodyfit {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Face = std::array<std::uint32_t, 3>;

enum class Axis : std::uint8_t { kX = 0, kY = 1, kZ = 2 };

/// Model space is Z-up: X is lateral (subject's left is +X), Y points
/// front-to-back and Z is vertical. Circumference slices are XY planes.
inline constexpr Axis kUpAxis = Axis::kZ;

/// Triangle mesh in millimetres with optional per-vertex part labels.
///
/// The constructor validates every invariant (face indices in range, no
/// repeated vertex within a face, one valid label per vertex), so a Mesh
/// that exists is always well formed. Instances are immutable.
class Mesh {
 public:
  Mesh() = default;
  Mesh(std::vector<Vec3> vertices, std::vector<Face> faces,
       std::vector<BodyPart> part_labels = {});

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<BodyPart>& part_labels() const { return part_labels_; }
  bool has_part_labels() const { return !part_labels_.empty(); }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t face_count() const { return faces_.size(); }
  bool empty() const { return vertices_.empty(); }

  /// Copy with every vertex mapped through `fn`; topology and labels kept.
  template <typename Fn>
  Mesh transformed(Fn&& fn) const {
    std::vector<Vec3> out;
    out.reserve(vertices_.size());
    for (const Vec3& v : vertices_) out.push_back(fn(v));
    return Mesh(std::move(out), faces_, part_labels_);
  }

 private:
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<BodyPart> part_labels_;
};

struct SlicePlane {
  Axis axis = kUpAxis;
  double offset = 0.0;
};

/// Result of intersecting a mesh with an axis-aligned plane. Each loop is
/// closed implicitly: the last point connects back to the first.
struct CrossSection {
  SlicePlane plane;
  std::vector<std::vector<Vec3>> loops;

  bool empty() const { return loops.empty(); }
};

double loop_perimeter(std::span<const Vec3> loop);
Vec3 loop_centroid(std::span<const Vec3> loop);

CrossSection plane_cross_section(const Mesh& mesh, Axis axis, double offset);

/// Symmetric Hausdorff distance using vertex-to-surface distances in both
/// directions.
double hausdorff_distance(const Mesh& a, const Mesh& b);

/// Distance from every vertex of `from` to the closest point on the
/// surface of `to`.
std::vector<double> vertex_to_surface_distances(const Mesh& from,
                                                const Mesh& to);

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c);

double mesh_height(const Mesh& mesh);

// Wavefront-style text I/O. Only `v` and `f` records are honoured.
Mesh load_mesh(const std::filesystem::path& path);
Mesh read_mesh(std::istream& in);
void save_mesh(const Mesh& mesh, const std::filesystem::path& path);
void write_mesh(const Mesh& mesh, std::ostream& out);

void write_cross_section_csv(const CrossSection& section, std::ostream& out);

}  // namespace bodyfit
