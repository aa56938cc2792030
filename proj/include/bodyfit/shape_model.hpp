#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "bodyfit/mesh.hpp"

namespace bodyfit {

inline constexpr std::size_t kShapeGenes = 20;
inline constexpr std::size_t kPoseGenes = 4;
inline constexpr std::size_t kGeneCount = kShapeGenes + kPoseGenes;
inline constexpr double kShapeBound = 3.0;   // standard deviations
inline constexpr double kPoseMaxDeg = 30.0;  // degrees

/// 20 shape coefficients in standard-deviation units followed by four pose
/// angles in degrees (left hip, right hip, left humerus, right humerus).
class ParamVector {
 public:
  ParamVector() { shape_.fill(0.0); pose_.fill(0.0); }
  ParamVector(const std::array<double, kShapeGenes>& shape,
              const std::array<double, kPoseGenes>& pose);

  /// Builds from a flat 24-gene chromosome. Throws on wrong length or
  /// out-of-range genes.
  static ParamVector from_genes(std::span<const double> genes);

  const std::array<double, kShapeGenes>& shape() const { return shape_; }
  const std::array<double, kPoseGenes>& pose() const { return pose_; }
  std::array<double, kGeneCount> genes() const;

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  std::array<double, kShapeGenes> shape_;
  std::array<double, kPoseGenes> pose_;
};

struct Joint {
  std::string name;
  Vec3 position = Vec3::Zero();  // rest position on the mean shape
  int parent = -1;
  /// Vertices whose centroid locates the joint on a specific body. Empty
  /// means the stored rest position is used.
  std::vector<std::uint32_t> regressor;
};

/// One of the four joints driven by pose genes. `axis` is the unit
/// rotation axis; a positive angle opens the limb away from the midline.
struct PosableJoint {
  std::uint32_t joint = 0;
  Vec3 axis = Vec3::UnitY();
};

/// Rigid transform of one bone: x -> rotation * (x - pivot) + pivot + offset.
/// `offset` is nonzero only when rotations about different pivots compose
/// along a kinematic chain.
struct JointTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 pivot = Vec3::Zero();
  Vec3 offset = Vec3::Zero();
  std::uint32_t bone = 0;

  Vec3 apply(const Vec3& x) const {
    return rotation * (x - pivot) + pivot + offset;
  }
};

using LandmarkSet = std::map<std::string, std::uint32_t>;

/// PCA shape space plus linear-blend-skinning rig.
///
/// Coordinates are stored flat as (x0, y0, z0, x1, ...). Bone j is the
/// segment hanging from joint j, so the bone count equals the joint count.
struct StatModel {
  Eigen::VectorXd mean_shape;       // 3 * N_v
  Eigen::MatrixXd eigenvectors;     // 3 * N_v x K, orthonormal columns
  Eigen::VectorXd eigenvalues;      // K, descending, variance units
  std::vector<Joint> joints;
  Eigen::MatrixXd skinning_weights;  // N_v x N_b, rows sum to one
  std::vector<Face> faces;
  std::vector<BodyPart> part_labels;
  std::array<PosableJoint, kPoseGenes> posable_joints{};
  LandmarkSet landmarks;

  std::size_t vertex_count() const {
    return static_cast<std::size_t>(mean_shape.size() / 3);
  }
  std::size_t component_count() const {
    return static_cast<std::size_t>(eigenvalues.size());
  }
  std::size_t bone_count() const { return joints.size(); }

  /// Checks dimensions, orthonormality, eigenvalue ordering, stochastic
  /// skinning rows and index ranges. Throws ModelFormatError.
  void validate() const;
};

Mesh mean_mesh(const StatModel& model);

/// Rest-pose body: mean + sum_k coefficient_k * sqrt(lambda_k) * e_k.
Mesh synthesize_shape(const StatModel& model, const ParamVector& params);
Mesh synthesize_shape(const StatModel& model,
                      std::span<const double> coefficients);

/// Per-bone transforms for the given pose angles (degrees). Pivots are
/// located on `rest_mesh` through the joint regressors.
std::vector<JointTransform> bone_transforms(
    const StatModel& model, const Mesh& rest_mesh,
    std::span<const double, kPoseGenes> pose_deg);

/// Linear blend skinning of a rest-pose mesh. Angles must lie in [0, 30].
Mesh repose(const Mesh& mesh, const StatModel& model,
            std::span<const double, kPoseGenes> pose_deg);

/// synthesize_shape followed by repose.
Mesh synthesize(const StatModel& model, const ParamVector& params);

namespace detail {
/// repose without the angle range check; negative angles undo a pose.
Mesh apply_pose(const Mesh& mesh, const StatModel& model,
                std::span<const double, kPoseGenes> pose_deg);
}  // namespace detail

struct SyntheticModelOptions {
  std::size_t sample_count = 240;
  std::size_t components = kShapeGenes;
};

/// Procedural humanoid shape space standing in for a scanned population.
/// Deterministic for a given seed.
StatModel build_synthetic_model(std::uint64_t seed, std::size_t vertex_budget,
                                const SyntheticModelOptions& options = {});

// Versioned little-endian binary container.
void save_model(const StatModel& model, const std::filesystem::path& path);
StatModel load_model(const std::filesystem::path& path);
void write_model(const StatModel& model, std::ostream& out);
StatModel read_model(std::istream& in);

}  // namespace bodyfit
