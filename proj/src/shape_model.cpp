#include "bodyfit/shape_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "bodyfit/error.hpp"

namespace bodyfit {

namespace {

void check_shape_gene(double g, std::size_t i) {
  if (!(g >= -kShapeBound && g <= kShapeBound)) {
    throw InvalidArgument("shape gene " + std::to_string(i) + " = " +
                          std::to_string(g) + " outside [-3, 3]");
  }
}

void check_pose_angle(double a, std::size_t i) {
  if (!(a >= 0.0 && a <= kPoseMaxDeg)) {
    throw InvalidArgument("pose angle " + std::to_string(i) + " = " +
                          std::to_string(a) + " outside [0, 30] degrees");
  }
}

std::vector<Vec3> unflatten(const Eigen::VectorXd& flat) {
  std::vector<Vec3> out(static_cast<std::size_t>(flat.size() / 3));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = flat.segment<3>(static_cast<Eigen::Index>(3 * i));
  }
  return out;
}

}  // namespace

ParamVector::ParamVector(const std::array<double, kShapeGenes>& shape,
                         const std::array<double, kPoseGenes>& pose)
    : shape_(shape), pose_(pose) {
  for (std::size_t i = 0; i < shape_.size(); ++i) check_shape_gene(shape_[i], i);
  for (std::size_t i = 0; i < pose_.size(); ++i) check_pose_angle(pose_[i], i);
}

ParamVector ParamVector::from_genes(std::span<const double> genes) {
  if (genes.size() != kGeneCount) {
    throw InvalidArgument("expected " + std::to_string(kGeneCount) +
                          " genes, got " + std::to_string(genes.size()));
  }
  std::array<double, kShapeGenes> shape;
  std::array<double, kPoseGenes> pose;
  std::copy_n(genes.begin(), kShapeGenes, shape.begin());
  std::copy_n(genes.begin() + kShapeGenes, kPoseGenes, pose.begin());
  return ParamVector(shape, pose);
}

std::array<double, kGeneCount> ParamVector::genes() const {
  std::array<double, kGeneCount> out;
  std::copy(shape_.begin(), shape_.end(), out.begin());
  std::copy(pose_.begin(), pose_.end(), out.begin() + kShapeGenes);
  return out;
}

void StatModel::validate() const {
  const auto n3 = mean_shape.size();
  if (n3 == 0 || n3 % 3 != 0) {
    throw ModelFormatError("mean shape length is not a positive multiple of 3");
  }
  const auto nv = static_cast<std::size_t>(n3 / 3);
  const auto k = eigenvalues.size();
  if (eigenvectors.rows() != n3 || eigenvectors.cols() != k) {
    throw ModelFormatError("eigenvector matrix has wrong dimensions");
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!(eigenvalues[i] > 0.0)) {
      throw ModelFormatError("eigenvalues must be strictly positive");
    }
    if (i > 0 && eigenvalues[i] > eigenvalues[i - 1]) {
      throw ModelFormatError("eigenvalues must be non-increasing");
    }
  }
  const Eigen::MatrixXd gram = eigenvectors.transpose() * eigenvectors;
  const double ortho_err =
      (gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
  if (k > 0 && ortho_err >= 1e-8) {
    throw ModelFormatError("eigenvectors are not orthonormal (max error " +
                           std::to_string(ortho_err) + ")");
  }
  const auto nb = static_cast<Eigen::Index>(joints.size());
  if (skinning_weights.rows() != static_cast<Eigen::Index>(nv) ||
      skinning_weights.cols() != nb) {
    throw ModelFormatError("skinning weight matrix has wrong dimensions");
  }
  for (Eigen::Index i = 0; i < skinning_weights.rows(); ++i) {
    if (std::abs(skinning_weights.row(i).sum() - 1.0) > 1e-9 ||
        skinning_weights.row(i).minCoeff() < 0.0) {
      throw ModelFormatError("skinning weight row " + std::to_string(i) +
                             " is not stochastic");
    }
  }
  for (std::size_t j = 0; j < joints.size(); ++j) {
    const int p = joints[j].parent;
    if (p >= static_cast<int>(j) || p < -1) {
      throw ModelFormatError("joint " + joints[j].name +
                             " must have an earlier parent");
    }
    for (std::uint32_t v : joints[j].regressor) {
      if (v >= nv) throw ModelFormatError("joint regressor index out of range");
    }
  }
  for (const PosableJoint& pj : posable_joints) {
    if (pj.joint >= joints.size()) {
      throw ModelFormatError("posable joint index out of range");
    }
    if (std::abs(pj.axis.norm() - 1.0) > 1e-9) {
      throw ModelFormatError("posable joint axis is not a unit vector");
    }
  }
  if (part_labels.size() != nv) {
    throw ModelFormatError("part label count does not match vertex count");
  }
  for (const auto& [name, idx] : landmarks) {
    if (idx >= nv) throw ModelFormatError("landmark " + name + " out of range");
  }
  try {
    Mesh check(unflatten(mean_shape), faces, part_labels);
  } catch (const Error& e) {
    throw ModelFormatError(std::string("template topology invalid: ") +
                           e.what());
  }
}

Mesh mean_mesh(const StatModel& model) {
  return Mesh(unflatten(model.mean_shape), model.faces, model.part_labels);
}

Mesh synthesize_shape(const StatModel& model,
                      std::span<const double> coefficients) {
  const std::size_t k = model.component_count();
  if (coefficients.size() != k) {
    throw InvalidArgument("model has " + std::to_string(k) +
                          " shape components but " +
                          std::to_string(coefficients.size()) +
                          " coefficients were given");
  }
  Eigen::VectorXd beta(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    beta[static_cast<Eigen::Index>(i)] =
        coefficients[i] * std::sqrt(model.eigenvalues[static_cast<Eigen::Index>(i)]);
  }
  Eigen::VectorXd flat = model.mean_shape;
  flat.noalias() += model.eigenvectors * beta;
  return Mesh(unflatten(flat), model.faces, model.part_labels);
}

Mesh synthesize_shape(const StatModel& model, const ParamVector& params) {
  return synthesize_shape(model, std::span<const double>(params.shape()));
}

std::vector<JointTransform> bone_transforms(
    const StatModel& model, const Mesh& rest_mesh,
    std::span<const double, kPoseGenes> pose_deg) {
  const std::size_t nb = model.bone_count();
  std::vector<JointTransform> local(nb);
  std::vector<bool> driven(nb, false);
  for (std::size_t p = 0; p < kPoseGenes; ++p) {
    const PosableJoint& pj = model.posable_joints[p];
    const Joint& joint = model.joints[pj.joint];
    Vec3 pivot = joint.position;
    if (!joint.regressor.empty()) {
      pivot.setZero();
      for (std::uint32_t v : joint.regressor) pivot += rest_mesh.vertices()[v];
      pivot /= static_cast<double>(joint.regressor.size());
    }
    const double rad = pose_deg[p] * std::numbers::pi / 180.0;
    local[pj.joint].rotation = Eigen::AngleAxisd(rad, pj.axis).toRotationMatrix();
    local[pj.joint].pivot = pivot;
    driven[pj.joint] = true;
  }

  // Compose down the kinematic chain; parents precede children.
  std::vector<JointTransform> world(nb);
  for (std::size_t j = 0; j < nb; ++j) {
    const int parent = model.joints[j].parent;
    JointTransform t;
    t.bone = static_cast<std::uint32_t>(j);
    if (parent >= 0) {
      t = world[parent];
      t.bone = static_cast<std::uint32_t>(j);
    }
    if (driven[j]) {
      // parent(local(x)) with local(x) = R (x - c) + c.
      const Eigen::Matrix3d& r = local[j].rotation;
      const Vec3& c = local[j].pivot;
      const JointTransform parent_t = t;
      t.rotation = parent_t.rotation * r;
      t.pivot = c;
      t.offset = parent_t.rotation * (c - parent_t.pivot) + parent_t.pivot +
                 parent_t.offset - c;
    }
    world[j] = t;
  }
  return world;
}

namespace detail {

Mesh apply_pose(const Mesh& mesh, const StatModel& model,
                std::span<const double, kPoseGenes> pose_deg) {
  if (mesh.vertex_count() != model.vertex_count()) {
    throw InvalidArgument("mesh has " + std::to_string(mesh.vertex_count()) +
                          " vertices but the model expects " +
                          std::to_string(model.vertex_count()));
  }
  bool identity = true;
  for (double a : pose_deg) identity = identity && a == 0.0;
  if (identity) return mesh;

  const auto transforms = bone_transforms(model, mesh, pose_deg);
  std::vector<bool> moving(transforms.size());
  for (std::size_t j = 0; j < transforms.size(); ++j) {
    moving[j] = !transforms[j].rotation.isIdentity(0.0) ||
                !transforms[j].offset.isZero(0.0);
  }
  const auto& w = model.skinning_weights;
  std::vector<Vec3> out(mesh.vertex_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Vec3& v = mesh.vertices()[i];
    // v + sum_j w_ij (T_j v - v): identical to sum_j w_ij T_j v for
    // stochastic rows, and exact for vertices bound only to still bones.
    Vec3 delta = Vec3::Zero();
    for (std::size_t j = 0; j < transforms.size(); ++j) {
      if (!moving[j]) continue;
      const double wij = w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (wij != 0.0) delta += wij * (transforms[j].apply(v) - v);
    }
    out[i] = v + delta;
  }
  return Mesh(std::move(out), mesh.faces(), mesh.part_labels());
}

}  // namespace detail

Mesh repose(const Mesh& mesh, const StatModel& model,
            std::span<const double, kPoseGenes> pose_deg) {
  for (std::size_t i = 0; i < pose_deg.size(); ++i) check_pose_angle(pose_deg[i], i);
  return detail::apply_pose(mesh, model, pose_deg);
}

Mesh synthesize(const StatModel& model, const ParamVector& params) {
  return repose(synthesize_shape(model, params), model, params.pose());
}

}  // namespace bodyfit
