#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/SVD>

#include "bodyfit/error.hpp"
#include "bodyfit/shape_model.hpp"

namespace bodyfit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kArmAngle = 25.0 * kPi / 180.0;  // A-pose, from vertical

enum Tube : int {
  kTorso = 0, kHead, kArmL, kArmR, kLegL, kLegR, kFootL, kFootR, kTubeCount
};

enum JointId : int {
  kPelvis = 0, kSpine, kNeck,
  kHumerusL, kElbowL, kWristL,
  kHumerusR, kElbowR, kWristR,
  kHipL, kKneeL, kAnkleL,
  kHipR, kKneeR, kAnkleR,
  kJointCount
};

constexpr std::array<const char*, kJointCount> kJointNames = {
    "pelvis",     "spine",   "neck",    "left_humerus", "left_elbow",
    "left_wrist", "right_humerus", "right_elbow", "right_wrist", "left_hip",
    "left_knee",  "left_ankle", "right_hip", "right_knee", "right_ankle"};

constexpr std::array<int, kJointCount> kJointParents = {
    -1, kPelvis, kSpine, kSpine, kHumerusL, kElbowL, kSpine, kHumerusR,
    kElbowR, kPelvis, kHipL, kKneeL, kPelvis, kHipR, kKneeR};

// Mean-shape proportions in millimetres.
constexpr double kFootHeight = 75.0;
constexpr double kLegLength = 805.0;
constexpr double kHipOverlap = 35.0;
constexpr double kCrotchDrop = 45.0;
constexpr double kTorsoLength = 600.0;
constexpr double kHipHalfWidth = 92.0;
constexpr double kShoulderHalfWidth = 172.0;
constexpr double kHeadLength = 305.0;
constexpr double kArmInset = 25.0;
constexpr double kUpperArm = 300.0;
constexpr double kForearm = 255.0;
constexpr double kHand = 185.0;
constexpr double kArmTotal = kArmInset + kUpperArm + kForearm + kHand;
constexpr double kElbowS = (kArmInset + kUpperArm) / kArmTotal;
constexpr double kWristS = (kArmInset + kUpperArm + kForearm) / kArmTotal;
constexpr double kShoulderS = kArmInset / kArmTotal;
constexpr double kElbowBand = 0.05;
constexpr double kHipS = kHipOverlap / (kLegLength + 40.0);
constexpr double kKneeS = (kHipOverlap + 0.5 * kLegLength) / (kLegLength + 40.0);

struct Keyframe {
  double s, a, b;
};

// Half-width (a, along the ring's u axis) and half-depth (b, along v).
const std::vector<Keyframe> kTorsoProfile = {
    {0.00, 140, 95},  {0.10, 172, 112}, {0.25, 160, 106},
    {0.38, 140, 96},  {0.55, 150, 104}, {0.72, 166, 114},
    {0.86, 172, 102}, {0.95, 158, 82},  {1.00, 110, 65}};
const std::vector<Keyframe> kHeadProfile = {
    {0.00, 58, 58}, {0.20, 54, 56}, {0.30, 57, 62}, {0.45, 70, 88},
    {0.62, 76, 96}, {0.78, 72, 90}, {0.90, 56, 70}, {0.97, 32, 38},
    {1.00, 12, 14}};
const std::vector<Keyframe> kArmProfile = {
    {0.00, 56, 56}, {0.04, 54, 54}, {0.20, 47, 47}, {0.38, 40, 40},
    {kElbowS, 38, 38}, {0.50, 41, 41}, {0.70, 31, 31}, {kWristS, 27, 29},
    {0.80, 20, 40}, {0.90, 16, 44}, {0.97, 12, 30}, {1.00, 6, 12}};
const std::vector<Keyframe> kLegProfile = {
    {0.00, 84, 80}, {0.06, 88, 84}, {0.15, 82, 78}, {0.35, 66, 63},
    {0.50, 52, 50}, {0.62, 58, 56}, {0.75, 50, 48}, {0.90, 36, 35},
    {0.96, 34, 33}, {1.00, 36, 36}};
const std::vector<Keyframe> kFootProfile = {
    {0.00, 20, 20}, {0.10, 35, 36}, {0.35, 42, 38},
    {0.70, 46, 27}, {0.90, 38, 19}, {1.00, 15, 9}};

// Landmark stations (tube, s, ring angle in radians).
constexpr double kTorsoPelvisS = 0.10;
constexpr double kTorsoWaistS = 0.38;
constexpr double kTorsoChestS = 0.72;
constexpr double kHeadNeckS = 0.20;
constexpr double kHeadCircS = 0.62;
constexpr double kArmBicepS = 0.20;
constexpr double kArmForearmS = 0.50;
constexpr double kArmWristS = 0.74;
constexpr double kLegThighS = 0.12;
constexpr double kLegCalfS = 0.62;
constexpr double kLegAnkleS = 0.90;

std::pair<double, double> profile_at(const std::vector<Keyframe>& p, double s) {
  if (s <= p.front().s) return {p.front().a, p.front().b};
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (s <= p[i].s) {
      const double t = (s - p[i - 1].s) / (p[i].s - p[i - 1].s);
      return {p[i - 1].a + t * (p[i].a - p[i - 1].a),
              p[i - 1].b + t * (p[i].b - p[i - 1].b)};
    }
  }
  return {p.back().a, p.back().b};
}

// Piecewise-linear blend of anchor values, clamped at the ends.
double blend(std::initializer_list<std::pair<double, double>> anchors,
             double s) {
  auto it = anchors.begin();
  if (s <= it->first) return it->second;
  auto prev = it++;
  for (; it != anchors.end(); prev = it++) {
    if (s <= it->first) {
      const double t = (s - prev->first) / (it->first - prev->first);
      return prev->second + t * (it->second - prev->second);
    }
  }
  return prev->second;
}

struct Factors {
  double stature = 1, leg_length = 1, torso_length = 1, arm_length = 1;
  double head_size = 1, hip_width = 1, shoulder_width = 1;
  double hip_girth = 1, waist_girth = 1, chest_girth = 1, chest_depth = 1;
  double shoulder_girth = 1, neck_girth = 1, arm_girth = 1;
  double thigh_girth = 1, calf_girth = 1;
  std::array<double, kBodyPartCount> part_radial{1, 1, 1, 1, 1, 1, 1, 1, 1};
  // Smooth ring modulations per tube family: torso, head, arm, leg, foot.
  std::array<double, 5> ovality{};
  std::array<double, 5> swell{};
};

Factors sample_factors(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Factors f;
  const double adiposity = n(rng);
  const double muscle = n(rng);
  f.stature = 1 + 0.055 * n(rng);
  f.leg_length = 1 + 0.03 * n(rng);
  f.torso_length = 1 + 0.03 * n(rng);
  f.arm_length = 1 + 0.03 * n(rng);
  f.head_size = 1 + 0.03 * n(rng);
  f.hip_width = 1 + 0.03 * n(rng) + 0.02 * adiposity;
  f.shoulder_width = 1 + 0.035 * n(rng) + 0.015 * muscle;
  f.hip_girth = 1 + 0.07 * adiposity + 0.02 * n(rng);
  f.waist_girth = 1 + 0.10 * adiposity + 0.025 * n(rng);
  f.chest_girth = 1 + 0.06 * adiposity + 0.03 * muscle + 0.02 * n(rng);
  f.chest_depth = 1 + 0.02 * adiposity + 0.03 * n(rng);
  f.shoulder_girth = 1 + 0.02 * adiposity + 0.03 * muscle;
  f.neck_girth = 1 + 0.04 * adiposity + 0.03 * muscle + 0.015 * n(rng);
  f.arm_girth = 1 + 0.06 * adiposity + 0.05 * muscle + 0.02 * n(rng);
  f.thigh_girth = 1 + 0.07 * adiposity + 0.03 * muscle + 0.02 * n(rng);
  f.calf_girth = 1 + 0.04 * adiposity + 0.03 * muscle + 0.02 * n(rng);
  for (double& r : f.part_radial) r = 1 + 0.015 * n(rng);
  for (double& o : f.ovality) o = 0.012 * n(rng);
  for (double& s : f.swell) s = 0.012 * n(rng);
  return f;
}

// Geometry of one straight tube for one body instance.
struct TubeGeom {
  Vec3 start, end;
  Vec3 u, v;
  const std::vector<Keyframe>* profile = nullptr;
  int family = 0;
  // Radius multiplier along the tube, per ring axis.
  std::function<std::pair<double, double>(double)> girth;
};

struct Layout {
  std::size_t ring_vertices = 16;
  std::array<std::size_t, kTubeCount> rings{};
  std::array<std::size_t, kTubeCount> base{};
  std::size_t vertex_count = 0;
};

double ring_s(const Layout& layout, int tube, std::size_t ring) {
  return static_cast<double>(ring) /
         static_cast<double>(layout.rings[tube] - 1);
}

std::size_t nearest_ring(const Layout& layout, int tube, double s) {
  const double r = s * static_cast<double>(layout.rings[tube] - 1);
  return static_cast<std::size_t>(std::lround(r));
}

std::uint32_t ring_vertex(const Layout& layout, int tube, std::size_t ring,
                          double angle) {
  const auto m = layout.ring_vertices;
  const double step = 2 * kPi / static_cast<double>(m);
  auto k = static_cast<std::size_t>(std::lround(angle / step)) % m;
  return static_cast<std::uint32_t>(layout.base[tube] + ring * m + k);
}

std::uint32_t cap_vertex(const Layout& layout, int tube, bool end) {
  return static_cast<std::uint32_t>(layout.base[tube] +
                                    layout.rings[tube] * layout.ring_vertices +
                                    (end ? 1 : 0));
}

Layout make_layout(std::size_t budget) {
  if (budget < 500) {
    throw InvalidArgument("vertex budget " + std::to_string(budget) +
                          " is too small to realise nine body parts "
                          "(minimum 500)");
  }
  Layout layout;
  const std::array<double, kTubeCount> lengths = {
      kTorsoLength, kHeadLength, kArmTotal, kArmTotal,
      kLegLength + 40, kLegLength + 40, 255, 255};
  double total = 0;
  for (double l : lengths) total += l;
  // Square-ish quads: about 10 * m^2 vertices for the whole body.
  layout.ring_vertices = std::max<std::size_t>(
      8, static_cast<std::size_t>(std::lround(std::sqrt(budget / 10.0))));
  const std::size_t m = layout.ring_vertices;
  const std::size_t caps = 2 * kTubeCount;
  const double ring_budget = static_cast<double>(budget - caps) / m;
  std::size_t used = 0;
  for (int t = 0; t < kTubeCount; ++t) {
    layout.rings[t] = std::max<std::size_t>(
        5, static_cast<std::size_t>(std::floor(ring_budget * lengths[t] / total)));
    layout.base[t] = used;
    used += layout.rings[t] * m + 2;
  }
  layout.vertex_count = used;
  return layout;
}

BodyPart tube_label(int tube, double s) {
  switch (tube) {
    case kTorso:
      return s < 0.30 ? BodyPart::kHip
                      : (s < 0.47 ? BodyPart::kWaist : BodyPart::kChest);
    case kHead:
      return BodyPart::kHead;
    case kArmL:
    case kArmR:
      if (s > kWristS) return BodyPart::kHand;
      if (std::abs(s - kElbowS) <= kElbowBand) return BodyPart::kElbow;
      return BodyPart::kArm;
    case kLegL:
    case kLegR:
      return BodyPart::kLeg;
    default:
      return BodyPart::kFoot;
  }
}

struct Instance {
  std::vector<Vec3> vertices;
  std::array<Vec3, kJointCount> joints;
  std::array<Vec3, kJointCount> bone_ends;
};

Instance build_instance(const Layout& layout, const Factors& f) {
  Instance inst;
  inst.vertices.resize(layout.vertex_count);

  const double leg_len = kLegLength * f.leg_length;
  const double hip_z = kFootHeight + leg_len;
  const double hip_x = kHipHalfWidth * f.hip_width;
  const double crotch_z = hip_z - kCrotchDrop;
  const double torso_len = kTorsoLength * f.torso_length;
  const double torso_top = crotch_z + torso_len;
  const double shoulder_x = kShoulderHalfWidth * f.shoulder_width;
  const double shoulder_z = torso_top - 35.0;
  const double arm_scale = f.arm_length;

  auto part = [&](BodyPart p) { return f.part_radial[index_of(p)]; };

  std::array<TubeGeom, kTubeCount> tubes;
  {
    TubeGeom& t = tubes[kTorso];
    t.start = {0, 0, crotch_z};
    t.end = {0, 0, torso_top};
    t.u = Vec3::UnitX();
    t.v = Vec3::UnitY();
    t.profile = &kTorsoProfile;
    t.family = 0;
    t.girth = [&f, part](double s) {
      const double g = blend({{0.10, f.hip_girth * f.hip_width * part(BodyPart::kHip)},
                              {0.38, f.waist_girth * part(BodyPart::kWaist)},
                              {0.72, f.chest_girth * part(BodyPart::kChest)},
                              {0.92, f.shoulder_girth * f.shoulder_width}},
                             s);
      const double depth = blend({{0.45, 1.0}, {0.72, f.chest_depth}, {0.95, 1.0}}, s);
      return std::pair{g, g * depth};
    };
  }
  {
    TubeGeom& t = tubes[kHead];
    const double head_len = kHeadLength * f.head_size;
    t.start = {0, 0, torso_top - 40.0};
    t.end = {0, 0, torso_top - 40.0 + head_len};
    t.u = Vec3::UnitX();
    t.v = Vec3::UnitY();
    t.profile = &kHeadProfile;
    t.family = 1;
    t.girth = [&f, part](double s) {
      const double g = blend({{0.20, f.neck_girth}, {0.40, f.head_size}}, s) *
                       part(BodyPart::kHead);
      return std::pair{g, g};
    };
  }
  for (int side = 0; side < 2; ++side) {
    const double sign = side == 0 ? 1.0 : -1.0;
    const Vec3 shoulder{sign * shoulder_x, 0, shoulder_z};
    const Vec3 dir{sign * std::sin(kArmAngle), 0, -std::cos(kArmAngle)};
    const double total = kArmTotal * arm_scale;
    TubeGeom& t = tubes[side == 0 ? kArmL : kArmR];
    t.start = shoulder - dir * (kArmInset * arm_scale);
    t.end = t.start + dir * total;
    t.u = Vec3{sign * std::cos(kArmAngle), 0, std::sin(kArmAngle)};
    t.v = Vec3::UnitY();
    t.profile = &kArmProfile;
    t.family = 2;
    t.girth = [&f, part](double s) {
      const double limb = f.arm_girth * part(BodyPart::kArm);
      const double g = blend({{0.30, limb},
                              {kElbowS, part(BodyPart::kElbow) * (0.5 + 0.5 * limb)},
                              {0.55, limb},
                              {kWristS, 1.0 + 0.3 * (limb - 1.0)},
                              {0.85, part(BodyPart::kHand)}},
                             s);
      return std::pair{g, g};
    };
    const int humerus = side == 0 ? kHumerusL : kHumerusR;
    inst.joints[humerus] = shoulder;
    inst.joints[humerus + 1] = shoulder + dir * (kUpperArm * arm_scale);
    inst.joints[humerus + 2] =
        shoulder + dir * ((kUpperArm + kForearm) * arm_scale);
    inst.bone_ends[humerus] = inst.joints[humerus + 1];
    inst.bone_ends[humerus + 1] = inst.joints[humerus + 2];
    inst.bone_ends[humerus + 2] = t.end;
  }
  for (int side = 0; side < 2; ++side) {
    const double sign = side == 0 ? 1.0 : -1.0;
    TubeGeom& leg = tubes[side == 0 ? kLegL : kLegR];
    leg.start = {sign * hip_x, 0, hip_z + kHipOverlap};
    leg.end = {sign * hip_x, 0, kFootHeight - 5.0};
    leg.u = Vec3{sign, 0, 0};
    leg.v = Vec3::UnitY();
    leg.profile = &kLegProfile;
    leg.family = 3;
    leg.girth = [&f, part](double s) {
      const double g = blend({{0.12, f.thigh_girth},
                              {0.50, 0.5 * (f.thigh_girth + f.calf_girth)},
                              {0.62, f.calf_girth},
                              {0.90, 1.0 + 0.4 * (f.calf_girth - 1.0)}},
                             s) *
                       part(BodyPart::kLeg);
      return std::pair{g, g};
    };
    TubeGeom& foot = tubes[side == 0 ? kFootL : kFootR];
    foot.start = {sign * hip_x, -55.0, 40.0};
    foot.end = {sign * hip_x, 200.0, 28.0};
    foot.u = Vec3{sign, 0, 0};
    foot.v = Vec3::UnitZ();
    foot.profile = &kFootProfile;
    foot.family = 4;
    foot.girth = [part](double) {
      const double g = part(BodyPart::kFoot);
      return std::pair{g, g};
    };
    const int hip = side == 0 ? kHipL : kHipR;
    inst.joints[hip] = {sign * hip_x, 0, hip_z};
    inst.joints[hip + 1] = {sign * hip_x, 0, hip_z - 0.5 * leg_len};
    inst.joints[hip + 2] = {sign * hip_x, 0, kFootHeight};
    inst.bone_ends[hip] = inst.joints[hip + 1];
    inst.bone_ends[hip + 1] = inst.joints[hip + 2];
    inst.bone_ends[hip + 2] = foot.end;
  }
  inst.joints[kPelvis] = {0, 0, hip_z + 40.0};
  inst.joints[kSpine] = {0, 0, crotch_z + 0.55 * torso_len};
  inst.joints[kNeck] = {0, 0, torso_top - 10.0};
  inst.bone_ends[kPelvis] = inst.joints[kSpine];
  inst.bone_ends[kSpine] = inst.joints[kNeck];
  inst.bone_ends[kNeck] = tubes[kHead].end;

  const std::size_t m = layout.ring_vertices;
  for (int ti = 0; ti < kTubeCount; ++ti) {
    const TubeGeom& t = tubes[ti];
    const Vec3 axis = (t.end - t.start).normalized();
    const std::size_t rings = layout.rings[ti];
    const double ovality = f.ovality[t.family];
    const double swell = f.swell[t.family];
    for (std::size_t r = 0; r < rings; ++r) {
      const double s = ring_s(layout, ti, r);
      const Vec3 c = t.start + s * (t.end - t.start);
      auto [a, b] = profile_at(*t.profile, s);
      auto [ga, gb] = t.girth(s);
      a *= ga;
      b *= gb;
      for (std::size_t k = 0; k < m; ++k) {
        const double phi = 2 * kPi * static_cast<double>(k) / static_cast<double>(m);
        const double mod = 1.0 + ovality * std::sin(kPi * s) * std::cos(2 * phi) +
                           swell * std::sin(2 * kPi * s);
        inst.vertices[layout.base[ti] + r * m + k] =
            c + mod * (a * std::cos(phi) * t.u + b * std::sin(phi) * t.v);
      }
    }
    // Caps sit slightly beyond the end rings.
    const auto [a0, b0] = profile_at(*t.profile, 0.0);
    const auto [a1, b1] = profile_at(*t.profile, 1.0);
    inst.vertices[cap_vertex(layout, ti, false)] =
        t.start - axis * (0.15 * std::min(a0, b0) * t.girth(0.0).first);
    inst.vertices[cap_vertex(layout, ti, true)] =
        t.end + axis * (0.15 * std::min(a1, b1) * t.girth(1.0).first);
  }

  // Stature scales everything about the floor origin.
  for (Vec3& v : inst.vertices) v *= f.stature;
  for (Vec3& j : inst.joints) j *= f.stature;
  for (Vec3& e : inst.bone_ends) e *= f.stature;
  return inst;
}

double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

std::vector<int> candidate_bones(int tube) {
  switch (tube) {
    case kTorso: return {kPelvis, kSpine, kNeck};
    case kHead: return {kNeck};
    case kArmL: return {kSpine, kHumerusL, kElbowL, kWristL};
    case kArmR: return {kSpine, kHumerusR, kElbowR, kWristR};
    case kLegL: return {kPelvis, kHipL, kKneeL, kAnkleL};
    case kLegR: return {kPelvis, kHipR, kKneeR, kAnkleR};
    case kFootL: return {kAnkleL};
    default: return {kAnkleR};
  }
}

// Ring whose centroid locates each joint.
std::pair<int, double> joint_station(int joint) {
  switch (joint) {
    case kPelvis: return {kTorso, (kCrotchDrop + 40.0) / kTorsoLength};
    case kSpine: return {kTorso, 0.55};
    case kNeck: return {kTorso, (kTorsoLength - 10.0) / kTorsoLength};
    case kHumerusL: return {kArmL, kShoulderS};
    case kElbowL: return {kArmL, kElbowS};
    case kWristL: return {kArmL, kWristS};
    case kHumerusR: return {kArmR, kShoulderS};
    case kElbowR: return {kArmR, kElbowS};
    case kWristR: return {kArmR, kWristS};
    case kHipL: return {kLegL, kHipS};
    case kKneeL: return {kLegL, kKneeS};
    case kAnkleL: return {kLegL, 1.0};
    case kHipR: return {kLegR, kHipS};
    case kKneeR: return {kLegR, kKneeS};
    default: return {kLegR, 1.0};
  }
}

}  // namespace

StatModel build_synthetic_model(std::uint64_t seed, std::size_t vertex_budget,
                                const SyntheticModelOptions& options) {
  const Layout layout = make_layout(vertex_budget);
  if (options.sample_count < 200) {
    throw InvalidArgument("synthetic model needs at least 200 samples");
  }
  if (options.components == 0 || options.components >= options.sample_count) {
    throw InvalidArgument("component count must be in [1, sample_count)");
  }
  const std::size_t m = layout.ring_vertices;
  const std::size_t nv = layout.vertex_count;

  StatModel model;

  // Topology and labels.
  std::vector<int> tube_of(nv);
  model.part_labels.resize(nv);
  for (int ti = 0; ti < kTubeCount; ++ti) {
    const std::size_t rings = layout.rings[ti];
    const std::size_t base = layout.base[ti];
    for (std::size_t r = 0; r < rings; ++r) {
      const BodyPart label = tube_label(ti, ring_s(layout, ti, r));
      for (std::size_t k = 0; k < m; ++k) {
        model.part_labels[base + r * m + k] = label;
        tube_of[base + r * m + k] = ti;
      }
    }
    const auto cap0 = cap_vertex(layout, ti, false);
    const auto cap1 = cap_vertex(layout, ti, true);
    model.part_labels[cap0] = tube_label(ti, 0.0);
    model.part_labels[cap1] = tube_label(ti, 1.0);
    tube_of[cap0] = tube_of[cap1] = ti;

    auto idx = [&](std::size_t r, std::size_t k) {
      return static_cast<std::uint32_t>(base + r * m + (k % m));
    };
    for (std::size_t r = 0; r + 1 < rings; ++r) {
      for (std::size_t k = 0; k < m; ++k) {
        model.faces.push_back({idx(r, k), idx(r + 1, k), idx(r + 1, k + 1)});
        model.faces.push_back({idx(r, k), idx(r + 1, k + 1), idx(r, k + 1)});
      }
    }
    for (std::size_t k = 0; k < m; ++k) {
      model.faces.push_back({cap0, idx(0, k + 1), idx(0, k)});
      model.faces.push_back({cap1, idx(rings - 1, k), idx(rings - 1, k + 1)});
    }
  }
  for (BodyPart p : kAllBodyParts) {
    if (std::find(model.part_labels.begin(), model.part_labels.end(), p) ==
        model.part_labels.end()) {
      throw InvalidArgument("vertex budget " + std::to_string(vertex_budget) +
                            " leaves body part '" + std::string(to_string(p)) +
                            "' without vertices");
    }
  }

  // Population samples and PCA.
  std::mt19937_64 rng(seed);
  const std::size_t n = options.sample_count;
  Eigen::MatrixXd data(static_cast<Eigen::Index>(3 * nv),
                       static_cast<Eigen::Index>(n));
  std::array<Vec3, kJointCount> joint_sum;
  for (Vec3& j : joint_sum) j.setZero();
  for (std::size_t i = 0; i < n; ++i) {
    const Instance inst = build_instance(layout, sample_factors(rng));
    for (std::size_t v = 0; v < nv; ++v) {
      data.block<3, 1>(static_cast<Eigen::Index>(3 * v),
                       static_cast<Eigen::Index>(i)) = inst.vertices[v];
    }
    for (int j = 0; j < kJointCount; ++j) joint_sum[j] += inst.joints[j];
  }
  model.mean_shape = data.rowwise().mean();
  data.colwise() -= model.mean_shape;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(data, Eigen::ComputeThinU);
  const auto k = static_cast<Eigen::Index>(options.components);
  model.eigenvectors = svd.matrixU().leftCols(k);
  model.eigenvalues = svd.singularValues().head(k).array().square() /
                      static_cast<double>(n - 1);
  if (!(model.eigenvalues[k - 1] > 0.0)) {
    throw Error("synthetic population does not span the requested components");
  }
  // Sign convention: each component raises the body on average.
  for (Eigen::Index c = 0; c < k; ++c) {
    double up = 0.0;
    for (std::size_t v = 0; v < nv; ++v) {
      up += model.eigenvectors(static_cast<Eigen::Index>(3 * v + 2), c);
    }
    if (up < 0.0) model.eigenvectors.col(c) *= -1.0;
  }

  // Rig on the mean body.
  const Instance mean_inst = build_instance(layout, Factors{});
  model.joints.resize(kJointCount);
  for (int j = 0; j < kJointCount; ++j) {
    Joint& joint = model.joints[j];
    joint.name = kJointNames[j];
    joint.parent = kJointParents[j];
    joint.position = joint_sum[j] / static_cast<double>(n);
    const auto [tube, s] = joint_station(j);
    const std::size_t ring = nearest_ring(layout, tube, s);
    for (std::size_t q = 0; q < m; ++q) {
      joint.regressor.push_back(
          static_cast<std::uint32_t>(layout.base[tube] + ring * m + q));
    }
  }
  model.posable_joints = {PosableJoint{kHipL, -Vec3::UnitY()},
                          PosableJoint{kHipR, Vec3::UnitY()},
                          PosableJoint{kHumerusL, -Vec3::UnitY()},
                          PosableJoint{kHumerusR, Vec3::UnitY()}};

  // Inverse-distance falloff over the two nearest candidate bones, with
  // the runner-up clamped to zero once it is clearly farther.
  model.skinning_weights =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nv), kJointCount);
  for (std::size_t v = 0; v < nv; ++v) {
    const Vec3& p = mean_inst.vertices[v];
    int best = -1, second = -1;
    double d1 = 0, d2 = 0;
    for (int bone : candidate_bones(tube_of[v])) {
      const double d = segment_distance(p, mean_inst.joints[bone],
                                        mean_inst.bone_ends[bone]);
      if (best < 0 || d < d1) {
        second = best;
        d2 = d1;
        best = bone;
        d1 = d;
      } else if (second < 0 || d < d2) {
        second = bone;
        d2 = d;
      }
    }
    double w2 = 0.0;
    if (second >= 0 && d2 > 0.0) {
      const double ratio = d1 / d2;
      const double t = std::clamp((ratio - 0.6) / 0.4, 0.0, 1.0);
      w2 = 0.5 * t * t;
    }
    model.skinning_weights(static_cast<Eigen::Index>(v), best) = 1.0 - w2;
    if (w2 > 0.0) model.skinning_weights(static_cast<Eigen::Index>(v), second) = w2;
  }

  // Landmarks; lateral means +u on the ring, front means +Y.
  auto& lm = model.landmarks;
  auto ring_at = [&](int tube, double s) { return nearest_ring(layout, tube, s); };
  const double front = kPi / 2;
  lm["head_front"] = ring_vertex(layout, kHead, ring_at(kHead, kHeadCircS), front);
  lm["neck_front"] = ring_vertex(layout, kHead, ring_at(kHead, kHeadNeckS), front);
  lm["chest_front"] = ring_vertex(layout, kTorso, ring_at(kTorso, kTorsoChestS), front);
  lm["waist_front"] = ring_vertex(layout, kTorso, ring_at(kTorso, kTorsoWaistS), front);
  lm["pelvis_front"] = ring_vertex(layout, kTorso, ring_at(kTorso, kTorsoPelvisS), front);
  lm["crotch"] = cap_vertex(layout, kTorso, false);
  lm["head_top"] = cap_vertex(layout, kHead, true);
  lm["acromion_l"] = ring_vertex(layout, kArmL, ring_at(kArmL, kShoulderS), 0.0);
  lm["acromion_r"] = ring_vertex(layout, kArmR, ring_at(kArmR, kShoulderS), 0.0);
  lm["bicep_l"] = ring_vertex(layout, kArmL, ring_at(kArmL, kArmBicepS), 0.0);
  lm["forearm_l"] = ring_vertex(layout, kArmL, ring_at(kArmL, kArmForearmS), 0.0);
  lm["wrist_l"] = ring_vertex(layout, kArmL, ring_at(kArmL, kArmWristS), 0.0);
  lm["thigh_l"] = ring_vertex(layout, kLegL, ring_at(kLegL, kLegThighS), 0.0);
  lm["calf_l"] = ring_vertex(layout, kLegL, ring_at(kLegL, kLegCalfS), 0.0);
  lm["ankle_l"] = ring_vertex(layout, kLegL, ring_at(kLegL, kLegAnkleS), 0.0);
  lm["ankle_medial_l"] = ring_vertex(layout, kLegL, ring_at(kLegL, kLegAnkleS), kPi);

  model.validate();
  return model;
}

}  // namespace bodyfit
