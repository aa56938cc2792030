#include "bodyfit/registration.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "bodyfit/error.hpp"
#include "text_util.hpp"

namespace bodyfit {

double RigidTransform2D::angle() const {
  return std::atan2(rotation(1, 0), rotation(0, 0));
}

RigidTransform2D RigidTransform2D::compose(const RigidTransform2D& other) const {
  return {rotation * other.rotation, rotation * other.translation + translation};
}

RigidTransform2D RigidTransform2D::inverse() const {
  const Eigen::Matrix2d rt = rotation.transpose();
  return {rt, -(rt * translation)};
}

RigidTransform2D RigidTransform2D::from_angle(double radians, const Vec2& t) {
  Eigen::Matrix2d r;
  const double c = std::cos(radians), s = std::sin(radians);
  r << c, -s, s, c;
  return {r, t};
}

Boundary transform_boundary(const Boundary& b, const RigidTransform2D& t) {
  Boundary out = b;
  for (Vec2& p : out.points) p = t.apply(p);
  return out;
}

namespace {

Vec2 centroid(const std::vector<Vec2>& pts) {
  Vec2 c = Vec2::Zero();
  for (const Vec2& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

std::vector<Vec2> apply_all(const std::vector<Vec2>& pts, const RigidTransform2D& t) {
  std::vector<Vec2> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = t.apply(pts[i]);
  return out;
}

// Error plus the matched target point for each source point.
double match(const std::vector<Vec2>& src, const KdTree2& target,
             std::vector<Vec2>* matched) {
  double e = 0.0;
  if (matched) matched->resize(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto hit = target.nearest(src[i]);
    e += hit.squared_distance;
    if (matched) (*matched)[i] = target.point(hit.index);
  }
  return e;
}

// Least-squares rigid motion taking p onto q.
RigidTransform2D procrustes(const std::vector<Vec2>& p, const std::vector<Vec2>& q) {
  const Vec2 pc = centroid(p);
  const Vec2 qc = centroid(q);
  double sin_sum = 0.0, cos_sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2 a = p[i] - pc;
    const Vec2 b = q[i] - qc;
    cos_sum += a.x() * b.x() + a.y() * b.y();
    sin_sum += a.x() * b.y() - a.y() * b.x();
  }
  const double theta = (sin_sum == 0.0 && cos_sum == 0.0) ? 0.0 : std::atan2(sin_sum, cos_sum);
  RigidTransform2D t = RigidTransform2D::from_angle(theta);
  t.translation = qc - t.rotation * pc;
  return t;
}

}  // namespace

Boundary normalize_boundary(const Boundary& b) {
  if (b.points.size() < 2) throw InvalidArgument("boundary needs at least 2 points");
  const Vec2 c = centroid(b.points);
  double lo = b.points.front().y(), hi = lo;
  for (const Vec2& p : b.points) {
    lo = std::min(lo, p.y());
    hi = std::max(hi, p.y());
  }
  if (hi - lo <= 0.0) throw InvalidArgument("boundary has zero vertical extent");
  Boundary out = b;
  const double s = 1.0 / (hi - lo);
  for (Vec2& p : out.points) p = (p - c) * s;
  return out;
}

double match_error(const std::vector<Vec2>& source, const KdTree2& target) {
  return match(source, target, nullptr);
}

RegistrationResult rigid_register(const Boundary& source, const KdTree2& target,
                                  const RegistrationOptions& options) {
  if (source.size() < 3 || target.size() < 3) {
    throw InvalidArgument("registration needs at least 3 points per boundary");
  }
  if (options.max_iters < 0 || !(options.tol >= 0.0) ||
      !(options.rotation_search_deg >= 0.0) || !(options.rotation_step_deg > 0.0) ||
      !(options.rotation_refine_deg > 0.0)) {
    throw InvalidArgument("invalid registration options");
  }
  const std::vector<Vec2>& src = source.points;

  Vec2 tc = Vec2::Zero();
  for (std::size_t i = 0; i < target.size(); ++i) {
    tc += target.point(static_cast<std::uint32_t>(i));
  }
  tc /= static_cast<double>(target.size());
  const Vec2 sc = centroid(src);

  // Candidate starts: as given, then centroid-aligned at each trial angle.
  RegistrationResult result;
  RigidTransform2D best;
  double best_e = match(src, target, nullptr);
  const int steps = static_cast<int>(
      std::floor(options.rotation_search_deg / options.rotation_step_deg + 1e-9));
  auto try_angle = [&](double deg) {
    RigidTransform2D t = RigidTransform2D::from_angle(deg * std::numbers::pi / 180.0);
    t.translation = tc - t.rotation * sc;
    const double e = match(apply_all(src, t), target, nullptr);
    if (e < best_e) {
      best_e = e;
      best = t;
      return true;
    }
    return false;
  };
  double best_deg = 0.0;
  bool searched = false;
  for (int k = 0; k <= 2 * steps; ++k) {
    const int m = (k + 1) / 2 * (k % 2 == 1 ? 1 : -1);  // 0, +1, -1, +2, ...
    const double deg = m * options.rotation_step_deg;
    if (try_angle(deg)) best_deg = deg;
    searched = true;
  }
  // Bisect the grid spacing around the winner. Point-to-point ICP stalls
  // about half a sample spacing away from the optimum, so it needs a start
  // already inside that basin.
  if (searched && steps > 0) {
    for (double h = 0.5 * options.rotation_step_deg; h >= options.rotation_refine_deg; h *= 0.5) {
      const double centre = best_deg;
      if (try_angle(centre + h)) {
        best_deg = centre + h;
      } else if (try_angle(centre - h)) {
        best_deg = centre - h;
      }
    }
  }

  result.transform = best;
  result.error_history.push_back(best_e);
  std::vector<Vec2> current = apply_all(src, best);
  std::vector<Vec2> matched;
  double e = match(current, target, &matched);

  for (int it = 0; it < options.max_iters; ++it) {
    const RigidTransform2D step = procrustes(current, matched);
    const RigidTransform2D next = step.compose(result.transform);
    std::vector<Vec2> moved = apply_all(src, next);
    std::vector<Vec2> next_matched;
    const double next_e = match(moved, target, &next_matched);
    if (next_e > e) {
      result.converged = true;
      break;
    }
    ++result.iterations;
    result.transform = next;
    result.error_history.push_back(next_e);
    const double gain = e - next_e;
    current = std::move(moved);
    matched = std::move(next_matched);
    e = next_e;
    if (gain < options.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

RegistrationResult rigid_register(const Boundary& source, const Boundary& target,
                                  const RegistrationOptions& options) {
  const KdTree2 tree(target.points);
  return rigid_register(source, tree, options);
}

CorrespondenceSet pairwise_match(const Boundary& subject, const Boundary& model,
                                 const KdTree2& model_index) {
  if (model.empty()) throw InvalidArgument("cannot match against an empty model boundary");
  CorrespondenceSet set;
  set.pairs.resize(subject.points.size());
  for (std::size_t i = 0; i < subject.points.size(); ++i) {
    const auto hit = model_index.nearest(subject.points[i]);
    Correspondence& c = set.pairs[i];
    c.subject = static_cast<std::uint32_t>(i);
    c.model = hit.index;
    c.distance = std::sqrt(hit.squared_distance);
    c.label = model.labelled() ? model.labels[hit.index] : BodyPart::kHead;
    set.residual += hit.squared_distance;
  }
  return set;
}

CorrespondenceSet pairwise_match(const Boundary& subject, const Boundary& model) {
  const KdTree2 tree(model.points);
  return pairwise_match(subject, model, tree);
}

namespace {

const Vec2& extreme(const Boundary& b, bool top) {
  if (b.empty()) throw InvalidArgument("boundary is empty");
  const Vec2* best = &b.points.front();
  for (const Vec2& p : b.points) {
    const bool better = top ? p.y() < best->y() : p.y() > best->y();
    if (better || (p.y() == best->y() && p.x() < best->x())) best = &p;
  }
  return *best;
}

}  // namespace

ExtremePair extreme_points(const Boundary& subject, const Boundary& model) {
  return {(extreme(subject, true) - extreme(model, true)).norm(),
          (extreme(subject, false) - extreme(model, false)).norm()};
}

void write_correspondence_csv(const CorrespondenceSet& set,
                              const Boundary& subject, const Boundary& model,
                              std::ostream& out) {
  using detail::format_double;
  out << "subject,model,sx,sy,mx,my,distance,label\n";
  for (const Correspondence& c : set.pairs) {
    const Vec2& s = subject.points[c.subject];
    const Vec2& m = model.points[c.model];
    out << c.subject << ',' << c.model << ',' << format_double(s.x()) << ','
        << format_double(s.y()) << ',' << format_double(m.x()) << ','
        << format_double(m.y()) << ',' << format_double(c.distance) << ','
        << to_string(c.label) << '\n';
  }
}

}  // namespace bodyfit
