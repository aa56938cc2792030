#include "bodyfit/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "bodyfit/error.hpp"

namespace bodyfit {

Mesh::Mesh(std::vector<Vec3> vertices, std::vector<Face> faces,
           std::vector<BodyPart> part_labels)
    : vertices_(std::move(vertices)),
      faces_(std::move(faces)),
      part_labels_(std::move(part_labels)) {
  const std::size_t n = vertices_.size();
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const Face& face = faces_[f];
    for (std::uint32_t idx : face) {
      if (idx >= n) {
        throw InvalidArgument("face " + std::to_string(f) +
                              " references vertex " + std::to_string(idx) +
                              " but mesh has " + std::to_string(n) +
                              " vertices");
      }
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
      throw InvalidArgument("face " + std::to_string(f) +
                            " repeats a vertex index");
    }
  }
  if (!part_labels_.empty()) {
    if (part_labels_.size() != n) {
      throw InvalidArgument("part label count " +
                            std::to_string(part_labels_.size()) +
                            " does not match vertex count " +
                            std::to_string(n));
    }
    for (BodyPart p : part_labels_) {
      if (!is_valid_body_part(static_cast<std::uint8_t>(p))) {
        throw InvalidArgument("invalid body part label");
      }
    }
  }
}

double loop_perimeter(std::span<const Vec3> loop) {
  if (loop.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    total += (loop[(i + 1) % loop.size()] - loop[i]).norm();
  }
  return total;
}

Vec3 loop_centroid(std::span<const Vec3> loop) {
  Vec3 c = Vec3::Zero();
  for (const Vec3& p : loop) c += p;
  return loop.empty() ? c : Vec3(c / static_cast<double>(loop.size()));
}

CrossSection plane_cross_section(const Mesh& mesh, Axis axis, double offset) {
  CrossSection out{{axis, offset}, {}};
  const auto& verts = mesh.vertices();
  const int a = static_cast<int>(axis);

  // A vertex on the plane, up to rounding noise, counts as above it. This
  // symbolic perturbation keeps every face crossing with exactly two edges
  // and stops a ring of coplanar vertices splitting after a rigid motion.
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Vec3& v : verts) {
    lo = std::min(lo, v[a]);
    hi = std::max(hi, v[a]);
  }
  const double eps = verts.empty() ? 0.0 : 1e-9 * std::max(hi - lo, std::abs(offset));
  std::vector<double> dist(verts.size());
  std::vector<bool> above(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) {
    dist[i] = verts[i][a] - offset;
    if (std::abs(dist[i]) <= eps) dist[i] = 0.0;
    above[i] = dist[i] >= 0.0;
  }

  std::unordered_map<std::uint64_t, int> node_of_edge;
  std::vector<Vec3> nodes;
  auto node_for = [&](std::uint32_t i, std::uint32_t j) {
    if (i > j) std::swap(i, j);
    const std::uint64_t key = (std::uint64_t{i} << 32) | j;
    auto [it, inserted] =
        node_of_edge.try_emplace(key, static_cast<int>(nodes.size()));
    if (inserted) {
      const double t = dist[i] / (dist[i] - dist[j]);
      Vec3 p = verts[i] + t * (verts[j] - verts[i]);
      p[a] = offset;
      nodes.push_back(p);
    }
    return it->second;
  };

  std::vector<std::array<int, 2>> segments;
  for (const Face& f : mesh.faces()) {
    int crossing[2];
    int count = 0;
    for (int e = 0; e < 3; ++e) {
      const std::uint32_t i = f[e];
      const std::uint32_t j = f[(e + 1) % 3];
      if (above[i] != above[j]) crossing[count++] = node_for(i, j);
    }
    if (count == 2) segments.push_back({crossing[0], crossing[1]});
  }
  if (segments.empty()) return out;

  std::vector<std::vector<int>> incident(nodes.size());
  for (std::size_t s = 0; s < segments.size(); ++s) {
    incident[segments[s][0]].push_back(static_cast<int>(s));
    incident[segments[s][1]].push_back(static_cast<int>(s));
  }

  // Chain segments into loops. Chains that fail to close (open surfaces)
  // are dropped.
  std::vector<bool> used(segments.size(), false);
  for (std::size_t s0 = 0; s0 < segments.size(); ++s0) {
    if (used[s0]) continue;
    used[s0] = true;
    const int start = segments[s0][0];
    int current = segments[s0][1];
    std::vector<int> chain{start};
    bool closed = false;
    while (true) {
      if (current == start) {
        closed = true;
        break;
      }
      chain.push_back(current);
      int next_seg = -1;
      for (int s : incident[current]) {
        if (!used[s]) {
          next_seg = s;
          break;
        }
      }
      if (next_seg < 0) break;
      used[next_seg] = true;
      const auto& seg = segments[next_seg];
      current = seg[0] == current ? seg[1] : seg[0];
    }
    if (!closed) continue;
    std::vector<Vec3> loop;
    loop.reserve(chain.size());
    for (int n : chain) loop.push_back(nodes[n]);
    out.loops.push_back(std::move(loop));
  }
  return out;
}

// Closest point on triangle, after Ericson, "Real-Time Collision Detection".
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return ap.norm();

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return bp.norm();

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return (p - (a + v * ab)).norm();
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return cp.norm();

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return (p - (a + w * ac)).norm();
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return (p - (b + w * (c - b))).norm();
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return (p - (a + ab * v + ac * w)).norm();
}

std::vector<double> vertex_to_surface_distances(const Mesh& from,
                                                const Mesh& to) {
  if (from.empty() || to.empty()) {
    throw InvalidArgument("distance query on an empty mesh");
  }
  const auto& tv = to.vertices();
  const auto& tf = to.faces();

  // Bounding sphere per triangle for pruning.
  std::vector<Vec3> centers(tf.size());
  std::vector<double> radii(tf.size());
  for (std::size_t f = 0; f < tf.size(); ++f) {
    const Vec3& a = tv[tf[f][0]];
    const Vec3& b = tv[tf[f][1]];
    const Vec3& c = tv[tf[f][2]];
    centers[f] = (a + b + c) / 3.0;
    radii[f] = std::max({(a - centers[f]).norm(), (b - centers[f]).norm(),
                         (c - centers[f]).norm()});
  }

  std::vector<double> out;
  out.reserve(from.vertex_count());
  for (const Vec3& p : from.vertices()) {
    // Nearest vertex is an upper bound on the surface distance; with no
    // faces it is the answer.
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& q : tv) best = std::min(best, (p - q).norm());
    for (std::size_t f = 0; f < tf.size() && best > 0.0; ++f) {
      if ((p - centers[f]).norm() - radii[f] >= best) continue;
      best = std::min(best, point_triangle_distance(p, tv[tf[f][0]],
                                                    tv[tf[f][1]],
                                                    tv[tf[f][2]]));
    }
    out.push_back(best);
  }
  return out;
}

double hausdorff_distance(const Mesh& a, const Mesh& b) {
  const auto ab = vertex_to_surface_distances(a, b);
  const auto ba = vertex_to_surface_distances(b, a);
  return std::max(*std::max_element(ab.begin(), ab.end()),
                  *std::max_element(ba.begin(), ba.end()));
}

double mesh_height(const Mesh& mesh) {
  if (mesh.empty()) throw InvalidArgument("mesh_height of an empty mesh");
  const int up = static_cast<int>(kUpAxis);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Vec3& v : mesh.vertices()) {
    lo = std::min(lo, v[up]);
    hi = std::max(hi, v[up]);
  }
  return hi - lo;
}

}  // namespace bodyfit
