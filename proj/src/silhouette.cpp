#include <array>
#include <cmath>
#include <ostream>

#include "bodyfit/boundary.hpp"
#include "bodyfit/kdtree.hpp"
#include "text_util.hpp"

namespace bodyfit {

BinaryImage largest_component(const BinaryImage& image) {
  const int w = image.width();
  const int h = image.height();
  std::vector<int> comp(static_cast<std::size_t>(w) * h, -1);
  std::vector<std::size_t> sizes;
  std::vector<std::pair<int, int>> stack;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!image.at(x, y) || comp[static_cast<std::size_t>(y) * w + x] >= 0) continue;
      const int id = static_cast<int>(sizes.size());
      std::size_t size = 0;
      stack.assign(1, {x, y});
      comp[static_cast<std::size_t>(y) * w + x] = id;
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        ++size;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (!image.get(nx, ny)) continue;
            int& c = comp[static_cast<std::size_t>(ny) * w + nx];
            if (c < 0) {
              c = id;
              stack.emplace_back(nx, ny);
            }
          }
        }
      }
      sizes.push_back(size);
    }
  }

  BinaryImage out(w, h);
  if (sizes.empty()) return out;
  int best = 0;
  for (int i = 1; i < static_cast<int>(sizes.size()); ++i) {
    if (sizes[i] > sizes[best]) best = i;
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (comp[static_cast<std::size_t>(y) * w + x] == best) out.set(x, y, true);
    }
  }
  return out;
}

BinaryImage extract_silhouette(const RgbImage& image,
                               const std::array<std::uint8_t, 3>& background,
                               double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw InvalidArgument("silhouette threshold must lie in [0, 1]");
  }
  BinaryImage mask(image.width, image.height);
  const double norm = 255.0 * std::sqrt(3.0);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const auto& px = image.at(x, y);
      double d2 = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double d = static_cast<double>(px[c]) - background[c];
        d2 += d * d;
      }
      mask.set(x, y, std::sqrt(d2) / norm > threshold);
    }
  }
  BinaryImage kept = largest_component(mask);
  if (kept.count() == 0) throw EmptySilhouetteError("background subtraction left no foreground");
  return kept;
}

namespace {

// Clockwise on screen (y down), starting west.
constexpr std::array<std::array<int, 2>, 8> kRing = {{
    {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}}};

int ring_index(int dx, int dy) {
  for (int i = 0; i < 8; ++i) {
    if (kRing[i][0] == dx && kRing[i][1] == dy) return i;
  }
  return -1;
}

}  // namespace

TraceResult trace_boundary_detailed(const BinaryImage& image) {
  const BinaryImage mask = largest_component(image);
  const int w = mask.width();
  const int h = mask.height();

  int sx = -1, sy = -1;
  for (int y = 0; y < h && sx < 0; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask.at(x, y)) {
        sx = x;
        sy = y;
        break;
      }
    }
  }
  if (sx < 0) throw EmptySilhouetteError("cannot trace an empty silhouette");

  TraceResult result;
  result.boundary.closed = true;
  result.boundary.points.emplace_back(sx, sy);

  // Entered from the west; that pixel is background by scan order. The
  // trace closes when the first move (position and backtrack) repeats,
  // which also covers re-entering the start from the north-west, north or
  // north-east, where the plain "same entry pixel" test never fires.
  int px = sx, py = sy;
  int bx = sx - 1, by = sy;
  int first_px = 0, first_py = 0, first_bx = 0, first_by = 0;
  const std::size_t limit = 8 * mask.count() + 16;

  for (;;) {
    const int start = ring_index(bx - px, by - py);
    int found = -1;
    for (int i = 1; i <= 8; ++i) {
      const int k = (start + i) % 8;
      if (mask.get(px + kRing[k][0], py + kRing[k][1])) {
        found = k;
        break;
      }
    }
    if (found < 0) break;  // isolated pixel

    const int prev = (found + 7) % 8;
    const bool at_start = px == sx && py == sy;
    bx = px + kRing[prev][0];
    by = py + kRing[prev][1];
    px += kRing[found][0];
    py += kRing[found][1];
    ++result.steps;

    if (result.steps == 1) {
      first_px = px, first_py = py, first_bx = bx, first_by = by;
    } else if (at_start && px == first_px && py == first_py && bx == first_bx &&
               by == first_by) {
      result.boundary.points.pop_back();  // the start, already stored first
      break;
    }
    if (result.steps > limit) {
      throw Error("boundary tracing failed to terminate");
    }
    result.boundary.points.emplace_back(px, py);
  }
  return result;
}

Boundary trace_boundary(const BinaryImage& image) {
  return trace_boundary_detailed(image).boundary;
}

void label_boundary(Boundary& boundary, const std::vector<Vec2>& sites,
                    const std::vector<BodyPart>& site_labels) {
  if (sites.size() != site_labels.size()) {
    throw InvalidArgument("one label per site required");
  }
  if (sites.empty()) throw InvalidArgument("no labelled sites");
  const KdTree2 tree(sites);
  boundary.labels.resize(boundary.points.size());
  for (std::size_t i = 0; i < boundary.points.size(); ++i) {
    boundary.labels[i] = site_labels[tree.nearest(boundary.points[i]).index];
  }
}

void write_boundary_csv(const Boundary& boundary, std::ostream& out) {
  out << "index,x,y" << (boundary.labelled() ? ",label" : "") << '\n';
  for (std::size_t i = 0; i < boundary.points.size(); ++i) {
    out << i << ',' << detail::format_double(boundary.points[i].x()) << ','
        << detail::format_double(boundary.points[i].y());
    if (boundary.labelled()) out << ',' << to_string(boundary.labels[i]);
    out << '\n';
  }
}

}  // namespace bodyfit
