#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace bodyfit {

template <int Dim>
inline double squared_distance(const Eigen::Matrix<double, Dim, 1>& a,
                               const Eigen::Matrix<double, Dim, 1>& b) {
  double d = 0.0;
  for (int k = 0; k < Dim; ++k) {
    const double diff = a[k] - b[k];
    d += diff * diff;
  }
  return d;
}

/// Static k-d tree for exact nearest-neighbour queries.
///
/// Ties are resolved towards the smaller point index, so results match a
/// brute-force scan exactly. The tree is immutable after construction and
/// safe for concurrent queries.
template <int Dim>
class KdTree {
 public:
  using Point = Eigen::Matrix<double, Dim, 1>;

  struct Hit {
    std::uint32_t index = 0;
    double squared_distance = std::numeric_limits<double>::infinity();
  };

  KdTree() = default;
  explicit KdTree(std::span<const Point> points) { build(points); }

  void build(std::span<const Point> points) {
    points_.assign(points.begin(), points.end());
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0u);
    nodes_.clear();
    if (!points_.empty()) build_node(0, static_cast<std::uint32_t>(order_.size()), 0);
  }

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point& point(std::uint32_t i) const { return points_[i]; }

  Hit nearest(const Point& q) const {
    Hit best;
    if (!nodes_.empty()) search(0, q, best);
    return best;
  }

 private:
  static constexpr std::uint32_t kLeafSize = 8;
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  struct Node {
    std::uint32_t begin, end;
    std::uint32_t left = kNone, right = kNone;
    int axis = 0;
    double split = 0.0;
  };

  std::uint32_t build_node(std::uint32_t begin, std::uint32_t end, int depth) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= kLeafSize) return id;

    // Split on the axis of largest spread.
    Point lo = points_[order_[begin]], hi = lo;
    for (std::uint32_t i = begin; i < end; ++i) {
      lo = lo.cwiseMin(points_[order_[i]]);
      hi = hi.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid,
                     order_.begin() + end, [&](std::uint32_t a, std::uint32_t b) {
                       return points_[a][axis] < points_[b][axis];
                     });
    const double split = points_[order_[mid]][axis];
    const std::uint32_t left = build_node(begin, mid, depth + 1);
    const std::uint32_t right = build_node(mid, end, depth + 1);
    Node& n = nodes_[id];
    n.axis = axis;
    n.split = split;
    n.left = left;
    n.right = right;
    return id;
  }

  void search(std::uint32_t id, const Point& q, Hit& best) const {
    const Node& n = nodes_[id];
    if (n.left == kNone) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        const std::uint32_t idx = order_[i];
        const double d = squared_distance<Dim>(points_[idx], q);
        if (d < best.squared_distance ||
            (d == best.squared_distance && idx < best.index)) {
          best = {idx, d};
        }
      }
      return;
    }
    const double diff = q[n.axis] - n.split;
    const std::uint32_t near = diff < 0 ? n.left : n.right;
    const std::uint32_t far = diff < 0 ? n.right : n.left;
    search(near, q, best);
    // Points on the far side are at least |diff| away along this axis.
    // Equality is still explored so index tie-breaks stay exact.
    if (diff * diff <= best.squared_distance) search(far, q, best);
  }

  std::vector<Point> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

using KdTree2 = KdTree<2>;
using KdTree3 = KdTree<3>;

}  // namespace bodyfit
