// Copyright 2026 The splitgauntlet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPLITGAUNTLET_METRICSPACE_HPP
#define SPLITGAUNTLET_METRICSPACE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "splitgauntlet/features.hpp"

namespace splitgauntlet {

/// 1-Wasserstein distance between two rank distributions on the integer
/// line: the supports are merged in increasing order and |CDF_u - CDF_v| is
/// accumulated over each gap. Exact, symmetric, and a metric.
inline double wasserstein_1d(const TokenDistribution& u, const TokenDistribution& v) {
  double total = 0.0;
  double cdf_u = 0.0, cdf_v = 0.0;
  std::size_t i = 0, j = 0;
  std::int32_t position = 0;
  bool started = false;
  while (i < u.support.size() || j < v.support.size()) {
    std::int32_t next;
    if (j >= v.support.size() || (i < u.support.size() && u.support[i] <= v.support[j])) {
      next = u.support[i];
    } else {
      next = v.support[j];
    }
    if (started) total += std::abs(cdf_u - cdf_v) * static_cast<double>(next - position);
    while (i < u.support.size() && u.support[i] == next) cdf_u += u.weights[i++];
    while (j < v.support.size() && v.support[j] == next) cdf_v += v.weights[j++];
    position = next;
    started = true;
  }
  return total;
}

struct Neighbor {
  int index = 0;
  double distance = 0.0;

  friend bool operator==(const Neighbor& a, const Neighbor& b) {
    return a.index == b.index && a.distance == b.distance;
  }
  // Query ordering: ascending distance, ties to the smaller index.
  friend bool operator<(const Neighbor& a, const Neighbor& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.index < b.index;
  }
};

/// Metric ball tree over rank distributions under wasserstein_1d.
///
/// Construction is deterministic and seed-free: each node picks pivot_a as
/// the point farthest from the node's first point, pivot_b as the point
/// farthest from pivot_a, and partitions points to the nearer pivot (ties to
/// pivot_a) preserving relative order. A node's radius bounds the distance
/// from pivot_a to anything in its subtree, which drives triangle-inequality
/// pruning in knn(). Queries are exact: results match an exhaustive scan
/// including the (distance, index) tie-break.
class BallTree {
 public:
  struct Node {
    int pivot = -1;       // point index whose ball covers the subtree
    double radius = 0.0;  // max distance from pivot to any subtree point
    int left = -1, right = -1;
    std::size_t begin = 0, end = 0;  // leaf bucket range in order_ (leaves only)
    bool is_leaf() const { return left < 0; }
  };

  explicit BallTree(std::vector<TokenDistribution> points, std::size_t leaf_size = 16)
      : points_(std::move(points)), leaf_size_(leaf_size == 0 ? 1 : leaf_size) {
    if (points_.empty()) throw std::invalid_argument("BallTree: empty point set");
    order_.resize(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) order_[i] = static_cast<int>(i);
    root_ = build(0, points_.size());
  }

  std::size_t size() const { return points_.size(); }
  std::size_t leaf_size() const { return leaf_size_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return root_; }
  const TokenDistribution& point(int index) const { return points_[static_cast<std::size_t>(index)]; }

  /// Point indices bucketed in each leaf, in tree order.
  std::vector<std::vector<int>> leaf_buckets() const {
    std::vector<std::vector<int>> buckets;
    for (const Node& node : nodes_) {
      if (node.is_leaf()) {
        buckets.emplace_back(order_.begin() + static_cast<std::ptrdiff_t>(node.begin),
                             order_.begin() + static_cast<std::ptrdiff_t>(node.end));
      }
    }
    return buckets;
  }

  /// Exact k nearest neighbors of `query`, ascending by (distance, index).
  std::vector<Neighbor> knn(const TokenDistribution& query, std::size_t k) const {
    if (k == 0) throw std::invalid_argument("knn: k must be positive");
    if (k > points_.size()) {
      throw std::invalid_argument("knn: k = " + std::to_string(k) + " exceeds point count " +
                                  std::to_string(points_.size()));
    }
    // Distances from the query, computed at most once per point.
    std::vector<double> cache(points_.size(), -1.0);
    auto dist = [&](int index) {
      double& d = cache[static_cast<std::size_t>(index)];
      if (d < 0.0) d = wasserstein_1d(query, points_[static_cast<std::size_t>(index)]);
      return d;
    };
    std::vector<Neighbor> heap;  // max-heap on (distance, index), worst on top
    heap.reserve(k + 1);
    search(root_, query, k, dist, heap);
    std::sort_heap(heap.begin(), heap.end());
    return heap;
  }

 private:
  int build(std::size_t begin, std::size_t end) {
    Node node;
    node.pivot = farthest_from(order_[begin], begin, end);
    node.radius = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      node.radius = std::max(node.radius, distance_between(node.pivot, order_[i]));
    }
    if (end - begin <= leaf_size_) {
      node.begin = begin;
      node.end = end;
      nodes_.push_back(node);
      return static_cast<int>(nodes_.size() - 1);
    }
    const int pivot_a = node.pivot;
    const int pivot_b = farthest_from(pivot_a, begin, end);
    const auto mid = std::stable_partition(
        order_.begin() + static_cast<std::ptrdiff_t>(begin), order_.begin() + static_cast<std::ptrdiff_t>(end),
        [&](int p) { return distance_between(pivot_a, p) <= distance_between(pivot_b, p); });
    const std::size_t split = static_cast<std::size_t>(mid - order_.begin());
    if (split == begin || split == end) {
      // Degenerate partition (e.g. all points identical): keep as one leaf.
      node.begin = begin;
      node.end = end;
      nodes_.push_back(node);
      return static_cast<int>(nodes_.size() - 1);
    }
    node.left = build(begin, split);
    node.right = build(split, end);
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size() - 1);
  }

  int farthest_from(int origin, std::size_t begin, std::size_t end) const {
    int best = order_[begin];
    double best_dist = -1.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double d = distance_between(origin, order_[i]);
      if (d > best_dist) {
        best_dist = d;
        best = order_[i];
      }
    }
    return best;
  }

  double distance_between(int a, int b) const {
    return wasserstein_1d(points_[static_cast<std::size_t>(a)], points_[static_cast<std::size_t>(b)]);
  }

  template <typename DistFn>
  void search(int node_index, const TokenDistribution& query, std::size_t k, DistFn& dist,
              std::vector<Neighbor>& heap) const {
    const Node& node = nodes_[static_cast<std::size_t>(node_index)];
    const double pivot_dist = dist(node.pivot);
    // A subtree point can be no closer than pivot_dist - radius. Equality is
    // not prunable: such a point could still win its index tie-break.
    if (heap.size() == k && pivot_dist - node.radius > heap.front().distance) return;
    if (node.is_leaf()) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        offer(Neighbor{order_[i], dist(order_[i])}, k, heap);
      }
      return;
    }
    const int left_pivot = nodes_[static_cast<std::size_t>(node.left)].pivot;
    const int right_pivot = nodes_[static_cast<std::size_t>(node.right)].pivot;
    if (dist(left_pivot) <= dist(right_pivot)) {
      search(node.left, query, k, dist, heap);
      search(node.right, query, k, dist, heap);
    } else {
      search(node.right, query, k, dist, heap);
      search(node.left, query, k, dist, heap);
    }
  }

  static void offer(Neighbor candidate, std::size_t k, std::vector<Neighbor>& heap) {
    if (heap.size() < k) {
      heap.push_back(candidate);
      std::push_heap(heap.begin(), heap.end());
    } else if (candidate < heap.front()) {
      std::pop_heap(heap.begin(), heap.end());
      heap.back() = candidate;
      std::push_heap(heap.begin(), heap.end());
    }
  }

  std::vector<TokenDistribution> points_;
  std::vector<int> order_;  // permutation of point indices; leaves own ranges
  std::vector<Node> nodes_;
  std::size_t leaf_size_;
  int root_ = -1;
};

/// Convenience wrapper matching the library's build entry point.
inline BallTree build_ball_tree(std::vector<TokenDistribution> points, std::size_t leaf_size = 16) {
  return BallTree(std::move(points), leaf_size);
}

inline constexpr std::size_t kDenseMatrixLimit = 5000;

/// Full pairwise distance matrix for small diagnostic runs. Refuses n >
/// 5000 (the O(n^2) memory is deliberate opt-in, never a dependency of the
/// split machinery).
inline std::vector<std::vector<double>> pairwise_distance_matrix(const std::vector<TokenDistribution>& points) {
  if (points.size() > kDenseMatrixLimit) {
    throw std::invalid_argument("pairwise_distance_matrix: refusing n > " + std::to_string(kDenseMatrixLimit));
  }
  std::vector<std::vector<double>> matrix(points.size(), std::vector<double>(points.size(), 0.0));
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = wasserstein_1d(points[i], points[j]);
      matrix[i][j] = d;
      matrix[j][i] = d;
    }
  }
  return matrix;
}

}  // namespace splitgauntlet

#endif  // SPLITGAUNTLET_METRICSPACE_HPP
