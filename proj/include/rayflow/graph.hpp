#pragma once

#include <utility>
#include <vector>

namespace rayflow {

/// Edge densities / prices. Nonnegativity is a queryable property rather
/// than an enforced one: integration needs to *observe* excursions below
/// zero, not mask them.
using DensityVector = std::vector<double>;

bool in_orthant(const DensityVector& e);
bool in_open_cone(const DensityVector& e);

/// Directed edge of a multigraph. Parallel edges between the same (tail,
/// head) pair are distinct state components and carry consecutive
/// parallel_index values.
struct EdgeId {
  int tail = 0;
  int head = 0;
  int parallel_index = 0;

  friend bool operator==(const EdgeId&, const EdgeId&) = default;
  friend auto operator<=>(const EdgeId&, const EdgeId&) = default;
};

/// Weighted directed multigraph with a fixed bijection between its edge
/// family and the flat density vector used by the dynamics. Edges are held
/// in canonical (tail, head, parallel_index) order; component k of the
/// weight vector belongs to edge k of that order. Immutable after
/// construction.
class DynamicGraph {
 public:
  /// Builds from [tail, head] pairs; repetitions of a pair become parallel
  /// edges numbered in input order. Weights, when given, are in canonical
  /// edge order; defaults to all ones.
  DynamicGraph(int vertex_count, const std::vector<std::pair<int, int>>& edges,
               DensityVector weights = {});

  int vertex_count() const { return vertex_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  /// Edges in canonical order; stable across runs and platforms.
  const std::vector<EdgeId>& canonical_edge_order() const { return edges_; }

  const DensityVector& weights() const { return weights_; }

  /// Same graph with new densities attached in canonical order.
  DynamicGraph with_weights(DensityVector weights) const;

 private:
  int vertex_count_;
  std::vector<EdgeId> edges_;
  DensityVector weights_;
};

/// The two-vertex multigraph with two parallel routes v0 -> v1.
DynamicGraph two_route_example(DensityVector weights = {1.0, 1.0});

}  // namespace rayflow
