#include "rayflow/graph.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "rayflow/errors.hpp"

namespace rayflow {

bool in_orthant(const DensityVector& e) {
  return std::all_of(e.begin(), e.end(), [](double x) { return x >= 0.0; });
}

bool in_open_cone(const DensityVector& e) {
  return !e.empty() &&
         std::all_of(e.begin(), e.end(), [](double x) { return x > 0.0; });
}

DynamicGraph::DynamicGraph(int vertex_count,
                           const std::vector<std::pair<int, int>>& edges,
                           DensityVector weights)
    : vertex_count_(vertex_count) {
  if (vertex_count < 1)
    throw StructuralError("graph needs at least one vertex");
  edges_.reserve(edges.size());
  std::map<std::pair<int, int>, int> seen;
  for (const auto& [tail, head] : edges) {
    if (tail < 0 || tail >= vertex_count || head < 0 || head >= vertex_count)
      throw StructuralError("edge (" + std::to_string(tail) + "," +
                            std::to_string(head) + ") out of vertex range [0," +
                            std::to_string(vertex_count) + ")");
    edges_.push_back({tail, head, seen[{tail, head}]++});
  }
  std::sort(edges_.begin(), edges_.end());

  if (weights.empty()) weights.assign(edges_.size(), 1.0);
  if (weights.size() != edges_.size())
    throw StructuralError("expected " + std::to_string(edges_.size()) +
                          " weights, got " + std::to_string(weights.size()));
  for (double w : weights)
    if (w < 0.0) throw DomainError("edge weights must be nonnegative");
  weights_ = std::move(weights);
}

DynamicGraph DynamicGraph::with_weights(DensityVector weights) const {
  DynamicGraph g = *this;
  if (weights.size() != edges_.size())
    throw StructuralError("expected " + std::to_string(edges_.size()) +
                          " weights, got " + std::to_string(weights.size()));
  for (double w : weights)
    if (w < 0.0) throw DomainError("edge weights must be nonnegative");
  g.weights_ = std::move(weights);
  return g;
}

DynamicGraph two_route_example(DensityVector weights) {
  return DynamicGraph(2, {{0, 1}, {0, 1}}, std::move(weights));
}

}  // namespace rayflow
