#include "credo/lp_oracle.hpp"

#include "credo/error.hpp"

#include <string>

namespace credo {

Vector canonicalize_objective(const Vector& y, Sense sense) {
  return sense == Sense::maximize ? Vector(-y) : y;
}

std::size_t solve_index(const Vector& y_canonical, const VertexSet& vertices) {
  if (vertices.empty()) throw EmptyVertexSet("cannot solve over an empty vertex set");
  if (y_canonical.size() != vertices.dimension()) {
    throw DimensionMismatch("objective has dimension " + std::to_string(y_canonical.size()) +
                            ", vertices have " + std::to_string(vertices.dimension()));
  }
  std::size_t best = 0;
  double best_value = y_canonical.dot(vertices[0]);
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    const double value = y_canonical.dot(vertices[i]);
    if (value < best_value) {
      best_value = value;
      best = i;
    }
  }
  return best;
}

Decision solve(const Vector& y_canonical, const VertexSet& vertices) {
  return vertex_decision(vertices, solve_index(y_canonical, vertices));
}

Decision vertex_decision(const VertexSet& vertices, std::size_t i) { return {vertices[i], i}; }

}  // namespace credo
