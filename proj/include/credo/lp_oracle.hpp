#pragma once

#include "credo/polytope.hpp"

#include <cstddef>
#include <optional>

namespace credo {

/// A point in decision space, tagged with its vertex index when it is one.
struct Decision {
  Vector coordinates;
  std::optional<std::size_t> vertex_index;
};

/// y for minimization, -y for maximization.
Vector canonicalize_objective(const Vector& y, Sense sense);

/// Index of the vertex minimizing y.v; ties go to the lowest index.
/// Throws EmptyVertexSet or DimensionMismatch.
std::size_t solve_index(const Vector& y_canonical, const VertexSet& vertices);

Decision solve(const Vector& y_canonical, const VertexSet& vertices);

/// Wraps vertex i as a Decision.
Decision vertex_decision(const VertexSet& vertices, std::size_t i);

}  // namespace credo
