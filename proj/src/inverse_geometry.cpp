#include "credo/inverse_geometry.hpp"

#include "credo/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace credo {

InverseCone::InverseCone(Vector anchor, std::size_t index, std::vector<Vector> normals)
    : anchor_(std::move(anchor)), anchor_index_(index), normals_(std::move(normals)) {
  norms_.reserve(normals_.size());
  for (const Vector& n : normals_) norms_.push_back(n.norm());
}

InverseCone InverseCone::build(const Vector& z, const VertexSet& vertices) {
  const DecisionClass cls = classify_decision(z, vertices, vertices.tolerance());
  if (!cls.is_vertex()) {
    throw NonVertexDecision("decision is not a vertex of the feasible region; its inverse region has measure zero");
  }
  const std::size_t index = *cls.vertex_index;
  const Vector& anchor = vertices[index];
  std::vector<Vector> normals;
  normals.reserve(vertices.size() - 1);
  for (std::size_t j = 0; j < vertices.size(); ++j) {
    if (j != index) normals.push_back(anchor - vertices[j]);
  }
  return InverseCone(anchor, index, std::move(normals));
}

void InverseCone::check_dimension(const Vector& y) const {
  if (y.size() != anchor_.size()) {
    throw DimensionMismatch("objective vector has dimension " + std::to_string(y.size()) + ", cone has " +
                            std::to_string(anchor_.size()));
  }
}

bool InverseCone::contains(const Vector& y) const {
  check_dimension(y);
  for (const Vector& n : normals_) {
    if (y.dot(n) > 0.0) return false;
  }
  return true;
}

double InverseCone::boundary_distance(const Vector& y) const {
  check_dimension(y);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < normals_.size(); ++j) {
    best = std::min(best, std::abs(y.dot(normals_[j])) / norms_[j]);
  }
  return best;
}

}  // namespace credo
