#pragma once

#include "credo/polytope.hpp"

#include <cstddef>
#include <vector>

namespace credo {

/// The set of objective vectors y for which a vertex z minimizes y.z over
/// the polytope: {y : y.(z - z') <= 0 for every other vertex z'}.
class InverseCone {
 public:
  /// Throws NonVertexDecision when z does not match a vertex.
  static InverseCone build(const Vector& z, const VertexSet& vertices);

  const Vector& anchor() const noexcept { return anchor_; }
  std::size_t anchor_index() const noexcept { return anchor_index_; }
  /// z - z' for each other vertex, in vertex order.
  const std::vector<Vector>& normals() const noexcept { return normals_; }
  const std::vector<double>& normal_norms() const noexcept { return norms_; }
  Eigen::Index dimension() const noexcept { return anchor_.size(); }

  /// y.(z - z') <= 0 for every normal (exact comparison).
  bool contains(const Vector& y) const;

  /// min over normals of |y.(z - z')| / ||z - z'||, +infinity without normals.
  double boundary_distance(const Vector& y) const;

 private:
  InverseCone(Vector anchor, std::size_t index, std::vector<Vector> normals);
  void check_dimension(const Vector& y) const;

  Vector anchor_;
  std::size_t anchor_index_ = 0;
  std::vector<Vector> normals_;
  std::vector<double> norms_;
};

inline InverseCone inverse_cone(const Vector& z, const VertexSet& vertices) {
  return InverseCone::build(z, vertices);
}
inline bool cone_contains(const InverseCone& cone, const Vector& y) { return cone.contains(y); }
inline double boundary_distance(const InverseCone& cone, const Vector& y) { return cone.boundary_distance(y); }

}  // namespace credo
