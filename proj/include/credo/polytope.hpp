#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace credo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kDefaultTolerance = 1e-9;

/// Direction of the user-facing objective. The LP oracle always minimizes,
/// so maximization problems are negated on the way in.
enum class Sense { minimize, maximize };

/// Bounded, nonempty region {z : A z <= b}. Only constructible through
/// validate(), so every instance is certified.
class Polytope {
 public:
  /// Checks dimensions, nonemptiness and boundedness.
  /// Throws DimensionMismatch, EmptyRegion or UnboundedRegion.
  static Polytope validate(Matrix constraint_matrix, Vector constraint_vector, Sense sense,
                           double tolerance = kDefaultTolerance);

  const Matrix& constraint_matrix() const noexcept { return a_; }
  const Vector& constraint_vector() const noexcept { return b_; }
  Eigen::Index dimension() const noexcept { return a_.cols(); }
  Eigen::Index constraint_count() const noexcept { return a_.rows(); }
  Sense sense() const noexcept { return sense_; }

 private:
  Polytope(Matrix a, Vector b, Sense sense) : a_(std::move(a)), b_(std::move(b)), sense_(sense) {}

  Matrix a_;
  Vector b_;
  Sense sense_;
};

/// Extreme points of a polytope in lexicographic order.
class VertexSet {
 public:
  VertexSet() = default;
  /// Sorts lexicographically and drops points closer than `tolerance` to an
  /// earlier one.
  VertexSet(std::vector<Vector> vertices, double tolerance);

  std::size_t size() const noexcept { return vertices_.size(); }
  bool empty() const noexcept { return vertices_.empty(); }
  const Vector& operator[](std::size_t i) const { return vertices_[i]; }
  const std::vector<Vector>& vertices() const noexcept { return vertices_; }
  double tolerance() const noexcept { return tolerance_; }
  Eigen::Index dimension() const noexcept { return vertices_.empty() ? 0 : vertices_.front().size(); }

  auto begin() const noexcept { return vertices_.begin(); }
  auto end() const noexcept { return vertices_.end(); }

 private:
  std::vector<Vector> vertices_;
  double tolerance_ = kDefaultTolerance;
};

enum class VertexMethod {
  automatic,           // exhaustive for d <= 3, double description otherwise
  exhaustive,          // every d-subset of constraints
  double_description,  // incremental Motzkin double description
};

/// Throws DegenerateGeometry if a vertex cannot be certified at `tolerance`.
VertexSet enumerate_vertices(const Polytope& polytope, double tolerance = kDefaultTolerance,
                             VertexMethod method = VertexMethod::automatic);

/// A z <= b + tolerance componentwise. Throws DimensionMismatch.
bool contains(const Polytope& polytope, const Vector& point, double tolerance = kDefaultTolerance);

/// Result of matching a decision against the vertex list.
struct DecisionClass {
  std::optional<std::size_t> vertex_index;

  bool is_vertex() const noexcept { return vertex_index.has_value(); }
  static DecisionClass vertex(std::size_t i) { return {i}; }
  static DecisionClass non_vertex() { return {}; }
  friend bool operator==(const DecisionClass&, const DecisionClass&) = default;
};

DecisionClass classify_decision(const Vector& z, const VertexSet& vertices,
                                double tolerance = kDefaultTolerance);

namespace geometry {

/// Extreme rays of the pointed cone {r : M r <= 0}, each scaled to unit
/// infinity norm. M must have full column rank; throws DegenerateGeometry
/// otherwise. Implements the double description method.
std::vector<Vector> cone_extreme_rays(const Matrix& m, double tolerance);

/// Vertices of {z : A z <= b} via the homogenized cone
/// {(z, t) : A z - t b <= 0, t >= 0}. Empty result means the region is empty.
std::vector<Vector> double_description_vertices(const Matrix& a, const Vector& b, double tolerance);

/// Vertices via solving every d x d subsystem and keeping the feasible ones.
std::vector<Vector> exhaustive_vertices(const Matrix& a, const Vector& b, double tolerance);

/// True if {z : A z <= b} has a point, for any rank of A.
bool is_feasible(const Matrix& a, const Vector& b, double tolerance);

/// True if {d : A d <= 0} contains a nonzero direction.
bool has_recession_direction(const Matrix& a, double tolerance);

}  // namespace geometry
}  // namespace credo
