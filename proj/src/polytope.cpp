#include "credo/polytope.hpp"

#include "credo/error.hpp"

#include <boost/dynamic_bitset.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace credo {
namespace {

using Bitset = boost::dynamic_bitset<>;

struct Ray {
  Vector direction;
  Bitset tight;  // processed rows with m_i . r = 0
};

void normalize_inf(Vector& v) {
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale > 0.0) v /= scale;
}

double row_scale(const Matrix& m, Eigen::Index i) {
  return std::max(1.0, m.row(i).cwiseAbs().maxCoeff());
}

Eigen::Index numeric_rank(const Matrix& m, double tolerance) {
  if (m.size() == 0) return 0;
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  qr.setThreshold(std::max(tolerance, 1e-12));
  return qr.rank();
}

// Greedy selection of `dim` linearly independent rows, in index order.
std::vector<Eigen::Index> independent_rows(const Matrix& m, double tolerance) {
  const Eigen::Index dim = m.cols();
  std::vector<Eigen::Index> chosen;
  Matrix acc(0, dim);
  for (Eigen::Index i = 0; i < m.rows() && static_cast<Eigen::Index>(chosen.size()) < dim; ++i) {
    Matrix trial(acc.rows() + 1, dim);
    trial << acc, m.row(i) / row_scale(m, i);
    if (numeric_rank(trial, tolerance) == trial.rows()) {
      acc = std::move(trial);
      chosen.push_back(i);
    }
  }
  return chosen;
}

bool adjacent(const std::vector<Ray>& rays, std::size_t p, std::size_t n, std::size_t min_common) {
  const Bitset common = rays[p].tight & rays[n].tight;
  if (common.count() < min_common) return false;
  for (std::size_t k = 0; k < rays.size(); ++k) {
    if (k == p || k == n) continue;
    if (common.is_subset_of(rays[k].tight)) return false;
  }
  return true;
}

// Double description on {r : M r <= 0}; M has full column rank.
std::vector<Ray> double_description(const Matrix& m, double tolerance) {
  const Eigen::Index dim = m.cols();
  const auto rows = static_cast<std::size_t>(m.rows());
  const std::vector<Eigen::Index> basis = independent_rows(m, tolerance);
  if (static_cast<Eigen::Index>(basis.size()) < dim) {
    throw DegenerateGeometry("constraint system is rank deficient; cone is not pointed");
  }

  Matrix b(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) b.row(k) = m.row(basis[static_cast<std::size_t>(k)]);
  const Matrix inv = b.fullPivLu().inverse();

  std::vector<Ray> rays;
  rays.reserve(static_cast<std::size_t>(dim));
  for (Eigen::Index j = 0; j < dim; ++j) {
    Ray ray{-inv.col(j), Bitset(rows)};
    normalize_inf(ray.direction);
    for (Eigen::Index k = 0; k < dim; ++k) {
      if (k != j) ray.tight.set(static_cast<std::size_t>(basis[static_cast<std::size_t>(k)]));
    }
    rays.push_back(std::move(ray));
  }

  std::vector<bool> processed(rows, false);
  for (Eigen::Index k : basis) processed[static_cast<std::size_t>(k)] = true;
  const std::size_t min_common = static_cast<std::size_t>(dim) - 2;

  for (std::size_t row = 0; row < rows; ++row) {
    if (processed[row]) continue;
    processed[row] = true;
    const auto ri = static_cast<Eigen::Index>(row);
    const double zero = tolerance * row_scale(m, ri);

    std::vector<double> value(rays.size());
    std::vector<std::size_t> plus, minus;
    for (std::size_t k = 0; k < rays.size(); ++k) {
      value[k] = m.row(ri).dot(rays[k].direction);
      if (value[k] > zero) {
        plus.push_back(k);
      } else if (value[k] < -zero) {
        minus.push_back(k);
      } else {
        rays[k].tight.set(row);
      }
    }
    if (plus.empty()) continue;

    std::vector<Ray> created;
    for (std::size_t p : plus) {
      for (std::size_t n : minus) {
        if (!adjacent(rays, p, n, min_common)) continue;
        Ray ray{value[p] * rays[n].direction - value[n] * rays[p].direction,
                rays[p].tight & rays[n].tight};
        normalize_inf(ray.direction);
        if (ray.direction.cwiseAbs().maxCoeff() == 0.0) continue;
        ray.tight.set(row);
        created.push_back(std::move(ray));
      }
    }

    std::vector<Ray> next;
    next.reserve(rays.size() - plus.size() + created.size());
    for (std::size_t k = 0; k < rays.size(); ++k) {
      if (value[k] <= zero) next.push_back(std::move(rays[k]));
    }
    for (auto& ray : created) next.push_back(std::move(ray));
    rays = std::move(next);
  }
  return rays;
}

Matrix homogenize(const Matrix& a, const Vector& b) {
  const Eigen::Index m = a.rows();
  const Eigen::Index d = a.cols();
  Matrix h = Matrix::Zero(m + 1, d + 1);
  h.topLeftCorner(m, d) = a;
  h.topRightCorner(m, 1) = -b;
  h(m, d) = -1.0;
  return h;
}

// Re-solves the constraint rows recorded as tight for a ray, which removes the
// rounding accumulated by repeated ray combination.
std::optional<Vector> polish_vertex(const Matrix& a, const Vector& b, const Bitset& tight) {
  const Eigen::Index d = a.cols();
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (tight.test(static_cast<std::size_t>(i))) rows.push_back(i);
  }
  if (static_cast<Eigen::Index>(rows.size()) < d) return std::nullopt;
  Matrix sub(static_cast<Eigen::Index>(rows.size()), d);
  Vector rhs(sub.rows());
  for (Eigen::Index k = 0; k < sub.rows(); ++k) {
    sub.row(k) = a.row(rows[static_cast<std::size_t>(k)]);
    rhs(k) = b(rows[static_cast<std::size_t>(k)]);
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(sub);
  qr.setThreshold(1e-10);
  if (qr.rank() < d) return std::nullopt;
  return Vector(qr.solve(rhs));
}

void certify_vertex(const Matrix& a, const Vector& b, const Vector& v, double tolerance) {
  Eigen::Index tight = 0;
  Matrix tight_rows(0, a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double slack = b(i) - a.row(i).dot(v);
    if (slack < -tolerance * row_scale(a, i)) {
      throw DegenerateGeometry("computed vertex violates constraint " + std::to_string(i));
    }
    if (slack <= tolerance * std::max(1.0, std::abs(b(i))) * 16.0) {
      ++tight;
      tight_rows.conservativeResize(tight, Eigen::NoChange);
      tight_rows.row(tight - 1) = a.row(i);
    }
  }
  if (tight < a.cols() || numeric_rank(tight_rows, 1e-10) < a.cols()) {
    throw DegenerateGeometry("vertex candidate has fewer than d independent tight constraints");
  }
}

bool lex_less(const Vector& x, const Vector& y, double tolerance) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) < y(i) - tolerance) return true;
    if (x(i) > y(i) + tolerance) return false;
  }
  return false;
}

}  // namespace

namespace geometry {

std::vector<Vector> cone_extreme_rays(const Matrix& m, double tolerance) {
  std::vector<Ray> rays = double_description(m, tolerance);
  std::vector<Vector> out;
  out.reserve(rays.size());
  for (auto& r : rays) out.push_back(std::move(r.direction));
  return out;
}

std::vector<Vector> double_description_vertices(const Matrix& a, const Vector& b, double tolerance) {
  const Eigen::Index d = a.cols();
  const std::vector<Ray> rays = double_description(homogenize(a, b), tolerance);
  std::vector<Vector> out;
  for (const Ray& ray : rays) {
    const double t = ray.direction(d);
    if (t <= tolerance) continue;
    Vector v = ray.direction.head(d) / t;
    if (auto refined = polish_vertex(a, b, ray.tight)) v = *refined;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Vector> exhaustive_vertices(const Matrix& a, const Vector& b, double tolerance) {
  const auto m = static_cast<std::size_t>(a.rows());
  const auto d = static_cast<std::size_t>(a.cols());
  std::vector<Vector> out;
  if (m < d) return out;

  std::vector<std::size_t> subset(d);
  std::iota(subset.begin(), subset.end(), std::size_t{0});
  Matrix sub(a.cols(), a.cols());
  Vector rhs(a.cols());
  while (true) {
    for (std::size_t k = 0; k < d; ++k) {
      sub.row(static_cast<Eigen::Index>(k)) = a.row(static_cast<Eigen::Index>(subset[k]));
      rhs(static_cast<Eigen::Index>(k)) = b(static_cast<Eigen::Index>(subset[k]));
    }
    Eigen::FullPivLU<Matrix> lu(sub);
    lu.setThreshold(1e-10);
    if (lu.isInvertible()) {
      const Vector x = lu.solve(rhs);
      bool feasible = true;
      for (Eigen::Index i = 0; i < a.rows() && feasible; ++i) {
        feasible = a.row(i).dot(x) <= b(i) + tolerance * row_scale(a, i);
      }
      if (feasible) out.push_back(x);
    }

    // next combination
    std::size_t k = d;
    while (k > 0 && subset[k - 1] == m - d + k - 1) --k;
    if (k == 0) break;
    ++subset[k - 1];
    for (std::size_t j = k; j < d; ++j) subset[j] = subset[j - 1] + 1;
  }
  return out;
}

bool is_feasible(const Matrix& a, const Vector& b, double tolerance) {
  const Eigen::Index rank = numeric_rank(a, 1e-10);
  if (rank == 0) return (b.array() >= -tolerance).all();

  // Restrict to the row space of A so the homogenized cone is pointed.
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Matrix reduced = a * svd.matrixV().leftCols(rank);
  const std::vector<Ray> rays = double_description(homogenize(reduced, b), tolerance);
  return std::any_of(rays.begin(), rays.end(),
                     [&](const Ray& r) { return r.direction(rank) > tolerance; });
}

bool has_recession_direction(const Matrix& a, double tolerance) {
  const Eigen::Index d = a.cols();
  if (numeric_rank(a, 1e-10) < d) return true;

  // Cheap probes first: coordinate axes and a fixed set of pseudo-random directions.
  auto is_recession = [&](const Vector& dir) {
    return ((a * dir).array() <= tolerance).all();
  };
  for (Eigen::Index i = 0; i < d; ++i) {
    Vector e = Vector::Zero(d);
    e(i) = 1.0;
    if (is_recession(e) || is_recession(-e)) return true;
  }
  std::uint64_t state = 0x2545f4914f6cdd1dULL;
  for (int probe = 0; probe < 16; ++probe) {
    Vector dir(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      state ^= state << 13;
      state ^= state >> 7;
      state ^= state << 17;
      dir(i) = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
    }
    if (is_recession(dir)) return true;
  }

  // Exact certificate: the recession cone is {0} iff it has no extreme ray.
  return !cone_extreme_rays(a, tolerance).empty();
}

}  // namespace geometry

Polytope Polytope::validate(Matrix constraint_matrix, Vector constraint_vector, Sense sense, double tolerance) {
  if (constraint_matrix.cols() < 1) throw DimensionMismatch("polytope dimension must be at least 1");
  if (constraint_matrix.rows() != constraint_vector.size()) {
    throw DimensionMismatch("constraint matrix has " + std::to_string(constraint_matrix.rows()) +
                            " rows but constraint vector has " + std::to_string(constraint_vector.size()) +
                            " entries");
  }
  if (constraint_matrix.rows() == 0) throw UnboundedRegion("no constraints: region is all of R^d");
  if (!constraint_matrix.allFinite() || !constraint_vector.allFinite()) {
    throw DimensionMismatch("constraint data contains non-finite values");
  }
  if (!geometry::is_feasible(constraint_matrix, constraint_vector, tolerance)) {
    throw EmptyRegion("feasible region {z : Az <= b} is empty");
  }
  if (constraint_matrix.rows() < constraint_matrix.cols() + 1 ||
      geometry::has_recession_direction(constraint_matrix, tolerance)) {
    throw UnboundedRegion("feasible region {z : Az <= b} is unbounded");
  }
  return Polytope(std::move(constraint_matrix), std::move(constraint_vector), sense);
}

VertexSet::VertexSet(std::vector<Vector> vertices, double tolerance) : tolerance_(tolerance) {
  std::vector<Vector> kept;
  for (auto& v : vertices) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v(i) == 0.0) v(i) = 0.0;  // drop negative zero
    }
    const bool duplicate = std::any_of(kept.begin(), kept.end(),
                                       [&](const Vector& k) { return (k - v).norm() <= tolerance; });
    if (!duplicate) kept.push_back(std::move(v));
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [&](const Vector& x, const Vector& y) { return lex_less(x, y, tolerance); });
  vertices_ = std::move(kept);
}

VertexSet enumerate_vertices(const Polytope& polytope, double tolerance, VertexMethod method) {
  const Matrix& a = polytope.constraint_matrix();
  const Vector& b = polytope.constraint_vector();
  if (method == VertexMethod::automatic) {
    method = a.cols() <= 3 ? VertexMethod::exhaustive : VertexMethod::double_description;
  }
  std::vector<Vector> raw = method == VertexMethod::exhaustive
                                ? geometry::exhaustive_vertices(a, b, tolerance)
                                : geometry::double_description_vertices(a, b, tolerance);
  for (const Vector& v : raw) certify_vertex(a, b, v, tolerance);
  VertexSet out(std::move(raw), tolerance);
  if (out.empty()) throw DegenerateGeometry("no vertex could be certified");
  return out;
}

bool contains(const Polytope& polytope, const Vector& point, double tolerance) {
  if (point.size() != polytope.dimension()) {
    throw DimensionMismatch("point has dimension " + std::to_string(point.size()) + ", polytope has " +
                            std::to_string(polytope.dimension()));
  }
  return ((polytope.constraint_matrix() * point - polytope.constraint_vector()).array() <= tolerance).all();
}

DecisionClass classify_decision(const Vector& z, const VertexSet& vertices, double tolerance) {
  std::optional<std::size_t> best;
  double best_distance = tolerance;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i].size() != z.size()) continue;
    const double dist = (vertices[i] - z).norm();
    if (dist <= tolerance && (!best || dist < best_distance)) {
      best_distance = dist;
      best = i;
    }
  }
  return best ? DecisionClass::vertex(*best) : DecisionClass::non_vertex();
}

}  // namespace credo
