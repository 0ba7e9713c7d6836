#pragma once

#include "credo/polytope.hpp"
#include "credo/rng.hpp"

#include <cmath>
#include <initializer_list>
#include <numbers>
#include <random>
#include <vector>

namespace credo::test {

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(rows.begin()->size());
  Matrix a(m, d);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double x : row) a(i, j++) = x;
    ++i;
  }
  return a;
}

inline Polytope triangle(Sense sense = Sense::maximize) {
  return Polytope::validate(mat({{1, 1}, {-1, 0}, {0, -1}}), vec({1, 0, 0}), sense);
}

inline Polytope unit_box(Eigen::Index d) {
  Matrix a(2 * d, d);
  a << Matrix::Identity(d, d), -Matrix::Identity(d, d);
  Vector b(2 * d);
  b << Vector::Ones(d), Vector::Zero(d);
  return Polytope::validate(a, b, Sense::minimize);
}

/// Random bounded 2-D polytope: m half-planes with outward normals at random
/// angles, each passing at a random offset from a random center. Retries until
/// the normals positively span the plane.
inline Polytope random_polygon(Engine& engine, int max_constraints) {
  std::uniform_int_distribution<int> count(3, max_constraints);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> offset(0.2, 2.0);
  std::uniform_real_distribution<double> center(-3.0, 3.0);
  std::uniform_real_distribution<double> scale(0.5, 3.0);
  for (;;) {
    const int m = count(engine);
    Matrix a(m, 2);
    Vector b(m);
    const Vector c = vec({center(engine), center(engine)});
    for (int i = 0; i < m; ++i) {
      const double t = angle(engine);
      const double s = scale(engine);
      a(i, 0) = s * std::cos(t);
      a(i, 1) = s * std::sin(t);
      b(i) = a.row(i).dot(c) + s * offset(engine);
    }
    try {
      return Polytope::validate(a, b, Sense::minimize);
    } catch (const std::exception&) {
    }
  }
}

/// Brute-force vertex oracle for d = 2: intersect every pair of constraint
/// lines, keep the feasible points, drop duplicates.
inline std::vector<Vector> pairwise_intersection_vertices(const Matrix& a, const Vector& b, double tolerance) {
  std::vector<Vector> out;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < a.rows(); ++j) {
      const double det = a(i, 0) * a(j, 1) - a(i, 1) * a(j, 0);
      if (std::abs(det) < 1e-12) continue;
      const Vector p = vec({(b(i) * a(j, 1) - a(i, 1) * b(j)) / det, (a(i, 0) * b(j) - b(i) * a(j, 0)) / det});
      bool feasible = true;
      for (Eigen::Index k = 0; k < a.rows(); ++k) {
        if (a.row(k).dot(p) > b(k) + tolerance * std::max(1.0, std::abs(b(k)))) feasible = false;
      }
      if (!feasible) continue;
      bool seen = false;
      for (const auto& q : out) seen = seen || (q - p).norm() <= 1e-7;
      if (!seen) out.push_back(p);
    }
  }
  return out;
}

/// Every point of `a` has a partner in `b` within `tolerance`, and vice versa.
inline bool same_point_set(const std::vector<Vector>& a, const std::vector<Vector>& b, double tolerance) {
  if (a.size() != b.size()) return false;
  auto covered = [tolerance](const std::vector<Vector>& xs, const std::vector<Vector>& ys) {
    for (const auto& x : xs) {
      bool hit = false;
      for (const auto& y : ys) hit = hit || (x - y).lpNorm<Eigen::Infinity>() <= tolerance;
      if (!hit) return false;
    }
    return true;
  };
  return covered(a, b) && covered(b, a);
}

}  // namespace credo::test
