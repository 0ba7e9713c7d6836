#include "credo/policies.hpp"

#include "credo/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace credo {

Decision pto_decide(const Dataset& data, const VertexSet& vertices, Sense sense) {
  if (data.empty()) throw EmptyDataset("PTO needs at least one observation");
  return solve(canonicalize_objective(data.mean(), sense), vertices);
}

BoxUncertainty conformal_box(const Dataset& fit, const Dataset& cal, Sense sense, double coverage_level) {
  if (fit.empty() || cal.empty()) throw EmptyDataset("RO needs observations for both the center and the radius");
  if (!(coverage_level >= 0.0 && coverage_level <= 1.0)) {
    throw InvariantViolation("RO coverage level must lie in [0, 1]");
  }
  BoxUncertainty box;
  box.center = canonicalize_objective(fit.mean(), sense);
  std::vector<double> scores(cal.size());
  for (std::size_t i = 0; i < cal.size(); ++i) {
    scores[i] = (canonicalize_objective(cal.row(i), sense) - box.center).cwiseAbs().maxCoeff();
  }
  std::sort(scores.begin(), scores.end());
  const auto n = static_cast<double>(scores.size());
  const double index = std::ceil((n + 1.0) * coverage_level - 1e-9);
  if (index <= 0.0) {
    box.radius = 0.0;
  } else if (index > n) {
    box.radius = std::numeric_limits<double>::infinity();
  } else {
    box.radius = scores[static_cast<std::size_t>(index) - 1];
  }
  return box;
}

BoxUncertainty conformal_box(const Dataset& data, Sense sense, double coverage_level) {
  if (data.size() < 2) throw EmptyDataset("RO needs at least two observations (center and radius splits)");
  const std::size_t fit_rows = (data.size() + 1) / 2;
  return conformal_box(data.slice(0, fit_rows), data.slice(fit_rows, data.size() - fit_rows), sense, coverage_level);
}

Decision ro_decide_box(const BoxUncertainty& box, const VertexSet& vertices) {
  if (vertices.empty()) throw EmptyVertexSet("cannot decide over an empty vertex set");
  const bool unbounded = std::isinf(box.radius);
  std::size_t best = 0;
  double best_primary = std::numeric_limits<double>::infinity();
  double best_secondary = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const double linear = box.center.dot(vertices[i]);
    const double spread = vertices[i].lpNorm<1>();
    const double primary = unbounded ? spread : linear + box.radius * spread;
    const double secondary = unbounded ? linear : 0.0;
    if (primary < best_primary || (primary == best_primary && secondary < best_secondary)) {
      best = i;
      best_primary = primary;
      best_secondary = secondary;
    }
  }
  return vertex_decision(vertices, best);
}

Decision ro_decide(const Dataset& data, const VertexSet& vertices, Sense sense, double coverage_level) {
  return ro_decide_box(conformal_box(data, sense, coverage_level), vertices);
}

LinearPredictor spo_plus_train(const Dataset& data, const VertexSet& vertices, Sense sense, std::size_t epochs,
                               double learning_rate) {
  if (data.empty()) throw EmptyDataset("SPO+ needs at least one observation");
  std::vector<Vector> costs;
  costs.reserve(data.size());
  std::vector<Vector> optimal;
  optimal.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    costs.push_back(canonicalize_objective(data.row(i), sense));
    optimal.push_back(vertices[solve_index(costs.back(), vertices)]);
  }
  LinearPredictor predictor{canonicalize_objective(data.mean(), sense)};
  const double scale = 2.0 / static_cast<double>(data.size());
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    Vector gradient = Vector::Zero(predictor.coefficients.size());
    for (std::size_t i = 0; i < costs.size(); ++i) {
      const Vector shifted = 2.0 * predictor.coefficients - costs[i];
      gradient += optimal[i] - vertices[solve_index(shifted, vertices)];
    }
    predictor.coefficients -= learning_rate * scale * gradient;
  }
  return predictor;
}

Decision spo_plus_decide(const LinearPredictor& predictor, const VertexSet& vertices) {
  return solve(predictor.coefficients, vertices);
}

std::size_t argmin_risk(const std::vector<double>& risks) {
  if (risks.empty()) throw EmptyVertexSet("no risks to compare");
  return static_cast<std::size_t>(std::min_element(risks.begin(), risks.end()) - risks.begin());
}

Decision credo_decide(const GaussianMixture& model, const CalibrationSet& calibration, const VertexSet& vertices,
                      std::size_t draw_count, Seed seed) {
  if (vertices.empty()) throw EmptyVertexSet("cannot decide over an empty vertex set");
  std::vector<double> risks(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    risks[i] = credo_assess(model, calibration, vertices[i], vertices, draw_count, derive_seed(seed, "vertex", i))
                   .alpha_hat;
  }
  return vertex_decision(vertices, argmin_risk(risks));
}

}  // namespace credo
