#include "credo/conformal_risk.hpp"

#include "credo/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace credo {

GaussianMixture canonicalize_model(const GaussianMixture& model, Sense sense) {
  return sense == Sense::maximize ? model.negated() : model;
}

Dataset canonicalize_dataset(const Dataset& data, Sense sense) {
  if (sense == Sense::minimize) return data;
  return Dataset(-data.outcomes(), data.tags());
}

CalibrationSet::CalibrationSet(std::vector<double> residuals, Seed source_seed)
    : residuals_(std::move(residuals)), source_seed_(source_seed) {
  if (residuals_.empty()) throw InvariantViolation("calibration set needs at least one residual");
  if (std::any_of(residuals_.begin(), residuals_.end(), [](double r) { return !(r >= 0.0); })) {
    throw InvariantViolation("residuals must be nonnegative");
  }
  std::sort(residuals_.begin(), residuals_.end());
}

std::size_t CalibrationSet::count_within(double distance) const {
  return static_cast<std::size_t>(std::upper_bound(residuals_.begin(), residuals_.end(), distance) -
                                  residuals_.begin());
}

CalibrationSet calibrate(const GaussianMixture& model, const Dataset& data, Seed seed) {
  if (data.empty()) throw EmptyDataset("calibration dataset is empty");
  if (data.dimension() != model.dimension()) throw DimensionMismatch("calibration data dimension does not match the model");
  const Dataset generated = model.sample(data.size(), seed);
  std::vector<double> residuals(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    residuals[i] = (data.outcomes().row(row) - generated.outcomes().row(row)).norm();
  }
  return CalibrationSet(std::move(residuals), seed);
}

double conformal_radius(const CalibrationSet& calibration, double alpha) {
  const auto n = static_cast<double>(calibration.size());
  // The guard keeps breakpoints alpha = 1 - j/(n+1) on index j despite rounding.
  const double index = std::ceil((n + 1.0) * (1.0 - alpha) - 1e-9);
  if (index <= 0.0) return 0.0;
  if (index > n) return std::numeric_limits<double>::infinity();
  return calibration.residuals()[static_cast<std::size_t>(index) - 1];
}

double f_hat(const CalibrationSet& calibration, double distance) {
  return static_cast<double>(calibration.count_within(distance)) / static_cast<double>(calibration.size());
}

namespace {

// A closed ball fits in {y : n.y <= 0 for all n} iff its support value
// c.n + radius ||n|| is nonpositive for every facet normal.
bool ball_inside(const InverseCone& cone, const Vector& center, double radius) {
  if (std::isinf(radius)) return cone.normals().empty();
  for (std::size_t j = 0; j < cone.normals().size(); ++j) {
    if (center.dot(cone.normals()[j]) + radius * cone.normal_norms()[j] > 0.0) return false;
  }
  return true;
}

}  // namespace

double alpha_raw(const CalibrationSet& calibration, const Vector& y_hat, const InverseCone& cone) {
  if (!cone.contains(y_hat)) return 1.0;
  const std::size_t n = calibration.size();
  // alpha below 1/(n+1) would index past the largest residual, so the
  // breakpoints 1 - j/(n+1) for j = n, ..., 1 are the only candidates < 1.
  for (std::size_t j = n; j >= 1; --j) {
    const double alpha = 1.0 - static_cast<double>(j) / static_cast<double>(n + 1);
    if (ball_inside(cone, y_hat, conformal_radius(calibration, alpha))) return alpha;
  }
  return 1.0;
}

double alpha_closed_form(const CalibrationSet& calibration, const Vector& y_hat, const InverseCone& cone) {
  if (!cone.contains(y_hat)) return 1.0;
  const std::size_t covered = calibration.count_within(cone.boundary_distance(y_hat));
  return 1.0 - static_cast<double>(covered) / static_cast<double>(calibration.size() + 1);
}

double alpha_closed_form(const CalibrationSet& calibration, const Vector& y_hat, const Vector& z,
                         const VertexSet& vertices) {
  return alpha_closed_form(calibration, y_hat, InverseCone::build(z, vertices));
}

RiskCertificate credo_assess(const GaussianMixture& model, const CalibrationSet& calibration, const Vector& z,
                             const VertexSet& vertices, std::size_t draw_count, Seed seed, AssessOptions options) {
  if (draw_count < 1) throw InvariantViolation("draw count K must be at least 1");
  RiskCertificate cert;
  cert.calibration_size = calibration.size();
  cert.draw_count = draw_count;
  const DecisionClass cls = classify_decision(z, vertices, vertices.tolerance());
  cert.decision = {z, cls.vertex_index};
  if (!cls.is_vertex()) {
    cert.alpha_hat = 1.0;
    return cert;
  }
  const InverseCone cone = InverseCone::build(z, vertices);
  const Dataset draws = model.sample(draw_count, seed);
  cert.per_draw_alphas.reserve(draw_count);
  if (options.keep_generated_points) cert.generated_points.emplace();
  for (std::size_t k = 0; k < draw_count; ++k) {
    const Vector y = draws.row(k);
    cert.per_draw_alphas.push_back(alpha_closed_form(calibration, y, cone));
    if (cert.generated_points) cert.generated_points->push_back(y);
  }
  cert.alpha_hat = std::accumulate(cert.per_draw_alphas.begin(), cert.per_draw_alphas.end(), 0.0) /
                   static_cast<double>(draw_count);
  return cert;
}

double ns_assess(const GaussianMixture& model, const Vector& z, const VertexSet& vertices, std::size_t draw_count,
                 Seed seed) {
  if (draw_count < 1) throw InvariantViolation("draw count K must be at least 1");
  if (!classify_decision(z, vertices, vertices.tolerance()).is_vertex()) return 1.0;
  const InverseCone cone = InverseCone::build(z, vertices);
  const Dataset draws = model.sample(draw_count, seed);
  std::size_t inside = 0;
  for (std::size_t k = 0; k < draw_count; ++k) inside += cone.contains(draws.row(k)) ? 1 : 0;
  return 1.0 - static_cast<double>(inside) / static_cast<double>(draw_count);
}

RiskCertificate point_assess(const Vector& mean_location, const CalibrationSet& calibration, const Vector& z,
                             const VertexSet& vertices) {
  return credo_assess(GaussianMixture::point_mass(mean_location), calibration, z, vertices, 1, 0);
}

}  // namespace credo
