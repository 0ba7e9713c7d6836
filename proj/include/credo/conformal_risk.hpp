#pragma once

#include "credo/genmodel.hpp"
#include "credo/inverse_geometry.hpp"
#include "credo/lp_oracle.hpp"
#include "credo/polytope.hpp"
#include "credo/rng.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace credo {

/// Model and data in canonical objective space, where the cones live
/// (negated for maximization).
GaussianMixture canonicalize_model(const GaussianMixture& model, Sense sense);
Dataset canonicalize_dataset(const Dataset& data, Sense sense);

/// Sorted nonconformity scores r_i = ||y_i - yhat_i||_2 of a calibration split.
class CalibrationSet {
 public:
  /// Throws InvariantViolation on an empty or negative residual list.
  CalibrationSet(std::vector<double> residuals, Seed source_seed);

  const std::vector<double>& residuals() const noexcept { return residuals_; }
  std::size_t size() const noexcept { return residuals_.size(); }
  Seed source_seed() const noexcept { return source_seed_; }

  /// |{i : r_i <= distance}|.
  std::size_t count_within(double distance) const;

 private:
  std::vector<double> residuals_;
  Seed source_seed_;
};

/// Draws one yhat_i from the model per observation and records the residuals.
CalibrationSet calibrate(const GaussianMixture& model, const Dataset& data, Seed seed);

/// r_(ceil((n+1)(1-alpha))), +infinity when that index exceeds n, 0 at alpha = 1.
double conformal_radius(const CalibrationSet& calibration, double alpha);

/// (1/n) |{i : r_i <= distance}|.
double f_hat(const CalibrationSet& calibration, double distance);

/// Smallest alpha whose conformal ball around y_hat fits in the cone, found by
/// testing ball containment against each facet at every quantile breakpoint.
/// Returns 1 when y_hat lies outside the cone.
double alpha_raw(const CalibrationSet& calibration, const Vector& y_hat, const InverseCone& cone);

/// 1 - floor(n F) / (n + 1) when y_hat is inside the cone, else 1, where F uses
/// the distance from y_hat to the nearest facet hyperplane.
double alpha_closed_form(const CalibrationSet& calibration, const Vector& y_hat, const InverseCone& cone);

/// Same, building the cone for vertex z. Throws NonVertexDecision.
double alpha_closed_form(const CalibrationSet& calibration, const Vector& y_hat, const Vector& z,
                         const VertexSet& vertices);

struct RiskCertificate {
  Decision decision;
  double alpha_hat = 1.0;
  std::vector<double> per_draw_alphas;
  std::size_t draw_count = 0;
  std::optional<std::vector<Vector>> generated_points;
  std::size_t calibration_size = 0;

  double confidence() const noexcept { return 1.0 - alpha_hat; }
};

struct AssessOptions {
  bool keep_generated_points = false;
};

/// Averages alpha_closed_form over K draws from the model. Non-vertex decisions
/// return alpha_hat = 1 without drawing. Draws are the first K rows of
/// model.sample(K, seed).
RiskCertificate credo_assess(const GaussianMixture& model, const CalibrationSet& calibration, const Vector& z,
                             const VertexSet& vertices, std::size_t draw_count, Seed seed,
                             AssessOptions options = {});

/// 1 - (fraction of K model draws inside the cone); 1 for non-vertex z.
double ns_assess(const GaussianMixture& model, const Vector& z, const VertexSet& vertices, std::size_t draw_count,
                 Seed seed);

/// credo_assess with a point mass at `mean_location` and a single draw.
RiskCertificate point_assess(const Vector& mean_location, const CalibrationSet& calibration, const Vector& z,
                             const VertexSet& vertices);

}  // namespace credo
