#pragma once

#include "credo/conformal_risk.hpp"
#include "credo/genmodel.hpp"
#include "credo/lp_oracle.hpp"
#include "credo/polytope.hpp"

#include <cstddef>
#include <string_view>

namespace credo {

/// Predict-then-optimize: solve with the canonicalized empirical mean.
Decision pto_decide(const Dataset& data, const VertexSet& vertices, Sense sense);

/// Conformal l-infinity box used by the robust policy.
struct BoxUncertainty {
  Vector center;  // canonical objective space
  double radius = 0.0;
};

/// The first ceil(size/2) rows estimate the center, the rest calibrate the
/// radius at `coverage_level`.
BoxUncertainty conformal_box(const Dataset& data, Sense sense, double coverage_level);
/// Center from `fit`, radius from `calibration`.
BoxUncertainty conformal_box(const Dataset& fit, const Dataset& calibration, Sense sense, double coverage_level);

/// argmin_v max_{||c - center||_inf <= r} c.v = center.v + r ||v||_1.
/// An infinite radius orders vertices by ||v||_1, then center.v.
Decision ro_decide_box(const BoxUncertainty& box, const VertexSet& vertices);

/// Robust optimization over a conformal box built from `data`.
/// Throws EmptyDataset when fewer than two rows are available.
Decision ro_decide(const Dataset& data, const VertexSet& vertices, Sense sense, double coverage_level);

/// Constant prediction c_hat in canonical objective space.
struct LinearPredictor {
  Vector coefficients;
};

/// Full-batch subgradient descent on the SPO+ loss, starting from the
/// canonical sample mean. Each epoch averages 2 (pi(c) - pi(2 c_hat - c)).
LinearPredictor spo_plus_train(const Dataset& data, const VertexSet& vertices, Sense sense, std::size_t epochs,
                               double learning_rate);

Decision spo_plus_decide(const LinearPredictor& predictor, const VertexSet& vertices);

/// Vertex with the smallest CREDO risk; vertex i is assessed with
/// derive_seed(seed, "vertex", i). Ties go to the lowest index.
Decision credo_decide(const GaussianMixture& model, const CalibrationSet& calibration, const VertexSet& vertices,
                      std::size_t draw_count, Seed seed);

/// Index of the smallest entry, first on ties.
std::size_t argmin_risk(const std::vector<double>& risks);

}  // namespace credo
