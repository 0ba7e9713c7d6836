#pragma once

#include "credo/polytope.hpp"
#include "credo/rng.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace credo {

/// Observed outcome realizations, one row per observation. Context tags are
/// carried through untouched; no model in this library conditions on them.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(Matrix outcomes, std::vector<std::string> tags = {});

  std::size_t size() const noexcept { return static_cast<std::size_t>(outcomes_.rows()); }
  bool empty() const noexcept { return outcomes_.rows() == 0; }
  Eigen::Index dimension() const noexcept { return outcomes_.cols(); }
  Vector row(std::size_t i) const { return outcomes_.row(static_cast<Eigen::Index>(i)).transpose(); }
  const Matrix& outcomes() const noexcept { return outcomes_; }
  const std::vector<std::string>& tags() const noexcept { return tags_; }

  Vector mean() const;
  /// Rows [first, first + count).
  Dataset slice(std::size_t first, std::size_t count) const;
  static Dataset concat(const Dataset& a, const Dataset& b);

 private:
  Matrix outcomes_;
  std::vector<std::string> tags_;
};

inline constexpr double kVarianceFloor = 1e-8;

class GaussianMixture {
 public:
  /// Weights are renormalized (they must already sum to 1 within 1e-6);
  /// covariance eigenvalues are floored at kVarianceFloor.
  /// Throws InvariantViolation or DimensionMismatch on malformed input.
  GaussianMixture(std::vector<double> weights, std::vector<Vector> means, std::vector<Matrix> covariances);

  /// Components with covariance variance_k * I.
  static GaussianMixture isotropic(std::vector<double> weights, std::vector<Vector> means,
                                   const std::vector<double>& variances);

  /// One component at `location`; sampling returns the location exactly.
  static GaussianMixture point_mass(const Vector& location);

  std::size_t component_count() const noexcept { return weights_.size(); }
  Eigen::Index dimension() const noexcept { return means_.front().size(); }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<Vector>& means() const noexcept { return means_; }
  const std::vector<Matrix>& covariances() const noexcept { return covariances_; }
  bool is_point_mass() const noexcept { return point_mass_; }

  /// Mixture mean, sum_k w_k mu_k.
  Vector mean() const;
  /// Distribution of -Y.
  GaussianMixture negated() const;

  double log_density(const Vector& y) const;
  double component_log_density(std::size_t k, const Vector& y) const;

  /// Identical (model, count, seed) give bitwise-identical output.
  Dataset sample(std::size_t count, Seed seed) const;
  /// Also returns the component index of each draw.
  std::pair<Dataset, std::vector<std::size_t>> sample_with_labels(std::size_t count, Seed seed) const;

  friend bool operator==(const GaussianMixture& a, const GaussianMixture& b);

 private:
  GaussianMixture() = default;
  void finalize();

  std::vector<double> weights_;
  std::vector<Vector> means_;
  std::vector<Matrix> covariances_;
  std::vector<Matrix> cholesky_;
  std::vector<double> log_normalizer_;
  bool point_mass_ = false;
};

/// Symmetrizes and clamps eigenvalues at `floor`.
Matrix floor_covariance(const Matrix& covariance, double floor = kVarianceFloor);

/// sum_i log sum_k w_k N(y_i; mu_k, Sigma_k); 0 for an empty dataset.
double log_likelihood(const GaussianMixture& model, const Dataset& data);

inline GaussianMixture point_mass(const Vector& location) { return GaussianMixture::point_mass(location); }

struct EmOptions {
  std::size_t component_count = 3;
  std::size_t max_iterations = 100;
  double convergence_tol = 1e-6;
  Seed seed = 0;
};

struct EmFit {
  GaussianMixture model;
  /// Training log-likelihood of each parameter state visited, in order.
  std::vector<double> log_likelihood_trace;
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t reseeds = 0;
};

/// EM with k-means++ seeding. Throws InsufficientData when there are fewer
/// rows than components, SingularComponent when a collapsed component cannot
/// be re-seeded.
EmFit fit_em_traced(const Dataset& data, const EmOptions& options);

GaussianMixture fit_em(const Dataset& data, std::size_t component_count, std::size_t max_iterations,
                       double convergence_tol, Seed seed);

}  // namespace credo
