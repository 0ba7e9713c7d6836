#include "credo/genmodel.hpp"

#include "credo/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

namespace credo {

Dataset::Dataset(Matrix outcomes, std::vector<std::string> tags)
    : outcomes_(std::move(outcomes)), tags_(std::move(tags)) {
  if (!tags_.empty() && tags_.size() != static_cast<std::size_t>(outcomes_.rows())) {
    throw DimensionMismatch("context tag count does not match row count");
  }
}

Vector Dataset::mean() const {
  if (empty()) throw EmptyDataset("mean of an empty dataset");
  return outcomes_.colwise().mean().transpose();
}

Dataset Dataset::slice(std::size_t first, std::size_t count) const {
  if (first + count > size()) throw DimensionMismatch("dataset slice out of range");
  std::vector<std::string> tags;
  if (!tags_.empty()) {
    tags.assign(tags_.begin() + static_cast<std::ptrdiff_t>(first),
                tags_.begin() + static_cast<std::ptrdiff_t>(first + count));
  }
  return Dataset(outcomes_.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count)),
                 std::move(tags));
}

Dataset Dataset::concat(const Dataset& a, const Dataset& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.dimension() != b.dimension()) throw DimensionMismatch("cannot concatenate datasets of different dimension");
  Matrix m(a.outcomes_.rows() + b.outcomes_.rows(), a.dimension());
  m << a.outcomes_, b.outcomes_;
  std::vector<std::string> tags;
  if (!a.tags_.empty() || !b.tags_.empty()) {
    tags = a.tags_.empty() ? std::vector<std::string>(a.size()) : a.tags_;
    const auto& bt = b.tags_.empty() ? std::vector<std::string>(b.size()) : b.tags_;
    tags.insert(tags.end(), bt.begin(), bt.end());
  }
  return Dataset(std::move(m), std::move(tags));
}

Matrix floor_covariance(const Matrix& covariance, double floor) {
  const Matrix sym = 0.5 * (covariance + covariance.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  Vector values = eig.eigenvalues().cwiseMax(floor);
  Matrix out = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

GaussianMixture::GaussianMixture(std::vector<double> weights, std::vector<Vector> means,
                                 std::vector<Matrix> covariances)
    : weights_(std::move(weights)), means_(std::move(means)), covariances_(std::move(covariances)) {
  if (weights_.empty()) throw InvariantViolation("mixture needs at least one component");
  if (weights_.size() != means_.size() || weights_.size() != covariances_.size()) {
    throw InvariantViolation("mixture weights, means and covariances differ in length");
  }
  const Eigen::Index d = means_.front().size();
  if (d < 1) throw DimensionMismatch("mixture dimension must be at least 1");
  double total = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    if (!(weights_[k] >= 0.0)) throw InvariantViolation("mixture weights must be nonnegative");
    if (means_[k].size() != d || covariances_[k].rows() != d || covariances_[k].cols() != d) {
      throw DimensionMismatch("mixture component " + std::to_string(k) + " has inconsistent dimension");
    }
    total += weights_[k];
  }
  if (std::abs(total - 1.0) > 1e-6) throw InvariantViolation("mixture weights must sum to 1");
  for (double& w : weights_) w /= total;
  for (Matrix& c : covariances_) c = floor_covariance(c);
  finalize();
}

GaussianMixture GaussianMixture::isotropic(std::vector<double> weights, std::vector<Vector> means,
                                           const std::vector<double>& variances) {
  if (variances.size() != means.size()) throw InvariantViolation("one variance per component is required");
  std::vector<Matrix> covs;
  covs.reserve(means.size());
  for (std::size_t k = 0; k < means.size(); ++k) {
    covs.push_back(variances[k] * Matrix::Identity(means[k].size(), means[k].size()));
  }
  return GaussianMixture(std::move(weights), std::move(means), std::move(covs));
}

GaussianMixture GaussianMixture::point_mass(const Vector& location) {
  GaussianMixture g;
  g.weights_ = {1.0};
  g.means_ = {location};
  g.covariances_ = {kVarianceFloor * Matrix::Identity(location.size(), location.size())};
  g.point_mass_ = true;
  g.finalize();
  return g;
}

GaussianMixture GaussianMixture::negated() const {
  GaussianMixture g = *this;
  for (Vector& m : g.means_) m = -m;
  return g;
}

void GaussianMixture::finalize() {
  cholesky_.clear();
  log_normalizer_.clear();
  const double d = static_cast<double>(dimension());
  for (const Matrix& c : covariances_) {
    Eigen::LLT<Matrix> llt(c);
    if (llt.info() != Eigen::Success) throw SingularComponent("covariance is not positive definite");
    Matrix l = llt.matrixL();
    const double logdet = 2.0 * l.diagonal().array().log().sum();
    cholesky_.push_back(std::move(l));
    log_normalizer_.push_back(-0.5 * (d * std::log(2.0 * std::numbers::pi) + logdet));
  }
}

Vector GaussianMixture::mean() const {
  Vector m = Vector::Zero(dimension());
  for (std::size_t k = 0; k < weights_.size(); ++k) m += weights_[k] * means_[k];
  return m;
}

double GaussianMixture::component_log_density(std::size_t k, const Vector& y) const {
  const Vector white = cholesky_[k].triangularView<Eigen::Lower>().solve(y - means_[k]);
  return log_normalizer_[k] - 0.5 * white.squaredNorm();
}

double GaussianMixture::log_density(const Vector& y) const {
  if (y.size() != dimension()) throw DimensionMismatch("observation dimension does not match the model");
  double peak = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(weights_.size());
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    terms[k] = weights_[k] > 0.0 ? std::log(weights_[k]) + component_log_density(k, y)
                                 : -std::numeric_limits<double>::infinity();
    peak = std::max(peak, terms[k]);
  }
  if (!std::isfinite(peak)) return peak;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - peak);
  return peak + std::log(acc);
}

std::pair<Dataset, std::vector<std::size_t>> GaussianMixture::sample_with_labels(std::size_t count,
                                                                                Seed seed) const {
  const Eigen::Index d = dimension();
  Matrix out(static_cast<Eigen::Index>(count), d);
  std::vector<std::size_t> labels(count, 0);
  if (point_mass_) {
    for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) = means_.front().transpose();
    return {Dataset(std::move(out)), std::move(labels)};
  }
  Engine engine = make_engine(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector noise(d);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t k = 0;
    if (weights_.size() > 1) {
      const double u = uniform(engine);
      double cumulative = 0.0;
      k = weights_.size() - 1;
      for (std::size_t j = 0; j < weights_.size(); ++j) {
        cumulative += weights_[j];
        if (u < cumulative) {
          k = j;
          break;
        }
      }
    }
    for (Eigen::Index j = 0; j < d; ++j) noise(j) = normal(engine);
    out.row(static_cast<Eigen::Index>(i)) = (means_[k] + cholesky_[k] * noise).transpose();
    labels[i] = k;
  }
  return {Dataset(std::move(out)), std::move(labels)};
}

Dataset GaussianMixture::sample(std::size_t count, Seed seed) const {
  return sample_with_labels(count, seed).first;
}

bool operator==(const GaussianMixture& a, const GaussianMixture& b) {
  if (a.point_mass_ != b.point_mass_ || a.weights_ != b.weights_) return false;
  for (std::size_t k = 0; k < a.weights_.size(); ++k) {
    if (a.means_[k] != b.means_[k] || a.covariances_[k] != b.covariances_[k]) return false;
  }
  return true;
}

double log_likelihood(const GaussianMixture& model, const Dataset& data) {
  if (data.empty()) return 0.0;
  if (data.dimension() != model.dimension()) throw DimensionMismatch("dataset dimension does not match the model");
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) total += model.log_density(data.row(i));
  return total;
}

namespace {

Matrix sample_covariance(const Matrix& x, const Vector& mean) {
  const Matrix centered = x.rowwise() - mean.transpose();
  return (centered.transpose() * centered) / static_cast<double>(x.rows());
}

std::vector<std::size_t> kmeanspp_seeds(const Matrix& x, std::size_t k, Engine& engine) {
  const auto n = static_cast<std::size_t>(x.rows());
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<std::size_t> seeds{pick(engine)};
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  while (seeds.size() < k) {
    const Eigen::RowVectorXd last = x.row(static_cast<Eigen::Index>(seeds.back()));
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (x.row(static_cast<Eigen::Index>(i)) - last).squaredNorm());
      total += d2[i];
    }
    if (total <= 0.0) {
      seeds.push_back(pick(engine));
      continue;
    }
    const double target = uniform(engine) * total;
    double cumulative = 0.0;
    std::size_t chosen = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      cumulative += d2[i];
      if (cumulative > target) {
        chosen = i;
        break;
      }
    }
    seeds.push_back(chosen);
  }
  return seeds;
}

}  // namespace

EmFit fit_em_traced(const Dataset& data, const EmOptions& options) {
  const std::size_t k = options.component_count;
  if (k < 1) throw InsufficientData("component count must be at least 1");
  if (data.size() < k) {
    throw InsufficientData("EM needs at least " + std::to_string(k) + " rows, got " + std::to_string(data.size()));
  }
  const Matrix& x = data.outcomes();
  const auto n = static_cast<std::size_t>(x.rows());
  Engine engine = make_engine(derive_seed(options.seed, "em-init"));
  const Vector global_mean = data.mean();
  const Matrix global_cov = floor_covariance(sample_covariance(x, global_mean));

  std::vector<double> weights(k, 1.0 / static_cast<double>(k));
  std::vector<Vector> means;
  std::vector<Matrix> covs(k, global_cov);
  for (std::size_t s : kmeanspp_seeds(x, k, engine)) means.push_back(x.row(static_cast<Eigen::Index>(s)).transpose());

  EmFit fit{GaussianMixture(weights, means, covs), {}, 0, false, 0};
  Matrix resp(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  const std::size_t max_reseeds = 5 * k;

  for (std::size_t iter = 0;; ++iter) {
    // E-step on the current parameters.
    double ll = 0.0;
    std::vector<double> point_ll(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vector y = x.row(static_cast<Eigen::Index>(i)).transpose();
      double peak = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double t = fit.model.weights()[c] > 0.0
                             ? std::log(fit.model.weights()[c]) + fit.model.component_log_density(c, y)
                             : -std::numeric_limits<double>::infinity();
        resp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = t;
        peak = std::max(peak, t);
      }
      double acc = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        auto& r = resp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
        r = std::exp(r - peak);
        acc += r;
      }
      resp.row(static_cast<Eigen::Index>(i)) /= acc;
      point_ll[i] = peak + std::log(acc);
      ll += point_ll[i];
    }
    fit.log_likelihood_trace.push_back(ll);

    const std::size_t visited = fit.log_likelihood_trace.size();
    if (visited >= 2 && fit.log_likelihood_trace[visited - 1] - fit.log_likelihood_trace[visited - 2] <
                            options.convergence_tol) {
      fit.converged = true;
      break;
    }
    if (iter >= options.max_iterations) break;

    // M-step.
    for (std::size_t c = 0; c < k; ++c) {
      const auto ci = static_cast<Eigen::Index>(c);
      double mass = resp.col(ci).sum();
      if (mass < 1e-10 * static_cast<double>(n)) {
        if (++fit.reseeds > max_reseeds) {
          throw SingularComponent("component " + std::to_string(c) + " keeps collapsing and cannot be re-seeded");
        }
        // Re-seed at the worst-explained observation.
        const auto worst = static_cast<std::size_t>(
            std::min_element(point_ll.begin(), point_ll.end()) - point_ll.begin());
        means[c] = x.row(static_cast<Eigen::Index>(worst)).transpose();
        covs[c] = global_cov;
        weights[c] = 1.0 / static_cast<double>(n);
        continue;
      }
      Vector mu = (x.transpose() * resp.col(ci)) / mass;
      const Matrix centered = x.rowwise() - mu.transpose();
      Matrix cov = (centered.transpose() * resp.col(ci).asDiagonal() * centered) / mass;
      means[c] = std::move(mu);
      covs[c] = floor_covariance(cov);
      weights[c] = mass / static_cast<double>(n);
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double& w : weights) w /= total;
    fit.model = GaussianMixture(weights, means, covs);
    ++fit.iterations;
  }
  return fit;
}

GaussianMixture fit_em(const Dataset& data, std::size_t component_count, std::size_t max_iterations,
                       double convergence_tol, Seed seed) {
  return fit_em_traced(data, {component_count, max_iterations, convergence_tol, seed}).model;
}

}  // namespace credo
