#pragma once

#include "credo/conformal_risk.hpp"
#include "credo/genmodel.hpp"
#include "credo/polytope.hpp"
#include "credo/rng.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace credo {

// ---------------------------------------------------------------------------
// Knapsack relaxation

/// Maps raw increments Y_i to objective entries l_i / (1 + exp(-beta (Y_i - tau_i))).
struct OutcomeTransform {
  Vector thresholds;
  Vector losses;
  double sharpness = 0.5;

  Vector apply(const Vector& raw) const;
  Dataset apply(const Dataset& raw) const;
};

struct KnapsackSetting {
  Vector costs;
  double budget = 0.0;
  Vector thresholds;
  Vector losses;
  double sharpness = 0.5;
  Dataset raw_increments;
  /// Shape parameters of the Gamma(shape, 1) increment generator.
  Vector increment_rates;
};

/// Synthetic substation setting: unit costs and losses, budget half the total
/// cost, thresholds at the empirical mean of `history_rows` generated months.
KnapsackSetting make_knapsack_setting(const Vector& increment_rates, std::size_t history_rows, Seed seed,
                                      double sharpness = 0.5);

/// Returns the polytope {-c.z <= b - sum c, z <= 1, -z <= 0} (minimize) and
/// the outcome transform. Throws InvariantViolation.
std::pair<Polytope, OutcomeTransform> knapsack_to_lp(const KnapsackSetting& setting);

/// Ground truth for the knapsack scenario: independent Gamma increments
/// pushed through the sigmoid transform.
struct KnapsackTruth {
  Vector increment_rates;
  OutcomeTransform transform;

  Dataset sample(std::size_t count, Seed seed) const;
};

// ---------------------------------------------------------------------------
// Scenarios

enum class ModelKind { known, fitted, point, misspecified };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view text);

/// Generating distribution of Y, in user-facing (uncanonicalized) form.
class GroundTruth {
 public:
  GroundTruth(GaussianMixture mixture) : impl_(std::move(mixture)) {}  // NOLINT
  GroundTruth(KnapsackTruth knapsack) : impl_(std::move(knapsack)) {}  // NOLINT

  Dataset sample(std::size_t count, Seed seed) const;
  Eigen::Index dimension() const;
  /// The mixture, when the truth is one.
  const GaussianMixture* mixture() const noexcept { return std::get_if<GaussianMixture>(&impl_); }

 private:
  std::variant<GaussianMixture, KnapsackTruth> impl_;
};

struct Scenario {
  Polytope polytope;
  GroundTruth truth;
  /// How the estimator's model is obtained by default.
  ModelKind model_kind = ModelKind::fitted;
  /// Fixed model for ModelKind::misspecified.
  std::optional<GaussianMixture> fixed_model;
  double sigma = 1.0;
  std::string label;
};

Scenario make_setting_i(double sigma);
Scenario make_setting_ii(double sigma);
/// Setting I geometry with GM_real weights (0.4, 0.6) and a fixed model with
/// the weights swapped.
Scenario make_misspecified(double sigma);
Scenario make_knapsack(const KnapsackSetting& setting);
/// Four substations with the default increment rates.
Scenario make_default_knapsack(Seed seed);

// ---------------------------------------------------------------------------
// Ground truth oracle

enum class Execution { serial, parallel };

struct OracleEstimate {
  std::vector<double> alpha_true;  // per vertex
  std::vector<double> std_error;   // binomial standard error per vertex
  std::vector<std::size_t> optimal_counts;
  std::size_t samples = 0;
};

inline constexpr std::size_t kOracleChunk = 8192;

/// Counts how often each vertex is the LP optimum over `samples` outcomes of
/// the ground truth. Chunk c of kOracleChunk draws uses
/// derive_seed(seed, "oracle-chunk", c), so serial and parallel runs agree
/// exactly for any thread count.
std::vector<std::size_t> count_optimal_vertices(const GroundTruth& truth, const VertexSet& vertices, Sense sense,
                                                std::size_t samples, Seed seed, Execution execution,
                                                int threads = 0);

OracleEstimate oracle_all_vertices(const Scenario& scenario, const VertexSet& vertices, std::size_t mc_samples,
                                   Seed seed, Execution execution = Execution::parallel, int threads = 0);

struct TrueRisk {
  double alpha = 1.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of P(pi(Y) != z). Non-vertex z returns exactly 1.
/// Requires mc_samples >= 1000.
TrueRisk true_risk_oracle(const Scenario& scenario, const Vector& z, const VertexSet& vertices,
                          std::size_t mc_samples, Seed seed);

// ---------------------------------------------------------------------------
// Metrics over aligned (estimate, truth) lists

double conservativeness_rate(const std::vector<double>& estimates, const std::vector<double>& truths);
/// Among pairs with truth < 1, the fraction with estimate < 1; 1 when no pair qualifies.
double true_positive_rate(const std::vector<double>& estimates, const std::vector<double>& truths);
/// 1 - mean |estimate - truth|, clipped to [0, 1].
double relative_accuracy(const std::vector<double>& estimates, const std::vector<double>& truths);

/// Mean rank of each decision by optimality frequency over the test outcomes.
/// Decisions are vertex indices aligned with the test rows; std::nullopt marks
/// a non-vertex decision, which receives rank |V|. Throws EmptyTestSet.
double confidence_ranking(const std::vector<std::optional<std::size_t>>& decisions, const Dataset& test_outcomes,
                          const VertexSet& vertices, Sense sense);
/// Same decision for every test row.
double confidence_ranking(std::optional<std::size_t> decision, const Dataset& test_outcomes,
                          const VertexSet& vertices, Sense sense);

struct MeanSem {
  double mean = 0.0;
  double sem = 0.0;
};

/// Mean and stddev / sqrt(T) (sample stddev); sem = 0 for a single value.
MeanSem mean_sem(const std::vector<double>& values);

// ---------------------------------------------------------------------------
// Trial runner

enum class Method { credo, point, ns, pto, ro, spo_plus };

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view text);
/// Estimators produce risk values; the rest are decision policies.
bool is_estimator(Method method);

struct ExperimentConfig {
  ModelKind model_kind = ModelKind::fitted;
  std::size_t component_count = 3;
  std::size_t em_max_iterations = 100;
  double em_tol = 1e-6;
  std::size_t draw_count = 100;         // K
  std::size_t calibration_size = 100;   // n
  std::size_t training_size = 100;      // m
  std::size_t test_size = 1000;
  std::size_t trials = 20;              // T
  std::size_t mc_samples = 100000;
  std::vector<Method> methods{Method::credo, Method::point, Method::ns};
  double ro_coverage = 0.9;
  std::size_t spo_epochs = 100;
  double spo_learning_rate = 0.1;
  Seed seed = 0;
  int threads = 1;

  /// Throws ConfigError.
  void validate() const;
};

struct TrialRecord {
  std::size_t trial = 0;
  /// alpha_hat per method (config order) and vertex. Decision policies report
  /// 0 for the chosen vertex and 1 elsewhere.
  std::vector<std::vector<double>> alpha_hat;
  std::vector<std::size_t> decision;  // per method
  std::vector<double> ranking;        // per method
};

struct MethodMetrics {
  Method method = Method::credo;
  std::optional<MeanSem> conservativeness_rate;
  std::optional<MeanSem> true_positive_rate;
  std::optional<MeanSem> relative_accuracy;
  std::optional<double> absolute_error_sum;
  MeanSem confidence_ranking;
  std::vector<double> mean_alpha_hat;          // per vertex
  std::vector<std::size_t> decision_counts;    // per vertex
};

struct MetricsReport {
  std::string scenario;
  std::size_t trial_count = 0;
  VertexSet vertices;
  OracleEstimate oracle;
  std::vector<MethodMetrics> methods;
  std::vector<TrialRecord> trials;

  const MethodMetrics* find(Method method) const;
};

/// Everything a trial needs besides its seed.
struct TrialContext {
  const Scenario& scenario;
  const ExperimentConfig& config;
  const VertexSet& vertices;
  const OracleEstimate& oracle;
};

/// One trial, seeded with derive_seed(config.seed, "trial", index).
TrialRecord run_trial(const TrialContext& context, std::size_t index);

/// Runs config.trials trials and reduces them in trial order. The parallel
/// path distributes trials over config.threads OpenMP workers; the output is
/// identical to the serial path. A failing trial aborts with TrialFailure
/// naming the lowest failing index.
MetricsReport run_trials(const Scenario& scenario, const ExperimentConfig& config,
                         Execution execution = Execution::parallel);

/// Per-trial estimator output used in the reductions, exposed for testing.
MetricsReport reduce_trials(const Scenario& scenario, const ExperimentConfig& config, VertexSet vertices,
                            OracleEstimate oracle, std::vector<TrialRecord> trials);

/// Fits or fixes the estimator's model for one trial.
GaussianMixture trial_model(const Scenario& scenario, const ExperimentConfig& config, const Dataset& training,
                            Seed seed);

}  // namespace credo
