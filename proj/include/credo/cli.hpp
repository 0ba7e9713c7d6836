#pragma once

#include "credo/experiments.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace credo {

struct ProblemBlock {
  Matrix constraint_matrix;
  Vector constraint_vector;
  Sense sense = Sense::minimize;
};

struct KnapsackBlock {
  Vector increment_rates;
  std::size_t history_rows = 168;
  double sharpness = 0.5;
};

/// Isotropic Gaussian mixture given in user-facing coordinates.
struct MixtureBlock {
  std::vector<double> weights;
  std::vector<Vector> means;
  std::vector<double> variances;

  GaussianMixture build() const;
};

struct RunConfig {
  /// setting_i, setting_ii, misspecified, knapsack or custom.
  std::string scenario = "setting_i";
  double sigma = 1.0;
  std::optional<ProblemBlock> problem;
  std::optional<KnapsackBlock> knapsack;
  std::optional<MixtureBlock> truth;
  std::optional<MixtureBlock> fixed_model;
  /// Unset means the scenario's default model kind.
  std::optional<ModelKind> model_kind;
  ExperimentConfig experiment;
  std::string output;
  std::string csv;

  /// Throws ConfigError.
  void validate() const;
};

/// Parses a config document. Unknown keys and out-of-range values throw ConfigError.
RunConfig parse_run_config(const nlohmann::json& document);
RunConfig load_run_config(const std::string& path);
nlohmann::json to_json(const RunConfig& config);

/// Builds the scenario the config describes; a problem block replaces the
/// scenario geometry. Throws ConfigError and the geometry errors of validate().
Scenario build_scenario(const RunConfig& config);
/// Experiment settings with the model kind resolved against the scenario.
ExperimentConfig resolve_experiment(const RunConfig& config, const Scenario& scenario);

struct CertificateSummary {
  Vector decision;
  std::optional<std::size_t> vertex_index;
  double alpha_hat = 1.0;
  std::size_t draw_count = 0;
  std::size_t calibration_size = 0;
  std::optional<double> alpha_true;
  std::optional<double> std_error;
};

struct ReportDocument {
  std::string command;
  RunConfig config;
  std::optional<MetricsReport> metrics;
  std::vector<CertificateSummary> certificates;
  std::string version;
  double duration_seconds = 0.0;
  /// Wall-clock fields are excluded from determinism checks.
  std::string generated_at;
};

nlohmann::json to_json(const MetricsReport& report);
MetricsReport metrics_from_json(const nlohmann::json& document);
nlohmann::json to_json(const ReportDocument& report);
ReportDocument report_from_json(const nlohmann::json& document);

/// `trial,method,vertex_index,alpha_hat,alpha_true` rows in trial, method, vertex order.
std::string experiment_csv(const MetricsReport& report);

/// Parses "v1,v2,...". Throws ConfigError.
Vector parse_decision(const std::string& text);

int cmd_vertices(const RunConfig& config, std::ostream& out);
int cmd_assess(const RunConfig& config, const Vector& decision, std::ostream& out);
int cmd_experiment(const RunConfig& config, std::ostream& out);
/// Without a decision, reports every vertex.
int cmd_oracle(const RunConfig& config, const std::optional<Vector>& decision, std::ostream& out);

/// Exit codes: 0 success, 2 configuration, 3 geometry, 4 runtime failure.
int exit_code_for(const std::exception& error);

/// Entry point behind tools/credo; usable in-process.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace credo
