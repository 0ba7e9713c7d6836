#include "credo/experiments.hpp"

#include "credo/error.hpp"
#include "credo/lp_oracle.hpp"
#include "credo/policies.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <type_traits>

namespace credo {

// ---------------------------------------------------------------------------
// Knapsack relaxation

Vector OutcomeTransform::apply(const Vector& raw) const {
  if (raw.size() != thresholds.size()) throw DimensionMismatch("raw increment dimension does not match thresholds");
  Vector out(raw.size());
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    out(i) = losses(i) / (1.0 + std::exp(-sharpness * (raw(i) - thresholds(i))));
  }
  return out;
}

Dataset OutcomeTransform::apply(const Dataset& raw) const {
  Matrix out(raw.outcomes().rows(), raw.outcomes().cols());
  for (std::size_t i = 0; i < raw.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = apply(raw.row(i)).transpose();
  return Dataset(std::move(out), raw.tags());
}

Dataset KnapsackTruth::sample(std::size_t count, Seed seed) const {
  const Eigen::Index d = increment_rates.size();
  Engine engine = make_engine(seed);
  std::vector<std::gamma_distribution<double>> gammas;
  for (Eigen::Index j = 0; j < d; ++j) gammas.emplace_back(increment_rates(j), 1.0);
  Matrix raw(static_cast<Eigen::Index>(count), d);
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) raw(i, j) = gammas[static_cast<std::size_t>(j)](engine);
  }
  return transform.apply(Dataset(std::move(raw)));
}

KnapsackSetting make_knapsack_setting(const Vector& increment_rates, std::size_t history_rows, Seed seed,
                                      double sharpness) {
  if (history_rows < 1) throw InvariantViolation("knapsack history needs at least one month");
  const Eigen::Index d = increment_rates.size();
  KnapsackSetting s;
  s.costs = Vector::Ones(d);
  s.losses = Vector::Ones(d);
  s.budget = 0.5 * s.costs.sum();
  s.sharpness = sharpness;
  s.increment_rates = increment_rates;

  // History is raw (untransformed) increments.
  KnapsackTruth raw_generator{increment_rates, {Vector::Zero(d), Vector::Ones(d), sharpness}};
  Engine engine = make_engine(derive_seed(seed, "knapsack-history"));
  Matrix raw(static_cast<Eigen::Index>(history_rows), d);
  for (Eigen::Index j = 0; j < d; ++j) {
    std::gamma_distribution<double> gamma(increment_rates(j), 1.0);
    for (Eigen::Index i = 0; i < raw.rows(); ++i) raw(i, j) = gamma(engine);
  }
  s.raw_increments = Dataset(std::move(raw));
  s.thresholds = s.raw_increments.mean();
  return s;
}

std::pair<Polytope, OutcomeTransform> knapsack_to_lp(const KnapsackSetting& setting) {
  const Eigen::Index d = setting.costs.size();
  if (d < 1) throw InvariantViolation("knapsack needs at least one item");
  if (setting.thresholds.size() != d || setting.losses.size() != d) {
    throw InvariantViolation("knapsack costs, thresholds and losses differ in length");
  }
  if ((setting.costs.array() <= 0.0).any()) throw InvariantViolation("knapsack costs must be positive");
  if (!(setting.budget > 0.0 && setting.budget < setting.costs.sum())) {
    throw InvariantViolation("knapsack budget must lie strictly between 0 and the total cost");
  }
  if (!(setting.sharpness > 0.0)) throw InvariantViolation("sigmoid sharpness must be positive");
  if ((setting.losses.array() < 0.0).any()) throw InvariantViolation("knapsack losses must be nonnegative");

  Matrix a(2 * d + 1, d);
  Vector b(2 * d + 1);
  a.row(0) = -setting.costs.transpose();
  b(0) = setting.budget - setting.costs.sum();
  a.middleRows(1, d) = Matrix::Identity(d, d);
  b.segment(1, d) = Vector::Ones(d);
  a.bottomRows(d) = -Matrix::Identity(d, d);
  b.tail(d) = Vector::Zero(d);
  return {Polytope::validate(std::move(a), std::move(b), Sense::minimize),
          OutcomeTransform{setting.thresholds, setting.losses, setting.sharpness}};
}

// ---------------------------------------------------------------------------
// Scenarios

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::known: return "known";
    case ModelKind::fitted: return "fitted";
    case ModelKind::point: return "point";
    case ModelKind::misspecified: return "misspecified";
  }
  return "fitted";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) {
  for (ModelKind k : {ModelKind::known, ModelKind::fitted, ModelKind::point, ModelKind::misspecified}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

Dataset GroundTruth::sample(std::size_t count, Seed seed) const {
  return std::visit([&](const auto& t) { return t.sample(count, seed); }, impl_);
}

Eigen::Index GroundTruth::dimension() const {
  return std::visit(
      [](const auto& t) -> Eigen::Index {
        if constexpr (std::is_same_v<std::decay_t<decltype(t)>, GaussianMixture>) {
          return t.dimension();
        } else {
          return t.increment_rates.size();
        }
      },
      impl_);
}

namespace {

Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

Polytope triangle() {
  Matrix a(3, 2);
  a << 1, 1, -1, 0, 0, -1;
  Vector b(3);
  b << 1, 0, 0;
  return Polytope::validate(std::move(a), std::move(b), Sense::maximize);
}

void require_sigma(double sigma) {
  if (!(sigma > 0.0)) throw InvariantViolation("variance scale sigma must be positive");
}

}  // namespace

Scenario make_setting_i(double sigma) {
  require_sigma(sigma);
  return Scenario{triangle(), GaussianMixture::isotropic({1.0}, {vec2(-1.0, -1.0)}, {sigma}), ModelKind::fitted,
                  std::nullopt, sigma, "setting_i"};
}

Scenario make_setting_ii(double sigma) {
  require_sigma(sigma);
  Matrix a(8, 2);
  a << -0.5, -1,  //
      0, -1,      //
      -0.5, 1,    //
      0.5, 1,     //
      2, -1,      //
      1, 0,       //
      0, 1,       //
      -1, 0;
  Vector b(8);
  b << -1, 0, 1, 5, 10, 5.5, 2.5, -1;
  const std::array<double, 3> component_sd{0.01, 0.03, 0.02};
  std::vector<double> variances;
  for (double s : component_sd) variances.push_back(sigma * s * s);
  GaussianMixture truth = GaussianMixture::isotropic({0.3, 0.4, 0.3}, {vec2(0.0, -0.8), vec2(-0.5, 0.25), vec2(0.8, -0.1)},
                                                     variances);
  return Scenario{Polytope::validate(std::move(a), std::move(b), Sense::maximize), std::move(truth),
                  ModelKind::fitted, std::nullopt, sigma, "setting_ii"};
}

Scenario make_misspecified(double sigma) {
  require_sigma(sigma);
  const std::vector<Vector> means{vec2(-0.5, 0.0), vec2(0.5, 0.0)};
  GaussianMixture real = GaussianMixture::isotropic({0.4, 0.6}, means, {sigma, sigma});
  GaussianMixture model = GaussianMixture::isotropic({0.6, 0.4}, means, {sigma, sigma});
  return Scenario{triangle(), std::move(real), ModelKind::misspecified, std::move(model), sigma, "misspecified"};
}

Scenario make_knapsack(const KnapsackSetting& setting) {
  auto [polytope, transform] = knapsack_to_lp(setting);
  return Scenario{std::move(polytope), KnapsackTruth{setting.increment_rates, std::move(transform)},
                  ModelKind::fitted, std::nullopt, 1.0, "knapsack"};
}

Scenario make_default_knapsack(Seed seed) {
  Vector rates(4);
  rates << 6.0, 3.5, 8.0, 4.5;
  return make_knapsack(make_knapsack_setting(rates, 168, seed));
}

// ---------------------------------------------------------------------------
// Ground truth oracle

namespace {

void count_chunk(const GroundTruth& truth, const VertexSet& vertices, Sense sense, std::size_t chunk,
                 std::size_t size, Seed seed, std::vector<std::size_t>& counts) {
  const Dataset draws = truth.sample(size, derive_seed(seed, "oracle-chunk", chunk));
  for (std::size_t i = 0; i < draws.size(); ++i) {
    ++counts[solve_index(canonicalize_objective(draws.row(i), sense), vertices)];
  }
}

int resolve_threads(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

}  // namespace

std::vector<std::size_t> count_optimal_vertices(const GroundTruth& truth, const VertexSet& vertices, Sense sense,
                                                std::size_t samples, Seed seed, Execution execution, int threads) {
  const std::size_t chunks = (samples + kOracleChunk - 1) / kOracleChunk;
  auto chunk_size = [&](std::size_t c) { return std::min(kOracleChunk, samples - c * kOracleChunk); };
  std::vector<std::size_t> counts(vertices.size(), 0);

  if (execution == Execution::serial) {
    for (std::size_t c = 0; c < chunks; ++c) count_chunk(truth, vertices, sense, c, chunk_size(c), seed, counts);
    return counts;
  }

  std::vector<std::vector<std::size_t>> partial(chunks, std::vector<std::size_t>(vertices.size(), 0));
  const auto n_chunks = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(threads))
  for (std::ptrdiff_t c = 0; c < n_chunks; ++c) {
    const auto cu = static_cast<std::size_t>(c);
    count_chunk(truth, vertices, sense, cu, chunk_size(cu), seed, partial[cu]);
  }
  for (const auto& p : partial) {
    for (std::size_t v = 0; v < counts.size(); ++v) counts[v] += p[v];
  }
  return counts;
}

OracleEstimate oracle_all_vertices(const Scenario& scenario, const VertexSet& vertices, std::size_t mc_samples,
                                   Seed seed, Execution execution, int threads) {
  if (mc_samples < 1000) throw InvariantViolation("the Monte Carlo oracle needs at least 1000 samples");
  OracleEstimate est;
  est.samples = mc_samples;
  est.optimal_counts =
      count_optimal_vertices(scenario.truth, vertices, scenario.polytope.sense(), mc_samples, seed, execution, threads);
  const auto n = static_cast<double>(mc_samples);
  for (std::size_t count : est.optimal_counts) {
    const double p = static_cast<double>(count) / n;
    est.alpha_true.push_back(1.0 - p);
    est.std_error.push_back(std::sqrt(p * (1.0 - p) / n));
  }
  return est;
}

TrueRisk true_risk_oracle(const Scenario& scenario, const Vector& z, const VertexSet& vertices,
                          std::size_t mc_samples, Seed seed) {
  if (mc_samples < 1000) throw InvariantViolation("the Monte Carlo oracle needs at least 1000 samples");
  const DecisionClass cls = classify_decision(z, vertices, vertices.tolerance());
  if (!cls.is_vertex()) return {1.0, 0.0};
  const OracleEstimate est = oracle_all_vertices(scenario, vertices, mc_samples, seed);
  return {est.alpha_true[*cls.vertex_index], est.std_error[*cls.vertex_index]};
}

// ---------------------------------------------------------------------------
// Metrics

namespace {

void require_aligned(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw LengthMismatch("estimate list has " + std::to_string(a.size()) + " entries, truth list has " +
                         std::to_string(b.size()));
  }
}

}  // namespace

double conservativeness_rate(const std::vector<double>& estimates, const std::vector<double>& truths) {
  require_aligned(estimates, truths);
  if (estimates.empty()) return 1.0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < estimates.size(); ++i) ok += estimates[i] >= truths[i] ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(estimates.size());
}

double true_positive_rate(const std::vector<double>& estimates, const std::vector<double>& truths) {
  require_aligned(estimates, truths);
  std::size_t viable = 0;
  std::size_t detected = 0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (truths[i] < 1.0) {
      ++viable;
      detected += estimates[i] < 1.0 ? 1 : 0;
    }
  }
  return viable == 0 ? 1.0 : static_cast<double>(detected) / static_cast<double>(viable);
}

double relative_accuracy(const std::vector<double>& estimates, const std::vector<double>& truths) {
  require_aligned(estimates, truths);
  if (estimates.empty()) return 1.0;
  double err = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) err += std::abs(estimates[i] - truths[i]);
  return std::clamp(1.0 - err / static_cast<double>(estimates.size()), 0.0, 1.0);
}

double confidence_ranking(const std::vector<std::optional<std::size_t>>& decisions, const Dataset& test_outcomes,
                          const VertexSet& vertices, Sense sense) {
  if (test_outcomes.empty()) throw EmptyTestSet("confidence ranking needs at least one test outcome");
  if (decisions.size() != test_outcomes.size()) {
    throw LengthMismatch("one policy decision per test outcome is required");
  }
  std::vector<std::size_t> counts(vertices.size(), 0);
  for (std::size_t i = 0; i < test_outcomes.size(); ++i) {
    ++counts[solve_index(canonicalize_objective(test_outcomes.row(i), sense), vertices)];
  }
  double total = 0.0;
  for (const auto& decision : decisions) {
    const std::size_t own = decision && *decision < counts.size() ? counts[*decision] : 0;
    total += static_cast<double>(std::count_if(counts.begin(), counts.end(), [&](std::size_t c) { return c >= own; }));
  }
  return total / static_cast<double>(decisions.size());
}

double confidence_ranking(std::optional<std::size_t> decision, const Dataset& test_outcomes,
                          const VertexSet& vertices, Sense sense) {
  return confidence_ranking(std::vector<std::optional<std::size_t>>(test_outcomes.size(), decision), test_outcomes,
                            vertices, sense);
}

MeanSem mean_sem(const std::vector<double>& values) {
  if (values.empty()) return {};
  const auto t = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / t;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (t - 1.0)) / std::sqrt(t)};
}

// ---------------------------------------------------------------------------
// Trial runner

std::string_view to_string(Method method) {
  switch (method) {
    case Method::credo: return "credo";
    case Method::point: return "point";
    case Method::ns: return "ns";
    case Method::pto: return "pto";
    case Method::ro: return "ro";
    case Method::spo_plus: return "spo_plus";
  }
  return "credo";
}

std::optional<Method> parse_method(std::string_view text) {
  for (Method m : {Method::credo, Method::point, Method::ns, Method::pto, Method::ro, Method::spo_plus}) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

bool is_estimator(Method method) {
  return method == Method::credo || method == Method::point || method == Method::ns;
}

void ExperimentConfig::validate() const {
  if (draw_count < 1) throw ConfigError("K (draw count) must be at least 1");
  if (calibration_size < 1) throw ConfigError("calibration size n must be at least 1");
  if (trials < 1) throw ConfigError("trial count T must be at least 1");
  if (test_size < 1) throw ConfigError("test size must be at least 1");
  if (mc_samples < 1000) throw ConfigError("mc_samples must be at least 1000");
  if (component_count < 1) throw ConfigError("component count must be at least 1");
  if (methods.empty()) throw ConfigError("at least one method is required");
  if (!(ro_coverage >= 0.0 && ro_coverage <= 1.0)) throw ConfigError("ro_coverage must lie in [0, 1]");
  if (!(spo_learning_rate > 0.0)) throw ConfigError("spo_learning_rate must be positive");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  for (Method m : methods) {
    if (m == Method::pto || m == Method::spo_plus || m == Method::ro || model_kind == ModelKind::fitted ||
        model_kind == ModelKind::point) {
      if (training_size < 1) throw ConfigError("training size m must be at least 1");
    }
    if (model_kind == ModelKind::fitted && training_size < component_count) {
      throw ConfigError("training size must be at least the component count");
    }
  }
}

GaussianMixture trial_model(const Scenario& scenario, const ExperimentConfig& config, const Dataset& training,
                            Seed seed) {
  switch (config.model_kind) {
    case ModelKind::known:
      if (!scenario.truth.mixture()) throw ConfigError("a known model requires a Gaussian mixture ground truth");
      return *scenario.truth.mixture();
    case ModelKind::misspecified:
      if (!scenario.fixed_model) throw ConfigError("scenario has no fixed misspecified model");
      return *scenario.fixed_model;
    case ModelKind::point:
      return GaussianMixture::point_mass(training.mean());
    case ModelKind::fitted:
      break;
  }
  return fit_em(training, config.component_count, config.em_max_iterations, config.em_tol, seed);
}

TrialRecord run_trial(const TrialContext& ctx, std::size_t index) {
  const Scenario& sc = ctx.scenario;
  const ExperimentConfig& cfg = ctx.config;
  const VertexSet& vertices = ctx.vertices;
  const Sense sense = sc.polytope.sense();
  const Seed seed = derive_seed(cfg.seed, "trial", index);
  const std::size_t nv = vertices.size();

  const Dataset training = sc.truth.sample(cfg.training_size, derive_seed(seed, "train"));
  const Dataset calibration_data = sc.truth.sample(cfg.calibration_size, derive_seed(seed, "calibration"));
  const Dataset test = sc.truth.sample(cfg.test_size, derive_seed(seed, "test"));

  const bool needs_model = std::any_of(cfg.methods.begin(), cfg.methods.end(), is_estimator);
  // Estimators work in canonical objective space.
  const Dataset canonical_calibration = canonicalize_dataset(calibration_data, sense);
  std::optional<GaussianMixture> model;
  std::optional<CalibrationSet> calibration;
  if (needs_model) {
    model = canonicalize_model(trial_model(sc, cfg, training, derive_seed(seed, "em")), sense);
    calibration = calibrate(*model, canonical_calibration, derive_seed(seed, "calibrate"));
  }

  TrialRecord rec;
  rec.trial = index;
  for (Method method : cfg.methods) {
    std::vector<double> alphas(nv, 1.0);
    std::size_t decision = 0;
    switch (method) {
      case Method::credo: {
        const Seed s = derive_seed(seed, "credo");
        for (std::size_t i = 0; i < nv; ++i) {
          alphas[i] = credo_assess(*model, *calibration, vertices[i], vertices, cfg.draw_count,
                                   derive_seed(s, "vertex", i))
                          .alpha_hat;
        }
        decision = argmin_risk(alphas);
        break;
      }
      case Method::point: {
        const Vector location = model->mean();
        const CalibrationSet point_cal =
            calibrate(GaussianMixture::point_mass(location), canonical_calibration, derive_seed(seed, "calibrate-point"));
        for (std::size_t i = 0; i < nv; ++i) {
          alphas[i] = point_assess(location, point_cal, vertices[i], vertices).alpha_hat;
        }
        decision = argmin_risk(alphas);
        break;
      }
      case Method::ns: {
        const Seed s = derive_seed(seed, "ns");
        for (std::size_t i = 0; i < nv; ++i) {
          alphas[i] = ns_assess(*model, vertices[i], vertices, cfg.draw_count, derive_seed(s, "vertex", i));
        }
        decision = argmin_risk(alphas);
        break;
      }
      case Method::pto:
        decision = *pto_decide(training, vertices, sense).vertex_index;
        break;
      case Method::ro:
        decision = *ro_decide_box(conformal_box(training, calibration_data, sense, cfg.ro_coverage), vertices)
                        .vertex_index;
        break;
      case Method::spo_plus: {
        const LinearPredictor p = spo_plus_train(training, vertices, sense, cfg.spo_epochs, cfg.spo_learning_rate);
        decision = *spo_plus_decide(p, vertices).vertex_index;
        break;
      }
    }
    if (!is_estimator(method)) {
      alphas.assign(nv, 1.0);
      alphas[decision] = 0.0;
    }
    rec.alpha_hat.push_back(std::move(alphas));
    rec.decision.push_back(decision);
    rec.ranking.push_back(confidence_ranking(decision, test, vertices, sense));
  }
  return rec;
}

MetricsReport reduce_trials(const Scenario& scenario, const ExperimentConfig& config, VertexSet vertices,
                            OracleEstimate oracle, std::vector<TrialRecord> trials) {
  MetricsReport report;
  report.scenario = scenario.label;
  report.trial_count = trials.size();
  const std::size_t nv = vertices.size();
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    MethodMetrics mm;
    mm.method = config.methods[m];
    mm.mean_alpha_hat.assign(nv, 0.0);
    mm.decision_counts.assign(nv, 0);
    std::vector<double> cons, tpr, acc, rank;
    double abs_err = 0.0;
    for (const TrialRecord& t : trials) {
      const auto& est = t.alpha_hat[m];
      for (std::size_t v = 0; v < nv; ++v) {
        mm.mean_alpha_hat[v] += est[v] / static_cast<double>(trials.size());
        abs_err += std::abs(est[v] - oracle.alpha_true[v]);
      }
      ++mm.decision_counts[t.decision[m]];
      cons.push_back(conservativeness_rate(est, oracle.alpha_true));
      tpr.push_back(true_positive_rate(est, oracle.alpha_true));
      acc.push_back(relative_accuracy(est, oracle.alpha_true));
      rank.push_back(t.ranking[m]);
    }
    if (is_estimator(mm.method)) {
      mm.conservativeness_rate = mean_sem(cons);
      mm.true_positive_rate = mean_sem(tpr);
      mm.relative_accuracy = mean_sem(acc);
      mm.absolute_error_sum = abs_err;
    }
    mm.confidence_ranking = mean_sem(rank);
    report.methods.push_back(std::move(mm));
  }
  report.vertices = std::move(vertices);
  report.oracle = std::move(oracle);
  report.trials = std::move(trials);
  return report;
}

MetricsReport run_trials(const Scenario& scenario, const ExperimentConfig& config, Execution execution) {
  config.validate();
  VertexSet vertices = enumerate_vertices(scenario.polytope);
  OracleEstimate oracle = oracle_all_vertices(scenario, vertices, config.mc_samples,
                                              derive_seed(config.seed, "oracle"), execution, config.threads);
  const TrialContext ctx{scenario, config, vertices, oracle};

  std::vector<TrialRecord> records(config.trials);
  std::vector<std::optional<std::string>> failures(config.trials);
  auto run_one = [&](std::size_t t) {
    try {
      records[t] = run_trial(ctx, t);
    } catch (const std::exception& e) {
      failures[t] = e.what();
    }
  };

  if (execution == Execution::serial) {
    for (std::size_t t = 0; t < config.trials; ++t) run_one(t);
  } else {
    const auto n = static_cast<std::ptrdiff_t>(config.trials);
#pragma omp parallel for schedule(dynamic, 1) num_threads(config.threads)
    for (std::ptrdiff_t t = 0; t < n; ++t) run_one(static_cast<std::size_t>(t));
  }

  for (std::size_t t = 0; t < failures.size(); ++t) {
    if (failures[t]) throw TrialFailure(t, *failures[t]);
  }
  return reduce_trials(scenario, config, std::move(vertices), std::move(oracle), std::move(records));
}

const MethodMetrics* MetricsReport::find(Method method) const {
  for (const auto& m : methods) {
    if (m.method == method) return &m;
  }
  return nullptr;
}

}  // namespace credo
