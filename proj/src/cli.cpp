#include "credo/cli.hpp"

#include "credo/error.hpp"
#include "credo/lp_oracle.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#ifndef CREDO_VERSION
#define CREDO_VERSION "0.0.0"
#endif

namespace credo {

using nlohmann::json;

// ---------------------------------------------------------------------------
// JSON helpers

namespace {

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json vectors_json(const std::vector<Vector>& vs) {
  json out = json::array();
  for (const auto& v : vs) out.push_back(vector_json(v));
  return out;
}

Vector vector_from(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(what + " must contain only numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

std::vector<Vector> vectors_from(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be an array of arrays");
  std::vector<Vector> out;
  for (const auto& row : j) out.push_back(vector_from(row, what));
  return out;
}

std::vector<double> doubles_from(const json& j, const std::string& what) {
  const Vector v = vector_from(j, what);
  return {v.data(), v.data() + v.size()};
}

void reject_unknown(const json& block, const std::string& name, std::initializer_list<const char*> keys) {
  if (!block.is_object()) throw ConfigError("'" + name + "' must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : block.items()) {
    if (!allowed.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in '" + name + "'");
  }
}

template <typename T>
void read(const json& block, const char* key, T& target, const std::string& where) {
  if (!block.contains(key)) return;
  try {
    target = block.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("'" + where + "." + key + "' has the wrong type");
  }
}

std::size_t read_count(const json& block, const char* key, std::size_t fallback, const std::string& where) {
  if (!block.contains(key)) return fallback;
  const json& v = block.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError("'" + where + "." + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

std::string_view sense_name(Sense s) { return s == Sense::maximize ? "maximize" : "minimize"; }

Sense parse_sense(const std::string& text) {
  if (text == "maximize" || text == "max") return Sense::maximize;
  if (text == "minimize" || text == "min") return Sense::minimize;
  throw ConfigError("sense must be 'minimize' or 'maximize', got '" + text + "'");
}

json mixture_json(const MixtureBlock& m) {
  return {{"weights", m.weights}, {"means", vectors_json(m.means)}, {"variances", m.variances}};
}

MixtureBlock mixture_from(const json& j, const std::string& name) {
  reject_unknown(j, name, {"weights", "means", "variances"});
  if (!j.contains("weights") || !j.contains("means") || !j.contains("variances")) {
    throw ConfigError("'" + name + "' needs weights, means and variances");
  }
  return {doubles_from(j["weights"], name + ".weights"), vectors_from(j["means"], name + ".means"),
          doubles_from(j["variances"], name + ".variances")};
}

json mean_sem_json(const MeanSem& m) { return {{"mean", m.mean}, {"sem", m.sem}}; }

MeanSem mean_sem_from(const json& j) { return {j.at("mean").get<double>(), j.at("sem").get<double>()}; }

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<std::size_t> optional_index(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::size_t>();
}

std::optional<double> optional_double(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_short(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

std::string format_point(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v(i));
    s += buf;
  }
  return s + ")";
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

GaussianMixture MixtureBlock::build() const {
  try {
    return GaussianMixture::isotropic(weights, means, variances);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid mixture: ") + e.what());
  }
}

void RunConfig::validate() const {
  static const std::set<std::string> scenarios{"setting_i", "setting_ii", "misspecified", "knapsack", "custom"};
  if (!scenarios.count(scenario)) throw ConfigError("unknown scenario '" + scenario + "'");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be a positive finite number");
  if (scenario == "custom" && !problem) throw ConfigError("a custom scenario needs a problem block");
  if (problem) {
    if (problem->constraint_matrix.rows() != problem->constraint_vector.size()) {
      throw ConfigError("problem.A and problem.b have different row counts");
    }
  }
  if (knapsack && scenario != "knapsack") throw ConfigError("a knapsack block requires scenario 'knapsack'");
  experiment.validate();
}

RunConfig parse_run_config(const json& doc) {
  reject_unknown(doc, "config", {"seed", "output", "csv", "problem", "truth", "model", "credo", "experiment"});
  RunConfig cfg;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ConfigError("'seed' must be an unsigned integer");
    cfg.experiment.seed = doc["seed"].get<Seed>();
  }
  read(doc, "output", cfg.output, "config");
  read(doc, "csv", cfg.csv, "config");

  if (doc.contains("problem")) {
    const json& p = doc["problem"];
    if (p.is_object() && p.contains("knapsack")) {
      reject_unknown(p, "problem", {"knapsack"});
      const json& k = p["knapsack"];
      reject_unknown(k, "problem.knapsack", {"rates", "history_rows", "sharpness"});
      KnapsackBlock kb;
      if (!k.contains("rates")) throw ConfigError("'problem.knapsack' needs rates");
      kb.increment_rates = vector_from(k["rates"], "problem.knapsack.rates");
      kb.history_rows = read_count(k, "history_rows", kb.history_rows, "problem.knapsack");
      read(k, "sharpness", kb.sharpness, "problem.knapsack");
      if ((kb.increment_rates.array() <= 0.0).any()) throw ConfigError("knapsack rates must be positive");
      cfg.knapsack = kb;
      cfg.scenario = "knapsack";
    } else {
      reject_unknown(p, "problem", {"A", "b", "sense"});
      if (!p.contains("A") || !p.contains("b")) throw ConfigError("'problem' needs A and b");
      const std::vector<Vector> rows = vectors_from(p["A"], "problem.A");
      ProblemBlock pb;
      const Eigen::Index d = rows.empty() ? 0 : rows.front().size();
      pb.constraint_matrix.resize(static_cast<Eigen::Index>(rows.size()), d);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != d) throw ConfigError("rows of problem.A differ in length");
        pb.constraint_matrix.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
      }
      pb.constraint_vector = vector_from(p["b"], "problem.b");
      std::string sense = "minimize";
      read(p, "sense", sense, "problem");
      pb.sense = parse_sense(sense);
      cfg.problem = pb;
      cfg.scenario = "custom";
    }
  }
  if (doc.contains("truth")) cfg.truth = mixture_from(doc["truth"], "truth");

  ExperimentConfig& ex = cfg.experiment;
  if (doc.contains("model")) {
    const json& m = doc["model"];
    reject_unknown(m, "model", {"kind", "component_count", "em_max_iterations", "em_tol", "fixed"});
    if (m.contains("kind")) {
      std::string kind;
      read(m, "kind", kind, "model");
      cfg.model_kind = parse_model_kind(kind);
      if (!cfg.model_kind) throw ConfigError("unknown model kind '" + kind + "'");
    }
    ex.component_count = read_count(m, "component_count", ex.component_count, "model");
    ex.em_max_iterations = read_count(m, "em_max_iterations", ex.em_max_iterations, "model");
    read(m, "em_tol", ex.em_tol, "model");
    if (m.contains("fixed")) cfg.fixed_model = mixture_from(m["fixed"], "model.fixed");
  }
  if (doc.contains("credo")) {
    const json& c = doc["credo"];
    reject_unknown(c, "credo", {"K", "calibration_size"});
    ex.draw_count = read_count(c, "K", ex.draw_count, "credo");
    ex.calibration_size = read_count(c, "calibration_size", ex.calibration_size, "credo");
  }
  if (doc.contains("experiment")) {
    const json& e = doc["experiment"];
    reject_unknown(e, "experiment",
                   {"scenario", "sigma", "trials", "mc_samples", "methods", "ro_coverage", "training_size",
                    "test_size", "spo_epochs", "spo_learning_rate", "threads"});
    read(e, "scenario", cfg.scenario, "experiment");
    read(e, "sigma", cfg.sigma, "experiment");
    ex.trials = read_count(e, "trials", ex.trials, "experiment");
    ex.mc_samples = read_count(e, "mc_samples", ex.mc_samples, "experiment");
    ex.training_size = read_count(e, "training_size", ex.training_size, "experiment");
    ex.test_size = read_count(e, "test_size", ex.test_size, "experiment");
    ex.spo_epochs = read_count(e, "spo_epochs", ex.spo_epochs, "experiment");
    read(e, "ro_coverage", ex.ro_coverage, "experiment");
    read(e, "spo_learning_rate", ex.spo_learning_rate, "experiment");
    read(e, "threads", ex.threads, "experiment");
    if (e.contains("methods")) {
      if (!e["methods"].is_array()) throw ConfigError("'experiment.methods' must be an array");
      ex.methods.clear();
      for (const auto& name : e["methods"]) {
        const auto method = name.is_string() ? parse_method(name.get<std::string>()) : std::nullopt;
        if (!method) throw ConfigError("unknown method " + name.dump());
        ex.methods.push_back(*method);
      }
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(doc);
}

json to_json(const RunConfig& cfg) {
  const ExperimentConfig& ex = cfg.experiment;
  json doc;
  doc["seed"] = ex.seed;
  if (!cfg.output.empty()) doc["output"] = cfg.output;
  if (!cfg.csv.empty()) doc["csv"] = cfg.csv;
  if (cfg.problem) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < cfg.problem->constraint_matrix.rows(); ++i) {
      rows.push_back(vector_json(cfg.problem->constraint_matrix.row(i).transpose()));
    }
    doc["problem"] = {{"A", rows},
                      {"b", vector_json(cfg.problem->constraint_vector)},
                      {"sense", std::string(sense_name(cfg.problem->sense))}};
  } else if (cfg.knapsack) {
    doc["problem"] = {{"knapsack",
                       {{"rates", vector_json(cfg.knapsack->increment_rates)},
                        {"history_rows", cfg.knapsack->history_rows},
                        {"sharpness", cfg.knapsack->sharpness}}}};
  }
  if (cfg.truth) doc["truth"] = mixture_json(*cfg.truth);
  json model = {{"component_count", ex.component_count},
                {"em_max_iterations", ex.em_max_iterations},
                {"em_tol", ex.em_tol}};
  if (cfg.model_kind) model["kind"] = std::string(to_string(*cfg.model_kind));
  if (cfg.fixed_model) model["fixed"] = mixture_json(*cfg.fixed_model);
  doc["model"] = model;
  doc["credo"] = {{"K", ex.draw_count}, {"calibration_size", ex.calibration_size}};
  json methods = json::array();
  for (Method m : ex.methods) methods.push_back(std::string(to_string(m)));
  doc["experiment"] = {{"scenario", cfg.scenario},
                       {"sigma", cfg.sigma},
                       {"trials", ex.trials},
                       {"mc_samples", ex.mc_samples},
                       {"methods", methods},
                       {"ro_coverage", ex.ro_coverage},
                       {"training_size", ex.training_size},
                       {"test_size", ex.test_size},
                       {"spo_epochs", ex.spo_epochs},
                       {"spo_learning_rate", ex.spo_learning_rate},
                       {"threads", ex.threads}};
  return doc;
}

Scenario build_scenario(const RunConfig& cfg) {
  cfg.validate();
  std::optional<Scenario> sc;
  if (cfg.scenario == "setting_i") {
    sc = make_setting_i(cfg.sigma);
  } else if (cfg.scenario == "setting_ii") {
    sc = make_setting_ii(cfg.sigma);
  } else if (cfg.scenario == "misspecified") {
    sc = make_misspecified(cfg.sigma);
  } else if (cfg.scenario == "knapsack") {
    if (cfg.knapsack) {
      sc = make_knapsack(make_knapsack_setting(cfg.knapsack->increment_rates, cfg.knapsack->history_rows,
                                               cfg.experiment.seed, cfg.knapsack->sharpness));
    } else {
      sc = make_default_knapsack(cfg.experiment.seed);
    }
  }

  if (cfg.problem) {
    Polytope polytope = Polytope::validate(cfg.problem->constraint_matrix, cfg.problem->constraint_vector,
                                           cfg.problem->sense);
    if (sc) {
      sc->polytope = std::move(polytope);
    } else {
      const Eigen::Index d = polytope.dimension();
      // Placeholder truth; commands that need one check cfg.truth.
      sc = Scenario{std::move(polytope), GaussianMixture::point_mass(Vector::Zero(d)), ModelKind::fitted,
                    std::nullopt, cfg.sigma, "custom"};
    }
  }
  if (cfg.truth) sc->truth = cfg.truth->build();
  if (cfg.fixed_model) sc->fixed_model = cfg.fixed_model->build();
  if (sc->truth.dimension() != sc->polytope.dimension()) {
    throw ConfigError("ground truth dimension does not match the problem dimension");
  }
  if (sc->fixed_model && sc->fixed_model->dimension() != sc->polytope.dimension()) {
    throw ConfigError("fixed model dimension does not match the problem dimension");
  }
  return *std::move(sc);
}

ExperimentConfig resolve_experiment(const RunConfig& cfg, const Scenario& scenario) {
  ExperimentConfig ex = cfg.experiment;
  ex.model_kind = cfg.model_kind.value_or(scenario.model_kind);
  if (ex.model_kind == ModelKind::misspecified && !scenario.fixed_model) {
    throw ConfigError("model kind 'misspecified' needs model.fixed or the misspecified scenario");
  }
  if (ex.model_kind == ModelKind::known && !scenario.truth.mixture()) {
    throw ConfigError("model kind 'known' needs a Gaussian mixture ground truth");
  }
  ex.validate();
  return ex;
}

// ---------------------------------------------------------------------------
// Reports

json to_json(const MetricsReport& r) {
  json methods = json::array();
  for (const auto& m : r.methods) {
    json jm = {{"method", std::string(to_string(m.method))},
               {"confidence_ranking", mean_sem_json(m.confidence_ranking)},
               {"mean_alpha_hat", m.mean_alpha_hat},
               {"decision_counts", m.decision_counts},
               {"absolute_error_sum", optional_json(m.absolute_error_sum)}};
    jm["conservativeness_rate"] = m.conservativeness_rate ? mean_sem_json(*m.conservativeness_rate) : json(nullptr);
    jm["true_positive_rate"] = m.true_positive_rate ? mean_sem_json(*m.true_positive_rate) : json(nullptr);
    jm["relative_accuracy"] = m.relative_accuracy ? mean_sem_json(*m.relative_accuracy) : json(nullptr);
    methods.push_back(jm);
  }
  json trials = json::array();
  for (const auto& t : r.trials) {
    trials.push_back({{"trial", t.trial}, {"alpha_hat", t.alpha_hat}, {"decision", t.decision},
                      {"ranking", t.ranking}});
  }
  return {{"scenario", r.scenario},
          {"trial_count", r.trial_count},
          {"vertex_tolerance", r.vertices.tolerance()},
          {"vertices", vectors_json(r.vertices.vertices())},
          {"oracle",
           {{"alpha_true", r.oracle.alpha_true},
            {"std_error", r.oracle.std_error},
            {"optimal_counts", r.oracle.optimal_counts},
            {"samples", r.oracle.samples}}},
          {"methods", methods},
          {"trials", trials}};
}

MetricsReport metrics_from_json(const json& j) {
  MetricsReport r;
  r.scenario = j.at("scenario").get<std::string>();
  r.trial_count = j.at("trial_count").get<std::size_t>();
  r.vertices = VertexSet(vectors_from(j.at("vertices"), "vertices"), j.at("vertex_tolerance").get<double>());
  const json& o = j.at("oracle");
  r.oracle.alpha_true = o.at("alpha_true").get<std::vector<double>>();
  r.oracle.std_error = o.at("std_error").get<std::vector<double>>();
  r.oracle.optimal_counts = o.at("optimal_counts").get<std::vector<std::size_t>>();
  r.oracle.samples = o.at("samples").get<std::size_t>();
  for (const auto& jm : j.at("methods")) {
    MethodMetrics m;
    const auto method = parse_method(jm.at("method").get<std::string>());
    if (!method) throw ConfigError("unknown method in report");
    m.method = *method;
    m.confidence_ranking = mean_sem_from(jm.at("confidence_ranking"));
    m.mean_alpha_hat = jm.at("mean_alpha_hat").get<std::vector<double>>();
    m.decision_counts = jm.at("decision_counts").get<std::vector<std::size_t>>();
    m.absolute_error_sum = optional_double(jm.at("absolute_error_sum"));
    if (!jm.at("conservativeness_rate").is_null()) m.conservativeness_rate = mean_sem_from(jm["conservativeness_rate"]);
    if (!jm.at("true_positive_rate").is_null()) m.true_positive_rate = mean_sem_from(jm["true_positive_rate"]);
    if (!jm.at("relative_accuracy").is_null()) m.relative_accuracy = mean_sem_from(jm["relative_accuracy"]);
    r.methods.push_back(std::move(m));
  }
  for (const auto& jt : j.at("trials")) {
    TrialRecord t;
    t.trial = jt.at("trial").get<std::size_t>();
    t.alpha_hat = jt.at("alpha_hat").get<std::vector<std::vector<double>>>();
    t.decision = jt.at("decision").get<std::vector<std::size_t>>();
    t.ranking = jt.at("ranking").get<std::vector<double>>();
    r.trials.push_back(std::move(t));
  }
  return r;
}

json to_json(const ReportDocument& r) {
  json certs = json::array();
  for (const auto& c : r.certificates) {
    certs.push_back({{"decision", vector_json(c.decision)},
                     {"vertex_index", optional_json(c.vertex_index)},
                     {"alpha_hat", c.alpha_hat},
                     {"confidence", 1.0 - c.alpha_hat},
                     {"draw_count", c.draw_count},
                     {"calibration_size", c.calibration_size},
                     {"alpha_true", optional_json(c.alpha_true)},
                     {"std_error", optional_json(c.std_error)}});
  }
  return {{"command", r.command},
          {"version", r.version},
          {"config", to_json(r.config)},
          {"metrics", r.metrics ? to_json(*r.metrics) : json(nullptr)},
          {"certificates", certs},
          {"duration_seconds", r.duration_seconds},
          {"generated_at", r.generated_at}};
}

ReportDocument report_from_json(const json& j) {
  ReportDocument r;
  r.command = j.at("command").get<std::string>();
  r.version = j.at("version").get<std::string>();
  r.config = parse_run_config(j.at("config"));
  if (!j.at("metrics").is_null()) r.metrics = metrics_from_json(j["metrics"]);
  for (const auto& jc : j.at("certificates")) {
    CertificateSummary c;
    c.decision = vector_from(jc.at("decision"), "decision");
    c.vertex_index = optional_index(jc.at("vertex_index"));
    c.alpha_hat = jc.at("alpha_hat").get<double>();
    c.draw_count = jc.at("draw_count").get<std::size_t>();
    c.calibration_size = jc.at("calibration_size").get<std::size_t>();
    c.alpha_true = optional_double(jc.at("alpha_true"));
    c.std_error = optional_double(jc.at("std_error"));
    r.certificates.push_back(std::move(c));
  }
  r.duration_seconds = j.at("duration_seconds").get<double>();
  r.generated_at = j.at("generated_at").get<std::string>();
  return r;
}

std::string experiment_csv(const MetricsReport& r) {
  std::string out = "trial,method,vertex_index,alpha_hat,alpha_true\n";
  for (const auto& t : r.trials) {
    for (std::size_t m = 0; m < r.methods.size(); ++m) {
      const std::string name(to_string(r.methods[m].method));
      for (std::size_t v = 0; v < t.alpha_hat[m].size(); ++v) {
        out += std::to_string(t.trial) + ',' + name + ',' + std::to_string(v) + ',' +
               format_double(t.alpha_hat[m][v]) + ',' + format_double(r.oracle.alpha_true[v]) + '\n';
      }
    }
  }
  return out;
}

Vector parse_decision(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("decision entry '" + item + "' is not a number");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw ConfigError("decision entry '" + item + "' is not a number");
    }
    values.push_back(v);
  }
  if (values.empty()) throw ConfigError("decision must list at least one coordinate");
  return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

// ---------------------------------------------------------------------------
// Commands

namespace {

using Clock = std::chrono::steady_clock;

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << content;
  if (!f) throw Error("failed writing '" + path + "'");
}

void finish_report(ReportDocument& doc, Clock::time_point start, const std::string& path, std::ostream& out) {
  if (path.empty()) return;
  doc.version = CREDO_VERSION;
  doc.generated_at = timestamp();
  doc.duration_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  write_file(path, to_json(doc).dump(2) + "\n");
  out << "report written to " << path << '\n';
}

void require_truth(const RunConfig& cfg, const char* command) {
  if (cfg.scenario == "custom" && !cfg.truth) {
    throw ConfigError(std::string(command) + " needs a ground truth; add a 'truth' block to the config");
  }
}

void check_decision(const Vector& z, const Polytope& p) {
  if (z.size() != p.dimension()) {
    throw ConfigError("decision has " + std::to_string(z.size()) + " coordinates, the problem has " +
                      std::to_string(p.dimension()));
  }
}

constexpr const char* kNonVertexNote =
    "note: the decision is not a vertex of the feasible region; an LP has a non-vertex optimum only on a "
    "measure-zero set of objectives, so the risk is 1";

}  // namespace

int cmd_vertices(const RunConfig& cfg, std::ostream& out) {
  const Scenario sc = build_scenario(cfg);
  const VertexSet v = enumerate_vertices(sc.polytope);
  out << "index";
  for (Eigen::Index j = 0; j < sc.polytope.dimension(); ++j) out << ",z" << j + 1;
  out << '\n';
  for (std::size_t i = 0; i < v.size(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < v[i].size(); ++j) out << ',' << format_double(v[i](j));
    out << '\n';
  }
  out << "vertices: " << v.size() << '\n';
  return 0;
}

int cmd_assess(const RunConfig& cfg, const Vector& z, std::ostream& out) {
  const auto start = Clock::now();
  require_truth(cfg, "assess");
  const Scenario sc = build_scenario(cfg);
  const ExperimentConfig ex = resolve_experiment(cfg, sc);
  check_decision(z, sc.polytope);
  const VertexSet vertices = enumerate_vertices(sc.polytope);

  const Seed s = derive_seed(ex.seed, "assess");
  const Dataset training = sc.truth.sample(ex.training_size, derive_seed(s, "train"));
  const Dataset calibration_data = sc.truth.sample(ex.calibration_size, derive_seed(s, "calibration"));
  const Sense sense = sc.polytope.sense();
  const GaussianMixture model = canonicalize_model(trial_model(sc, ex, training, derive_seed(s, "em")), sense);
  const CalibrationSet cal =
      calibrate(model, canonicalize_dataset(calibration_data, sense), derive_seed(s, "calibrate"));
  const RiskCertificate cert = credo_assess(model, cal, z, vertices, ex.draw_count, derive_seed(s, "credo"));

  out << "decision: " << format_point(z) << '\n';
  if (cert.decision.vertex_index) {
    out << "vertex_index: " << *cert.decision.vertex_index << '\n';
  } else {
    out << kNonVertexNote << '\n';
  }
  out << "alpha_hat: " << format_double(cert.alpha_hat) << '\n';
  out << "confidence: " << format_double(cert.confidence()) << '\n';

  ReportDocument doc;
  doc.command = "assess";
  doc.config = cfg;
  doc.certificates.push_back(
      {z, cert.decision.vertex_index, cert.alpha_hat, cert.draw_count, cert.calibration_size, {}, {}});
  finish_report(doc, start, cfg.output, out);
  return 0;
}

int cmd_experiment(const RunConfig& cfg, std::ostream& out) {
  const auto start = Clock::now();
  require_truth(cfg, "experiment");
  const Scenario sc = build_scenario(cfg);
  const ExperimentConfig ex = resolve_experiment(cfg, sc);
  const MetricsReport report = run_trials(sc, ex, Execution::parallel);

  out << "scenario: " << report.scenario << "  trials: " << report.trial_count
      << "  vertices: " << report.vertices.size() << '\n';
  out << "method      conservative      tpr               accuracy          ranking\n";
  for (const auto& m : report.methods) {
    auto cell = [](const std::optional<MeanSem>& v) {
      std::string s = v ? format_short(v->mean) + " +- " + format_short(v->sem) : std::string("-");
      s.resize(18, ' ');
      return s;
    };
    std::string name(to_string(m.method));
    name.resize(12, ' ');
    out << name << cell(m.conservativeness_rate) << cell(m.true_positive_rate) << cell(m.relative_accuracy)
        << format_short(m.confidence_ranking.mean) << " +- " << format_short(m.confidence_ranking.sem) << '\n';
  }

  std::string csv_path = cfg.csv;
  std::string report_path = cfg.output;
  if (report_path.empty()) report_path = "credo-report.json";
  if (csv_path.empty()) csv_path = std::filesystem::path(report_path).replace_extension(".csv").string();
  write_file(csv_path, experiment_csv(report));
  out << "csv written to " << csv_path << '\n';

  ReportDocument doc;
  doc.command = "experiment";
  doc.config = cfg;
  doc.metrics = report;
  finish_report(doc, start, report_path, out);
  return 0;
}

int cmd_oracle(const RunConfig& cfg, const std::optional<Vector>& decision, std::ostream& out) {
  const auto start = Clock::now();
  require_truth(cfg, "oracle");
  const Scenario sc = build_scenario(cfg);
  cfg.experiment.validate();
  const VertexSet vertices = enumerate_vertices(sc.polytope);
  const ExperimentConfig& ex = cfg.experiment;
  const Seed seed = derive_seed(ex.seed, "oracle");

  ReportDocument doc;
  doc.command = "oracle";
  doc.config = cfg;
  if (decision) {
    check_decision(*decision, sc.polytope);
    const TrueRisk risk = true_risk_oracle(sc, *decision, vertices, ex.mc_samples, seed);
    const DecisionClass cls = classify_decision(*decision, vertices, vertices.tolerance());
    out << "decision: " << format_point(*decision) << '\n';
    if (!cls.is_vertex()) out << kNonVertexNote << '\n';
    out << "alpha_true: " << format_double(risk.alpha) << " +- " << format_double(risk.std_error) << '\n';
    doc.certificates.push_back({*decision, cls.vertex_index, 1.0, 0, 0, risk.alpha, risk.std_error});
  } else {
    const OracleEstimate est = oracle_all_vertices(sc, vertices, ex.mc_samples, seed, Execution::parallel,
                                                   ex.threads);
    out << "index,vertex,alpha_true,std_error\n";
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      out << i << ",\"" << format_point(vertices[i]) << "\"," << format_double(est.alpha_true[i]) << ','
          << format_double(est.std_error[i]) << '\n';
      doc.certificates.push_back({vertices[i], i, 1.0, 0, 0, est.alpha_true[i], est.std_error[i]});
    }
  }
  finish_report(doc, start, cfg.output, out);
  return 0;
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error) || dynamic_cast<const CLI::Error*>(&error)) return 2;
  if (dynamic_cast<const GeometryError*>(&error)) return 3;
  return 4;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conformal risk certificates for LP decisions"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<Seed> seed;
  std::string output;
  std::string csv;
  std::optional<int> threads;
  std::string decision_text;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Config document (JSON)");
    sub->add_option("--seed", seed, "Root seed");
    sub->add_option("--output", output, "Report path");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  };
  CLI::App* vertices = app.add_subcommand("vertices", "Print the vertex set of the feasible region");
  CLI::App* assess = app.add_subcommand("assess", "Risk certificate for one decision");
  CLI::App* experiment = app.add_subcommand("experiment", "Run the trial harness");
  CLI::App* oracle = app.add_subcommand("oracle", "Monte Carlo ground-truth risk");
  for (CLI::App* sub : {vertices, assess, experiment, oracle}) add_common(sub);
  assess->add_option("--decision", decision_text, "Decision as v1,v2,...")->required();
  oracle->add_option("--decision", decision_text, "Decision as v1,v2,...");
  experiment->add_option("--csv", csv, "Per-trial CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    RunConfig cfg = config_path.empty() ? parse_run_config(json::object()) : load_run_config(config_path);
    if (seed) cfg.experiment.seed = *seed;
    if (!output.empty()) cfg.output = output;
    if (!csv.empty()) cfg.csv = csv;
    if (threads) cfg.experiment.threads = *threads;
    cfg.validate();

    if (vertices->parsed()) return cmd_vertices(cfg, out);
    if (assess->parsed()) return cmd_assess(cfg, parse_decision(decision_text), out);
    if (experiment->parsed()) return cmd_experiment(cfg, out);
    std::optional<Vector> z;
    if (!decision_text.empty()) z = parse_decision(decision_text);
    return cmd_oracle(cfg, z, out);
  } catch (const EmptyRegion& e) {
    err << "error: infeasible problem: " << e.what() << '\n';
    return 3;
  } catch (const UnboundedRegion& e) {
    err << "error: unbounded problem: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace credo
