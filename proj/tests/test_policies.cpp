#include "credo/error.hpp"
#include "credo/policies.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace credo;
using credo::test::vec;

namespace {

VertexSet triangle_vertices() { return enumerate_vertices(test::triangle()); }

Dataset rows(std::initializer_list<std::initializer_list<double>> r) { return Dataset(test::mat(r)); }

}  // namespace

TEST(Pto, Examples) {
  const VertexSet v = triangle_vertices();
  EXPECT_EQ(pto_decide(rows({{-2, -1}, {0, -1}}), v, Sense::maximize).coordinates, vec({0, 0}));
  EXPECT_EQ(pto_decide(rows({{-2, 1}}), v, Sense::minimize).coordinates, vec({1, 0}));
  EXPECT_EQ(pto_decide(rows({{1, 1}, {-1, -1}}), v, Sense::minimize).vertex_index, 0u);
  EXPECT_THROW(pto_decide(Dataset(Matrix(0, 2)), v, Sense::minimize), EmptyDataset);
}

TEST(Ro, ClosedFormExamples) {
  const VertexSet v = triangle_vertices();
  EXPECT_EQ(ro_decide_box({vec({1, 1}), 0.5}, v).coordinates, vec({0, 0}));
  // Values {0, -1.5, -1.5}: (0,1) precedes (1,0) in vertex order.
  EXPECT_EQ(ro_decide_box({vec({-2, -2}), 0.5}, v).vertex_index, 1u);
  EXPECT_EQ(ro_decide_box({vec({-2, 1}), std::numeric_limits<double>::infinity()}, v).coordinates, vec({0, 0}));
}

TEST(Ro, ZeroRadiusIsPto) {
  Engine engine = make_engine(1);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 20; ++t) {
    const VertexSet v = enumerate_vertices(test::random_polygon(engine, 8));
    Matrix y(10, 2);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = normal(engine);
    const Dataset d(y);
    const BoxUncertainty box = conformal_box(d, Sense::minimize, 0.0);
    EXPECT_EQ(box.radius, 0.0);
    EXPECT_EQ(ro_decide_box(box, v).vertex_index, pto_decide(d.slice(0, 5), v, Sense::minimize).vertex_index);
  }
}

TEST(Ro, BoxRadiusQuantile) {
  // Center from the first two rows (mean 0), scores |.|_inf of the rest.
  const Dataset d = rows({{1, 0}, {-1, 0}, {0.5, 0.1}, {0.2, -0.3}});
  const BoxUncertainty box = conformal_box(d, Sense::minimize, 0.5);
  EXPECT_EQ(box.center, vec({0, 0}));
  EXPECT_DOUBLE_EQ(box.radius, 0.5);
  EXPECT_EQ(conformal_box(d, Sense::minimize, 1.0).radius, std::numeric_limits<double>::infinity());
  EXPECT_THROW(conformal_box(rows({{1, 1}}), Sense::minimize, 0.9), EmptyDataset);
  EXPECT_THROW(ro_decide(Dataset(Matrix(0, 2)), triangle_vertices(), Sense::minimize, 0.9), EmptyDataset);
}

TEST(Ro, SeparateFitAndCalibration) {
  const BoxUncertainty box = conformal_box(rows({{-1, -1}}), rows({{-1.5, -1}, {-1, -0.7}}), Sense::maximize, 0.6);
  EXPECT_EQ(box.center, vec({1, 1}));
  EXPECT_DOUBLE_EQ(box.radius, 0.5);
}

TEST(SpoPlus, ZeroEpochsKeepsMean) {
  const VertexSet v = triangle_vertices();
  const Dataset d = rows({{1, 2}, {3, 0}});
  EXPECT_EQ(spo_plus_train(d, v, Sense::minimize, 0, 0.1).coefficients, vec({2, 1}));
  EXPECT_EQ(spo_plus_train(d, v, Sense::maximize, 0, 0.1).coefficients, vec({-2, -1}));
}

TEST(SpoPlus, FixedPointOnConcentratedData) {
  const VertexSet v = triangle_vertices();
  const Dataset d = rows({{1, 1}, {1, 1}, {1, 1}});
  const LinearPredictor p = spo_plus_train(d, v, Sense::minimize, 100, 0.1);
  // pi(2c - c) = pi(c) at c_hat = mean, so gradients vanish.
  EXPECT_EQ(p.coefficients, vec({1, 1}));
  EXPECT_EQ(spo_plus_decide(p, v).coordinates, vec({0, 0}));
}

TEST(SpoPlus, DeterministicAndMovesTowardOptimalDecision) {
  const VertexSet v = triangle_vertices();
  const Dataset d = rows({{-1, 0.2}, {0.3, -0.1}, {-0.5, 0.1}, {0.2, 0.3}});
  const LinearPredictor a = spo_plus_train(d, v, Sense::minimize, 100, 0.1);
  EXPECT_EQ(a.coefficients, spo_plus_train(d, v, Sense::minimize, 100, 0.1).coefficients);
  EXPECT_TRUE(spo_plus_decide(a, v).vertex_index.has_value());
  EXPECT_EQ(spo_plus_decide({vec({0, 0})}, v).vertex_index, 0u);
  EXPECT_EQ(spo_plus_decide({vec({1, 1})}, v).coordinates, vec({0, 0}));
}

TEST(Policies, ScalingInvariance) {
  Engine engine = make_engine(2);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 10; ++t) {
    const VertexSet v = enumerate_vertices(test::random_polygon(engine, 8));
    Matrix y(20, 2);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = normal(engine);
    const Dataset d(y);
    const Dataset scaled(3.5 * y);
    EXPECT_EQ(pto_decide(d, v, Sense::minimize).vertex_index, pto_decide(scaled, v, Sense::minimize).vertex_index);
    EXPECT_EQ(spo_plus_decide(spo_plus_train(d, v, Sense::minimize, 0, 0.1), v).vertex_index,
              spo_plus_decide(spo_plus_train(scaled, v, Sense::minimize, 0, 0.1), v).vertex_index);
  }
}

TEST(CredoDecide, Examples) {
  const VertexSet v = triangle_vertices();
  const CalibrationSet c({0.1, 0.2, 0.3}, 0);
  // Mass well inside the cone of (1,0): y = (-2, 1).
  EXPECT_EQ(credo_decide(point_mass(vec({-2, 1})), c, v, 5, 0).coordinates, vec({1, 0}));
  // Empty calibration coverage everywhere: all 1, first vertex.
  const CalibrationSet huge({100.0}, 0);
  const GaussianMixture far = point_mass(vec({0, 0}));
  EXPECT_EQ(credo_decide(far, huge, v, 5, 0).vertex_index, 0u);
  const GaussianMixture g = GaussianMixture::isotropic({1.0}, {vec({0.2, 0.1})}, {1.0});
  EXPECT_EQ(credo_decide(g, c, v, 50, 9).vertex_index, credo_decide(g, c, v, 50, 9).vertex_index);
}

TEST(CredoDecide, PointMassAgreesWithPointAssess) {
  const VertexSet v = triangle_vertices();
  const CalibrationSet c({0.5, 1.0, 2.0}, 0);
  const Vector m = vec({1.5, 2.5});
  std::vector<double> risks;
  for (const auto& z : v) risks.push_back(point_assess(m, c, z, v).alpha_hat);
  EXPECT_EQ(credo_decide(point_mass(m), c, v, 1, 0).vertex_index, argmin_risk(risks));
}

TEST(ArgminRisk, FirstOnTies) {
  EXPECT_EQ(argmin_risk({0.5, 0.2, 0.2}), 1u);
  EXPECT_THROW(argmin_risk({}), EmptyVertexSet);
}
