#include "credo/conformal_risk.hpp"
#include "credo/error.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace credo;
using credo::test::vec;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

CalibrationSet one_to_four() { return CalibrationSet({4, 2, 3, 1}, 0); }

VertexSet triangle_vertices() { return enumerate_vertices(test::triangle()); }

}  // namespace

TEST(Calibration, SortsAndValidates) {
  const CalibrationSet c = one_to_four();
  EXPECT_EQ(c.residuals(), (std::vector<double>{1, 2, 3, 4}));
  EXPECT_THROW(CalibrationSet({}, 0), InvariantViolation);
  EXPECT_THROW(CalibrationSet({1, -1}, 0), InvariantViolation);
  EXPECT_EQ(c.count_within(2.0), 2u);
  EXPECT_EQ(c.count_within(2.5), 2u);
}

TEST(Calibration, PointMassResiduals) {
  const CalibrationSet c = calibrate(point_mass(vec({0, 0})), Dataset(test::mat({{3, 4}})), 1);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_DOUBLE_EQ(c.residuals()[0], 5.0);
  const Dataset d(test::mat({{1, 1}, {1, 1}}));
  EXPECT_EQ(calibrate(point_mass(vec({1, 1})), d, 0).residuals(), (std::vector<double>{0, 0}));
  EXPECT_THROW(calibrate(point_mass(vec({0, 0, 0})), d, 0), DimensionMismatch);
}

TEST(Calibration, Deterministic) {
  const GaussianMixture g = GaussianMixture::isotropic({1.0}, {vec({0, 0})}, {1.0});
  const Dataset d = g.sample(50, 3);
  EXPECT_EQ(calibrate(g, d, 4).residuals(), calibrate(g, d, 4).residuals());
}

TEST(ConformalRadius, Examples) {
  const CalibrationSet c = one_to_four();
  EXPECT_EQ(conformal_radius(c, 0.2), 4.0);
  EXPECT_EQ(conformal_radius(c, 0.9), 1.0);
  EXPECT_EQ(conformal_radius(c, 0.1), kInf);
  EXPECT_EQ(conformal_radius(c, 1.0), 0.0);
  EXPECT_EQ(conformal_radius(c, 0.6), 2.0);
}

TEST(FHat, Examples) {
  const CalibrationSet c = one_to_four();
  EXPECT_EQ(f_hat(c, 2.5), 0.5);
  EXPECT_EQ(f_hat(c, 0.0), 0.0);
  EXPECT_EQ(f_hat(c, kInf), 1.0);
  EXPECT_EQ(f_hat(c, 4.0), 1.0);
}

TEST(Alpha, HandExamples) {
  const VertexSet v = triangle_vertices();
  const InverseCone cone = inverse_cone(vec({0, 0}), v);
  const CalibrationSet c = one_to_four();
  // Distance to the nearest facet of the orthant is 2.5.
  const Vector inside = vec({2.5, 3.0});
  EXPECT_DOUBLE_EQ(alpha_raw(c, inside, cone), 0.6);
  EXPECT_DOUBLE_EQ(alpha_closed_form(c, inside, cone), 0.6);
  EXPECT_DOUBLE_EQ(alpha_closed_form(c, inside, vec({0, 0}), v), 0.6);
  EXPECT_EQ(alpha_raw(c, vec({-1, 2}), cone), 1.0);
  EXPECT_EQ(alpha_closed_form(c, vec({-1, 2}), cone), 1.0);
  const CalibrationSet zero({0.0}, 0);
  EXPECT_DOUBLE_EQ(alpha_closed_form(zero, vec({1, 1}), cone), 0.5);
  EXPECT_DOUBLE_EQ(alpha_raw(zero, vec({1, 1}), cone), 0.5);
  EXPECT_THROW(alpha_closed_form(c, inside, vec({0.5, 0.5}), v), NonVertexDecision);
}

TEST(Alpha, SingleVertexGivesOneOverNPlusOne) {
  const VertexSet single({vec({1, 1})}, 1e-9);
  const InverseCone cone = inverse_cone(vec({1, 1}), single);
  const CalibrationSet c = one_to_four();
  EXPECT_DOUBLE_EQ(alpha_raw(c, vec({9, -9}), cone), 0.2);
  EXPECT_DOUBLE_EQ(alpha_closed_form(c, vec({9, -9}), cone), 0.2);
}

TEST(Alpha, TiesCountAsCovered) {
  const InverseCone cone = inverse_cone(vec({0, 0}), triangle_vertices());
  const CalibrationSet c = one_to_four();
  EXPECT_DOUBLE_EQ(alpha_closed_form(c, vec({2, 7}), cone), 0.6);
  EXPECT_DOUBLE_EQ(alpha_raw(c, vec({2, 7}), cone), 0.6);
}

TEST(Alpha, ClosedFormMatchesRawOnRandomInstances) {
  Engine engine = make_engine(21);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> n_dist(1, 50);
  std::exponential_distribution<double> residual(1.0);
  for (int t = 0; t < 100; ++t) {
    const VertexSet v = enumerate_vertices(test::random_polygon(engine, 8));
    std::vector<double> r(static_cast<std::size_t>(n_dist(engine)));
    for (double& x : r) x = residual(engine);
    const CalibrationSet c(r, 0);
    for (const auto& z : v) {
      const InverseCone cone = inverse_cone(z, v);
      for (int s = 0; s < 5; ++s) {
        const Vector y = 2.0 * vec({normal(engine), normal(engine)});
        EXPECT_NEAR(alpha_closed_form(c, y, cone), alpha_raw(c, y, cone), 1e-12);
      }
    }
  }
}

TEST(Alpha, NonIncreasingInDistance) {
  const InverseCone cone = inverse_cone(vec({0, 0}), triangle_vertices());
  const CalibrationSet c({0.1, 0.4, 0.4, 0.9, 1.5, 2.0}, 0);
  double previous = 1.0;
  for (double s = 0.01; s < 3.0; s += 0.01) {
    const double a = alpha_closed_form(c, vec({s, s + 1.0}), cone);
    EXPECT_LE(a, previous);
    previous = a;
  }
}

TEST(CredoAssess, NonVertexIsOne) {
  const VertexSet v = triangle_vertices();
  const GaussianMixture g = GaussianMixture::isotropic({1.0}, {vec({1, 1})}, {1.0});
  const RiskCertificate cert = credo_assess(g, one_to_four(), vec({0.3, 0.3}), v, 10, 0);
  EXPECT_EQ(cert.alpha_hat, 1.0);
  EXPECT_TRUE(cert.per_draw_alphas.empty());
  EXPECT_FALSE(cert.decision.vertex_index);
}

TEST(CredoAssess, AllDrawsOutsideGiveOne) {
  const VertexSet v = triangle_vertices();
  const GaussianMixture g = GaussianMixture::isotropic({1.0}, {vec({-50, -50})}, {1.0});
  EXPECT_EQ(credo_assess(g, one_to_four(), vec({0, 0}), v, 20, 1).alpha_hat, 1.0);
}

TEST(CredoAssess, PointMassInsideWithZeroResiduals) {
  const VertexSet v = triangle_vertices();
  const CalibrationSet c(std::vector<double>(9, 0.0), 0);
  for (std::size_t k : {1u, 7u, 100u}) {
    EXPECT_NEAR(credo_assess(point_mass(vec({1, 1})), c, vec({0, 0}), v, k, 3).alpha_hat, 0.1, 1e-15);
  }
}

TEST(CredoAssess, MeanOfPerDrawValuesInRange) {
  const VertexSet v = triangle_vertices();
  const GaussianMixture g = GaussianMixture::isotropic({1.0}, {vec({0.5, 0.5})}, {1.0});
  const CalibrationSet c = calibrate(g, g.sample(30, 1), 2);
  const RiskCertificate cert = credo_assess(g, c, vec({0, 0}), v, 200, 3, {true});
  ASSERT_EQ(cert.per_draw_alphas.size(), 200u);
  ASSERT_TRUE(cert.generated_points);
  EXPECT_EQ(cert.generated_points->size(), 200u);
  double sum = 0.0;
  for (double a : cert.per_draw_alphas) {
    sum += a;
    EXPECT_TRUE(a == 1.0 || (a >= 1.0 / 31.0 - 1e-15 && a <= 1.0));
  }
  EXPECT_NEAR(cert.alpha_hat, sum / 200.0, 1e-15);
  EXPECT_EQ(cert.calibration_size, 30u);
  EXPECT_DOUBLE_EQ(cert.confidence(), 1.0 - cert.alpha_hat);
}

TEST(NsAssess, Examples) {
  const VertexSet v = triangle_vertices();
  EXPECT_EQ(ns_assess(point_mass(vec({1, 1})), vec({0, 0}), v, 10, 0), 0.0);
  EXPECT_EQ(ns_assess(point_mass(vec({1, 1})), vec({0.2, 0.2}), v, 10, 0), 1.0);
  // Two equally weighted point-like clusters, one inside the orthant cone.
  const GaussianMixture g({0.5, 0.5}, {vec({5, 5}), vec({-5, -5})}, {Matrix::Zero(2, 2), Matrix::Zero(2, 2)});
  const double a = ns_assess(g, vec({0, 0}), v, 10000, 4);
  EXPECT_NEAR(a, 0.5, 0.03);
}

TEST(PointAssess, Examples) {
  const VertexSet v = triangle_vertices();
  EXPECT_DOUBLE_EQ(point_assess(vec({2.5, 3.0}), one_to_four(), vec({0, 0}), v).alpha_hat, 0.6);
  EXPECT_EQ(point_assess(vec({-1, 3}), one_to_four(), vec({0, 0}), v).alpha_hat, 1.0);
  for (const auto& z : v) {
    const Vector m = vec({0.7, -0.2});
    EXPECT_EQ(point_assess(m, one_to_four(), z, v).alpha_hat,
              credo_assess(point_mass(m), one_to_four(), z, v, 1, 0).alpha_hat);
  }
}

TEST(Canonical, MaximizeNegates) {
  const GaussianMixture g = GaussianMixture::isotropic({1.0}, {vec({-1, -1})}, {1.0});
  EXPECT_EQ(canonicalize_model(g, Sense::maximize).means()[0], vec({1, 1}));
  EXPECT_EQ(canonicalize_model(g, Sense::minimize).means()[0], vec({-1, -1}));
  const Dataset d(test::mat({{1, -2}}));
  EXPECT_EQ(canonicalize_dataset(d, Sense::maximize).row(0), vec({-1, 2}));
}
