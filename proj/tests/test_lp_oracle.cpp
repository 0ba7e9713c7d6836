#include "credo/error.hpp"
#include "credo/lp_oracle.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace credo;
using credo::test::vec;

TEST(Canonicalize, Examples) {
  EXPECT_EQ(canonicalize_objective(vec({-1, -1}), Sense::maximize), vec({1, 1}));
  EXPECT_EQ(canonicalize_objective(vec({2, 3}), Sense::minimize), vec({2, 3}));
  EXPECT_EQ(canonicalize_objective(vec({0, 0}), Sense::maximize).norm(), 0.0);
  EXPECT_EQ(canonicalize_objective(vec({0, 0}), Sense::minimize).norm(), 0.0);
}

TEST(Solve, TriangleExamples) {
  const VertexSet v = enumerate_vertices(test::triangle());
  EXPECT_EQ(solve(vec({1, 1}), v).coordinates, vec({0, 0}));
  EXPECT_EQ(solve(vec({-2, 1}), v).coordinates, vec({1, 0}));
  const Decision tie = solve(vec({0, 0}), v);
  EXPECT_EQ(tie.vertex_index, 0u);
  EXPECT_EQ(tie.coordinates, v[0]);
}

TEST(Solve, TieGoesToLowestIndex) {
  const VertexSet v = enumerate_vertices(test::triangle());
  // (0,1) and (1,0) tie at -1 for y = (-1,-1); (0,1) comes first.
  EXPECT_EQ(solve_index(vec({-1, -1}), v), 1u);
}

TEST(Solve, Errors) {
  EXPECT_THROW(solve(vec({1, 1}), VertexSet{}), EmptyVertexSet);
  EXPECT_THROW(solve(vec({1, 1, 1}), enumerate_vertices(test::triangle())), DimensionMismatch);
}

TEST(Solve, OptimalityCertificateAndScaling) {
  Engine engine = make_engine(3);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> scale(1e-2, 1e2);
  for (int t = 0; t < 30; ++t) {
    const VertexSet v = enumerate_vertices(test::random_polygon(engine, 10));
    for (int s = 0; s < 30; ++s) {
      const Vector y = vec({normal(engine), normal(engine)});
      const Decision d = solve(y, v);
      for (const auto& x : v) EXPECT_LE(y.dot(d.coordinates), y.dot(x));
      EXPECT_EQ(solve(scale(engine) * y, v).vertex_index, d.vertex_index);
    }
  }
}

TEST(VertexDecisionTest, WrapsIndex) {
  const VertexSet v = enumerate_vertices(test::triangle());
  const Decision d = vertex_decision(v, 2);
  EXPECT_EQ(d.vertex_index, 2u);
  EXPECT_EQ(d.coordinates, v[2]);
}
