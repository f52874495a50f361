#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "relloc/network.hpp"
#include "test_util.hpp"

using namespace relloc;

namespace {

Graph triangle() { return Graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

// B ⊗ I2 built entry by entry.
Eigen::MatrixXd kron_i2(const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * b.rows(), 2 * b.cols());
  for (int i = 0; i < b.rows(); ++i) {
    for (int j = 0; j < b.cols(); ++j) {
      out(2 * i, 2 * j) = b(i, j);
      out(2 * i + 1, 2 * j + 1) = b(i, j);
    }
  }
  return out;
}

}  // namespace

TEST(Graph, RejectsInvalidEdges) {
  EXPECT_THROW(Graph(0, {}), DomainError);
  EXPECT_THROW(Graph(2, {{0, 0}}), DomainError);
  EXPECT_THROW(Graph(2, {{0, 2}}), DomainError);
  EXPECT_THROW(Graph(2, {{-1, 1}}), DomainError);
  EXPECT_THROW(Graph(3, {{0, 1}, {1, 0}}), DomainError);
  EXPECT_THROW(Graph(3, {{0, 1}, {0, 1}}), DomainError);
  EXPECT_NO_THROW(Graph(1, {}));
}

TEST(Graph, CompleteOrdersPathThenChords) {
  const Graph g = Graph::complete(3);
  ASSERT_EQ(g.edge_count(), 3);
  EXPECT_EQ(g.edge(0), (Edge{0, 1}));
  EXPECT_EQ(g.edge(1), (Edge{1, 2}));
  EXPECT_EQ(g.edge(2), (Edge{0, 2}));
  EXPECT_EQ(Graph::complete(5).edge_count(), 10);
  EXPECT_EQ(g.find_edge(2, 0), 2);
  EXPECT_EQ(g.find_edge(1, 1), -1);
}

TEST(DesiredDistances, MustBePositive) {
  EXPECT_THROW(DesiredDistances({1.0, 0.0}), DomainError);
  EXPECT_THROW(DesiredDistances({-1.0}), DomainError);
  EXPECT_THROW(DesiredDistances({std::nan("")}), DomainError);
  EXPECT_EQ(DesiredDistances::uniform(triangle(), 10.0).values(), (std::vector<double>{10, 10, 10}));
}

TEST(Neighbors, Examples) {
  EXPECT_EQ(neighbors(triangle(), 0), (std::vector<int>{1, 2}));
  EXPECT_EQ(neighbors(Graph(2, {{0, 1}}), 1), (std::vector<int>{0}));
  EXPECT_EQ(neighbors(Graph(3, {{0, 1}, {1, 2}}), 1), (std::vector<int>{0, 2}));
  EXPECT_THROW(neighbors(triangle(), 3), DomainError);
  EXPECT_THROW(neighbors(triangle(), -1), DomainError);
}

TEST(Incidence, Examples) {
  Eigen::MatrixXd expected(3, 3);
  expected << 1, 0, 1,
             -1, 1, 0,
              0, -1, -1;
  EXPECT_EQ(incidence_matrix(triangle()), expected);

  Eigen::MatrixXd single(2, 1);
  single << 1, -1;
  EXPECT_EQ(incidence_matrix(Graph(2, {{0, 1}})), single);

  const Eigen::MatrixXd empty = incidence_matrix(Graph(4, {}));
  EXPECT_EQ(empty.rows(), 4);
  EXPECT_EQ(empty.cols(), 0);
}

TEST(Incidence, ColumnsSumToZeroAndRankCountsComponents) {
  // two components: a triangle and a single edge
  const Graph g(5, {{0, 1}, {1, 2}, {0, 2}, {3, 4}});
  const Eigen::MatrixXd b = incidence_matrix(g);
  EXPECT_EQ(b.colwise().sum().cwiseAbs().maxCoeff(), 0.0);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
  EXPECT_EQ(lu.rank(), 5 - 2);
}

TEST(RelativePositionStack, SingleEdge) {
  Eigen::VectorXd r(4);
  r << 1, 0, 0, 0;
  Eigen::VectorXd z(4);
  z << 1, 0, -1, 0;
  EXPECT_EQ(relative_position_stack(Graph(2, {{0, 1}}), r), z);
}

TEST(RelativePositionStack, CoincidentAgentsGiveZeroBlocks) {
  Eigen::VectorXd r(6);
  r << 2, 3, 2, 3, 7, 1;
  const Eigen::VectorXd z = relative_position_stack(triangle(), r);
  EXPECT_EQ(z.segment<2>(0), Eigen::Vector2d::Zero());
  EXPECT_EQ(z.segment<2>(6), Eigen::Vector2d::Zero());
}

TEST(RelativePositionStack, TriangleMatchesKroneckerOracle) {
  const double s3 = std::sqrt(3.0);
  Eigen::VectorXd r(6);
  r << 0, 0, 10, 0, 5, 5 * s3;
  const Eigen::VectorXd z = relative_position_stack(triangle(), r);

  Eigen::VectorXd z1(6);
  z1 << -10, 0, 5, -5 * s3, -5, -5 * s3;
  EXPECT_LT((z.head(6) - z1).cwiseAbs().maxCoeff(), 1e-12);

  const Eigen::MatrixXd bbar = kron_i2(incidence_matrix(triangle()));
  Eigen::MatrixXd stack(12, 6);
  stack << bbar.transpose(), -bbar.transpose();
  EXPECT_LT((z - stack * r).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RelativePositionStack, SecondHalfIsNegatedFirstHalf) {
  std::mt19937_64 rng(3);
  const Graph g = Graph::complete(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd r = test::uniform_vector(rng, 10, -10, 10);
    const Eigen::VectorXd z = relative_position_stack(g, r);
    const int m = g.edge_count();
    EXPECT_EQ(z.tail(2 * m), -z.head(2 * m));
    EXPECT_EQ(edge_vectors(g, r), z.head(2 * m));
  }
  EXPECT_THROW(relative_position_stack(g, Eigen::VectorXd::Zero(3)), DomainError);
}

TEST(DistanceErrors, Examples) {
  const DesiredDistances d5({5.0});
  EXPECT_EQ(distance_errors(Eigen::Vector2d(3, 4), d5)(0), 0.0);
  const DesiredDistances d10({10.0});
  EXPECT_EQ(distance_errors(Eigen::Vector2d(10, 0), d10)(0), 0.0);
  EXPECT_EQ(distance_errors(Eigen::Vector2d(11, 0), d10)(0), 21.0);
  EXPECT_THROW(distance_errors(Eigen::VectorXd::Zero(4), d10), DomainError);
}

TEST(Rigidity, SingleEdge) {
  Eigen::MatrixXd expected(1, 4);
  expected << 1, 0, -1, 0;
  EXPECT_EQ(rigidity_matrix(Eigen::Vector2d(1, 0), Graph(2, {{0, 1}})), expected);
}

TEST(Rigidity, MatchesDiagKroneckerOracleAndKernel) {
  std::mt19937_64 rng(5);
  const Graph g = triangle();
  const Eigen::MatrixXd bbar = kron_i2(incidence_matrix(g));
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd r = test::random_triangle(rng);
    const Eigen::VectorXd z1 = edge_vectors(g, r);
    const Eigen::MatrixXd rm = rigidity_matrix(z1, g);

    Eigen::MatrixXd diag_z = Eigen::MatrixXd::Zero(6, 3);
    for (int k = 0; k < 3; ++k) diag_z.block<2, 1>(2 * k, k) = z1.segment<2>(2 * k);
    EXPECT_LT((rm - diag_z.transpose() * bbar.transpose()).cwiseAbs().maxCoeff(), 1e-12);

    // R r stacks the squared lengths
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR((rm * r)(k), z1.segment<2>(2 * k).squaredNorm(), 1e-9);
    }

    // translations and the infinitesimal rotation about the centroid are in the kernel
    const Eigen::Vector2d c = test::uniform_vector(rng, 2, -3, 3);
    EXPECT_LT((rm * c.replicate(3, 1)).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::Vector2d centroid = (r.segment<2>(0) + r.segment<2>(2) + r.segment<2>(4)) / 3.0;
    Eigen::VectorXd perp(6);
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector2d d = r.segment<2>(2 * i) - centroid;
      perp.segment<2>(2 * i) = Eigen::Vector2d(-d.y(), d.x());
    }
    EXPECT_LT((rm * perp).cwiseAbs().maxCoeff(), 1e-10);

    Eigen::FullPivLU<Eigen::MatrixXd> lu(rm);
    lu.setThreshold(1e-10);
    EXPECT_EQ(lu.rank(), 3);
  }
}

TEST(Potential, QuarterSumOfSquaredErrors) {
  Eigen::VectorXd r(4);
  r << 0, 0, 11, 0;
  EXPECT_DOUBLE_EQ(formation_potential(Graph(2, {{0, 1}}), r, DesiredDistances({10.0})),
                   0.25 * 21.0 * 21.0);
}
