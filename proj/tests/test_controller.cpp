#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "relloc/controller.hpp"
#include "relloc/network.hpp"
#include "relloc/sim.hpp"
#include "test_util.hpp"

using namespace relloc;

namespace {

const Graph kTriangle = Graph::complete(3);

// r_i' = -Σ_j r_ij e_ij evaluated agent by agent.
Eigen::VectorXd per_agent_sum(const Graph& g, const Eigen::VectorXd& r, const DesiredDistances& d) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(r.size());
  for (int i = 0; i < g.agent_count(); ++i) {
    for (int j : neighbors(g, i)) {
      const int k = g.find_edge(i, j);
      const Eigen::Vector2d rij = r.segment<2>(2 * i) - r.segment<2>(2 * j);
      u.segment<2>(2 * i) -= rij * (rij.squaredNorm() - d[k] * d[k]);
    }
  }
  return u;
}

RelativeEstimates exact_tables(const Graph& g, const Eigen::VectorXd& r) {
  RelativeEstimates t(g.agent_count());
  for (int i = 0; i < g.agent_count(); ++i) {
    for (int j : neighbors(g, i)) t[i][j] = r.segment<2>(2 * i) - r.segment<2>(2 * j);
  }
  return t;
}

std::vector<Eigen::Vector2d> exact_shared(const Graph& g, const Eigen::VectorXd& r) {
  std::vector<Eigen::Vector2d> s;
  const Eigen::VectorXd z1 = edge_vectors(g, r);
  for (int k = 0; k < g.edge_count(); ++k) s.push_back(z1.segment<2>(2 * k));
  return s;
}

Eigen::Vector2d velocity_sum(const Eigen::VectorXd& u) {
  Eigen::Vector2d s = Eigen::Vector2d::Zero();
  for (int i = 0; i < u.size() / 2; ++i) s += u.segment<2>(2 * i);
  return s;
}

}  // namespace

TEST(Ownership, TailOwnsEachEdge) {
  EXPECT_EQ(assign_ownership(Graph(2, {{0, 1}})).owner, std::vector<int>{0});
  EXPECT_EQ(assign_ownership(kTriangle).owner, (std::vector<int>{0, 1, 0}));
  const Graph g = Graph::complete(6);
  const EdgeOwnership own = assign_ownership(g);
  EXPECT_NO_THROW(validate_ownership(g, own));
  EXPECT_THROW(validate_ownership(kTriangle, EdgeOwnership{{0, 1}}), DomainError);
  EXPECT_THROW(validate_ownership(kTriangle, EdgeOwnership{{0, 0, 0}}), DomainError);
}

TEST(IdealControl, Examples) {
  const DesiredDistances d = DesiredDistances::uniform(kTriangle, 10.0);
  Eigen::VectorXd r(6);
  r << 0, 0, 10, 0, 5, 5 * std::sqrt(3.0);
  EXPECT_LT(ideal_control(kTriangle, r, d).cwiseAbs().maxCoeff(), 1e-12);

  const Graph pair(2, {{0, 1}});
  Eigen::VectorXd r2(4);
  r2 << 0, 0, 12, 0;
  const Eigen::VectorXd u2 = ideal_control(pair, r2, DesiredDistances({10.0}));
  EXPECT_GT(u2(0), 0.0);
  EXPECT_LT(u2(2), 0.0);
  EXPECT_EQ(u2(0), -u2(2));
  EXPECT_EQ(u2(1), 0.0);

  // scaled equilateral: contraction towards the centroid, equal to -R̄ᵀe
  const Eigen::VectorXd big = 1.1 * r;
  const Eigen::VectorXd u = ideal_control(kTriangle, big, d);
  EXPECT_LT((u - per_agent_sum(kTriangle, big, d)).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::Vector2d c = (big.segment<2>(0) + big.segment<2>(2) + big.segment<2>(4)) / 3.0;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector2d out = big.segment<2>(2 * i) - c;
    const Eigen::Vector2d ui = u.segment<2>(2 * i);
    EXPECT_LT(ui.dot(out), 0.0);
    EXPECT_LT(std::abs(out.x() * ui.y() - out.y() * ui.x()), 1e-9 * ui.norm() * out.norm());
  }
  EXPECT_THROW(ideal_control(kTriangle, r, DesiredDistances({1.0})), DomainError);
}

TEST(IdealControl, IsNegativeGradientOfPotential) {
  std::mt19937_64 rng(1);
  const DesiredDistances d = DesiredDistances::uniform(kTriangle, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd r = test::random_triangle(rng);
    const Eigen::VectorXd u = ideal_control(kTriangle, r, d);
    Eigen::VectorXd grad(6);
    const double h = 1e-5;
    for (int i = 0; i < 6; ++i) {
      Eigen::VectorXd a = r;
      Eigen::VectorXd b = r;
      a(i) += h;
      b(i) -= h;
      grad(i) = (formation_potential(kTriangle, a, d) - formation_potential(kTriangle, b, d)) / (2 * h);
    }
    ASSERT_LT((u + grad).norm(), 1e-6 * std::max(1.0, grad.norm()));
    ASSERT_LT(velocity_sum(u).norm(), 1e-10 * std::max(1.0, u.norm()));
  }
}

TEST(EstimatedControl, ReducesToIdealWithExactEstimates) {
  std::mt19937_64 rng(2);
  const Graph g = Graph::complete(4);
  const DesiredDistances d = DesiredDistances::uniform(g, 7.0);
  const Eigen::VectorXd r = test::uniform_vector(rng, 8, -10, 10);
  const Eigen::VectorXd e = distance_errors(edge_vectors(g, r), d);
  EXPECT_LT((estimated_control(g, exact_tables(g, r), e) - ideal_control(g, r, d)).norm(), 1e-9);
}

TEST(EstimatedControl, ParallelEstimatesStopAnAgent) {
  // r̂12 ∥ r̂13 with r̂12 e12 + r̂13 e13 = 0 and nonzero errors
  RelativeEstimates t(3);
  t[0][1] = Eigen::Vector2d(2, 1);
  t[0][2] = Eigen::Vector2d(-4, -2);
  t[1][0] = Eigen::Vector2d(1, 0);
  t[1][2] = Eigen::Vector2d(0, 1);
  t[2][0] = Eigen::Vector2d(1, 1);
  t[2][1] = Eigen::Vector2d(0, -1);
  Eigen::Vector3d e(6.0, 1.0, 3.0);  // edges (1,2), (2,3), (1,3)
  const Eigen::VectorXd u = estimated_control(kTriangle, t, e);
  EXPECT_EQ(u.segment<2>(0), Eigen::Vector2d::Zero());
  EXPECT_GT(e.cwiseAbs().minCoeff(), 0.0);
}

TEST(EstimatedControl, SymmetricErrorsAdmitPureTranslation) {
  // estimates of the drift preset solve -M(r̂) e = c 1 with c = (0.1, 0.1)
  const ScenarioConfig c = scenario_issue2();
  RelativeEstimates t(3);
  for (const InitialEstimate& ie : c.initial_estimates) t[ie.agent][ie.neighbor] = ie.value;
  const Eigen::VectorXd e = distance_errors(edge_vectors(c.graph, *c.initial_positions), c.distances);
  const Eigen::VectorXd u = estimated_control(c.graph, t, e);
  for (int i = 0; i < 3; ++i) {
    EXPECT_LT((u.segment<2>(2 * i) - Eigen::Vector2d(0.1, 0.1)).norm(), 1e-12);
  }
  EXPECT_GT(e.cwiseAbs().minCoeff(), 0.1);

  // the 6x3 transition matrix has c 1 in its range
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(6, 3);
  for (int k = 0; k < 3; ++k) {
    const Edge& edge = c.graph.edge(k);
    m.block<2, 1>(2 * edge.tail, k) = t[edge.tail][edge.head];
    m.block<2, 1>(2 * edge.head, k) = t[edge.head][edge.tail];
  }
  Eigen::VectorXd ones(6);
  ones << 0.1, 0.1, 0.1, 0.1, 0.1, 0.1;
  const Eigen::VectorXd sol = m.colPivHouseholderQr().solve(-ones);
  EXPECT_LT((m * sol + ones).norm(), 1e-12);
}

TEST(EstimatedControl, MissingEstimateThrows) {
  RelativeEstimates t(3);
  t[0][1] = Eigen::Vector2d(1, 0);
  EXPECT_THROW(estimated_control(kTriangle, t, Eigen::Vector3d::Zero()), DomainError);
  EXPECT_THROW(estimated_control(kTriangle, RelativeEstimates(2), Eigen::Vector3d::Zero()),
               DomainError);
}

TEST(EstimatedControl, PerAgentEstimatesMoveTheCentroid) {
  std::mt19937_64 rng(3);
  const Eigen::VectorXd r = test::random_triangle(rng);
  RelativeEstimates t = exact_tables(kTriangle, r);
  for (auto& table : t) {
    for (auto& [j, v] : table) v += test::uniform_vector(rng, 2, -2, 2);
  }
  const Eigen::VectorXd e =
      distance_errors(edge_vectors(kTriangle, r), DesiredDistances::uniform(kTriangle, 10.0));
  EXPECT_GT(velocity_sum(estimated_control(kTriangle, t, e)).norm(), 1e-3);
}

TEST(MismatchControl, ReducesToIdealWithoutMismatch) {
  std::mt19937_64 rng(4);
  const DesiredDistances d = DesiredDistances::uniform(kTriangle, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd r = test::random_triangle(rng);
    const Eigen::VectorXd e = distance_errors(edge_vectors(kTriangle, r), d);
    const Eigen::VectorXd u = mismatch_control(kTriangle, assign_ownership(kTriangle),
                                               exact_shared(kTriangle, r), e,
                                               MismatchConfig::uniform(kTriangle, 0.0));
    EXPECT_LT((u - ideal_control(kTriangle, r, d)).norm(), 1e-9);
  }
}

TEST(MismatchControl, TriangleSignPattern) {
  std::mt19937_64 rng(5);
  std::vector<Eigen::Vector2d> s;
  for (int k = 0; k < 3; ++k) s.push_back(test::uniform_vector(rng, 2, -5, 5));
  const Eigen::Vector3d e = test::uniform_vector(rng, 3, -3, 3);
  const double a = 0.7;
  const Eigen::VectorXd u = mismatch_control(kTriangle, assign_ownership(kTriangle), s, e,
                                             MismatchConfig::uniform(kTriangle, a));
  const Eigen::Vector2d& r12 = s[0];
  const Eigen::Vector2d& r23 = s[1];
  const Eigen::Vector2d& r13 = s[2];
  const double e12 = e(0), e23 = e(1), e13 = e(2);
  EXPECT_LT((u.segment<2>(0) - (-r12 * (e12 - a) - r13 * (e13 - a))).norm(), 1e-12);
  EXPECT_LT((u.segment<2>(2) - (r12 * (e12 + a) - r23 * (e23 - a))).norm(), 1e-12);
  EXPECT_LT((u.segment<2>(4) - (r13 * (e13 + a) + r23 * (e23 + a))).norm(), 1e-12);

  EXPECT_THROW(mismatch_control(kTriangle, EdgeOwnership{{0, 0, 0}}, s, e,
                                MismatchConfig::uniform(kTriangle, a)),
               DomainError);
  EXPECT_THROW(mismatch_control(kTriangle, assign_ownership(kTriangle), {s[0]}, e,
                                MismatchConfig::uniform(kTriangle, a)),
               DomainError);
}

TEST(MismatchControl, MismatchTermsCancelWithinEachEdge) {
  // The a-part of edge k pushes both endpoints along r̂_k by the same amount, so
  // the edge's own relative velocity never sees it; the centroid moves by
  // (2/o) Σ a_k r̂_k.
  std::mt19937_64 rng(6);
  const Graph g = Graph::complete(4);
  const EdgeOwnership own = assign_ownership(g);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd r = test::uniform_vector(rng, 8, -10, 10);
    const std::vector<Eigen::Vector2d> s = exact_shared(g, r);
    const Eigen::VectorXd e = test::uniform_vector(rng, g.edge_count(), -2, 2);
    MismatchConfig a = MismatchConfig::uniform(g, 0.0);
    for (double& x : a.a) x = test::uniform(rng, -1, 1);
    const Eigen::VectorXd with = mismatch_control(g, own, s, e, a);
    const Eigen::VectorXd without = mismatch_control(g, own, s, e, MismatchConfig::uniform(g, 0.0));
    const Eigen::VectorXd delta = with - without;
    Eigen::Vector2d expected = Eigen::Vector2d::Zero();
    for (int k = 0; k < g.edge_count(); ++k) {
      // a_k alone shifts both endpoints of edge k by a_k r̂_k and nobody else
      MismatchConfig single = MismatchConfig::uniform(g, 0.0);
      single.a[k] = a.a[k];
      const Eigen::VectorXd dk = mismatch_control(g, own, s, e, single) - without;
      const Edge& edge = g.edge(k);
      Eigen::VectorXd expected_k = Eigen::VectorXd::Zero(dk.size());
      expected_k.segment<2>(2 * edge.tail) = a.a[k] * s[k];
      expected_k.segment<2>(2 * edge.head) = a.a[k] * s[k];
      EXPECT_LT((dk - expected_k).norm(), 1e-12);
      expected += 2.0 * a.a[k] * s[k];
    }
    EXPECT_LT((velocity_sum(delta) - expected).norm(), 1e-10);
    EXPECT_LT(velocity_sum(without).norm(), 1e-9);
  }
}
