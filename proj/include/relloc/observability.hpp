#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "relloc/lie_group.hpp"

namespace relloc {

/// Outputs h_k = |p_k|^2 / 2 for each neighbor, then h_{n+1} = theta.
Eigen::VectorXd observation(const GroupElement& q);

/// (n+1) x (2n+1) Jacobian of `observation`: row k is p_kᵀ on the (x_k, y_k)
/// columns, the last row is the theta covector.
Eigen::MatrixXd observation_jacobian(const GroupElement& q);

/**
 * Stacked differentials of the outputs and their Lie derivatives along the
 * left-invariant basis fields, in coordinates (x1, y1, ..., xn, yn, theta).
 *
 * Row order: dh_1..dh_n, dtheta, then for each neighbor k the pair
 * d(E1_k h_k), d(E2_k h_k). Derivatives that vanish identically are left out.
 *
 * `depth` counts the order of the Lie derivatives included. Depth 0 keeps the
 * output differentials only; depth m >= 2 appends d(E_theta^{m-1} E^a_k h_k),
 * the only higher-order terms with a nonzero differential.
 */
Eigen::MatrixXd codistribution_matrix(const GroupElement& q, int depth = 1);

struct CodistributionReport {
  int rank = 0;
  std::vector<double> singular_values;  // descending
  bool observable = false;              // rank == 2n + 1
};

inline constexpr double kDefaultRankTolerance = 1e-9;

/// Numerical rank of the codistribution; singular values below
/// tol * sigma_max count as zero.
CodistributionReport codistribution_rank(const GroupElement& q,
                                         double tol = kDefaultRankTolerance, int depth = 1);

struct TrajectorySample {
  GroupElement state;
  AlgebraElement input;
};

struct GramianReport {
  Eigen::MatrixXd gramian;
  int rank = 0;
  std::vector<int> deficient_neighbor_blocks;  // 0-based neighbor slots
};

inline constexpr double kGramianTolerance = 1e-8;

/**
 * Empirical observability Gramian G = Σ_t Φ(t)ᵀ H(t)ᵀ H(t) Φ(t) dt along a
 * sampled trajectory.
 *
 * Φ accumulates the discrete kinematic transition from the first sample.
 * The rank counts eigenvalues above tol * lambda_max. Neighbor k is reported
 * deficient when the smallest eigenvalue of the (x_k, y_k) principal block is
 * below tol * trace(G) / (2n+1).
 */
GramianReport empirical_gramian(std::span<const TrajectorySample> trajectory, double dt,
                                double tol = kGramianTolerance);

}  // namespace relloc
