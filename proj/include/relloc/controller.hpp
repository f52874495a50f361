#pragma once

#include <map>
#include <vector>

#include <Eigen/Core>

#include "relloc/network.hpp"

namespace relloc {

/// Owner agent of each edge, aligned with Graph::edges().
struct EdgeOwnership {
  std::vector<int> owner;
};

/// Per-edge mismatch a_k added to the error signal (squared-length units).
struct MismatchConfig {
  std::vector<double> a;

  static MismatchConfig uniform(const Graph& graph, double value);
};

/// Each agent's own estimates: estimates[i][j] approximates r_ij = r_i - r_j.
using RelativeEstimates = std::vector<std::map<int, Eigen::Vector2d>>;

/// Default ownership: the tail of every edge owns it.
EdgeOwnership assign_ownership(const Graph& graph);

/// Throws DomainError unless every owner is an endpoint of its edge.
void validate_ownership(const Graph& graph, const EdgeOwnership& ownership);

/// Gradient law r_i' = -Σ_j r_ij e_ij, evaluated as -R(z1)ᵀ e.
Eigen::VectorXd ideal_control(const Graph& graph, const Eigen::VectorXd& r,
                              const DesiredDistances& d);

/// Gradient law with every agent using its own estimates r̂_ij. No symmetry
/// between r̂_ij and r̂_ji is assumed.
Eigen::VectorXd estimated_control(const Graph& graph, const RelativeEstimates& estimates,
                                  const Eigen::VectorXd& e);

/**
 * Mismatch law on shared per-edge estimates r̂_k of r_tail - r_head.
 *
 * The tail applies -r̂_k (e_k - a_k) and the head +r̂_k (e_k + a_k). With
 * a = 0 and exact estimates this is the gradient law.
 */
Eigen::VectorXd mismatch_control(const Graph& graph, const EdgeOwnership& ownership,
                                 const std::vector<Eigen::Vector2d>& shared_estimates,
                                 const Eigen::VectorXd& e, const MismatchConfig& mismatch);

}  // namespace relloc
