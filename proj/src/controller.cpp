#include "relloc/controller.hpp"

#include <cmath>
#include <string>

namespace relloc {

MismatchConfig MismatchConfig::uniform(const Graph& graph, double value) {
  return MismatchConfig{std::vector<double>(graph.edge_count(), value)};
}

EdgeOwnership assign_ownership(const Graph& graph) {
  EdgeOwnership ownership;
  ownership.owner.reserve(graph.edge_count());
  for (const Edge& e : graph.edges()) {
    ownership.owner.push_back(e.tail);
  }
  return ownership;
}

void validate_ownership(const Graph& graph, const EdgeOwnership& ownership) {
  if (static_cast<int>(ownership.owner.size()) != graph.edge_count()) {
    throw DomainError("ownership must list one owner per edge");
  }
  for (int k = 0; k < graph.edge_count(); ++k) {
    const int o = ownership.owner[k];
    if (o != graph.edge(k).tail && o != graph.edge(k).head) {
      throw DomainError("owner of edge " + std::to_string(k) + " is not an endpoint");
    }
  }
}

Eigen::VectorXd ideal_control(const Graph& graph, const Eigen::VectorXd& r,
                              const DesiredDistances& d) {
  if (d.size() != graph.edge_count()) {
    throw DomainError("one desired distance per edge is required");
  }
  const Eigen::VectorXd z1 = edge_vectors(graph, r);
  const Eigen::VectorXd e = distance_errors(z1, d);
  return -rigidity_matrix(z1, graph).transpose() * e;
}

Eigen::VectorXd estimated_control(const Graph& graph, const RelativeEstimates& estimates,
                                  const Eigen::VectorXd& e) {
  if (static_cast<int>(estimates.size()) != graph.agent_count()) {
    throw DomainError("estimated_control needs one estimate table per agent");
  }
  if (e.size() != graph.edge_count()) {
    throw DomainError("estimated_control needs one distance error per edge");
  }
  auto lookup = [&](int i, int j) -> const Eigen::Vector2d& {
    const auto it = estimates[i].find(j);
    if (it == estimates[i].end()) {
      throw DomainError("agent " + std::to_string(i + 1) + " has no estimate for neighbor " +
                        std::to_string(j + 1));
    }
    return it->second;
  };

  Eigen::VectorXd u = Eigen::VectorXd::Zero(2 * graph.agent_count());
  for (int k = 0; k < graph.edge_count(); ++k) {
    const Edge& edge = graph.edge(k);
    u.segment<2>(2 * edge.tail) -= lookup(edge.tail, edge.head) * e(k);
    u.segment<2>(2 * edge.head) -= lookup(edge.head, edge.tail) * e(k);
  }
  return u;
}

Eigen::VectorXd mismatch_control(const Graph& graph, const EdgeOwnership& ownership,
                                 const std::vector<Eigen::Vector2d>& shared_estimates,
                                 const Eigen::VectorXd& e, const MismatchConfig& mismatch) {
  validate_ownership(graph, ownership);
  const int m = graph.edge_count();
  if (static_cast<int>(shared_estimates.size()) != m || e.size() != m ||
      static_cast<int>(mismatch.a.size()) != m) {
    throw DomainError("mismatch_control needs one estimate, error and mismatch per edge");
  }
  Eigen::VectorXd u = Eigen::VectorXd::Zero(2 * graph.agent_count());
  for (int k = 0; k < m; ++k) {
    const Edge& edge = graph.edge(k);
    const Eigen::Vector2d& rk = shared_estimates[k];
    u.segment<2>(2 * edge.tail) -= rk * (e(k) - mismatch.a[k]);
    u.segment<2>(2 * edge.head) += rk * (e(k) + mismatch.a[k]);
  }
  return u;
}

}  // namespace relloc
