#include "relloc/network.hpp"

#include <algorithm>
#include <cmath>

namespace relloc {

Graph::Graph(int agent_count, std::vector<Edge> edges)
    : agent_count_(agent_count), edges_(std::move(edges)) {
  if (agent_count_ < 1) {
    throw DomainError("graph needs at least one agent");
  }
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const Edge& e = edges_[k];
    if (e.tail < 0 || e.tail >= agent_count_ || e.head < 0 || e.head >= agent_count_) {
      throw DomainError("edge #" + std::to_string(k + 1) + " references an unknown agent");
    }
    if (e.tail == e.head) {
      throw DomainError("edge #" + std::to_string(k + 1) + " is a self-loop");
    }
    for (std::size_t m = 0; m < k; ++m) {
      const Edge& f = edges_[m];
      if ((f.tail == e.tail && f.head == e.head) || (f.tail == e.head && f.head == e.tail)) {
        throw DomainError("edge #" + std::to_string(k + 1) + " duplicates edge #" + std::to_string(m + 1));
      }
    }
  }
}

int Graph::find_edge(int i, int j) const {
  for (int k = 0; k < edge_count(); ++k) {
    const Edge& e = edges_[k];
    if ((e.tail == i && e.head == j) || (e.tail == j && e.head == i)) {
      return k;
    }
  }
  return -1;
}

Graph Graph::complete(int agent_count) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < agent_count; ++i) {
    edges.push_back({i, i + 1});
  }
  for (int i = 0; i < agent_count; ++i) {
    for (int j = i + 2; j < agent_count; ++j) {
      edges.push_back({i, j});
    }
  }
  return Graph(agent_count, std::move(edges));
}

DesiredDistances::DesiredDistances(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError("desired distances must be positive and finite");
    }
  }
}

DesiredDistances DesiredDistances::uniform(const Graph& graph, double d) {
  return DesiredDistances(std::vector<double>(graph.edge_count(), d));
}

std::vector<int> neighbors(const Graph& graph, int i) {
  if (i < 0 || i >= graph.agent_count()) {
    throw DomainError("agent id out of range");
  }
  std::vector<int> out;
  for (const Edge& e : graph.edges()) {
    if (e.tail == i) out.push_back(e.head);
    if (e.head == i) out.push_back(e.tail);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::MatrixXd incidence_matrix(const Graph& graph) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(graph.agent_count(), graph.edge_count());
  for (int k = 0; k < graph.edge_count(); ++k) {
    b(graph.edge(k).tail, k) = 1.0;
    b(graph.edge(k).head, k) = -1.0;
  }
  return b;
}

namespace {

void check_positions(const Graph& graph, const Eigen::VectorXd& r) {
  if (r.size() != 2 * graph.agent_count()) {
    throw DomainError("position stack must have length 2o");
  }
}

void check_edge_vectors(const Graph& graph, const Eigen::VectorXd& z1) {
  if (z1.size() != 2 * graph.edge_count()) {
    throw DomainError("edge-vector stack must have length 2|E|");
  }
}

}  // namespace

Eigen::VectorXd edge_vectors(const Graph& graph, const Eigen::VectorXd& r) {
  check_positions(graph, r);
  Eigen::VectorXd z1(2 * graph.edge_count());
  for (int k = 0; k < graph.edge_count(); ++k) {
    const Edge& e = graph.edge(k);
    z1.segment<2>(2 * k) = r.segment<2>(2 * e.tail) - r.segment<2>(2 * e.head);
  }
  return z1;
}

Eigen::VectorXd relative_position_stack(const Graph& graph, const Eigen::VectorXd& r) {
  const Eigen::VectorXd z1 = edge_vectors(graph, r);
  Eigen::VectorXd z(2 * z1.size());
  z << z1, -z1;
  return z;
}

Eigen::VectorXd distance_errors(const Eigen::VectorXd& z1, const DesiredDistances& d) {
  if (z1.size() != 2 * d.size()) {
    throw DomainError("edge vectors and desired distances disagree in length");
  }
  Eigen::VectorXd e(d.size());
  for (int k = 0; k < d.size(); ++k) {
    e(k) = z1.segment<2>(2 * k).squaredNorm() - d[k] * d[k];
  }
  return e;
}

Eigen::MatrixXd rigidity_matrix(const Eigen::VectorXd& z1, const Graph& graph) {
  check_edge_vectors(graph, z1);
  Eigen::MatrixXd rig = Eigen::MatrixXd::Zero(graph.edge_count(), 2 * graph.agent_count());
  for (int k = 0; k < graph.edge_count(); ++k) {
    const Edge& e = graph.edge(k);
    rig.block<1, 2>(k, 2 * e.tail) = z1.segment<2>(2 * k).transpose();
    rig.block<1, 2>(k, 2 * e.head) = -z1.segment<2>(2 * k).transpose();
  }
  return rig;
}

double formation_potential(const Graph& graph, const Eigen::VectorXd& r,
                           const DesiredDistances& d) {
  return 0.25 * distance_errors(edge_vectors(graph, r), d).squaredNorm();
}

}  // namespace relloc
