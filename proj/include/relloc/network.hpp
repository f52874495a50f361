#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace relloc {

/// Raised when an input violates an operation's domain (bad ids, sizes, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Oriented edge between two agents. Ids are 0-based.
struct Edge {
  int tail = 0;
  int head = 0;

  bool operator==(const Edge&) const = default;
};

/**
 * Undirected sensing graph with a fixed orientation per edge.
 *
 * The orientation decides the sign of each incidence column and which
 * endpoint owns the edge. Ids are 0-based; files and the CLI use 1-based ids
 * and convert at the boundary.
 */
class Graph {
 public:
  Graph(int agent_count, std::vector<Edge> edges);

  int agent_count() const { return agent_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int k) const { return edges_.at(k); }

  /// Index of the edge joining i and j in either orientation, or -1.
  int find_edge(int i, int j) const;

  /// Complete graph: the path edges (i, i+1) first, then the chords in
  /// lexicographic order. A triangle comes out as (0,1),(1,2),(0,2).
  static Graph complete(int agent_count);

 private:
  int agent_count_;
  std::vector<Edge> edges_;
};

/// Per-edge target distances, aligned with Graph::edges().
class DesiredDistances {
 public:
  explicit DesiredDistances(std::vector<double> values);
  static DesiredDistances uniform(const Graph& graph, double d);

  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int k) const { return values_[k]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

/// Agents sharing an edge with i, ascending.
std::vector<int> neighbors(const Graph& graph, int i);

/// o x |E| matrix with +1 at the tail row and -1 at the head row of each column.
Eigen::MatrixXd incidence_matrix(const Graph& graph);

/// z = (B̄ᵀ; -B̄ᵀ) r with B̄ = B ⊗ I2. Length 4|E|.
Eigen::VectorXd relative_position_stack(const Graph& graph, const Eigen::VectorXd& r);

/// First half of the relative-position stack: block k is r_tail - r_head.
Eigen::VectorXd edge_vectors(const Graph& graph, const Eigen::VectorXd& r);

/// e_k = |z1_k|^2 - d_k^2.
Eigen::VectorXd distance_errors(const Eigen::VectorXd& z1, const DesiredDistances& d);

/// |E| x 2o matrix diag{z1}ᵀ (B ⊗ I2)ᵀ.
Eigen::MatrixXd rigidity_matrix(const Eigen::VectorXd& z1, const Graph& graph);

/// V(r) = 1/4 Σ_k e_k^2, the potential whose negative gradient is the ideal law.
double formation_potential(const Graph& graph, const Eigen::VectorXd& r,
                           const DesiredDistances& d);

}  // namespace relloc
