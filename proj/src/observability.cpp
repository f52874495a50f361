#include "relloc/observability.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "relloc/estimator.hpp"

namespace relloc {

Eigen::VectorXd observation(const GroupElement& q) {
  Eigen::VectorXd y(q.n() + 1);
  for (int k = 0; k < q.n(); ++k) {
    y(k) = 0.5 * q.p(k).squaredNorm();
  }
  y(q.n()) = q.theta();
  return y;
}

Eigen::MatrixXd observation_jacobian(const GroupElement& q) {
  const int n = q.n();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n + 1, 2 * n + 1);
  for (int k = 0; k < n; ++k) {
    h.block<1, 2>(k, 2 * k) = q.p(k).transpose();
  }
  h(n, 2 * n) = 1.0;
  return h;
}

namespace {

// d(E1_k h_k) and d(E2_k h_k); E1_k h_k = c x + s y, E2_k h_k = -s x + c y.
void lie_derivative_rows(const GroupElement& q, int k, Eigen::MatrixXd& out, int row) {
  const int n = q.n();
  const double c = std::cos(q.theta());
  const double s = std::sin(q.theta());
  const double x = q.p()(2 * k);
  const double y = q.p()(2 * k + 1);
  out.row(row).setZero();
  out.row(row + 1).setZero();
  out(row, 2 * k) = c;
  out(row, 2 * k + 1) = s;
  out(row, 2 * n) = -(x * s - y * c);
  out(row + 1, 2 * k) = -s;
  out(row + 1, 2 * k + 1) = c;
  out(row + 1, 2 * n) = -(x * c + y * s);
}

}  // namespace

Eigen::MatrixXd codistribution_matrix(const GroupElement& q, int depth) {
  if (depth < 0) {
    throw DomainError("codistribution depth must be non-negative");
  }
  const int n = q.n();
  const int higher = depth >= 2 ? depth - 1 : 0;
  const int rows = (n + 1) + (depth >= 1 ? 2 * n : 0) + 2 * n * higher;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, 2 * n + 1);

  m.topRows(n + 1) = observation_jacobian(q);
  if (depth == 0) {
    return m;
  }

  Eigen::MatrixXd first(2 * n, 2 * n + 1);
  for (int k = 0; k < n; ++k) {
    lie_derivative_rows(q, k, first, 2 * k);
  }
  m.middleRows(n + 1, 2 * n) = first;

  // E_theta maps E1 h -> E2 h -> -E1 h -> -E2 h -> E1 h.
  int row = 3 * n + 1;
  for (int order = 1; order <= higher; ++order) {
    for (int k = 0; k < n; ++k) {
      for (int a = 0; a < 2; ++a) {
        const int phase = (a + order) % 4;
        const double sign = phase >= 2 ? -1.0 : 1.0;
        m.row(row++) = sign * first.row(2 * k + (phase % 2));
      }
    }
  }
  return m;
}

CodistributionReport codistribution_rank(const GroupElement& q, double tol, int depth) {
  if (!(tol > 0.0)) {
    throw DomainError("rank tolerance must be positive");
  }
  const Eigen::MatrixXd m = codistribution_matrix(q, depth);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd sv = svd.singularValues();

  CodistributionReport report;
  report.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double cutoff = sv.size() > 0 ? tol * sv(0) : 0.0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++report.rank;
  }
  report.observable = report.rank == q.dim();
  return report;
}

GramianReport empirical_gramian(std::span<const TrajectorySample> trajectory, double dt,
                                double tol) {
  if (trajectory.size() < 2) {
    throw DomainError("gramian needs at least two trajectory samples");
  }
  if (!(dt > 0.0)) {
    throw DomainError("gramian needs dt > 0");
  }
  const int n = trajectory.front().state.n();
  const int dim = 2 * n + 1;

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(dim, dim);
  for (const TrajectorySample& sample : trajectory) {
    if (sample.state.n() != n || sample.input.n() != n) {
      throw DomainError("gramian trajectory samples disagree in neighbor count");
    }
    const Eigen::MatrixXd hphi = observation_jacobian(sample.state) * phi;
    gram.noalias() += dt * hphi.transpose() * hphi;
    phi = kinematics_transition(sample.state, sample.input, dt) * phi;
  }
  gram = 0.5 * (gram + gram.transpose()).eval();

  GramianReport report;
  report.gramian = gram;

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd lambda = eig.eigenvalues();
  const double lambda_max = lambda.maxCoeff();
  for (int i = 0; i < lambda.size(); ++i) {
    if (lambda(i) > tol * lambda_max) ++report.rank;
  }

  const double block_floor = tol * gram.trace() / dim;
  for (int k = 0; k < n; ++k) {
    const Eigen::Matrix2d block = gram.block<2, 2>(2 * k, 2 * k);
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> be(block, Eigen::EigenvaluesOnly);
    if (be.eigenvalues()(0) < block_floor) {
      report.deficient_neighbor_blocks.push_back(k);
    }
  }
  return report;
}

}  // namespace relloc
