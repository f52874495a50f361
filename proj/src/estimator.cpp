#include "relloc/estimator.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>

#include "relloc/observability.hpp"

namespace relloc {

void NoiseConfig::validate() const {
  if (!(process_position_psd >= 0.0) || !(process_heading_psd >= 0.0)) {
    throw DomainError("process noise densities must be non-negative");
  }
  if (!(meas_distance_var > 0.0) || !(meas_heading_var > 0.0)) {
    throw DomainError("measurement variances must be positive");
  }
}

Eigen::MatrixXd kinematics_transition(const GroupElement& q, const AlgebraElement& xi, double dt) {
  const int n = q.n();
  Eigen::MatrixXd f = Eigen::MatrixXd::Identity(2 * n + 1, 2 * n + 1);
  const Eigen::Matrix2d rot = rotation(q.theta() + 0.5 * std::numbers::pi);
  for (int k = 0; k < n; ++k) {
    f.block<2, 1>(2 * k, 2 * n) = dt * rot * xi.v.segment<2>(2 * k);
  }
  return f;
}

EstimatorState predict(const EstimatorState& state, const AlgebraElement& xi, double dt,
                       const NoiseConfig& noise) {
  if (!(dt > 0.0)) {
    throw DomainError("predict: dt must be positive");
  }
  if (xi.n() != state.n()) {
    throw DomainError("predict: input dimension does not match the state");
  }
  const int n = state.n();
  const Eigen::MatrixXd f = kinematics_transition(state.mean, xi, dt);

  Eigen::VectorXd q_diag(2 * n + 1);
  q_diag.head(2 * n).setConstant(dt * noise.process_position_psd);
  q_diag(2 * n) = dt * noise.process_heading_psd;

  Eigen::MatrixXd p = f * state.covariance * f.transpose();
  p.diagonal() += q_diag;
  p = 0.5 * (p + p.transpose()).eval();
  return {step_body_velocity(state.mean, xi, dt), std::move(p)};
}

EstimatorState update(const EstimatorState& state, const Eigen::VectorXd& y,
                      const NoiseConfig& noise) {
  const int n = state.n();
  if (y.size() != n + 1) {
    throw DomainError("update: measurement must have n + 1 entries");
  }
  const Eigen::MatrixXd h = observation_jacobian(state.mean);
  Eigen::VectorXd innovation = y - observation(state.mean);
  innovation(n) = wrap_angle(innovation(n));

  Eigen::VectorXd r_diag(n + 1);
  r_diag.head(n).setConstant(noise.meas_distance_var);
  r_diag(n) = noise.meas_heading_var;

  const Eigen::MatrixXd& p = state.covariance;
  const Eigen::MatrixXd pht = p * h.transpose();
  Eigen::MatrixXd s = h * pht;
  s.diagonal() += r_diag;

  if (!s.allFinite()) {
    throw SingularUpdateError("innovation covariance is not finite");
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= 1e-14 * ldlt.vectorD().maxCoeff()) {
    throw SingularUpdateError("innovation covariance is singular at working precision");
  }
  const Eigen::MatrixXd gain = ldlt.solve(pht.transpose()).transpose();

  const Eigen::VectorXd coords = state.mean.coordinates() + gain * innovation;

  const int dim = 2 * n + 1;
  const Eigen::MatrixXd ikh = Eigen::MatrixXd::Identity(dim, dim) - gain * h;
  Eigen::MatrixXd cov = ikh * p * ikh.transpose() + gain * r_diag.asDiagonal() * gain.transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();

  return {GroupElement::from_coordinates(coords), std::move(cov)};
}

EstimatorState initialize(const GroupElement& truth, double offset_bound, std::mt19937_64& rng,
                          double position_var, double heading_var) {
  if (!(offset_bound >= 0.0)) {
    throw DomainError("initialize: offset bound must be non-negative");
  }
  if (!(position_var > 0.0) || !(heading_var > 0.0)) {
    throw DomainError("initialize: initial variances must be positive");
  }
  Eigen::VectorXd p = truth.p();
  if (offset_bound > 0.0) {
    std::uniform_real_distribution<double> offset(-offset_bound, offset_bound);
    for (int i = 0; i < p.size(); ++i) {
      p(i) += offset(rng);
    }
  }
  const int dim = truth.dim();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  cov.diagonal().head(dim - 1).setConstant(position_var);
  cov(dim - 1, dim - 1) = heading_var;
  return {GroupElement(std::move(p), truth.theta()), std::move(cov)};
}

EstimatorState initialize(const GroupElement& truth, double offset_bound, std::uint64_t seed,
                          double position_var, double heading_var) {
  std::mt19937_64 rng(seed);
  return initialize(truth, offset_bound, rng, position_var, heading_var);
}

}  // namespace relloc
