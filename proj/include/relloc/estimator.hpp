#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "relloc/lie_group.hpp"

namespace relloc {

/// The innovation covariance could not be inverted; the caller should skip the update.
class SingularUpdateError : public std::runtime_error {
 public:
  explicit SingularUpdateError(const std::string& what) : std::runtime_error(what) {}
};

struct NoiseConfig {
  double process_position_psd = 1e-4;  // length^2 / time
  double process_heading_psd = 1e-6;   // rad^2 / time
  double meas_distance_var = 1e-4;     // variance of |p_k|^2 / 2, length^4
  double meas_heading_var = 1e-6;      // rad^2

  void validate() const;
};

struct EstimatorState {
  GroupElement mean;
  Eigen::MatrixXd covariance;

  int n() const { return mean.n(); }
};

/// Discrete linearization F = I + dt ∂f/∂(p, theta) of p_k' = R(theta) v_k,
/// theta' = w. Only the theta column is nonzero off the diagonal:
/// ∂p_k/∂theta = dt R(theta + pi/2) v_k.
Eigen::MatrixXd kinematics_transition(const GroupElement& q, const AlgebraElement& xi, double dt);

/// Propagates the mean along the exact group flow and the covariance by F P Fᵀ + Q dt.
EstimatorState predict(const EstimatorState& state, const AlgebraElement& xi, double dt,
                       const NoiseConfig& noise);

/**
 * EKF correction with y = (|p_1|^2/2, ..., |p_n|^2/2, theta).
 *
 * The mean is corrected additively in coordinates (heading left unwrapped),
 * the heading innovation is wrapped to (-pi, pi] and the covariance goes
 * through the Joseph form followed by symmetrization.
 *
 * Throws SingularUpdateError when H P Hᵀ + R cannot be factorized.
 */
EstimatorState update(const EstimatorState& state, const Eigen::VectorXd& y,
                      const NoiseConfig& noise);

/// Variance of a uniform draw on [-b, b].
inline double uniform_offset_variance(double offset_bound) {
  return offset_bound * offset_bound / 3.0;
}

/**
 * Perturbs every position coordinate of `truth` by an independent uniform
 * draw on [-offset_bound, offset_bound]; the heading is copied. Covariance is
 * diag(position_var, ..., heading_var).
 */
EstimatorState initialize(const GroupElement& truth, double offset_bound, std::mt19937_64& rng,
                          double position_var, double heading_var);

EstimatorState initialize(const GroupElement& truth, double offset_bound, std::uint64_t seed,
                          double position_var, double heading_var);

}  // namespace relloc
