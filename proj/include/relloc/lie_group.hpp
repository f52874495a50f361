#pragma once

#include <Eigen/Core>

#include "relloc/network.hpp"

namespace relloc {

/// Rotation matrix of angle theta.
Eigen::Matrix2d rotation(double theta);

/// Reduces an angle to (-pi, pi].
double wrap_angle(double theta);

/**
 * Point of G_i = R^{2n} x SO(2): the stacked positions of n neighbors
 * relative to agent i (world axes) together with the heading of agent i.
 *
 * The heading is kept as an unwrapped scalar; R(theta) is built on demand.
 */
class GroupElement {
 public:
  GroupElement(Eigen::VectorXd p, double theta);

  int n() const { return static_cast<int>(p_.size() / 2); }
  int dim() const { return static_cast<int>(p_.size()) + 1; }
  const Eigen::VectorXd& p() const { return p_; }
  Eigen::Vector2d p(int k) const { return p_.segment<2>(2 * k); }
  double theta() const { return theta_; }

  /// Coordinates (x1, y1, ..., xn, yn, theta).
  Eigen::VectorXd coordinates() const;
  static GroupElement from_coordinates(const Eigen::VectorXd& coords);

 private:
  Eigen::VectorXd p_;
  double theta_;
};

/// Element (v, w) of the Lie algebra: body-frame relative velocities and turn rate.
struct AlgebraElement {
  Eigen::VectorXd v;
  double w = 0.0;

  AlgebraElement(Eigen::VectorXd v_, double w_);

  int n() const { return static_cast<int>(v.size() / 2); }
  AlgebraElement scaled(double s) const { return {s * v, s * w}; }
};

GroupElement identity(int n);
GroupElement compose(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& q);

/// Closed-form exponential. Block k of p is a(w) v_k + b(w) J v_k with
/// a = sin(w)/w, b = (1 - cos w)/w, which is (R(w) - I) v_k^perp / w.
GroupElement exp(const AlgebraElement& xi);

/// Below this |w| the exponential uses a Taylor expansion of a(w), b(w).
inline constexpr double kExpSmallAngle = 1e-8;

/// Columns are the left-invariant fields E1_1, E2_1, ..., E1_n, E2_n, E_theta at q.
Eigen::MatrixXd left_invariant_basis(const GroupElement& q);

/// q · exp(dt xi): exact flow of p_j' = R v_j, theta' = w for constant xi.
GroupElement step_body_velocity(const GroupElement& q, const AlgebraElement& xi, double dt);

/// Homogeneous (2n+1) x (2n+1) matrix with n diagonal copies of R(theta).
Eigen::MatrixXd to_matrix(const GroupElement& q);

/// Homogeneous (2n+1) x (2n+1) matrix with n diagonal copies of w J and v in the last column.
Eigen::MatrixXd to_matrix(const AlgebraElement& xi);

}  // namespace relloc
