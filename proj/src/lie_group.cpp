#include "relloc/lie_group.hpp"

#include <cmath>
#include <numbers>

namespace relloc {

Eigen::Matrix2d rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

double wrap_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::remainder(theta, two_pi);  // [-pi, pi]
  if (w <= -std::numbers::pi) w += two_pi;
  return w;
}

GroupElement::GroupElement(Eigen::VectorXd p, double theta) : p_(std::move(p)), theta_(theta) {
  if (p_.size() < 2 || p_.size() % 2 != 0) {
    throw DomainError("group element needs 2n position coordinates with n >= 1");
  }
}

Eigen::VectorXd GroupElement::coordinates() const {
  Eigen::VectorXd c(dim());
  c << p_, theta_;
  return c;
}

GroupElement GroupElement::from_coordinates(const Eigen::VectorXd& coords) {
  if (coords.size() < 3 || coords.size() % 2 == 0) {
    throw DomainError("coordinates must have length 2n+1 with n >= 1");
  }
  return GroupElement(coords.head(coords.size() - 1), coords(coords.size() - 1));
}

AlgebraElement::AlgebraElement(Eigen::VectorXd v_, double w_) : v(std::move(v_)), w(w_) {
  if (v.size() < 2 || v.size() % 2 != 0) {
    throw DomainError("algebra element needs 2n velocity coordinates with n >= 1");
  }
}

GroupElement identity(int n) {
  if (n < 1) {
    throw DomainError("identity needs n >= 1");
  }
  return GroupElement(Eigen::VectorXd::Zero(2 * n), 0.0);
}

GroupElement compose(const GroupElement& a, const GroupElement& b) {
  if (a.n() != b.n()) {
    throw DomainError("compose: neighbor counts differ");
  }
  const Eigen::Matrix2d rot = rotation(a.theta());
  Eigen::VectorXd p(a.p().size());
  for (int k = 0; k < a.n(); ++k) {
    p.segment<2>(2 * k) = rot * b.p(k) + a.p(k);
  }
  return GroupElement(std::move(p), a.theta() + b.theta());
}

GroupElement inverse(const GroupElement& q) {
  const Eigen::Matrix2d rot_t = rotation(-q.theta());
  Eigen::VectorXd p(q.p().size());
  for (int k = 0; k < q.n(); ++k) {
    p.segment<2>(2 * k) = -(rot_t * q.p(k));
  }
  return GroupElement(std::move(p), -q.theta());
}

GroupElement exp(const AlgebraElement& xi) {
  const double w = xi.w;
  double a = 1.0;
  double b = 0.0;
  if (std::abs(w) < kExpSmallAngle) {
    const double w2 = w * w;
    a = 1.0 - w2 / 6.0;
    b = 0.5 * w * (1.0 - w2 / 12.0);
  } else {
    // 1 - cos w written as 2 sin^2(w/2) to avoid cancellation
    const double h = std::sin(0.5 * w);
    a = std::sin(w) / w;
    b = 2.0 * h * h / w;
  }
  Eigen::VectorXd p(xi.v.size());
  for (int k = 0; k < xi.n(); ++k) {
    const double vx = xi.v(2 * k);
    const double vy = xi.v(2 * k + 1);
    p(2 * k) = a * vx - b * vy;
    p(2 * k + 1) = a * vy + b * vx;
  }
  return GroupElement(std::move(p), w);
}

Eigen::MatrixXd left_invariant_basis(const GroupElement& q) {
  const int dim = q.dim();
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(dim, dim);
  const Eigen::Matrix2d rot = rotation(q.theta());
  for (int k = 0; k < q.n(); ++k) {
    basis.block<2, 2>(2 * k, 2 * k) = rot;
  }
  basis(dim - 1, dim - 1) = 1.0;
  return basis;
}

GroupElement step_body_velocity(const GroupElement& q, const AlgebraElement& xi, double dt) {
  if (dt < 0.0) {
    throw DomainError("step_body_velocity: dt must be non-negative");
  }
  return compose(q, exp(xi.scaled(dt)));
}

Eigen::MatrixXd to_matrix(const GroupElement& q) {
  const int dim = q.dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  const Eigen::Matrix2d rot = rotation(q.theta());
  for (int k = 0; k < q.n(); ++k) {
    m.block<2, 2>(2 * k, 2 * k) = rot;
  }
  m.col(dim - 1).head(dim - 1) = q.p();
  m(dim - 1, dim - 1) = 1.0;
  return m;
}

Eigen::MatrixXd to_matrix(const AlgebraElement& xi) {
  const int dim = static_cast<int>(xi.v.size()) + 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::Matrix2d omega;
  omega << 0.0, -xi.w, xi.w, 0.0;
  for (int k = 0; k < xi.n(); ++k) {
    m.block<2, 2>(2 * k, 2 * k) = omega;
  }
  m.col(dim - 1).head(dim - 1) = xi.v;
  return m;
}

}  // namespace relloc
