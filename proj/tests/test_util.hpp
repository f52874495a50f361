#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Core>

#include "relloc/lie_group.hpp"

namespace relloc::test {

inline Eigen::VectorXd uniform_vector(std::mt19937_64& rng, int size, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) v(i) = u(rng);
  return v;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline GroupElement random_group(std::mt19937_64& rng, int n) {
  return {uniform_vector(rng, 2 * n, -5.0, 5.0), uniform(rng, -std::numbers::pi, std::numbers::pi)};
}

inline AlgebraElement random_algebra(std::mt19937_64& rng, int n) {
  return {uniform_vector(rng, 2 * n, -3.0, 3.0), uniform(rng, -2.0, 2.0)};
}

inline double max_abs_diff(const GroupElement& a, const GroupElement& b) {
  return std::max((a.p() - b.p()).cwiseAbs().maxCoeff(), std::abs(a.theta() - b.theta()));
}

// Non-collinear triangle, side lengths roughly 5..15.
inline Eigen::VectorXd random_triangle(std::mt19937_64& rng) {
  for (;;) {
    Eigen::VectorXd r = uniform_vector(rng, 6, -8.0, 8.0);
    const Eigen::Vector2d a = r.segment<2>(2) - r.segment<2>(0);
    const Eigen::Vector2d b = r.segment<2>(4) - r.segment<2>(0);
    if (std::abs(a.x() * b.y() - a.y() * b.x()) > 10.0) return r;
  }
}

}  // namespace relloc::test
