#pragma once

#include <Eigen/Dense>

#include <vector>

namespace hypoou {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A point z = (x, t) of R^N x R.
struct Point {
  Vec x;
  double t = 0.0;

  Point() = default;
  Point(Vec x_, double t_) : x(std::move(x_)), t(t_) {}

  static Point origin(Eigen::Index n) { return {Vec::Zero(n), 0.0}; }
  Eigen::Index dim() const { return x.size(); }
};

/// Axis-aligned box in R^N x R, used for supports and sampling regions.
struct Box {
  Vec lo;  // spatial lower corner
  Vec hi;
  double tlo = 0.0;
  double thi = 0.0;

  bool contains(const Point& z) const {
    if (z.t < tlo || z.t > thi) return false;
    return ((z.x - lo).array() >= 0.0).all() && ((hi - z.x).array() >= 0.0).all();
  }
};

}  // namespace hypoou
