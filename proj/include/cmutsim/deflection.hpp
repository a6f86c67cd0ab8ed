#pragma once

#include <Eigen/Core>

namespace cmutsim {

/// Radial displacement samples of the actuation layer on an ascending grid
/// 0 = r_0 < ... < r_N = cavity radius. Positive w narrows the gap (motion
/// toward the bottom electrode); the clamped edge has w(r_N) = 0.
struct DeflectionProfile {
  Eigen::VectorXd radii;  // m
  Eigen::VectorXd w;      // m

  double center() const { return w.size() > 0 ? w[0] : 0.0; }
  double max() const { return w.size() > 0 ? w.maxCoeff() : 0.0; }
};

}  // namespace cmutsim
