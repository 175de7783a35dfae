#pragma once

// The two single-element test problems.

#include "msem/spaces2d.hpp"

#include <Eigen/Core>

#include <cmath>
#include <numbers>

namespace msem::benchmarks {

/// phi = sin(2 pi x) sin(2 pi y) on [0,1]^2, q = grad phi, f = div q.
struct ManufacturedPoisson {
  static double phi(double x, double y) {
    constexpr double k = 2.0 * std::numbers::pi;
    return std::sin(k * x) * std::sin(k * y);
  }
  static Eigen::Vector2d flux(double x, double y) {
    constexpr double k = 2.0 * std::numbers::pi;
    return {k * std::cos(k * x) * std::sin(k * y), k * std::sin(k * x) * std::cos(k * y)};
  }
  static double source(double x, double y) {
    constexpr double k = 2.0 * std::numbers::pi;
    return -2.0 * k * k * phi(x, y);
  }
  static BoundaryData boundary() { return homogeneous_boundary(); }
};

/// phi_hat = 0 on x = 0 and y = 0, -sin(pi y) on x = 1, -ln(1 - 3x(1-x)) on y = 1.
inline BoundaryData dirichlet_neumann_boundary() {
  return {[](double) { return 0.0; },
          [](double x) { return -std::log(1.0 - 3.0 * x * (1.0 - x)); },
          [](double) { return 0.0; },
          [](double y) { return -std::sin(std::numbers::pi * y); }};
}

}  // namespace msem::benchmarks
