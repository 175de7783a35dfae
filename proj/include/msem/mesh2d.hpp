#pragma once

// Single curvilinear element K = [0,1]^2 obtained from [-1,1]^2 by
//   x = 1/2 + 1/2 (xi  + c sin(pi xi) sin(pi eta))
//   y = 1/2 + 1/2 (eta + c sin(pi xi) sin(pi eta))

#include "msem/poly1d.hpp"

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace msem {

struct Point2 {
  double x;
  double y;
};

struct Jacobian {
  Eigen::Matrix2d matrix;  // rows (x, y), columns (xi, eta)
  double determinant;
};

class MappedElement {
 public:
  explicit MappedElement(double deformation = 0.0) : c_(deformation) {
    if (!(c_ >= 0.0 && c_ < 0.5)) throw std::invalid_argument("MappedElement: c must lie in [0, 0.5)");
  }

  [[nodiscard]] double deformation() const { return c_; }

  [[nodiscard]] Point2 map_point(double xi, double eta) const {
    const double bump = c_ * std::sin(std::numbers::pi * xi) * std::sin(std::numbers::pi * eta);
    return {0.5 + 0.5 * (xi + bump), 0.5 + 0.5 * (eta + bump)};
  }

  [[nodiscard]] Jacobian jacobian(double xi, double eta) const {
    constexpr double pi = std::numbers::pi;
    const double dbump_dxi = c_ * pi * std::cos(pi * xi) * std::sin(pi * eta);
    const double dbump_deta = c_ * pi * std::sin(pi * xi) * std::cos(pi * eta);
    Eigen::Matrix2d j;
    j << 0.5 * (1.0 + dbump_dxi), 0.5 * dbump_deta,
         0.5 * dbump_dxi, 0.5 * (1.0 + dbump_deta);
    return {j, j.determinant()};
  }

 private:
  double c_;
};

inline Point2 map_point(const MappedElement& elem, double xi, double eta) { return elem.map_point(xi, eta); }
inline Jacobian jacobian(const MappedElement& elem, double xi, double eta) { return elem.jacobian(xi, eta); }

struct QuadraturePoint2D {
  double xi;
  double eta;
  double weight;  // reference weight times det J
};

/// Tensor rule built from a 1D rule, with physical weights w_i w_j det J.
inline std::vector<QuadraturePoint2D> quadrature_2d(const MappedElement& elem, const QuadratureRule& rule) {
  std::vector<QuadraturePoint2D> pts;
  pts.reserve(static_cast<std::size_t>(rule.size()) * rule.size());
  for (int a = 0; a < rule.size(); ++a) {
    for (int b = 0; b < rule.size(); ++b) {
      const double xi = rule.nodes[a], eta = rule.nodes[b];
      pts.push_back({xi, eta, rule.weights[a] * rule.weights[b] * elem.jacobian(xi, eta).determinant});
    }
  }
  return pts;
}

/// m x m Gauss-Legendre tensor rule.
inline std::vector<QuadraturePoint2D> quadrature_2d(const MappedElement& elem, int m) {
  if (m < 1) throw std::invalid_argument("quadrature_2d: order must be >= 1");
  return quadrature_2d(elem, gauss_legendre(m));
}

}  // namespace msem
