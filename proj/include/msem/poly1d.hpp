#pragma once

// Legendre / Gauss-Lobatto-Legendre machinery and the primal 1D bases:
// nodal (Lagrange) polynomials h_i through the GLL points and the
// histopolating edge polynomials e_j = -sum_{k<j} h_k'.

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace msem {

using IncidenceMatrix = Eigen::MatrixXi;

struct LegendreValue {
  double value;
  double derivative;
};

/// L_n(x) and L_n'(x) by the three-term recurrence.
inline LegendreValue legendre_eval(int n, double x) {
  if (n < 0) throw std::invalid_argument("legendre_eval: negative degree");
  if (n == 0) return {1.0, 0.0};
  double p_prev = 1.0, p = x;
  double d_prev = 0.0, d = 1.0;
  for (int k = 1; k < n; ++k) {
    const double p_next = ((2.0 * k + 1.0) * x * p - k * p_prev) / (k + 1.0);
    // L'_{k+1} = L'_{k-1} + (2k+1) L_k
    const double d_next = d_prev + (2.0 * k + 1.0) * p;
    p_prev = p;
    p = p_next;
    d_prev = d;
    d = d_next;
  }
  return {p, d};
}

/// Nodes and weights of a 1D quadrature rule on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  [[nodiscard]] int size() const { return static_cast<int>(nodes.size()); }
};

enum class QuadratureFamily { gauss_legendre, gauss_lobatto };

inline std::string to_string(QuadratureFamily family) {
  return family == QuadratureFamily::gauss_legendre ? "gauss" : "gll";
}

/// m-point Gauss-Legendre rule, exact for degree 2m-1.
inline QuadratureRule gauss_legendre(int m) {
  if (m < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  QuadratureRule rule;
  rule.nodes.assign(m, 0.0);
  rule.weights.assign(m, 0.0);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    LegendreValue l{};
    for (int it = 0; it < 100; ++it) {
      l = legendre_eval(m, x);
      const double dx = l.value / l.derivative;
      x -= dx;
      if (std::abs(dx) <= 1e-16) break;
    }
    l = legendre_eval(m, x);
    const double w = 2.0 / ((1.0 - x * x) * l.derivative * l.derivative);
    rule.nodes[i] = -x;
    rule.nodes[m - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
  return rule;
}

/// Gauss-Lobatto-Legendre grid of order N: the N+1 roots of (1-x^2) L_N'(x)
/// with the matching quadrature weights 2 / (N(N+1) L_N(x_i)^2).
class GllGrid {
 public:
  GllGrid() = default;
  GllGrid(int order, std::vector<double> nodes, std::vector<double> weights)
      : order_(order), nodes_(std::move(nodes)), weights_(std::move(weights)) {}

  [[nodiscard]] int order() const { return order_; }
  [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
  [[nodiscard]] double node(int i) const { return nodes_[i]; }
  [[nodiscard]] double cell_width(int j) const { return nodes_[j] - nodes_[j - 1]; }

  [[nodiscard]] QuadratureRule as_quadrature() const { return {nodes_, weights_}; }

 private:
  int order_ = 0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

inline GllGrid gll_grid(int order) {
  if (order < 1) throw std::invalid_argument("gll_grid: order must be >= 1");
  const int n = order;
  std::vector<double> x(n + 1, 0.0);
  x[0] = -1.0;
  x[n] = 1.0;
  // Newton on L_N' from Chebyshev-Gauss-Lobatto guesses; L_N'' from the
  // Legendre ODE, valid in the open interval.
  for (int i = 1; i <= n / 2; ++i) {
    double xi = -std::cos(std::numbers::pi * i / n);
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      const LegendreValue l = legendre_eval(n, xi);
      const double second = (2.0 * xi * l.derivative - n * (n + 1.0) * l.value) / (1.0 - xi * xi);
      const double dx = l.derivative / second;
      xi -= dx;
      if (std::abs(dx) <= 1e-15) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw std::runtime_error("gll_grid: Newton iteration did not converge for order " +
                               std::to_string(n));
    }
    x[i] = xi;
    x[n - i] = -xi;
  }
  if (n % 2 == 0) x[n / 2] = 0.0;

  std::vector<double> w(n + 1);
  for (int i = 0; i <= n / 2; ++i) {
    const double l = legendre_eval(n, x[i]).value;
    w[i] = 2.0 / (n * (n + 1.0) * l * l);
    w[n - i] = w[i];
  }
  return {n, std::move(x), std::move(w)};
}

inline QuadratureRule make_rule(QuadratureFamily family, int points) {
  if (family == QuadratureFamily::gauss_legendre) return gauss_legendre(points);
  if (points < 2) throw std::invalid_argument("GLL quadrature needs at least 2 points");
  return gll_grid(points - 1).as_quadrature();
}

namespace detail {

// Product-form Lagrange values and derivatives. Prefix/suffix products keep
// the derivative free of divisions by (x - x_k).
inline void lagrange_all(const std::vector<double>& nodes, double x, Eigen::VectorXd* values,
                         Eigen::VectorXd* derivatives) {
  const int n = static_cast<int>(nodes.size());
  if (values) values->resize(n);
  if (derivatives) derivatives->resize(n);
  std::vector<double> a(n), prefix(n + 1), suffix(n + 1);
  for (int i = 0; i < n; ++i) {
    double denom = 1.0;
    for (int k = 0; k < n; ++k) {
      if (k != i) denom *= nodes[i] - nodes[k];
    }
    int m = 0;
    for (int k = 0; k < n; ++k) {
      if (k != i) a[m++] = x - nodes[k];
    }
    prefix[0] = 1.0;
    for (int k = 0; k < m; ++k) prefix[k + 1] = prefix[k] * a[k];
    if (values) {
      // Exact 1 at the own node; at other nodes one factor is exactly zero.
      (*values)[i] = (x == nodes[i]) ? 1.0 : prefix[m] / denom;
    }
    if (derivatives) {
      suffix[m] = 1.0;
      for (int k = m - 1; k >= 0; --k) suffix[k] = suffix[k + 1] * a[k];
      double d = 0.0;
      for (int k = 0; k < m; ++k) d += prefix[k] * suffix[k + 1];
      (*derivatives)[i] = d / denom;
    }
  }
}

}  // namespace detail

/// All N+1 nodal basis values h_i(x).
inline Eigen::VectorXd nodal_values(const GllGrid& grid, double x) {
  Eigen::VectorXd v;
  detail::lagrange_all(grid.nodes(), x, &v, nullptr);
  return v;
}

/// All N+1 derivatives h_i'(x).
inline Eigen::VectorXd nodal_derivatives(const GllGrid& grid, double x) {
  Eigen::VectorXd d;
  detail::lagrange_all(grid.nodes(), x, nullptr, &d);
  return d;
}

/// All N edge basis values; entry j-1 holds e_j(x).
inline Eigen::VectorXd edge_values(const GllGrid& grid, double x) {
  const Eigen::VectorXd d = nodal_derivatives(grid, x);
  const int n = grid.order();
  Eigen::VectorXd e(n);
  double acc = 0.0;
  for (int j = 1; j <= n; ++j) {
    acc -= d[j - 1];
    e[j - 1] = acc;
  }
  return e;
}

inline double nodal_eval(const GllGrid& grid, int i, double x) {
  if (i < 0 || i > grid.order()) throw std::out_of_range("nodal_eval: index out of range");
  return nodal_values(grid, x)[i];
}

/// e_j(x) for 1 <= j <= N.
inline double edge_eval(const GllGrid& grid, int j, double x) {
  if (j < 1 || j > grid.order()) throw std::out_of_range("edge_eval: index out of range");
  return edge_values(grid, x)[j - 1];
}

/// N x (N+1) bidiagonal matrix mapping nodal values to cell differences.
inline IncidenceMatrix incidence_1d(int order) {
  if (order < 1) throw std::invalid_argument("incidence_1d: order must be >= 1");
  IncidenceMatrix e = IncidenceMatrix::Zero(order, order + 1);
  for (int i = 0; i < order; ++i) {
    e(i, i) = -1;
    e(i, i + 1) = 1;
  }
  return e;
}

/// Row q holds the basis values at quadrature node q.
inline Eigen::MatrixXd tabulate_nodal(const GllGrid& grid, const std::vector<double>& points) {
  Eigen::MatrixXd t(points.size(), grid.order() + 1);
  for (std::size_t q = 0; q < points.size(); ++q) t.row(q) = nodal_values(grid, points[q]).transpose();
  return t;
}

inline Eigen::MatrixXd tabulate_edge(const GllGrid& grid, const std::vector<double>& points) {
  Eigen::MatrixXd t(points.size(), grid.order());
  for (std::size_t q = 0; q < points.size(); ++q) t.row(q) = edge_values(grid, points[q]).transpose();
  return t;
}

}  // namespace msem
