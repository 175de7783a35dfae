#pragma once

// Tensor-product spaces on the mapped element:
//   C^h (nodal, H(curl) via rotated gradient), D^h (fluxes, H(div)), S^h (densities, L2)
// with their incidence matrices, the boundary trace matrix and mass matrices.
//
// DOF layout (0-based), i along xi and j along eta:
//   C : i(N+1) + j                         i, j = 0..N
//   D : xi-fluxes  iN + (j-1)              i = 0..N, j = 1..N   (h_i(xi) e_j(eta) e_xi)
//       eta-fluxes N(N+1) + (i-1)(N+1) + j i = 1..N, j = 0..N   (e_i(xi) h_j(eta) e_eta)
//   S : (i-1)N + (j-1)                     i, j = 1..N          (e_i(xi) e_j(eta))
// Boundary trace vectors (length 4N) are ordered bottom, top, left, right.
//
// Pullbacks to K: C scalars directly, D fluxes by the contravariant Piola map
// J q / det J, S densities by s / det J. Flux and cell-integral DOFs are then
// metric free and the incidence matrices stay topological.

#include "msem/dual1d.hpp"
#include "msem/mesh2d.hpp"
#include "msem/poly1d.hpp"

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace msem {

enum class Space { C, D, S };

inline std::string to_string(Space s) {
  return s == Space::C ? "C" : (s == Space::D ? "D" : "S");
}

inline int form_degree(Space s) { return s == Space::C ? 0 : (s == Space::D ? 1 : 2); }

class DofLayout {
 public:
  explicit DofLayout(int order) : n_(order) {
    if (n_ < 1) throw std::invalid_argument("DofLayout: order must be >= 1");
  }

  [[nodiscard]] int order() const { return n_; }

  [[nodiscard]] int size(Space s) const {
    switch (s) {
      case Space::C: return (n_ + 1) * (n_ + 1);
      case Space::D: return 2 * n_ * (n_ + 1);
      default: return n_ * n_;
    }
  }
  [[nodiscard]] int flux_block() const { return n_ * (n_ + 1); }
  [[nodiscard]] int boundary_size() const { return 4 * n_; }

  [[nodiscard]] int c_index(int i, int j) const { return i * (n_ + 1) + j; }
  [[nodiscard]] int xi_flux(int i, int j) const { return i * n_ + (j - 1); }
  [[nodiscard]] int eta_flux(int i, int j) const { return n_ * (n_ + 1) + (i - 1) * (n_ + 1) + j; }
  [[nodiscard]] int s_index(int i, int j) const { return (i - 1) * n_ + (j - 1); }

 private:
  int n_;
};

inline int order_from_size(Space s, Eigen::Index size) {
  for (int n = 1; n <= 1000; ++n) {
    const DofLayout layout(n);
    if (layout.size(s) == size) return n;
    if (layout.size(s) > size) break;
  }
  throw std::invalid_argument("size " + std::to_string(size) + " is not a valid " + to_string(s) +
                              "-space dimension");
}

/// Reference-element basis value; scalar spaces return (value, 0).
inline Eigen::Vector2d basis_eval_2d(Space space, const GllGrid& grid, int k, double xi, double eta) {
  const DofLayout layout(grid.order());
  if (k < 0 || k >= layout.size(space)) throw std::out_of_range("basis_eval_2d: index out of range");
  const int n = grid.order();
  switch (space) {
    case Space::C: {
      const int i = k / (n + 1), j = k % (n + 1);
      return {nodal_eval(grid, i, xi) * nodal_eval(grid, j, eta), 0.0};
    }
    case Space::D: {
      if (k < layout.flux_block()) {
        const int i = k / n, j = k % n + 1;
        return {nodal_eval(grid, i, xi) * edge_eval(grid, j, eta), 0.0};
      }
      const int r = k - layout.flux_block();
      const int i = r / (n + 1) + 1, j = r % (n + 1);
      return {0.0, edge_eval(grid, i, xi) * nodal_eval(grid, j, eta)};
    }
    default: {
      const int i = k / n + 1, j = k % n + 1;
      return {edge_eval(grid, i, xi) * edge_eval(grid, j, eta), 0.0};
    }
  }
}

/// E10 for the rotated gradient curl(w) = (dw/deta, -dw/dxi).
inline IncidenceMatrix incidence_e10_2d(int order) {
  const DofLayout L(order);
  const int n = order;
  IncidenceMatrix e = IncidenceMatrix::Zero(L.size(Space::D), L.size(Space::C));
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      e(L.xi_flux(i, j), L.c_index(i, j)) = 1;
      e(L.xi_flux(i, j), L.c_index(i, j - 1)) = -1;
    }
  }
  for (int i = 1; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      e(L.eta_flux(i, j), L.c_index(i, j)) = -1;
      e(L.eta_flux(i, j), L.c_index(i - 1, j)) = 1;
    }
  }
  return e;
}

/// E21: div q = Psi2 E21 N1(q), u_{i,j} - u_{i-1,j} + v_{i,j} - v_{i,j-1}.
inline IncidenceMatrix incidence_e21(int order) {
  const DofLayout L(order);
  const int n = order;
  IncidenceMatrix e = IncidenceMatrix::Zero(L.size(Space::S), L.size(Space::D));
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      const int row = L.s_index(i, j);
      e(row, L.xi_flux(i, j)) = 1;
      e(row, L.xi_flux(i - 1, j)) = -1;
      e(row, L.eta_flux(i, j)) = 1;
      e(row, L.eta_flux(i, j - 1)) = -1;
    }
  }
  return e;
}

/// Trace matrix (4N x 2N(N+1)): restricts flux DOFs to the boundary with the
/// sign of the outward normal. Rows: bottom, top, left, right.
inline IncidenceMatrix trace_matrix(int order) {
  const DofLayout L(order);
  const int n = order;
  IncidenceMatrix t = IncidenceMatrix::Zero(L.boundary_size(), L.size(Space::D));
  for (int k = 1; k <= n; ++k) {
    t(k - 1, L.eta_flux(k, 0)) = -1;
    t(n + k - 1, L.eta_flux(k, n)) = 1;
    t(2 * n + k - 1, L.xi_flux(0, k)) = -1;
    t(3 * n + k - 1, L.xi_flux(n, k)) = 1;
  }
  return t;
}

/// Reference basis values of one space tabulated on a tensor rule; point
/// index p = a * m + b with a along xi. Vector spaces fill both components.
struct BasisTable {
  Eigen::MatrixXd first;   // scalar value, or xi-component
  Eigen::MatrixXd second;  // eta-component (D only)
};

inline BasisTable tabulate_2d(Space space, const GllGrid& grid, const std::vector<double>& xi,
                              const std::vector<double>& eta) {
  const int n = grid.order();
  const DofLayout L(n);
  const Eigen::MatrixXd hx = tabulate_nodal(grid, xi), ex = tabulate_edge(grid, xi);
  const Eigen::MatrixXd hy = tabulate_nodal(grid, eta), ey = tabulate_edge(grid, eta);
  const int ma = static_cast<int>(xi.size()), mb = static_cast<int>(eta.size());
  BasisTable t;
  t.first = Eigen::MatrixXd::Zero(ma * mb, L.size(space));
  if (space == Space::D) t.second = Eigen::MatrixXd::Zero(ma * mb, L.size(space));
  for (int a = 0; a < ma; ++a) {
    for (int b = 0; b < mb; ++b) {
      const int p = a * mb + b;
      switch (space) {
        case Space::C:
          for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) t.first(p, L.c_index(i, j)) = hx(a, i) * hy(b, j);
          break;
        case Space::D:
          for (int i = 0; i <= n; ++i)
            for (int j = 1; j <= n; ++j) t.first(p, L.xi_flux(i, j)) = hx(a, i) * ey(b, j - 1);
          for (int i = 1; i <= n; ++i)
            for (int j = 0; j <= n; ++j) t.second(p, L.eta_flux(i, j)) = ex(a, i - 1) * hy(b, j);
          break;
        case Space::S:
          for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j) t.first(p, L.s_index(i, j)) = ex(a, i - 1) * ey(b, j - 1);
          break;
      }
    }
  }
  return t;
}

/// Gram matrix of the pulled-back basis of one space on the mapped element,
/// integrated with the tensor product of `rule`.
inline MassMatrix mass_matrix_2d(Space space, const GllGrid& grid, const MappedElement& elem,
                                 const QuadratureRule& rule) {
  if (rule.size() < grid.order() + 1) {
    throw std::invalid_argument("mass_matrix_2d: quadrature needs at least N+1 points per direction");
  }
  const int m = rule.size();
  BasisTable t = tabulate_2d(space, grid, rule.nodes, rule.nodes);
  Eigen::MatrixXd gram;
  if (space == Space::D) {
    Eigen::MatrixXd px(t.first.rows(), t.first.cols()), py(t.first.rows(), t.first.cols());
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        const int p = a * m + b;
        const Jacobian jac = elem.jacobian(rule.nodes[a], rule.nodes[b]);
        const double s = std::sqrt(rule.weights[a] * rule.weights[b] / jac.determinant);
        const Eigen::Matrix2d& J = jac.matrix;
        px.row(p) = s * (J(0, 0) * t.first.row(p) + J(0, 1) * t.second.row(p));
        py.row(p) = s * (J(1, 0) * t.first.row(p) + J(1, 1) * t.second.row(p));
      }
    }
    gram = px.transpose() * px + py.transpose() * py;
  } else {
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        const int p = a * m + b;
        const double det = elem.jacobian(rule.nodes[a], rule.nodes[b]).determinant;
        const double w = rule.weights[a] * rule.weights[b];
        t.first.row(p) *= std::sqrt(space == Space::C ? w * det : w / det);
      }
    }
    gram = t.first.transpose() * t.first;
  }
  return {form_degree(space), 2, 0.5 * (gram + gram.transpose())};
}

/// Dual DOFs of a 2D primal family: N~2 = M0 N0, N~1 = M1 N1, N~0 = M2 N2.
inline DofVector dual_dofs_2d(Space space, const DofVector& primal, const MassMatrix& mass) {
  if (primal.dimension != 2 || form_degree(primal.family) != form_degree(space)) {
    throw std::invalid_argument("dual_dofs_2d: DOF family does not belong to space " + to_string(space));
  }
  return to_dual(primal, mass);
}

/// N~1(grad s) = -E21^T N~0(s) + N^T b, where b holds the 4N boundary trace
/// DOFs of s (omitted for the homogeneous space S~_0).
inline DofVector dual_gradient(const DofVector& s, const std::optional<Eigen::VectorXd>& boundary = std::nullopt) {
  if (s.family != DofFamily::dual0 || s.dimension != 2) {
    throw std::invalid_argument("dual_gradient: expects 2D dual0 DOFs");
  }
  const int n = order_from_size(Space::S, s.values.size());
  Eigen::VectorXd out = -(incidence_e21(n).cast<double>().transpose() * s.values);
  if (boundary) {
    if (boundary->size() != 4 * n) throw std::invalid_argument("dual_gradient: boundary vector must have 4N entries");
    out += trace_matrix(n).cast<double>().transpose() * *boundary;
  }
  return {DofFamily::dual1, 2, out};
}

/// N~2(curl q) = E10^T N~1(q) for q with vanishing normal trace.
inline DofVector dual_curl(const DofVector& q) {
  if (q.family != DofFamily::dual1 || q.dimension != 2) {
    throw std::invalid_argument("dual_curl: expects 2D dual1 DOFs");
  }
  const int n = order_from_size(Space::D, q.values.size());
  return {DofFamily::dual2, 2, incidence_e10_2d(n).cast<double>().transpose() * q.values};
}

/// Prescribed boundary function, one edge at a time, as a function of the
/// physical coordinate running along that edge (x on bottom/top, y on left/right).
struct BoundaryData {
  std::function<double(double)> bottom;
  std::function<double(double)> top;
  std::function<double(double)> left;
  std::function<double(double)> right;
};

inline BoundaryData homogeneous_boundary() {
  auto zero = [](double) { return 0.0; };
  return {zero, zero, zero, zero};
}

/// 4N boundary DOFs int_Gamma e_i phi_hat, ordered bottom, top, left, right.
/// The map fixes each edge pointwise, so the edge coordinate is evaluated
/// through map_point and the reference measure d(xi) is used.
inline Eigen::VectorXd boundary_dofs(const GllGrid& grid, const MappedElement& elem, const BoundaryData& data,
                                     const QuadratureRule& rule) {
  const int n = grid.order();
  const Eigen::MatrixXd e = tabulate_edge(grid, rule.nodes);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(4 * n);
  for (int q = 0; q < rule.size(); ++q) {
    const double t = rule.nodes[q], w = rule.weights[q];
    const double vb = data.bottom(elem.map_point(t, -1.0).x);
    const double vt = data.top(elem.map_point(t, 1.0).x);
    const double vl = data.left(elem.map_point(-1.0, t).y);
    const double vr = data.right(elem.map_point(1.0, t).y);
    for (int i = 0; i < n; ++i) {
      b[i] += w * e(q, i) * vb;
      b[n + i] += w * e(q, i) * vt;
      b[2 * n + i] += w * e(q, i) * vl;
      b[3 * n + i] += w * e(q, i) * vr;
    }
  }
  return b;
}

/// N2(f): physical integrals of f over the images of the GLL cells, with a
/// `points` x `points` Gauss rule per cell.
inline DofVector cell_integrals(const GllGrid& grid, const MappedElement& elem,
                                const std::function<double(double, double)>& f, int points) {
  const int n = grid.order();
  const DofLayout L(n);
  const QuadratureRule rule = gauss_legendre(points);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(L.size(Space::S));
  for (int i = 1; i <= n; ++i) {
    const double x0 = grid.node(i - 1), hx = 0.5 * grid.cell_width(i);
    for (int j = 1; j <= n; ++j) {
      const double y0 = grid.node(j - 1), hy = 0.5 * grid.cell_width(j);
      double acc = 0.0;
      for (int a = 0; a < points; ++a) {
        const double xi = x0 + hx * (rule.nodes[a] + 1.0);
        for (int b = 0; b < points; ++b) {
          const double eta = y0 + hy * (rule.nodes[b] + 1.0);
          const Point2 p = elem.map_point(xi, eta);
          acc += rule.weights[a] * rule.weights[b] * f(p.x, p.y) * elem.jacobian(xi, eta).determinant;
        }
      }
      out[L.s_index(i, j)] = acc * hx * hy;
    }
  }
  return {DofFamily::primal2, 2, out};
}

/// Everything a single-element solve needs: grid, map, layout, the D and S
/// mass matrices and the topological matrices. Immutable after construction.
struct ElementOperators {
  GllGrid grid;
  MappedElement element;
  DofLayout layout;
  QuadratureRule mass_rule;
  MassMatrix m1;
  MassMatrix m2;
  Eigen::MatrixXd e21;    // as double for dense algebra
  Eigen::MatrixXd trace;  // 4N x 2N(N+1)

  [[nodiscard]] int order() const { return grid.order(); }
};

/// Default mass quadrature: the (N+1)-point GLL rule of the element itself.
inline ElementOperators make_operators(int order, double deformation,
                                       QuadratureFamily family = QuadratureFamily::gauss_lobatto,
                                       int points = 0) {
  if (points <= 0) points = order + 1;
  GllGrid grid = gll_grid(order);
  MappedElement elem(deformation);
  QuadratureRule rule = make_rule(family, points);
  MassMatrix m1 = mass_matrix_2d(Space::D, grid, elem, rule);
  MassMatrix m2 = mass_matrix_2d(Space::S, grid, elem, rule);
  return {std::move(grid),
          elem,
          DofLayout(order),
          std::move(rule),
          std::move(m1),
          std::move(m2),
          incidence_e21(order).cast<double>(),
          trace_matrix(order).cast<double>()};
}

}  // namespace msem
