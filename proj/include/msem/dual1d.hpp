#pragma once

// Mass (Gram) matrices, dual degrees of freedom and the algebraic dual bases
// Psi~ = Psi M^{-1} in one dimension, together with L2 sampling and the
// derivative of a dual edge representation.

#include "msem/poly1d.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <functional>
#include <stdexcept>
#include <string>

namespace msem {

/// Default comparison thresholds shared by the test suites.
struct Tolerances {
  double identity = 1e-12;  // identity / zero checks
  double derived = 1e-11;   // derived quantities
};
inline constexpr Tolerances default_tolerances{};

enum class DofFamily { primal0, primal1, primal2, dual0, dual1, dual2 };

inline bool is_dual(DofFamily f) {
  return f == DofFamily::dual0 || f == DofFamily::dual1 || f == DofFamily::dual2;
}

inline int form_degree(DofFamily f) {
  switch (f) {
    case DofFamily::primal0:
    case DofFamily::dual0: return 0;
    case DofFamily::primal1:
    case DofFamily::dual1: return 1;
    default: return 2;
  }
}

inline DofFamily make_family(bool dual, int k) {
  static constexpr DofFamily primal[] = {DofFamily::primal0, DofFamily::primal1, DofFamily::primal2};
  static constexpr DofFamily duals[] = {DofFamily::dual0, DofFamily::dual1, DofFamily::dual2};
  if (k < 0 || k > 2) throw std::invalid_argument("make_family: form degree out of range");
  return dual ? duals[k] : primal[k];
}

/// Geometric dual in a d-dimensional element: k-forms pair with (d-k)-forms.
inline DofFamily dual_family(DofFamily f, int dimension) {
  const int k = dimension - form_degree(f);
  if (k < 0) throw std::invalid_argument("dual_family: form degree exceeds dimension");
  return make_family(!is_dual(f), k);
}

inline std::string to_string(DofFamily f) {
  static const char* names[] = {"N0", "N1", "N2", "N~0", "N~1", "N~2"};
  return names[static_cast<int>(f)];
}

/// Coefficients of one DOF family on a 1D or 2D element.
struct DofVector {
  DofFamily family = DofFamily::primal0;
  int dimension = 1;
  Eigen::VectorXd values;
};

/// SPD Gram matrix of the primal k-form basis, factored once.
class MassMatrix {
 public:
  MassMatrix(int form_degree, int dimension, Eigen::MatrixXd entries)
      : form_degree_(form_degree), dimension_(dimension), entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) throw std::invalid_argument("MassMatrix: not square");
    llt_.compute(entries_);
    if (llt_.info() != Eigen::Success) {
      throw std::runtime_error("MassMatrix: Cholesky factorization failed (not SPD)");
    }
  }

  [[nodiscard]] int form_degree() const { return form_degree_; }
  [[nodiscard]] int dimension() const { return dimension_; }
  [[nodiscard]] Eigen::Index size() const { return entries_.rows(); }
  [[nodiscard]] const Eigen::MatrixXd& entries() const { return entries_; }

  [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return entries_ * v; }
  [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& v) const { return llt_.solve(v); }
  [[nodiscard]] Eigen::MatrixXd solve(const Eigen::MatrixXd& m) const { return llt_.solve(m); }
  [[nodiscard]] Eigen::MatrixXd inverse() const {
    Eigen::MatrixXd inv = llt_.solve(Eigen::MatrixXd::Identity(size(), size()));
    return 0.5 * (inv + inv.transpose());
  }

 private:
  int form_degree_;
  int dimension_;
  Eigen::MatrixXd entries_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

namespace detail {

inline Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& table, const QuadratureRule& rule) {
  Eigen::MatrixXd scaled = table;
  for (int q = 0; q < rule.size(); ++q) scaled.row(q) *= std::sqrt(rule.weights[q]);
  Eigen::MatrixXd gram = scaled.transpose() * scaled;
  return 0.5 * (gram + gram.transpose());
}

inline void require_size(const DofVector& v, Eigen::Index expected, const char* where) {
  if (v.values.size() != expected) {
    throw std::invalid_argument(std::string(where) + ": dimension mismatch (got " +
                                std::to_string(v.values.size()) + ", expected " +
                                std::to_string(expected) + ")");
  }
}

}  // namespace detail

/// M0_ij = int h_i h_j. The default rule (N+1 Gauss points) is exact.
inline MassMatrix mass_nodal_1d(const GllGrid& grid, const QuadratureRule& rule) {
  return {0, 1, detail::weighted_gram(tabulate_nodal(grid, rule.nodes), rule)};
}

inline MassMatrix mass_nodal_1d(const GllGrid& grid) {
  return mass_nodal_1d(grid, gauss_legendre(grid.order() + 1));
}

/// M1_ij = int e_i e_j.
inline MassMatrix mass_edge_1d(const GllGrid& grid, const QuadratureRule& rule) {
  return {1, 1, detail::weighted_gram(tabulate_edge(grid, rule.nodes), rule)};
}

inline MassMatrix mass_edge_1d(const GllGrid& grid) {
  return mass_edge_1d(grid, gauss_legendre(grid.order() + 1));
}

/// Riesz map: dual DOFs = M * primal DOFs.
inline DofVector to_dual(const DofVector& primal, const MassMatrix& mass) {
  if (is_dual(primal.family) || form_degree(primal.family) != mass.form_degree() ||
      primal.dimension != mass.dimension()) {
    throw std::invalid_argument("to_dual: DOF family does not match mass matrix");
  }
  detail::require_size(primal, mass.size(), "to_dual");
  return {dual_family(primal.family, primal.dimension), primal.dimension, mass.apply(primal.values)};
}

inline DofVector to_primal(const DofVector& dual, const MassMatrix& mass) {
  if (!is_dual(dual.family) || dual.dimension != mass.dimension() ||
      form_degree(dual_family(dual.family, dual.dimension)) != mass.form_degree()) {
    throw std::invalid_argument("to_primal: DOF family does not match mass matrix");
  }
  detail::require_size(dual, mass.size(), "to_primal");
  return {dual_family(dual.family, dual.dimension), dual.dimension, mass.solve(dual.values)};
}

enum class BasisKind { nodal, edge };

/// Dual basis of the nodal (kind = nodal, dual1 DOFs) or edge (kind = edge,
/// dual0 DOFs) family; evaluation solves against the Cholesky factor.
class DualBasis1D {
 public:
  DualBasis1D(GllGrid grid, BasisKind kind, const QuadratureRule& rule)
      : grid_(std::move(grid)),
        kind_(kind),
        mass_(kind == BasisKind::nodal ? mass_nodal_1d(grid_, rule) : mass_edge_1d(grid_, rule)) {}

  DualBasis1D(GllGrid grid, BasisKind kind)
      : DualBasis1D(grid, kind, gauss_legendre(grid.order() + 1)) {}

  [[nodiscard]] BasisKind kind() const { return kind_; }
  [[nodiscard]] const GllGrid& grid() const { return grid_; }
  [[nodiscard]] const MassMatrix& mass() const { return mass_; }

  [[nodiscard]] Eigen::VectorXd primal_values(double x) const {
    return kind_ == BasisKind::nodal ? nodal_values(grid_, x) : edge_values(grid_, x);
  }

  /// Entry j (0-based) is the j-th dual basis function at x.
  [[nodiscard]] Eigen::VectorXd values(double x) const { return mass_.solve(primal_values(x)); }

 private:
  GllGrid grid_;
  BasisKind kind_;
  MassMatrix mass_;
};

/// Dual basis function j; j follows the primal indexing (0..N nodal, 1..N edge).
inline double dual_basis_eval(BasisKind kind, const GllGrid& grid, int j, double x) {
  const int offset = kind == BasisKind::nodal ? 0 : 1;
  const int count = kind == BasisKind::nodal ? grid.order() + 1 : grid.order();
  if (j - offset < 0 || j - offset >= count) throw std::out_of_range("dual_basis_eval: index");
  return DualBasis1D(grid, kind).values(x)[j - offset];
}

/// L2 sampling of f into one of the four 1D DOF families, with an explicit
/// number of Gauss points (default 2N+10).
inline DofVector project_l2(const std::function<double(double)>& f, DofFamily target,
                            const GllGrid& grid, int points = 0) {
  if (points <= 0) points = 2 * grid.order() + 10;
  const QuadratureRule rule = gauss_legendre(points);
  const bool nodal_basis = target == DofFamily::primal0 || target == DofFamily::dual1;
  if (!(nodal_basis || target == DofFamily::primal1 || target == DofFamily::dual0)) {
    throw std::invalid_argument("project_l2: family not defined in 1D");
  }
  const Eigen::MatrixXd table =
      nodal_basis ? tabulate_nodal(grid, rule.nodes) : tabulate_edge(grid, rule.nodes);
  Eigen::VectorXd moments = Eigen::VectorXd::Zero(table.cols());
  for (int q = 0; q < rule.size(); ++q) moments += rule.weights[q] * f(rule.nodes[q]) * table.row(q).transpose();

  if (is_dual(target)) return {target, 1, moments};
  const MassMatrix mass = nodal_basis ? mass_nodal_1d(grid) : mass_edge_1d(grid);
  return {target, 1, mass.solve(moments)};
}

/// Dual DOFs of d(phi)/dx for phi in the dual edge representation:
/// -E10^T N~0(phi), plus phi(+1) at index N and minus phi(-1) at index 0.
inline DofVector dual_derivative_1d(const DofVector& phi, double phi_left, double phi_right) {
  if (phi.family != DofFamily::dual0 || phi.dimension != 1) {
    throw std::invalid_argument("dual_derivative_1d: expects 1D dual0 DOFs");
  }
  const int n = static_cast<int>(phi.values.size());
  if (n < 1) throw std::invalid_argument("dual_derivative_1d: empty input");
  const Eigen::MatrixXd e10 = incidence_1d(n).cast<double>();
  Eigen::VectorXd out = -e10.transpose() * phi.values;
  out[0] -= phi_left;
  out[n] += phi_right;
  return {DofFamily::dual1, 1, out};
}

}  // namespace msem
