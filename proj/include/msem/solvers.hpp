#pragma once

// Assembly and dense solution of the single-element systems:
//  - mixed Poisson, primal-primal (q in D^h, phi in S^h) and primal-dual
//    (phi in S~^h, divergence blocks reduce to the bare incidence matrix);
//  - the Neumann problem in D^h and the Dirichlet problem in S~^h, whose
//    solutions satisfy N~0(phi) = M2 E21 N1(q).

#include "msem/dual1d.hpp"
#include "msem/spaces2d.hpp"

#include <Eigen/Core>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace msem {

enum class Formulation { primal_primal, primal_dual };

inline std::string to_string(Formulation f) {
  return f == Formulation::primal_primal ? "primal-primal" : "primal-dual";
}

struct LinearSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
};

/// [A B^T; B 0] with the flux unknowns first.
struct SaddleSystem {
  Formulation formulation;
  int flux_size;
  int potential_size;
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;

  [[nodiscard]] auto a() const { return matrix.topLeftCorner(flux_size, flux_size); }
  [[nodiscard]] auto b_transpose() const { return matrix.topRightCorner(flux_size, potential_size); }
  [[nodiscard]] auto b() const { return matrix.bottomLeftCorner(potential_size, flux_size); }
};

struct SolveOptions {
  bool compute_condition = true;
  int refinement_steps = 2;
};

struct SolveReport {
  bool ok = false;
  std::string diagnostics;
  Eigen::VectorXd solution;
  double condition = std::numeric_limits<double>::quiet_NaN();
  long nonzeros = 0;
  double residual_norm = 0.0;
};

class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Entries with |a| > 1e-14.
inline long count_nonzeros(const Eigen::MatrixXd& m, double threshold = 1e-14) {
  return static_cast<long>((m.array().abs() > threshold).count());
}

/// 2-norm condition number sigma_max / sigma_min.
inline double condition_number(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  return s[0] / s[s.size() - 1];
}

namespace detail {

// b - A x accumulated in extended precision.
inline Eigen::VectorXd residual_extended(const Eigen::MatrixXd& a, const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& b) {
  std::vector<long double> r(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) r[i] = b[i];
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const long double xj = x[j];
    const double* col = a.col(j).data();
    for (Eigen::Index i = 0; i < a.rows(); ++i) r[i] -= static_cast<long double>(col[i]) * xj;
  }
  Eigen::VectorXd out(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) out[i] = static_cast<double>(r[i]);
  return out;
}

}  // namespace detail

/// LU with partial pivoting plus iterative refinement (residuals in long
/// double). Never throws on singularity; inspect `ok` and `diagnostics`.
inline SolveReport solve_dense(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const SolveOptions& opts = {}) {
  if (a.rows() != a.cols() || a.rows() != b.size()) throw std::invalid_argument("solve_dense: dimension mismatch");
  SolveReport report;
  report.nonzeros = count_nonzeros(a);
  if (a.rows() == 0) {
    report.ok = true;
    report.condition = 1.0;
    return report;
  }
  if (opts.compute_condition) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    const auto& s = svd.singularValues();
    const double smax = s[0], smin = s[s.size() - 1];
    report.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(smin >= 1e-14 * smax)) {
      report.diagnostics = "singular matrix: sigma_min = " + std::to_string(smin) +
                           ", sigma_max = " + std::to_string(smax);
      return report;
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  if (!opts.compute_condition) {
    const double rc = lu.rcond();
    if (!(rc >= 1e-14)) {
      report.diagnostics = "singular matrix: reciprocal condition estimate " + std::to_string(rc);
      return report;
    }
  }
  Eigen::VectorXd x = lu.solve(b);
  for (int step = 0; step < opts.refinement_steps; ++step) x += lu.solve(detail::residual_extended(a, x, b));
  report.residual_norm = detail::residual_extended(a, x, b).norm();
  report.solution = std::move(x);
  report.ok = std::isfinite(report.residual_norm);
  if (!report.ok) report.diagnostics = "non-finite solution";
  return report;
}

inline SolveReport solve_dense(const LinearSystem& sys, const SolveOptions& opts = {}) {
  return solve_dense(sys.matrix, sys.rhs, opts);
}

inline SolveReport solve_dense(const SaddleSystem& sys, const SolveOptions& opts = {}) {
  return solve_dense(sys.matrix, sys.rhs, opts);
}

inline SolveReport solve_or_throw(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const SolveOptions& opts) {
  SolveReport r = solve_dense(a, b, opts);
  if (!r.ok) throw SolveError(r.diagnostics);
  return r;
}

/// N^T applied to the 4N boundary integrals of phi_hat.
inline Eigen::VectorXd boundary_rhs(const ElementOperators& ops, const BoundaryData& phi_hat) {
  return ops.trace.transpose() * boundary_dofs(ops.grid, ops.element, phi_hat, ops.mass_rule);
}

inline constexpr int default_source_points = 12;

inline SaddleSystem assemble_mixed(Formulation formulation, const ElementOperators& ops,
                                   const std::function<double(double, double)>& f,
                                   const BoundaryData& phi_hat, int source_points = default_source_points) {
  const int nq = ops.layout.size(Space::D), np = ops.layout.size(Space::S);
  const Eigen::MatrixXd& m1 = ops.m1.entries();
  const Eigen::MatrixXd& m2 = ops.m2.entries();
  const Eigen::VectorXd f_dofs = cell_integrals(ops.grid, ops.element, f, source_points).values;

  SaddleSystem sys{formulation, nq, np, Eigen::MatrixXd::Zero(nq + np, nq + np), Eigen::VectorXd(nq + np)};
  sys.matrix.topLeftCorner(nq, nq) = m1;
  sys.rhs.head(nq) = boundary_rhs(ops, phi_hat);
  if (formulation == Formulation::primal_primal) {
    const Eigen::MatrixXd b = m2 * ops.e21;
    sys.matrix.bottomLeftCorner(np, nq) = b;
    sys.matrix.topRightCorner(nq, np) = b.transpose();
    sys.rhs.tail(np) = m2 * f_dofs;
  } else {
    sys.matrix.bottomLeftCorner(np, nq) = ops.e21;
    sys.matrix.topRightCorner(nq, np) = ops.e21.transpose();
    sys.rhs.tail(np) = f_dofs;
  }
  return sys;
}

/// (E21^T M2 E21 + M1) N1(q) = N^T b.
inline LinearSystem assemble_neumann(const ElementOperators& ops, const BoundaryData& phi_hat) {
  Eigen::MatrixXd a = ops.e21.transpose() * ops.m2.entries() * ops.e21 + ops.m1.entries();
  return {0.5 * (a + a.transpose()), boundary_rhs(ops, phi_hat)};
}

/// (E21 M1^{-1} E21^T + M2^{-1}) N~0(phi) = E21 M1^{-1} N^T b.
inline LinearSystem assemble_dirichlet_dual(const ElementOperators& ops, const BoundaryData& phi_hat) {
  const Eigen::MatrixXd m1inv_bt = ops.m1.solve(Eigen::MatrixXd(ops.e21.transpose()));
  Eigen::MatrixXd a = ops.e21 * m1inv_bt + ops.m2.inverse();
  const Eigen::VectorXd bdof = boundary_rhs(ops, phi_hat);
  return {0.5 * (a + a.transpose()), ops.e21 * ops.m1.solve(bdof)};
}

struct MixedSolution {
  Formulation formulation;
  DofVector flux;       // N1(q)
  DofVector potential;  // N2(phi) for primal-primal, N~0(phi) for primal-dual
  SolveReport report;
};

inline MixedSolution solve_mixed(Formulation formulation, const ElementOperators& ops,
                                 const std::function<double(double, double)>& f, const BoundaryData& phi_hat,
                                 const SolveOptions& opts = {}) {
  const SaddleSystem sys = assemble_mixed(formulation, ops, f, phi_hat);
  SolveReport report = solve_or_throw(sys.matrix, sys.rhs, opts);
  DofVector q{DofFamily::primal1, 2, report.solution.head(sys.flux_size)};
  DofVector phi{formulation == Formulation::primal_primal ? DofFamily::primal2 : DofFamily::dual0, 2,
                report.solution.tail(sys.potential_size)};
  return {formulation, std::move(q), std::move(phi), std::move(report)};
}

struct EquivalenceReport {
  double dof_residual;        // max |N~0(phi) - M2 E21 N1(q)|
  double pointwise_residual;  // max |phi^h - div q^h| over the sample grid
};

/// Both fields live in S^h; compared on a uniform r x r reference grid.
inline EquivalenceReport verify_equivalence(const ElementOperators& ops, const DofVector& q, const DofVector& phi,
                                            int resolution = 101) {
  if (q.family != DofFamily::primal1 || phi.family != DofFamily::dual0) {
    throw std::invalid_argument("verify_equivalence: expects N1(q) and N~0(phi)");
  }
  if (resolution < 2) throw std::invalid_argument("verify_equivalence: resolution must be >= 2");
  const Eigen::VectorXd div_dofs = ops.e21 * q.values;
  const Eigen::VectorXd dual_gap = phi.values - ops.m2.apply(div_dofs);
  const Eigen::VectorXd primal_gap = ops.m2.solve(phi.values) - div_dofs;

  std::vector<double> pts(resolution);
  for (int k = 0; k < resolution; ++k) pts[k] = -1.0 + 2.0 * k / (resolution - 1);
  const BasisTable t = tabulate_2d(Space::S, ops.grid, pts, pts);
  const Eigen::VectorXd ref = t.first * primal_gap;
  double pointwise = 0.0;
  for (int a = 0; a < resolution; ++a)
    for (int b = 0; b < resolution; ++b)
      pointwise = std::max(pointwise, std::abs(ref[a * resolution + b]) /
                                          ops.element.jacobian(pts[a], pts[b]).determinant);
  return {dual_gap.lpNorm<Eigen::Infinity>(), pointwise};
}

struct NormPair {
  double hdiv;  // ||q^h||_{H(div)}
  double h1;    // ||phi^h||_{H^1}
};

/// ||q||^2 = N1^T (M1 + E21^T M2 E21) N1 and
/// ||phi||^2 = N~0^T M2^{-1} N~0 + r^T M1^{-1} r with r = N^T b - E21^T N~0,
/// where b is the 4N boundary trace vector.
inline NormPair discrete_norms(const ElementOperators& ops, const DofVector& q, const DofVector& phi,
                               const Eigen::VectorXd& boundary) {
  if (q.family != DofFamily::primal1 || phi.family != DofFamily::dual0) {
    throw std::invalid_argument("discrete_norms: expects N1(q) and N~0(phi)");
  }
  const Eigen::VectorXd div = ops.e21 * q.values;
  const double hdiv2 = q.values.dot(ops.m1.apply(q.values)) + div.dot(ops.m2.apply(div));
  const Eigen::VectorXd r = ops.trace.transpose() * boundary - ops.e21.transpose() * phi.values;
  const double h12 = phi.values.dot(ops.m2.solve(phi.values)) + r.dot(ops.m1.solve(r));
  return {std::sqrt(std::max(hdiv2, 0.0)), std::sqrt(std::max(h12, 0.0))};
}

struct DirichletNeumannResult {
  DofVector flux;       // Neumann solution N1(q)
  DofVector potential;  // Dirichlet solution N~0(phi)
  Eigen::VectorXd boundary;
  NormPair norms;
  EquivalenceReport equivalence;
};

inline DirichletNeumannResult solve_dirichlet_neumann(const ElementOperators& ops, const BoundaryData& phi_hat,
                                                      int resolution = 101) {
  const SolveOptions opts{false, 2};
  const LinearSystem neumann = assemble_neumann(ops, phi_hat);
  const LinearSystem dirichlet = assemble_dirichlet_dual(ops, phi_hat);
  DofVector q{DofFamily::primal1, 2, solve_or_throw(neumann.matrix, neumann.rhs, opts).solution};
  DofVector phi{DofFamily::dual0, 2, solve_or_throw(dirichlet.matrix, dirichlet.rhs, opts).solution};
  Eigen::VectorXd b = boundary_dofs(ops.grid, ops.element, phi_hat, ops.mass_rule);
  const NormPair norms = discrete_norms(ops, q, phi, b);
  const EquivalenceReport eq = verify_equivalence(ops, q, phi, resolution);
  return {std::move(q), std::move(phi), std::move(b), norms, eq};
}

}  // namespace msem
