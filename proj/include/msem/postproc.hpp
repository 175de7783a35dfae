#pragma once

// Field reconstruction on the mapped element, error norms against exact
// solutions, and CSV / JSON output.

#include "msem/solvers.hpp"
#include "msem/spaces2d.hpp"

#include <json.hpp>

#include <Eigen/Core>

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace msem {

/// Samples of one field on a tensor grid of reference points; point index
/// p = a * eta.size() + b. Scalars use `value`, vector fields `vx`/`vy`.
struct FieldSample {
  std::vector<double> xi;
  std::vector<double> eta;
  std::vector<double> x;
  std::vector<double> y;
  int components = 1;
  std::vector<double> value;
  std::vector<double> vx;
  std::vector<double> vy;

  [[nodiscard]] std::size_t size() const { return x.size(); }
};

namespace detail {

inline Space space_of(const DofVector& v) {
  if (v.dimension != 2) throw std::invalid_argument("reconstruct: expects 2D DOFs");
  // Dual families are expanded in the primal basis of their geometric dual.
  const int k = is_dual(v.family) ? 2 - form_degree(v.family) : form_degree(v.family);
  return k == 0 ? Space::C : (k == 1 ? Space::D : Space::S);
}

// Expansion coefficients in the primal basis of space_of(v).
inline Eigen::VectorXd primal_coefficients(const ElementOperators& ops, const DofVector& v) {
  if (!is_dual(v.family)) return v.values;
  switch (v.family) {
    case DofFamily::dual0: return ops.m2.solve(v.values);
    case DofFamily::dual1: return ops.m1.solve(v.values);
    default: return mass_matrix_2d(Space::C, ops.grid, ops.element, ops.mass_rule).solve(v.values);
  }
}

}  // namespace detail

/// Pointwise values of the expansion (primal or dual) in physical form.
inline FieldSample evaluate_field(const ElementOperators& ops, const DofVector& dofs, const std::vector<double>& xi,
                                  const std::vector<double>& eta) {
  const Space space = detail::space_of(dofs);
  if (dofs.values.size() != ops.layout.size(space)) throw std::invalid_argument("evaluate_field: dimension mismatch");
  const Eigen::VectorXd coeff = detail::primal_coefficients(ops, dofs);
  const BasisTable t = tabulate_2d(space, ops.grid, xi, eta);

  FieldSample s;
  s.xi = xi;
  s.eta = eta;
  s.components = space == Space::D ? 2 : 1;
  const std::size_t n = xi.size() * eta.size();
  s.x.resize(n);
  s.y.resize(n);
  const Eigen::VectorXd first = t.first * coeff;
  const Eigen::VectorXd second = space == Space::D ? Eigen::VectorXd(t.second * coeff) : Eigen::VectorXd();
  if (space == Space::D) {
    s.vx.resize(n);
    s.vy.resize(n);
  } else {
    s.value.resize(n);
  }
  for (std::size_t a = 0; a < xi.size(); ++a) {
    for (std::size_t b = 0; b < eta.size(); ++b) {
      const std::size_t p = a * eta.size() + b;
      const Point2 pt = ops.element.map_point(xi[a], eta[b]);
      const Jacobian jac = ops.element.jacobian(xi[a], eta[b]);
      s.x[p] = pt.x;
      s.y[p] = pt.y;
      switch (space) {
        case Space::C: s.value[p] = first[p]; break;
        case Space::S: s.value[p] = first[p] / jac.determinant; break;
        case Space::D: {
          const Eigen::Vector2d v = jac.matrix * Eigen::Vector2d(first[p], second[p]) / jac.determinant;
          s.vx[p] = v[0];
          s.vy[p] = v[1];
          break;
        }
      }
    }
  }
  return s;
}

/// Uniform resolution x resolution reference grid including the boundary.
inline FieldSample reconstruct(const ElementOperators& ops, const DofVector& dofs, int resolution) {
  if (resolution < 2) throw std::invalid_argument("reconstruct: resolution must be >= 2");
  std::vector<double> pts(resolution);
  for (int k = 0; k < resolution; ++k) pts[k] = -1.0 + 2.0 * k / (resolution - 1);
  return evaluate_field(ops, dofs, pts, pts);
}

inline int default_error_points(int order) { return 2 * order + 10; }

/// L2(K) distance between a scalar expansion and `exact`, Gauss rule with
/// `points` per direction.
inline double l2_error(const ElementOperators& ops, const DofVector& dofs,
                       const std::function<double(double, double)>& exact, int points = 0) {
  if (points <= 0) points = default_error_points(ops.order());
  const QuadratureRule rule = gauss_legendre(points);
  const FieldSample s = evaluate_field(ops, dofs, rule.nodes, rule.nodes);
  if (s.components != 1) throw std::invalid_argument("l2_error: expects a scalar field");
  long double acc = 0.0;
  for (int a = 0; a < points; ++a)
    for (int b = 0; b < points; ++b) {
      const std::size_t p = static_cast<std::size_t>(a) * points + b;
      const double d = s.value[p] - exact(s.x[p], s.y[p]);
      acc += rule.weights[a] * rule.weights[b] * ops.element.jacobian(rule.nodes[a], rule.nodes[b]).determinant * d * d;
    }
  return std::sqrt(static_cast<double>(acc));
}

struct FluxErrors {
  double l2_flux;  // ||q^h - q||
  double l2_div;   // ||div q^h - div q||
  double hdiv;     // sqrt(l2_flux^2 + l2_div^2)
};

inline FluxErrors flux_errors(const ElementOperators& ops, const DofVector& q,
                              const std::function<Eigen::Vector2d(double, double)>& exact_flux,
                              const std::function<double(double, double)>& exact_div, int points = 0) {
  if (q.family != DofFamily::primal1) throw std::invalid_argument("flux_errors: expects N1(q)");
  if (points <= 0) points = default_error_points(ops.order());
  const QuadratureRule rule = gauss_legendre(points);
  const FieldSample s = evaluate_field(ops, q, rule.nodes, rule.nodes);
  long double acc = 0.0;
  for (int a = 0; a < points; ++a)
    for (int b = 0; b < points; ++b) {
      const std::size_t p = static_cast<std::size_t>(a) * points + b;
      const Eigen::Vector2d e = exact_flux(s.x[p], s.y[p]);
      const double dx = s.vx[p] - e[0], dy = s.vy[p] - e[1];
      acc += rule.weights[a] * rule.weights[b] * ops.element.jacobian(rule.nodes[a], rule.nodes[b]).determinant *
             (dx * dx + dy * dy);
    }
  const DofVector div{DofFamily::primal2, 2, ops.e21 * q.values};
  const double l2f = std::sqrt(static_cast<double>(acc));
  const double l2d = l2_error(ops, div, exact_div, points);
  return {l2f, l2d, std::hypot(l2f, l2d)};
}

// --- tabular output -------------------------------------------------------

using TableCell = std::variant<std::monostate, long, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<TableCell>> rows;
};

inline std::string format_cell(const TableCell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(long v) const { return std::to_string(v); }
    std::string operator()(double v) const {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.10g", v);
      return buf;
    }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, cell);
}

/// Comma separated, LF terminated, header first, 10 significant digits.
inline std::string emit_table(const Table& table) {
  std::ostringstream out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw std::invalid_argument("emit_table: row width mismatch");
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_cell(row[c]);
    out << '\n';
  }
  return out.str();
}

inline nlohmann::json to_json(const SolveReport& r) {
  nlohmann::json j;
  j["ok"] = r.ok;
  j["diagnostics"] = r.diagnostics;
  j["condition"] = std::isfinite(r.condition) ? nlohmann::json(r.condition) : nlohmann::json(nullptr);
  j["nonzeros"] = r.nonzeros;
  j["residual_norm"] = r.residual_norm;
  j["solution"] = std::vector<double>(r.solution.data(), r.solution.data() + r.solution.size());
  return j;
}

}  // namespace msem
