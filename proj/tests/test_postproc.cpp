#include "msem/benchmarks.hpp"
#include "msem/postproc.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace msem;
using Poisson = benchmarks::ManufacturedPoisson;

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST(Reconstruct, NodalPolynomialIsReproduced) {
  for (double c : {0.0, 0.3}) {
    const int n = 4;
    const ElementOperators ops = make_operators(n, c);
    // Polynomial in the reference coordinates: in C^h for any map.
    auto w = [](double xi, double eta) { return 1 - xi * eta * eta + 0.5 * std::pow(xi, 4) * eta; };
    Eigen::VectorXd n0(ops.layout.size(Space::C));
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) n0[ops.layout.c_index(i, j)] = w(ops.grid.node(i), ops.grid.node(j));
    const FieldSample s = reconstruct(ops, DofVector{DofFamily::primal0, 2, n0}, 21);
    ASSERT_EQ(s.size(), 441u);
    for (std::size_t p = 0; p < s.size(); ++p)
      EXPECT_NEAR(s.value[p], w(s.xi[p / 21], s.eta[p % 21]), 1e-11);
  }
}

TEST(Reconstruct, DensityPolynomialIsReproduced) {
  const int n = 4;
  const ElementOperators ops = make_operators(n, 0.0);
  auto f = [](double x, double y) { return 2 + x * y - std::pow(y, 3); };
  const DofVector f2 = cell_integrals(ops.grid, ops.element, f, 6);
  const FieldSample s = reconstruct(ops, f2, 15);
  for (std::size_t p = 0; p < s.size(); ++p) EXPECT_NEAR(s.value[p], f(s.x[p], s.y[p]), 1e-11);
}

TEST(Reconstruct, CurlOfPolynomialIsReproduced) {
  const int n = 5;
  const ElementOperators ops = make_operators(n, 0.0);
  auto w = [](double x, double y) { return x * x * y + std::pow(y, 4); };
  Eigen::VectorXd n0(ops.layout.size(Space::C));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const Point2 p = ops.element.map_point(ops.grid.node(i), ops.grid.node(j));
      n0[ops.layout.c_index(i, j)] = w(p.x, p.y);
    }
  const DofVector q{DofFamily::primal1, 2, incidence_e10_2d(n).cast<double>() * n0};
  const FieldSample s = reconstruct(ops, q, 11);
  EXPECT_EQ(s.components, 2);
  for (std::size_t p = 0; p < s.size(); ++p) {
    const double x = s.x[p], y = s.y[p];
    EXPECT_NEAR(s.vx[p], x * x + 4 * std::pow(y, 3), 1e-11);
    EXPECT_NEAR(s.vy[p], -2 * x * y, 1e-11);
  }
}

TEST(Reconstruct, PrimalAndDualRepresentationsAgree) {
  const ElementOperators ops = make_operators(5, 0.3);
  const MassMatrix m0 = mass_matrix_2d(Space::C, ops.grid, ops.element, ops.mass_rule);
  struct Case {
    Space space;
    DofFamily primal, dual;
    const MassMatrix* mass;
  };
  for (const Case& k : {Case{Space::C, DofFamily::primal0, DofFamily::dual2, &m0},
                        Case{Space::D, DofFamily::primal1, DofFamily::dual1, &ops.m1},
                        Case{Space::S, DofFamily::primal2, DofFamily::dual0, &ops.m2}}) {
    const Eigen::VectorXd x = oracle::random_vector(ops.layout.size(k.space), 81);
    const FieldSample a = reconstruct(ops, DofVector{k.primal, 2, x}, 17);
    const FieldSample b = reconstruct(ops, DofVector{k.dual, 2, k.mass->apply(x)}, 17);
    if (k.space == Space::D) {
      for (std::size_t p = 0; p < a.size(); ++p) {
        EXPECT_NEAR(a.vx[p], b.vx[p], 1e-10);
        EXPECT_NEAR(a.vy[p], b.vy[p], 1e-10);
      }
    } else {
      for (std::size_t p = 0; p < a.size(); ++p) EXPECT_NEAR(a.value[p], b.value[p], 1e-10);
    }
  }
}

TEST(Reconstruct, ZeroAndErrors) {
  const ElementOperators ops = make_operators(3, 0.15);
  const FieldSample s = reconstruct(ops, DofVector{DofFamily::primal1, 2, Eigen::VectorXd::Zero(24)}, 5);
  EXPECT_EQ(max_abs(s.vx), 0.0);
  EXPECT_EQ(max_abs(s.vy), 0.0);
  EXPECT_THROW(reconstruct(ops, DofVector{DofFamily::primal1, 2, Eigen::VectorXd::Zero(24)}, 1), std::invalid_argument);
  EXPECT_THROW(reconstruct(ops, DofVector{DofFamily::primal1, 2, Eigen::VectorXd::Zero(23)}, 5), std::invalid_argument);
  EXPECT_THROW(reconstruct(ops, DofVector{DofFamily::primal1, 1, Eigen::VectorXd::Zero(24)}, 5), std::invalid_argument);
}

TEST(ErrorNorms, ExactFieldHasZeroError) {
  const ElementOperators ops = make_operators(4, 0.3);
  auto w = [](double xi, double eta) { return xi * xi - eta; };
  Eigen::VectorXd n0(25);
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; j <= 4; ++j) n0[ops.layout.c_index(i, j)] = w(ops.grid.node(i), ops.grid.node(j));
  // Express the exact field through the inverse map at the sample points.
  const QuadratureRule rule = gauss_legendre(default_error_points(4));
  std::vector<std::pair<Point2, double>> table;
  for (double a : rule.nodes)
    for (double b : rule.nodes) table.push_back({ops.element.map_point(a, b), w(a, b)});
  auto exact = [&](double x, double y) {
    for (const auto& [p, v] : table)
      if (p.x == x && p.y == y) return v;
    return std::nan("");
  };
  EXPECT_LE(l2_error(ops, DofVector{DofFamily::primal0, 2, n0}, exact), 1e-13);
}

TEST(ErrorNorms, ConstraintErrorEqualsInterpolationError) {
  const ElementOperators ops = make_operators(6, 0.3);
  const MixedSolution sol = solve_mixed(Formulation::primal_primal, ops, Poisson::source, Poisson::boundary());
  const FluxErrors fe = flux_errors(ops, sol.flux, Poisson::flux, Poisson::source);
  const DofVector fh = cell_integrals(ops.grid, ops.element, Poisson::source, default_source_points);
  const double interp = l2_error(ops, fh, Poisson::source);
  EXPECT_NEAR(fe.l2_div, interp, 1e-10);
  EXPECT_NEAR(fe.hdiv, std::hypot(fe.l2_flux, fe.l2_div), 1e-15);
  EXPECT_THROW(flux_errors(ops, sol.potential, Poisson::flux, Poisson::source), std::invalid_argument);
}

TEST(ErrorNorms, ConvergenceAndQuadratureStability) {
  double previous = 1e300;
  for (int n = 4; n <= 12; n += 2) {
    const ElementOperators ops = make_operators(n, 0.0);
    const MixedSolution sol = solve_mixed(Formulation::primal_dual, ops, Poisson::source, Poisson::boundary());
    const double e = l2_error(ops, sol.potential, Poisson::phi);
    EXPECT_LT(e, previous) << n;
    previous = e;
    const int m = default_error_points(n);
    EXPECT_NEAR(e, l2_error(ops, sol.potential, Poisson::phi, m + 6), 1e-10);
    const FluxErrors a = flux_errors(ops, sol.flux, Poisson::flux, Poisson::source, m);
    const FluxErrors b = flux_errors(ops, sol.flux, Poisson::flux, Poisson::source, m + 6);
    EXPECT_NEAR(a.l2_flux, b.l2_flux, 1e-10);
    EXPECT_NEAR(a.l2_div, b.l2_div, 1e-10);
  }
}

TEST(EmitTable, HeaderOnlyAndFormatting) {
  EXPECT_EQ(emit_table(Table{{"N", "c", "formulation", "cond", "nnz"}, {}}), "N,c,formulation,cond,nnz\n");
  Table t{{"N", "c", "h1_norm", "hdiv_norm", "diff"}, {}};
  t.rows.push_back({2L, 0.0, 2.451804943211, 2.451804943211, 0.0});
  t.rows.push_back({4L, 0.15, 1.0 / 3, 1e-17, TableCell{}});
  EXPECT_EQ(emit_table(t), "N,c,h1_norm,hdiv_norm,diff\n2,0,2.451804943,2.451804943,0\n4,0.15,0.3333333333,1e-17,\n");
  t.rows.push_back({1L});
  EXPECT_THROW(emit_table(t), std::invalid_argument);
  EXPECT_EQ(format_cell(std::string("primal-dual")), "primal-dual");
  EXPECT_EQ(format_cell(12345678901.0), "1.23456789e+10");
}

TEST(JsonReport, MirrorsSolveReport) {
  const SolveReport r = solve_dense(Eigen::MatrixXd::Identity(2, 2) * 3.0, Eigen::Vector2d(3.0, 6.0));
  const nlohmann::json j = to_json(r);
  EXPECT_TRUE(j["ok"].get<bool>());
  EXPECT_EQ(j["nonzeros"].get<long>(), 2);
  EXPECT_NEAR(j["condition"].get<double>(), 1.0, 1e-15);
  EXPECT_NEAR(j["solution"][1].get<double>(), 2.0, 1e-15);
  SolveReport bad;
  EXPECT_TRUE(to_json(bad)["condition"].is_null());
}
