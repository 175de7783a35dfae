#include "msem/poly1d.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace msem;

TEST(Legendre, LowDegrees) {
  auto l0 = legendre_eval(0, 0.7);
  EXPECT_DOUBLE_EQ(l0.value, 1.0);
  EXPECT_DOUBLE_EQ(l0.derivative, 0.0);
  auto l1 = legendre_eval(1, 0.7);
  EXPECT_DOUBLE_EQ(l1.value, 0.7);
  EXPECT_DOUBLE_EQ(l1.derivative, 1.0);
  auto l3 = legendre_eval(3, 0.5);
  EXPECT_NEAR(l3.value, -0.4375, 1e-15);
  EXPECT_NEAR(l3.derivative, 0.375, 1e-15);
}

TEST(Legendre, MatchesClosedFormSum) {
  for (int n = 0; n <= 12; ++n)
    for (double x : {-1.0, -0.83, -0.2, 0.0, 0.31, 0.77, 1.0}) {
      const auto ref = oracle::legendre(n, x);
      const auto got = legendre_eval(n, x);
      EXPECT_NEAR(got.value, double(ref.first), 1e-13) << n << " " << x;
      EXPECT_NEAR(got.derivative, double(ref.second), 1e-11 * std::max(1.0, std::abs(double(ref.second))));
    }
}

TEST(GllGrid, SmallOrders) {
  const auto g1 = gll_grid(1);
  EXPECT_EQ(g1.nodes(), (std::vector<double>{-1.0, 1.0}));
  const auto g2 = gll_grid(2);
  EXPECT_DOUBLE_EQ(g2.node(0), -1.0);
  EXPECT_DOUBLE_EQ(g2.node(1), 0.0);
  EXPECT_DOUBLE_EQ(g2.node(2), 1.0);
  const auto g3 = gll_grid(3);
  EXPECT_NEAR(g3.node(1), -0.4472135955, 1e-10);
  EXPECT_NEAR(g3.node(2), 0.4472135955, 1e-10);
  EXPECT_NEAR(g3.node(2), 1.0 / std::sqrt(5.0), 1e-15);
}

TEST(GllGrid, Invariants) {
  for (int n = 1; n <= 40; ++n) {
    const auto g = gll_grid(n);
    ASSERT_EQ(int(g.nodes().size()), n + 1);
    EXPECT_EQ(g.node(0), -1.0);
    EXPECT_EQ(g.node(n), 1.0);
    double wsum = 0.0;
    for (int i = 0; i <= n; ++i) {
      if (i > 0) EXPECT_LT(g.node(i - 1), g.node(i));
      EXPECT_EQ(g.node(i), -g.node(n - i));
      EXPECT_GT(g.weights()[i], 0.0);
      EXPECT_NEAR(g.weights()[i], g.weights()[n - i], 1e-15);
      wsum += g.weights()[i];
      const double x = g.node(i);
      EXPECT_LE(std::abs((1 - x * x) * legendre_eval(n, x).derivative), 1e-13 * std::max(1.0, n * n / 4.0));
      if (i > 0 && i < n) EXPECT_LE(std::abs(legendre_eval(n, x).derivative), 1e-14 * n * n) << n;
    }
    EXPECT_NEAR(wsum, 2.0, 1e-14);
  }
}

TEST(GllGrid, MatchesJacobiEigenvalues) {
  for (int n = 2; n <= 30; ++n) {
    const auto ref = oracle::gll_nodes(n);
    const auto g = gll_grid(n);
    for (int i = 0; i <= n; ++i) EXPECT_NEAR(g.node(i), ref[i], 1e-13);
  }
}

TEST(GllGrid, QuadratureExactness) {
  for (int n = 1; n <= 12; ++n) {
    const auto g = gll_grid(n);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double s = 0.0;
      for (int i = 0; i <= n; ++i) s += g.weights()[i] * std::pow(g.node(i), d);
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      EXPECT_NEAR(s, exact, 1e-14);
    }
  }
}

TEST(GllGrid, RejectsBadOrder) { EXPECT_THROW(gll_grid(0), std::invalid_argument); }

TEST(NodalBasis, KroneckerExact) {
  for (int n = 1; n <= 20; ++n) {
    const auto g = gll_grid(n);
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) EXPECT_EQ(nodal_eval(g, i, g.node(j)), i == j ? 1.0 : 0.0);
  }
}

TEST(NodalBasis, Examples) {
  const auto g4 = gll_grid(4);
  double s = 0.0;
  for (int i = 0; i <= 4; ++i) s += nodal_eval(g4, i, 0.3);
  EXPECT_NEAR(s, 1.0, 1e-15);
  EXPECT_NEAR(nodal_eval(gll_grid(1), 0, 0.5), 0.25, 1e-16);
  EXPECT_THROW(nodal_eval(g4, 5, 0.0), std::out_of_range);
}

TEST(NodalBasis, MatchesLagrangeProducts) {
  for (int n : {2, 5, 9}) {
    const auto g = gll_grid(n);
    for (double x : {-0.97, -0.4, 0.13, 0.66}) {
      const Eigen::VectorXd v = nodal_values(g, x), d = nodal_derivatives(g, x);
      for (int i = 0; i <= n; ++i) {
        EXPECT_NEAR(v[i], oracle::lagrange(g.nodes(), i, x), 1e-13);
        EXPECT_NEAR(d[i], oracle::lagrange_derivative(g.nodes(), i, x), 1e-11);
      }
    }
  }
}

TEST(EdgeBasis, Examples) {
  const auto g1 = gll_grid(1);
  for (double x : {-1.0, -0.3, 0.8}) EXPECT_NEAR(edge_eval(g1, 1, x), 0.5, 1e-16);
  const auto g4 = gll_grid(4);
  double s = 0.0;
  for (int j = 1; j <= 4; ++j) s += edge_eval(g4, j, 0.2) * g4.cell_width(j);
  EXPECT_NEAR(s, 1.0, 1e-14);
  EXPECT_THROW(edge_eval(g4, 0, 0.0), std::out_of_range);
  EXPECT_THROW(edge_eval(g4, 5, 0.0), std::out_of_range);
}

TEST(EdgeBasis, HistopolationIdentity) {
  for (int n = 1; n <= 20; ++n) {
    const auto g = gll_grid(n);
    const auto rule = gauss_legendre(n);
    for (int i = 1; i <= n; ++i) {
      const double a = g.node(i - 1), b = g.node(i);
      std::vector<double> pts;
      for (double t : rule.nodes) pts.push_back(0.5 * (a + b) + 0.5 * (b - a) * t);
      const Eigen::MatrixXd e = tabulate_edge(g, pts);
      for (int j = 1; j <= n; ++j) {
        double integral = 0.0;
        for (int q = 0; q < rule.size(); ++q) integral += 0.5 * (b - a) * rule.weights[q] * e(q, j - 1);
        EXPECT_NEAR(integral, i == j ? 1.0 : 0.0, 1e-13) << n << " " << i << " " << j;
      }
    }
  }
}

TEST(EdgeBasis, CellIntegralsN3BySimpson) {
  const auto g = gll_grid(3);
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      const double v = oracle::simpson([&](double x) { return edge_eval(g, j, x); }, g.node(i - 1), g.node(i), 200);
      EXPECT_NEAR(v, i == j ? 1.0 : 0.0, 1e-13);
    }
}

TEST(EdgeBasis, MatchesMonomialHistopolation) {
  for (int n : {1, 3, 6, 8}) {
    const auto g = gll_grid(n);
    const auto coeff = oracle::histopolation_coefficients(g.nodes());
    for (double x : {-0.9, -0.1, 0.45, 0.99})
      for (int j = 1; j <= n; ++j) EXPECT_NEAR(edge_eval(g, j, x), oracle::poly_eval(coeff, j - 1, x), 1e-11);
  }
}

TEST(EdgeBasis, DegreeIsNMinusOne) {
  // The N-th divided difference of a degree N-1 polynomial vanishes.
  for (int n : {2, 4, 7}) {
    const auto g = gll_grid(n);
    std::vector<double> x(n + 1);
    for (int k = 0; k <= n; ++k) x[k] = -0.9 + 1.8 * k / n;
    for (int j = 1; j <= n; ++j) {
      std::vector<double> f(n + 1);
      for (int k = 0; k <= n; ++k) f[k] = edge_eval(g, j, x[k]);
      for (int level = 1; level <= n; ++level)
        for (int k = n; k >= level; --k) f[k] = (f[k] - f[k - 1]) / (x[k] - x[k - level]);
      double scale = 0.0;
      for (int k = 0; k <= n; ++k) scale = std::max(scale, std::abs(edge_eval(g, j, x[k])));
      EXPECT_LE(std::abs(f[n]), 1e-9 * scale) << n << " " << j;
      if (n >= 2) EXPECT_GT(std::abs(f[n - 1]), 1e-8);
    }
  }
}

TEST(Incidence1D, Shapes) {
  EXPECT_EQ(incidence_1d(1), (IncidenceMatrix(1, 2) << -1, 1).finished());
  EXPECT_EQ(incidence_1d(2), (IncidenceMatrix(2, 3) << -1, 1, 0, 0, -1, 1).finished());
}

TEST(Incidence1D, DerivativeIdentity) {
  for (int n : {1, 5, 10}) {
    const auto g = gll_grid(n);
    const Eigen::VectorXd n0 = oracle::random_vector(n + 1, 17 + n);
    const Eigen::VectorXd n1 = incidence_1d(n).cast<double>() * n0;
    for (int k = 0; k < 20; ++k) {
      const double x = -1.0 + 2.0 * (k + 0.37) / 20.0;
      double exact = 0.0;
      for (int i = 0; i <= n; ++i) exact += n0[i] * oracle::lagrange_derivative(g.nodes(), i, x);
      EXPECT_NEAR(edge_values(g, x).dot(n1), exact, 1e-11) << n;
    }
  }
}

TEST(Quadrature, GaussLegendreExactness) {
  for (int m = 1; m <= 20; ++m) {
    const auto r = gauss_legendre(m);
    for (int d = 0; d <= 2 * m - 1; ++d) {
      double s = 0.0;
      for (int q = 0; q < m; ++q) s += r.weights[q] * std::pow(r.nodes[q], d);
      EXPECT_NEAR(s, d % 2 ? 0.0 : 2.0 / (d + 1), 1e-14);
    }
  }
}
