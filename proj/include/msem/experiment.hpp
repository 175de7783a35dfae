#pragma once

// Command line driver: basis-dump, mixed, dirichlet-neumann, tables.

#include "msem/benchmarks.hpp"
#include "msem/postproc.hpp"
#include "msem/solvers.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace msem {

struct ExperimentConfig {
  std::string command;
  std::vector<int> degrees;
  std::vector<double> deformations;
  std::string formulation = "both";  // pp, pd, both
  int quad_order = 0;                // 0 selects N+1
  QuadratureFamily quadrature = QuadratureFamily::gauss_lobatto;
  std::string out;
  std::string json;
  int resolution = 101;
  std::string which = "both";  // tables: cond, norms, both
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// "3", "2,4,6" or "a:b:step" (inclusive).
inline std::vector<int> parse_degree_list(const std::string& text) {
  std::vector<int> out;
  auto to_int = [&](const std::string& s) {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(s, &pos);
    } catch (const std::exception&) {
      throw UsageError("invalid degree '" + s + "'");
    }
    if (pos != s.size()) throw UsageError("invalid degree '" + s + "'");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() < 2 || parts.size() > 3) throw UsageError("degree range must be a:b or a:b:step");
    const int a = to_int(parts[0]), b = to_int(parts[1]), step = parts.size() == 3 ? to_int(parts[2]) : 1;
    if (step <= 0 || b < a) throw UsageError("degree range '" + text + "' is empty");
    for (int n = a; n <= b; n += step) out.push_back(n);
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(to_int(p));
  }
  if (out.empty()) throw UsageError("empty degree list");
  for (int n : out)
    if (n < 1) throw UsageError("degrees must be >= 1");
  return out;
}

inline std::vector<double> parse_c_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(p, &pos);
    } catch (const std::exception&) {
      throw UsageError("invalid deformation '" + p + "'");
    }
    if (pos != p.size()) throw UsageError("invalid deformation '" + p + "'");
    if (!(v >= 0.0 && v < 0.5)) throw UsageError("c must lie in [0, 0.5)");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty c list");
  return out;
}

namespace detail {

inline ElementOperators operators_for(const ExperimentConfig& cfg, int n, double c) {
  return make_operators(n, c, cfg.quadrature, cfg.quad_order);
}

inline std::vector<double> uniform_points(int r) {
  std::vector<double> p(r);
  for (int k = 0; k < r; ++k) p[k] = -1.0 + 2.0 * k / (r - 1);
  return p;
}

inline Table basis_dump(const ExperimentConfig& cfg) {
  Table t{{"dimension", "N", "c", "space", "kind", "index", "xi", "eta", "x", "y", "value_x", "value_y"}, {}};
  const std::vector<double> pts = uniform_points(cfg.resolution);
  for (int n : cfg.degrees) {
    const GllGrid grid = gll_grid(n);
    const QuadratureRule rule = make_rule(cfg.quadrature, cfg.quad_order > 0 ? cfg.quad_order : n + 1);
    for (BasisKind kind : {BasisKind::nodal, BasisKind::edge}) {
      const DualBasis1D dual(grid, kind, rule);
      const std::string name = kind == BasisKind::nodal ? "nodal" : "edge";
      for (double x : pts) {
        const Eigen::VectorXd pv = dual.primal_values(x), dv = dual.values(x);
        for (Eigen::Index k = 0; k < pv.size(); ++k) {
          t.rows.push_back({1L, long(n), TableCell{}, name, std::string("primal"), long(k), x, TableCell{}, x,
                            TableCell{}, pv[k], TableCell{}});
          t.rows.push_back({1L, long(n), TableCell{}, name, std::string("dual"), long(k), x, TableCell{}, x,
                            TableCell{}, dv[k], TableCell{}});
        }
      }
    }
    for (double c : cfg.deformations) {
      const ElementOperators ops = operators_for(cfg, n, c);
      for (Space space : {Space::C, Space::D, Space::S}) {
        const int size = ops.layout.size(space);
        for (bool dual_kind : {false, true}) {
          const int k = form_degree(space);
          const DofFamily fam = dual_kind ? make_family(true, 2 - k) : make_family(false, k);
          for (int idx = 0; idx < size; ++idx) {
            DofVector unit{fam, 2, Eigen::VectorXd::Unit(size, idx)};
            const FieldSample s = evaluate_field(ops, unit, pts, pts);
            for (std::size_t p = 0; p < s.size(); ++p) {
              const double xi = s.xi[p / s.eta.size()], eta = s.eta[p % s.eta.size()];
              TableCell vx = s.components == 2 ? TableCell(s.vx[p]) : TableCell(s.value[p]);
              TableCell vy = s.components == 2 ? TableCell(s.vy[p]) : TableCell{};
              t.rows.push_back({2L, long(n), c, to_string(space), std::string(dual_kind ? "dual" : "primal"),
                                long(idx), xi, eta, s.x[p], s.y[p], vx, vy});
            }
          }
        }
      }
    }
  }
  return t;
}

inline bool runs(const ExperimentConfig& cfg, Formulation f) {
  if (cfg.formulation == "both") return true;
  return (cfg.formulation == "pp") == (f == Formulation::primal_primal);
}

inline TableCell cell_or_empty(const std::optional<double>& v) { return v ? TableCell(*v) : TableCell{}; }

inline Table mixed(const ExperimentConfig& cfg, nlohmann::json& report) {
  using P = benchmarks::ManufacturedPoisson;
  Table t{{"N", "c", "cond_primal_primal", "cond_primal_dual", "nnz_primal_primal", "nnz_primal_dual", "phi_l2_error",
           "flux_l2_error", "div_l2_error", "hdiv_error", "constraint_l2", "div_minus_f_l2", "interpolation_l2",
           "q_agreement", "phi_agreement"},
          {}};
  for (int n : cfg.degrees) {
    for (double c : cfg.deformations) {
      const ElementOperators ops = operators_for(cfg, n, c);
      std::optional<MixedSolution> pp, pd;
      if (runs(cfg, Formulation::primal_primal))
        pp = solve_mixed(Formulation::primal_primal, ops, P::source, P::boundary());
      if (runs(cfg, Formulation::primal_dual))
        pd = solve_mixed(Formulation::primal_dual, ops, P::source, P::boundary());
      const MixedSolution& ref = pp ? *pp : *pd;

      const FluxErrors fe = flux_errors(ops, ref.flux, P::flux, P::source);
      const double phi_err = l2_error(ops, ref.potential, P::phi);
      const DofVector fh = cell_integrals(ops.grid, ops.element, P::source, default_source_points);
      const DofVector gap{DofFamily::primal2, 2, ops.e21 * ref.flux.values - fh.values};
      const double constraint = l2_error(ops, gap, [](double, double) { return 0.0; });
      const double interp = l2_error(ops, fh, P::source);

      std::optional<double> q_agree, phi_agree;
      if (pp && pd) {
        q_agree = (pp->flux.values - pd->flux.values).lpNorm<Eigen::Infinity>();
        phi_agree = (pd->potential.values - ops.m2.apply(pp->potential.values)).lpNorm<Eigen::Infinity>();
      }
      auto cond = [](const std::optional<MixedSolution>& s) {
        return s ? TableCell(s->report.condition) : TableCell{};
      };
      auto nnz = [](const std::optional<MixedSolution>& s) { return s ? TableCell(s->report.nonzeros) : TableCell{}; };
      t.rows.push_back({long(n), c, cond(pp), cond(pd), nnz(pp), nnz(pd), phi_err, fe.l2_flux, fe.l2_div, fe.hdiv,
                        constraint, fe.l2_div, interp, cell_or_empty(q_agree), cell_or_empty(phi_agree)});

      nlohmann::json entry{{"N", n}, {"c", c}};
      if (pp) entry["primal_primal"] = to_json(pp->report);
      if (pd) entry["primal_dual"] = to_json(pd->report);
      report.push_back(entry);
    }
  }
  return t;
}

inline Table dirichlet_neumann(const ExperimentConfig& cfg, nlohmann::json& report) {
  Table t{{"N", "c", "h1_norm", "hdiv_norm", "diff", "dof_residual", "pointwise_residual"}, {}};
  for (int n : cfg.degrees) {
    for (double c : cfg.deformations) {
      const ElementOperators ops = operators_for(cfg, n, c);
      const DirichletNeumannResult r =
          solve_dirichlet_neumann(ops, benchmarks::dirichlet_neumann_boundary(), cfg.resolution);
      t.rows.push_back({long(n), c, r.norms.h1, r.norms.hdiv, std::abs(r.norms.h1 - r.norms.hdiv),
                        r.equivalence.dof_residual, r.equivalence.pointwise_residual});
      report.push_back({{"N", n},
                        {"c", c},
                        {"h1_norm", r.norms.h1},
                        {"hdiv_norm", r.norms.hdiv},
                        {"dof_residual", r.equivalence.dof_residual},
                        {"pointwise_residual", r.equivalence.pointwise_residual}});
    }
  }
  return t;
}

inline Table condition_table(const ExperimentConfig& cfg, nlohmann::json& report) {
  using P = benchmarks::ManufacturedPoisson;
  Table t{{"N", "c", "formulation", "cond", "nnz"}, {}};
  for (int n : cfg.degrees) {
    for (double c : cfg.deformations) {
      const ElementOperators ops = operators_for(cfg, n, c);
      for (Formulation f : {Formulation::primal_primal, Formulation::primal_dual}) {
        if (!runs(cfg, f)) continue;
        const SaddleSystem sys = assemble_mixed(f, ops, P::source, P::boundary());
        const SolveReport r = solve_or_throw(sys.matrix, sys.rhs, SolveOptions{});
        t.rows.push_back({long(n), c, to_string(f), r.condition, r.nonzeros});
        report.push_back({{"N", n}, {"c", c}, {"formulation", to_string(f)}, {"report", to_json(r)}});
      }
    }
  }
  return t;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
}

}  // namespace detail

/// Returns 0 on success, 1 on solver failure, 2 on bad usage.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mimetic spectral element experiments on a single curvilinear element", "msem"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string degree_text, c_text, quadrature_text = "gll";

  CLI::App* basis = app.add_subcommand("basis-dump", "sample 1D and 2D primal and dual basis functions");
  CLI::App* mixed = app.add_subcommand("mixed", "manufactured mixed Poisson problem, both formulations");
  CLI::App* dn = app.add_subcommand("dirichlet-neumann", "dual Dirichlet and primal Neumann problems");
  CLI::App* tables = app.add_subcommand("tables", "condition number and norm tables");
  for (CLI::App* sub : {basis, mixed, dn, tables}) {
    sub->add_option("--degree", degree_text, "polynomial degrees: N, comma list or a:b:step");
    sub->add_option("--c", c_text, "deformation parameter(s) in [0, 0.5), comma list");
    sub->add_option("--quad-order", cfg.quad_order, "points per direction for mass matrices (default N+1)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--quadrature", quadrature_text, "mass matrix rule: gll or gauss")
        ->check(CLI::IsMember({"gll", "gauss"}));
    sub->add_option("--out", cfg.out, "output file (directory for tables)");
    sub->add_option("--json", cfg.json, "write a JSON report to this file");
    sub->add_option("--resolution", cfg.resolution, "samples per direction")->check(CLI::Range(2, 100000));
  }
  for (CLI::App* sub : {mixed, tables})
    sub->add_option("--formulation", cfg.formulation, "pp, pd or both")->check(CLI::IsMember({"pp", "pd", "both"}));
  tables->add_option("--which", cfg.which, "cond, norms or both")->check(CLI::IsMember({"cond", "norms", "both"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  cfg.command = chosen->get_name();
  cfg.quadrature = quadrature_text == "gauss" ? QuadratureFamily::gauss_legendre : QuadratureFamily::gauss_lobatto;

  try {
    const bool for_tables = cfg.command == "tables";
    if (!degree_text.empty()) cfg.degrees = parse_degree_list(degree_text);
    if (!c_text.empty()) cfg.deformations = parse_c_list(c_text);
    if (cfg.degrees.empty() && !for_tables) cfg.degrees = {3};
    if (cfg.deformations.empty() && !for_tables) cfg.deformations = {0.0};
    if (cfg.quad_order > 0) {
      for (int n : cfg.degrees)
        if (cfg.quad_order < n + 1) throw UsageError("--quad-order must be at least N+1");
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << chosen->help();
    return 2;
  }

  try {
    nlohmann::json report = nlohmann::json::array();
    if (cfg.command == "tables") {
      std::vector<std::pair<std::string, std::string>> outputs;
      if (cfg.which != "norms") {
        ExperimentConfig c1 = cfg;
        if (c1.degrees.empty()) c1.degrees = {5, 10, 15, 20};
        if (c1.deformations.empty()) c1.deformations = {0.0, 0.3};
        outputs.emplace_back("table1_cond.csv", emit_table(detail::condition_table(c1, report)));
      }
      if (cfg.which != "cond") {
        ExperimentConfig c2 = cfg;
        if (c2.degrees.empty()) c2.degrees = {2, 4, 6, 8, 10, 12, 14, 16, 18};
        if (c2.deformations.empty()) c2.deformations = {0.0, 0.15, 0.3};
        Table t = detail::dirichlet_neumann(c2, report);
        Table slim{{"N", "c", "h1_norm", "hdiv_norm", "diff"}, {}};
        for (auto& row : t.rows) slim.rows.push_back({row[0], row[1], row[2], row[3], row[4]});
        outputs.emplace_back("table2_norms.csv", emit_table(slim));
      }
      if (cfg.out.empty()) {
        for (std::size_t k = 0; k < outputs.size(); ++k) out << (k ? "\n" : "") << outputs[k].second;
      } else {
        std::filesystem::create_directories(cfg.out);
        for (const auto& [name, text] : outputs) detail::write_text((std::filesystem::path(cfg.out) / name).string(), text);
      }
    } else {
      Table t;
      if (cfg.command == "basis-dump") t = detail::basis_dump(cfg);
      else if (cfg.command == "mixed") t = detail::mixed(cfg, report);
      else t = detail::dirichlet_neumann(cfg, report);
      const std::string text = emit_table(t);
      if (cfg.out.empty()) out << text;
      else detail::write_text(cfg.out, text);
    }
    if (!cfg.json.empty()) detail::write_text(cfg.json, report.dump(2) + "\n");
  } catch (const SolveError& e) {
    err << "solver failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace msem
