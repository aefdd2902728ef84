#include "commands.hpp"

#include "qcr/beltrami.hpp"
#include "qcr/errors.hpp"
#include "qcr/field.hpp"
#include "qcr/fixtures.hpp"
#include "qcr/io.hpp"
#include "qcr/reparam.hpp"
#include "qcr/seminorm.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace qcr::cli {

namespace {

namespace fs = std::filesystem;
using io::fmt;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InputError, what); }

void line(const std::string& key, double v) { std::cout << key << " = " << fmt(v) << '\n'; }

bool power_of_two_in_range(int n) { return n >= 64 && n <= 2048 && (n & (n - 1)) == 0; }

fs::path artifact(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return cfg.out_dir / name;
}

void save_csv(const RunConfig& cfg, const std::string& name, const SquareGrid& grid, const std::vector<double>& v,
              const std::vector<std::uint8_t>& mask = {}) {
  const fs::path p = artifact(cfg, name);
  std::ostringstream os;
  io::write_csv(os, grid, v, mask);
  io::save_text(p, os.str());
  std::cout << "wrote " << p.string() << '\n';
}

std::vector<std::uint8_t> disc_mask(const DiscGrid& g) {
  std::vector<std::uint8_t> m(g.size(), 0);
  for (std::size_t k : g.disc_cells()) m[k] = 1;
  return m;
}

// cellwise() in full-grid storage order, zero off the disc.
std::vector<double> on_grid(const DerivativeField& f, const CellIntegrand& integrand) {
  const auto per_cell = cellwise(f, integrand);
  std::vector<double> v(f.grid.size(), 0.0);
  const auto cells = f.grid.disc_cells();
  for (std::size_t t = 0; t < cells.size(); ++t) v[cells[t]] = per_cell[t];
  return v;
}

EstimateOptions estimate_options(const RunConfig& cfg) {
  EstimateOptions est;
  if (cfg.directions > 0) est.sampled_directions = cfg.directions;
  return est;
}

DerivativeField load_field(const RunConfig& cfg) {
  return estimate_field(io::load_sampled_map(cfg.input), estimate_options(cfg));
}

int cmd_energy(const RunConfig& cfg) {
  const auto f = load_field(cfg);
  line("energy", energy(f));
  save_csv(cfg, "energy_density.csv", f.grid.square(), on_grid(f, energy_plus), disc_mask(f.grid));
  return 0;
}

int cmd_area(const RunConfig& cfg) {
  const auto f = load_field(cfg);
  line("area_intrinsic", area_intrinsic(f));
  line("area_hausdorff", area_hausdorff(f));
  const auto mask = disc_mask(f.grid);
  save_csv(cfg, "jacobian_intrinsic.csv", f.grid.square(), on_grid(f, jacobian_intrinsic), mask);
  save_csv(cfg, "jacobian_hausdorff.csv", f.grid.square(), on_grid(f, jacobian_hausdorff), mask);
  return 0;
}

int cmd_defect(const RunConfig& cfg) {
  const auto f = load_field(cfg);
  const auto d = on_grid(f, isotropy_defect);
  double mx = 0.0;
  for (std::size_t k : f.grid.disc_cells()) mx = std::max(mx, d[k]);
  line("max_defect", mx);
  line("integrated_defect", integrate(f, isotropy_defect));
  save_csv(cfg, "isotropy_defect.csv", f.grid.square(), d, disc_mask(f.grid));
  return 0;
}

int cmd_compare(const RunConfig& cfg) {
  const auto f = load_field(cfg);
  const double h = area_hausdorff(f), a = area_intrinsic(f);
  line("area_hausdorff", h);
  line("area_intrinsic", a);
  line("ratio", a > 0.0 ? h / a : 1.0);
  line("lower_bound", 0.25 * kPi * a);
  return 0;
}

int cmd_identities(const RunConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  auto random_map = [&] {
    for (;;) {
      Mat2 a;
      a << uni(rng), uni(rng), uni(rng), uni(rng);
      if (a.determinant() < 0) a.col(0) *= -1.0;
      if (a.determinant() > 0.05) return a;
    }
  };
  double forms = 0.0, compose = 0.0;
  int violations = 0;
  for (int t = 0; t < cfg.count; ++t) {
    const Mat2 f = random_map(), g = random_map();
    const DistortionForms d = distortion_forms(f);
    const double scale = std::max(1.0, d.norm_ratio);
    forms = std::max({forms, std::abs(d.norm_ratio - d.singular_ratio) / scale,
                      std::abs(d.norm_ratio - d.mu_ratio) / scale});
    const Wirtinger wf = wirtinger_of(f);
    const cplx mu_f = wf.dzbar / wf.dz;
    const cplx mu_g = beltrami_of_linear(g);
    // g o f^{-1} is the linear map g f^{-1}.
    compose = std::max(compose, std::abs(compose_coefficient(mu_f, mu_g, wf.dz) - beltrami_of_linear(g * f.inverse())));
    const double big_k = d.norm_ratio, k = std::abs(mu_f);
    if (k > k_of_dilatation(big_k) + 1e-12 || dilatation_of_k(k) > big_k * (1 + 1e-12)) ++violations;
  }
  std::cout << "maps = " << cfg.count << '\n';
  line("distortion_identity_max_residual", forms);
  line("composition_max_residual", compose);
  std::cout << "k_equivalence_violations = " << violations << '\n';
  const bool ok = forms <= 1e-9 && compose <= 1e-9 && violations == 0;
  std::cout << "status = " << (ok ? "ok" : "FAIL") << '\n';
  if (!ok) std::cerr << "error code=IdentityResidual message=\"identity residual above 1e-9\"\n";
  return ok ? 0 : 3;
}

std::vector<double> mapped(const ComplexField& f, double (*op)(const cplx&)) {
  std::vector<double> v(f.values.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = op(f.values[k]);
  return v;
}

double abs_of(const cplx& z) { return std::abs(z); }
double arg_of(const cplx& z) { return std::arg(z); }

void dump_qcmap_grids(const RunConfig& cfg, const std::string& prefix, const QCMap& m) {
  std::vector<double> det(m.grid.size(), 0.0), dil(m.grid.size(), 0.0);
  for (std::size_t k = 0; k < m.grid.size(); ++k) {
    if (!m.valid(k)) continue;
    det[k] = m.jacobians[k].determinant();
    dil[k] = det[k] > 0.0 ? distortion(m.jacobians[k]) : HUGE_VAL;
  }
  save_csv(cfg, prefix + "det.csv", m.grid, det, m.mask);
  save_csv(cfg, prefix + "dilatation.csv", m.grid, dil, m.mask);
}

int cmd_solve(const RunConfig& cfg) {
  const ComplexField mu = io::load_complex_field(cfg.input);
  if (!power_of_two_in_range(mu.grid.n)) bad("solver grid must be a power of two between 64 and 2048");
  SolveOptions opts;
  if (cfg.res_tol > 0) opts.res_tol = cfg.res_tol;
  if (cfg.max_iter > 0) opts.max_iter = cfg.max_iter;
  const BeltramiSolution sol = solve_beltrami(mu, opts);

  std::cout << "n = " << mu.grid.n << '\n';
  line("half_width", mu.grid.half_width);
  line("k", sol.k);
  std::cout << "iterations = " << sol.iterations << '\n';
  line("max_contraction", sol.max_contraction);
  line("residual_l2", sol.residual_l2);
  line("residual_max", sol.residual_max);
  line("min_det", sol.min_det);
  line("k_certified", sol.map.k_certified);

  const fs::path p = artifact(cfg, "f.bin");
  io::save_qcmap(p, sol.map);
  std::cout << "wrote " << p.string() << '\n';
  const auto [fz, fzbar] = wirtinger(ComplexField{mu.grid, sol.map.values});
  std::vector<double> res(mu.grid.size());
  for (std::size_t k = 0; k < res.size(); ++k) res[k] = std::abs(fzbar[k] - mu[k] * fz[k]);
  save_csv(cfg, "residual.csv", mu.grid, res);
  save_csv(cfg, "mu_abs.csv", mu.grid, mapped(mu, abs_of));
  save_csv(cfg, "mu_arg.csv", mu.grid, mapped(mu, arg_of));
  dump_qcmap_grids(cfg, "", sol.map);
  return 0;
}

// rho on the unit circle by bilinear interpolation of its node values.
std::string boundary_polyline(const QCMap& rho, int points) {
  const SquareGrid& g = rho.grid;
  std::ostringstream os;
  os << "k,x,y\n";
  for (int t = 0; t < points; ++t) {
    const double a = 2.0 * kPi * t / points;
    const double fx = g.locate(std::cos(a)), fy = g.locate(std::sin(a));
    const int i = static_cast<int>(std::floor(fx)), j = static_cast<int>(std::floor(fy));
    const double u = fx - i, v = fy - j;
    const cplx w = (1 - u) * (1 - v) * rho.values[g.index(i, j)] + u * (1 - v) * rho.values[g.index(i + 1, j)] +
                   (1 - u) * v * rho.values[g.index(i, j + 1)] + u * v * rho.values[g.index(i + 1, j + 1)];
    os << t << ',' << fmt(w.real()) << ',' << fmt(w.imag()) << '\n';
  }
  return os.str();
}

int cmd_reparam(const RunConfig& cfg) {
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) bad("epsilon must be positive");
  const SampledMap u = io::load_sampled_map(cfg.input);
  ReparamOptions opts;
  const int solver_n = cfg.grid > 0 ? cfg.grid : 2 * u.grid.n();
  if (!power_of_two_in_range(solver_n)) bad("solver grid must be a power of two between 64 and 2048");
  if (solver_n <= u.grid.n() || (solver_n - u.grid.n()) % 2 != 0) {
    bad("solver grid must exceed the map resolution by an even number of cells");
  }
  opts.solver_half_width = static_cast<double>(solver_n) / u.grid.n();
  opts.seed = cfg.seed;
  if (cfg.res_tol > 0) opts.solve.res_tol = cfg.res_tol;
  if (cfg.inv_tol > 0) opts.inverse.inv_tol = cfg.inv_tol;
  if (cfg.audit_tol >= 0) opts.audit_tol = cfg.audit_tol;
  if (cfg.audit_samples >= 0) opts.audit_samples = cfg.audit_samples;
  if (cfg.quad_budget_rel >= 0) opts.quad_budget_rel = cfg.quad_budget_rel;

  const fs::path report_path = cfg.report.empty() ? artifact(cfg, "report.txt") : cfg.report;
  ReparamResult res;
  try {
    res = epsilon_conformal(u, cfg.epsilon, opts, estimate_options(cfg));
  } catch (const BudgetExceeded& e) {
    const std::string text = e.report().format();
    io::save_text(report_path, text);
    std::cout << text;
    throw;
  }
  const std::string text = res.report.format();
  io::save_text(report_path, text);
  std::cout << text << "wrote " << report_path.string() << '\n';

  const fs::path phi = artifact(cfg, "phi.bin");
  io::save_qcmap(phi, res.phi);
  std::cout << "wrote " << phi.string() << '\n';
  const fs::path boundary = artifact(cfg, "omega_boundary.csv");
  io::save_text(boundary, boundary_polyline(res.rho, 512));
  std::cout << "wrote " << boundary.string() << '\n';
  save_csv(cfg, "mu_abs.csv", res.mu_tilde.grid, mapped(res.mu_tilde, abs_of));
  save_csv(cfg, "mu_arg.csv", res.mu_tilde.grid, mapped(res.mu_tilde, arg_of));
  dump_qcmap_grids(cfg, "phi_", res.phi);
  return 0;
}

int cmd_fixture(const RunConfig& cfg) {
  if (cfg.fixture == "bump") {
    const int n = cfg.grid > 0 ? cfg.grid : 512;
    if (!power_of_two_in_range(n)) bad("solver grid must be a power of two between 64 and 2048");
    io::save_complex_field(cfg.input, fixtures::bump_coefficient({2.0, n}, cfg.k, cfg.radius));
  } else {
    const int n = cfg.grid > 0 ? cfg.grid : 256;
    if (n < 16 || n > 8192) bad("map resolution out of range");
    io::save_sampled_map(cfg.input, fixtures::map_by_name(cfg.fixture, n, cfg.seed));
  }
  std::cout << "wrote " << cfg.input.string() << '\n';
  return 0;
}

}  // namespace

int run(const RunConfig& cfg) {
  if (cfg.command == "energy") return cmd_energy(cfg);
  if (cfg.command == "area") return cmd_area(cfg);
  if (cfg.command == "defect-map") return cmd_defect(cfg);
  if (cfg.command == "compare-areas") return cmd_compare(cfg);
  if (cfg.command == "identities") return cmd_identities(cfg);
  if (cfg.command == "solve") return cmd_solve(cfg);
  if (cfg.command == "reparam") return cmd_reparam(cfg);
  if (cfg.command == "fixture") return cmd_fixture(cfg);
  bad("unknown command '" + cfg.command + "'");
}

}  // namespace qcr::cli
