#include "qcr/reparam.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>

namespace qcr {

namespace {

// J and mu of regularize(s, delta), memoized for sampled semi-norms whose
// John ellipse is expensive; fixtures repeat the same semi-norm per cell.
class RegularizedCache {
 public:
  explicit RegularizedCache(double delta) : delta_(delta) {}

  struct Entry {
    double jacobian;
    cplx mu;
  };

  const Entry& get(const SemiNorm2& s) {
    if (s.is_quadratic()) {
      const SemiNorm2 r = regularize(s, delta_);
      scratch_ = {jacobian_intrinsic(r), beltrami_of(Ellipse2{r.form()})};
      return scratch_;
    }
    std::vector<double> key(s.values().begin(), s.values().end());
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      const SemiNorm2 r = regularize(s, delta_);
      const Ellipse2 e = john_ellipse(r);
      it = cache_.emplace(std::move(key), Entry{kPi / e.area(), beltrami_of(e)}).first;
    }
    return it->second;
  }

 private:
  double delta_;
  Entry scratch_{};
  std::map<std::vector<double>, Entry> cache_;
};

std::vector<double> cell_energies(const DerivativeField& field) {
  std::vector<double> e(field.grid.size(), 0.0);
  for (std::size_t k : field.grid.disc_cells()) e[k] = energy_plus(field.at(k));
  return e;
}

double masked_sum(const DerivativeField& field, const std::vector<double>& per_cell,
                  const std::vector<std::uint8_t>& mask, bool inside) {
  double s = 0.0;
  for (std::size_t k : field.grid.disc_cells()) {
    if ((mask[k] != 0) == inside) s += per_cell[k];
  }
  return s * field.grid.weight();
}

double masked_measure(const DerivativeField& field, const std::vector<std::uint8_t>& mask, bool inside) {
  double s = 0.0;
  for (std::size_t k : field.grid.disc_cells()) {
    if ((mask[k] != 0) == inside) s += 1.0;
  }
  return s * field.grid.weight();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double epsilon_internal(double area, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InputError, "epsilon must be positive");
  // 2 e^2 + (3 + a) e - epsilon = 0, shrunk slightly so rounding keeps the
  // calibrated bound below a + epsilon.
  const double b = 3.0 + area;
  double e = 2.0 * epsilon / (b + std::sqrt(b * b + 8.0 * epsilon));
  if (!std::isfinite(e) || e <= 0.0) e = epsilon / (area + 4.0);
  return e * (1.0 - 1e-12);
}

DeltaChoice choose_delta(const DerivativeField& field, double epsilon, const ReparamOptions& opts) {
  return choose_delta(field, epsilon, area_intrinsic(field), opts);
}

DeltaChoice choose_delta(const DerivativeField& field, double epsilon, double area, const ReparamOptions& opts) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InputError, "epsilon must be positive");
  const double budget = area + epsilon;
  DeltaChoice c;
  c.jacobian.assign(field.grid.size(), 0.0);
  c.mu.assign(field.grid.size(), 0.0);
  for (int i = 0; i <= opts.max_delta_halvings; ++i) {
    RegularizedCache cache(c.delta);
    double sum = 0.0;
    for (std::size_t k : field.grid.disc_cells()) {
      const auto& e = cache.get(field.at(k));
      c.jacobian[k] = e.jacobian;
      c.mu[k] = e.mu;
      sum += e.jacobian;
    }
    c.regularized_area = sum * field.grid.weight();
    c.halvings = i;
    if (c.regularized_area <= budget) return c;
    c.delta *= 0.5;
  }
  throw Error(ErrorCode::SearchExhausted, "no regularization parameter satisfies the area budget");
}

ThresholdChoice choose_threshold(const DerivativeField& field, double delta, double epsilon,
                                 const ReparamOptions& opts) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InputError, "delta must be positive");
  const auto energies = cell_energies(field);
  ThresholdChoice t;
  t.mask_a.assign(field.grid.size(), 0);
  for (int i = 0; i <= opts.max_threshold_doublings; ++i) {
    std::fill(t.mask_a.begin(), t.mask_a.end(), 0);
    for (std::size_t k : field.grid.disc_cells()) {
      const bool in = field.grid.center(k).norm() <= 1.0 - 1.0 / t.L && std::sqrt(energies[k]) <= t.L;
      t.mask_a[k] = in ? 1 : 0;
    }
    t.off_a_energy = masked_sum(field, energies, t.mask_a, false);
    if (t.off_a_energy <= epsilon) {
      t.big_k_ecc = std::sqrt(2.0 * t.L * t.L / (delta * delta) + 2.0);
      t.k_ecc = k_of_dilatation(t.big_k_ecc);
      return t;
    }
    t.L *= 2.0;
  }
  throw Error(ErrorCode::SearchExhausted, "no threshold satisfies the off-A energy budget");
}

SquareGrid solver_grid_for(const DiscGrid& field_grid, double half_width) {
  const double cells = (half_width - 1.0) / field_grid.spacing();
  if (!(half_width > 1.0) || std::abs(cells - std::round(cells)) > 1e-9) {
    throw Error(ErrorCode::InputError, "solver half width must exceed 1 by a whole number of cells");
  }
  return {half_width, field_grid.n() + 2 * static_cast<int>(std::lround(cells))};
}

std::size_t solver_node(const DiscGrid& field_grid, const SquareGrid& solver_grid, std::size_t cell) {
  const double h = field_grid.spacing();
  if (std::abs(solver_grid.spacing() - h) > 1e-12 * h) {
    throw Error(ErrorCode::InputError, "solver grid spacing must match the field spacing");
  }
  const int off = static_cast<int>(std::lround((solver_grid.half_width - 1.0) / h));
  const SquareGrid& f = field_grid.square();
  return solver_grid.index(f.col(cell) + off, f.row(cell) + off);
}

ComplexField build_coefficient(const DerivativeField& field, double delta, const std::vector<std::uint8_t>& mask_a,
                               const SquareGrid& solver_grid) {
  RegularizedCache cache(delta);
  auto mu = ComplexField::zeros(solver_grid);
  for (std::size_t k : field.grid.disc_cells()) {
    if (!mask_a[k]) continue;
    mu[solver_node(field.grid, solver_grid, k)] = cache.get(field.at(k)).mu;
  }
  return mu;
}

ComplexField build_coefficient(const DerivativeField& field, const DeltaChoice& delta,
                               const std::vector<std::uint8_t>& mask_a, const SquareGrid& solver_grid) {
  auto mu = ComplexField::zeros(solver_grid);
  for (std::size_t k : field.grid.disc_cells()) {
    if (mask_a[k]) mu[solver_node(field.grid, solver_grid, k)] = delta.mu[k];
  }
  return mu;
}

SmoothChoice smooth_coefficient(const ComplexField& mu, double k, double epsilon, const DerivativeField& field,
                                const ReparamOptions& opts) {
  const double h = field.grid.spacing();
  const double bound = (1.0 - k * k) * epsilon / (2.0 + epsilon);
  const double big_k = dilatation_of_k(k);
  const auto energies = cell_energies(field);
  const double support = mu.support_radius();

  SmoothChoice c;
  double eta = support == 0.0 ? opts.eta_start : std::min(opts.eta_start, 0.99 * (1.0 - support));
  for (int i = 0; i <= opts.max_eta_halvings; ++i, eta *= 0.5) {
    c.mu_tilde = mollify(mu, eta);
    c.eta = eta;
    c.identity_kernel = eta <= h;
    c.halvings = i;
    c.mask_b.assign(field.grid.size(), 0);
    c.max_deviation = 0.0;
    for (std::size_t cell : field.grid.disc_cells()) {
      const std::size_t q = solver_node(field.grid, mu.grid, cell);
      const double dev = std::abs(mu[q] - c.mu_tilde[q]);
      if (dev <= bound) {
        c.mask_b[cell] = 1;
        c.max_deviation = std::max(c.max_deviation, dev);
      }
    }
    c.off_b_energy = masked_sum(field, energies, c.mask_b, false);
    if (c.off_b_energy <= epsilon / big_k) return c;
  }
  throw Error(ErrorCode::SearchExhausted, "mollifier search reached its floor");
}

SquareGrid omega_grid_for(const QCMap& rho, double spacing) {
  double m = 0.0;
  for (std::size_t q = 0; q < rho.grid.size(); ++q) {
    if (!rho.valid(q) || !(rho.grid.node(q).norm() < 1.0)) continue;
    m = std::max({m, std::abs(rho.values[q].real()), std::abs(rho.values[q].imag())});
  }
  const int half_cells = static_cast<int>(std::ceil(m / spacing)) + 1;
  return {half_cells * spacing, 2 * half_cells};
}

ReparamResult epsilon_conformal(const SampledMap& u, double epsilon, const ReparamOptions& opts,
                                const EstimateOptions& est) {
  return epsilon_conformal(estimate_field(u, est), epsilon, opts);
}

ReparamResult epsilon_conformal(const DerivativeField& field, double epsilon, const ReparamOptions& opts) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InputError, "epsilon must be positive");
  ReparamResult res;
  ReparamReport& r = res.report;
  r.epsilon_target = epsilon;
  r.field_n = field.grid.n();
  r.seed = opts.seed;
  r.audit_tol = opts.audit_tol;
  r.energy_before = energy(field);
  r.area_before = area_intrinsic(field);
  const double e = epsilon_internal(r.area_before, epsilon);
  r.epsilon_internal = e;

  const DeltaChoice dc = choose_delta(field, e, r.area_before, opts);
  r.delta = dc.delta;
  r.term_regularized_area = dc.regularized_area;

  ThresholdChoice tc = choose_threshold(field, r.delta, e, opts);
  r.L = tc.L;
  r.big_k_ecc = tc.big_k_ecc;
  r.k_ecc = tc.k_ecc;
  r.term_off_a_energy = tc.off_a_energy;
  r.measure_off_a = masked_measure(field, tc.mask_a, false);

  const SquareGrid sg = solver_grid_for(field.grid, opts.solver_half_width);
  r.solver_n = sg.n;
  res.mu = build_coefficient(field, dc, tc.mask_a, sg);
  // Inflated by a relative 1e-12 so the mollifier's rounding stays below k.
  r.k = res.mu.sup_norm() * (1.0 + 1e-12);
  r.big_k = dilatation_of_k(r.k);

  SmoothChoice sc = smooth_coefficient(res.mu, r.k, e, field, opts);
  r.eta = sc.eta;
  r.identity_kernel = sc.identity_kernel;
  r.term_off_b_energy = sc.off_b_energy;
  r.max_deviation_b = sc.max_deviation;
  r.measure_off_b = masked_measure(field, sc.mask_b, false);
  r.mu_tilde_sup = sc.mu_tilde.sup_norm();

  BeltramiSolution sol = solve_beltrami(sc.mu_tilde, opts.solve);
  r.solver_iterations = sol.iterations;
  r.solver_contraction = sol.max_contraction;
  r.solver_residual_l2 = sol.residual_l2;
  r.solver_residual_max = sol.residual_max;
  r.rho_k_certified = sol.map.k_certified;

  const SquareGrid omega = omega_grid_for(sol.map, field.grid.spacing());
  r.omega_half_width = omega.half_width;
  r.omega_n = omega.n;
  Inverse inv = invert(sol.map, omega, opts.inverse);
  r.phi_k_certified = inv.map.k_certified;
  r.inverse_residual = inv.max_residual;
  r.omega_nodes = inv.map.active_count();
  r.energy_after = composed_energy(field, inv.map);

  r.bound_claimed = (1.0 + e) * (r.area_before + e) + (1.0 + e) * e + e;
  r.quad_budget = opts.quad_budget_rel * (r.area_before + epsilon);

  // Pointwise case audit at w = rho(z) for sampled field cells z.
  {
    const auto cells = field.grid.disc_cells();
    std::mt19937_64 rng(opts.seed);
    AuditCase cases[3] = {{"A_and_B", 0, 0.0}, {"B_minus_A", 0, 0.0}, {"off_B", 0, 0.0}};
    for (int s = 0; s < opts.audit_samples; ++s) {
      const std::size_t cell = cells[rng() % cells.size()];
      const Mat2 dphi = sol.map.jacobians[solver_node(field.grid, sg, cell)].inverse();
      const SemiNorm2& sz = field.at(cell);
      const double lhs = energy_plus_composed(sz, dphi);
      const double det = dphi.determinant();
      int which;
      double rhs;
      if (sc.mask_b[cell] && tc.mask_a[cell]) {
        which = 0;
        rhs = (1.0 + e) * dc.jacobian[cell] * det;
      } else if (sc.mask_b[cell]) {
        which = 1;
        rhs = (1.0 + e) * energy_plus(sz) * det;
      } else {
        which = 2;
        rhs = r.big_k * energy_plus(sz) * det;
      }
      const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? HUGE_VAL : 0.0);
      cases[which].samples += 1;
      cases[which].max_ratio = std::max(cases[which].max_ratio, ratio);
    }
    r.audit.assign(std::begin(cases), std::end(cases));
  }

  double audit_max = 0.0;
  for (const AuditCase& a : r.audit) audit_max = std::max(audit_max, a.max_ratio);
  r.inequalities = {
      {"regularized_area", r.term_regularized_area, r.area_before + e},
      {"off_a_energy", r.term_off_a_energy, e},
      {"off_b_energy", r.term_off_b_energy, e / r.big_k},
      {"uniform_approximation_on_b", r.max_deviation_b, (1.0 - r.k * r.k) * e / (2.0 + e)},
      {"mollified_sup", r.mu_tilde_sup, r.k},
      {"coefficient_vs_eccentricity", r.k, r.k_ecc},
      {"calibration", r.bound_claimed, r.area_before + epsilon},
      {"pointwise_audit", audit_max, 1.0 + opts.audit_tol},
      {"final_bound", r.energy_after, r.bound_claimed + r.quad_budget},
      {"headline", r.energy_after, r.area_before + epsilon + r.quad_budget},
  };

  res.rho = std::move(sol.map);
  res.phi = std::move(inv.map);
  res.mu_tilde = std::move(sc.mu_tilde);
  res.mask_a = std::move(tc.mask_a);
  res.mask_b = std::move(sc.mask_b);
  if (!r.ok()) throw BudgetExceeded("reparametrization audit failed", r);
  return res;
}

bool ReparamReport::ok() const {
  return std::all_of(inequalities.begin(), inequalities.end(), [](const Inequality& q) { return q.holds(); });
}

std::string ReparamReport::format() const {
  std::string out = "reparam_report 1\n";
  auto kv = [&](const char* key, const std::string& v) {
    out += key;
    out += " = ";
    out += v;
    out += '\n';
  };
  auto num = [&](const char* key, double v) { kv(key, fmt(v)); };
  auto integer = [&](const char* key, long long v) { kv(key, std::to_string(v)); };

  num("epsilon_target", epsilon_target);
  num("epsilon_internal", epsilon_internal);
  num("delta", delta);
  num("L_threshold", L);
  num("k", k);
  num("K", big_k);
  num("K_ecc", big_k_ecc);
  num("k_ecc", k_ecc);
  num("measure_off_A", measure_off_a);
  num("measure_off_B", measure_off_b);
  num("eta", eta);
  integer("eta_identity_kernel", identity_kernel ? 1 : 0);
  num("term_regularized_area", term_regularized_area);
  num("term_offA_energy", term_off_a_energy);
  num("term_offB_energy", term_off_b_energy);
  num("max_deviation_on_B", max_deviation_b);
  num("mu_tilde_sup", mu_tilde_sup);
  num("energy_before", energy_before);
  num("area_before", area_before);
  num("energy_after", energy_after);
  num("bound_claimed", bound_claimed);
  num("quad_budget", quad_budget);
  integer("field_n", field_n);
  integer("solver_n", solver_n);
  integer("solver_iterations", solver_iterations);
  num("solver_contraction", solver_contraction);
  num("solver_residual_l2", solver_residual_l2);
  num("solver_residual_max", solver_residual_max);
  num("rho_K_certified", rho_k_certified);
  num("phi_K_certified", phi_k_certified);
  num("inverse_residual", inverse_residual);
  num("omega_half_width", omega_half_width);
  integer("omega_n", omega_n);
  integer("omega_nodes", static_cast<long long>(omega_nodes));
  char seed_buf[32];
  std::snprintf(seed_buf, sizeof seed_buf, "%" PRIu64, seed);
  kv("seed", seed_buf);
  num("audit_tol", audit_tol);
  for (const AuditCase& a : audit) {
    out += "audit " + a.name + " samples=" + std::to_string(a.samples) + " max_ratio=" + fmt(a.max_ratio) + '\n';
  }
  for (const Inequality& q : inequalities) {
    out += "inequality " + q.name + " lhs=" + fmt(q.lhs) + " rhs=" + fmt(q.rhs) + " slack=" + fmt(q.slack()) +
           (q.holds() ? " ok" : " FAIL") + '\n';
  }
  out += std::string("status = ") + (ok() ? "ok" : "failed") + '\n';
  return out;
}

}  // namespace qcr
