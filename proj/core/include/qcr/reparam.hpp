#pragma once

#include "qcr/beltrami.hpp"
#include "qcr/errors.hpp"
#include "qcr/field.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qcr {

struct ReparamOptions {
  /// Solver grid: [-half_width, half_width]^2 with the field spacing, so
  /// field cells coincide with solver nodes.
  double solver_half_width = 2.0;
  SolveOptions solve = {200, 1e-10, 1e-3, 0.02, 1e-12, false};
  InverseOptions inverse;
  int max_delta_halvings = 60;
  int max_threshold_doublings = 60;
  /// Mollifier search: eta_0 = min(eta_start, 0.99 (1 - support)), halving.
  double eta_start = 0.25;
  int max_eta_halvings = 40;
  /// quad_budget = quad_budget_rel * (area + epsilon).
  double quad_budget_rel = 0.05;
  int audit_samples = 512;
  double audit_tol = 1e-6;
  std::uint64_t seed = 1;
};

/// Smallest e > 0 with (1+e)(a+e) + (1+e)e + e <= a + epsilon.
double epsilon_internal(double area, double epsilon);

struct DeltaChoice {
  double delta = 1.0;
  /// Integral of J(regularize(s_z, delta)).
  double regularized_area = 0.0;
  int halvings = 0;
  /// Per field cell at the accepted delta: J(s_z) and the Beltrami coefficient of s_z.
  std::vector<double> jacobian;
  std::vector<cplx> mu;
};
DeltaChoice choose_delta(const DerivativeField& field, double epsilon, const ReparamOptions& opts = {});
/// Same, with area_intrinsic(field) already known.
DeltaChoice choose_delta(const DerivativeField& field, double epsilon, double area, const ReparamOptions& opts = {});

struct ThresholdChoice {
  double L = 1.0;
  /// Per field cell.
  std::vector<std::uint8_t> mask_a;
  double off_a_energy = 0.0;
  /// Eccentricity bound (2 L^2 / delta^2 + 2)^{1/2} and its coefficient bound.
  double big_k_ecc = 1.0;
  double k_ecc = 0.0;
};
ThresholdChoice choose_threshold(const DerivativeField& field, double delta, double epsilon,
                                 const ReparamOptions& opts = {});

/// Solver node carrying the value of a field cell; grids must share spacing.
std::size_t solver_node(const DiscGrid& field_grid, const SquareGrid& solver_grid, std::size_t cell);
SquareGrid solver_grid_for(const DiscGrid& field_grid, double half_width = 2.0);

/// mu = beltrami_of(regularize(s_z, delta)) on A, 0 elsewhere, on the solver grid.
ComplexField build_coefficient(const DerivativeField& field, double delta, const std::vector<std::uint8_t>& mask_a,
                               const SquareGrid& solver_grid);
/// Same, reusing the per-cell coefficients of a delta choice.
ComplexField build_coefficient(const DerivativeField& field, const DeltaChoice& delta,
                               const std::vector<std::uint8_t>& mask_a, const SquareGrid& solver_grid);

struct SmoothChoice {
  ComplexField mu_tilde;
  std::vector<std::uint8_t> mask_b;
  double eta = 0.0;
  /// True when eta is below the grid spacing and the kernel is the identity.
  bool identity_kernel = false;
  double off_b_energy = 0.0;
  /// max over B of |mu - mu_tilde|.
  double max_deviation = 0.0;
  int halvings = 0;
};
SmoothChoice smooth_coefficient(const ComplexField& mu, double k, double epsilon, const DerivativeField& field,
                                const ReparamOptions& opts = {});

struct Inequality {
  std::string name;
  double lhs;
  double rhs;
  double slack() const { return rhs - lhs; }
  bool holds() const { return lhs <= rhs; }
};

struct AuditCase {
  std::string name;
  int samples = 0;
  /// max lhs / rhs over the samples of this case (0 if none).
  double max_ratio = 0.0;
};

struct ReparamReport {
  double epsilon_target = 0.0;
  double epsilon_internal = 0.0;
  double delta = 0.0;
  double L = 0.0;
  double k = 0.0;
  double big_k = 1.0;
  double big_k_ecc = 1.0;
  double k_ecc = 0.0;
  double measure_off_a = 0.0;
  double measure_off_b = 0.0;
  double eta = 0.0;
  bool identity_kernel = false;
  double term_regularized_area = 0.0;
  double term_off_a_energy = 0.0;
  double term_off_b_energy = 0.0;
  double max_deviation_b = 0.0;
  double mu_tilde_sup = 0.0;
  double energy_before = 0.0;
  double area_before = 0.0;
  double energy_after = 0.0;
  double bound_claimed = 0.0;
  double quad_budget = 0.0;

  int field_n = 0;
  int solver_n = 0;
  int solver_iterations = 0;
  double solver_contraction = 0.0;
  double solver_residual_l2 = 0.0;
  double solver_residual_max = 0.0;
  double rho_k_certified = 1.0;
  double phi_k_certified = 1.0;
  double inverse_residual = 0.0;
  double omega_half_width = 0.0;
  int omega_n = 0;
  std::size_t omega_nodes = 0;
  std::uint64_t seed = 0;

  std::vector<Inequality> inequalities;
  std::vector<AuditCase> audit;
  double audit_tol = 0.0;

  bool ok() const;
  /// Deterministic structured text; every double printed with %.17g.
  std::string format() const;
};

/// Raised when the final audit fails; carries the formatted report.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, ReparamReport report)
      : Error(ErrorCode::PipelineBudgetExceeded, what), report_(std::move(report)) {}
  const ReparamReport& report() const { return report_; }

 private:
  ReparamReport report_;
};

struct ReparamResult {
  /// phi : Omega -> D on the Omega grid (masked to Omega = rho(D)).
  QCMap phi;
  /// rho on the solver grid.
  QCMap rho;
  ComplexField mu;
  ComplexField mu_tilde;
  std::vector<std::uint8_t> mask_a;
  std::vector<std::uint8_t> mask_b;
  ReparamReport report;
};

ReparamResult epsilon_conformal(const DerivativeField& field, double epsilon, const ReparamOptions& opts = {});
ReparamResult epsilon_conformal(const SampledMap& u, double epsilon, const ReparamOptions& opts = {},
                                const EstimateOptions& est = {});

/// Omega grid: field spacing, half width the smallest multiple of it that
/// covers rho of the disc nodes.
SquareGrid omega_grid_for(const QCMap& rho, double spacing);

}  // namespace qcr
