#pragma once

#include "qcr/grid.hpp"
#include "qcr/linear.hpp"
#include "qcr/qcmap.hpp"

#include <utility>
#include <vector>

namespace qcr {

/// Complex values on the nodes of a square grid.
struct ComplexField {
  SquareGrid grid;
  std::vector<cplx> values;

  static ComplexField zeros(const SquareGrid& grid) { return {grid, std::vector<cplx>(grid.size())}; }
  template <class F>
  static ComplexField from_function(const SquareGrid& grid, F&& f) {
    ComplexField out = zeros(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const Vec2 p = grid.node(k);
      out.values[k] = f(cplx(p.x(), p.y()));
    }
    return out;
  }

  cplx& operator[](std::size_t k) { return values[k]; }
  const cplx& operator[](std::size_t k) const { return values[k]; }
  double sup_norm() const;
  /// Largest |z| over nodes with a nonzero value (0 for the zero field).
  double support_radius() const;
};

/// (f_z, f_zbar) by central differences, second-order one-sided on the edges.
std::pair<ComplexField, ComplexField> wirtinger(const ComplexField& f);

/// mu_f = f_zbar / f_z from finite differences.
ComplexField beltrami_coefficient(const ComplexField& f);
ComplexField beltrami_coefficient(const ComplexField& fz, const ComplexField& fzbar);

/// ||Df||^2 / det Df.
double distortion(const Mat2& df, double det_floor = 1e-12);
double distortion(const QCMap& f, std::size_t node);

/// The three expressions of the distortion identity for one differential.
struct DistortionForms {
  double norm_ratio;      // ||Df||^2 / det Df
  double singular_ratio;  // max |Df h| / min |Df h|
  double mu_ratio;        // (1 + |mu|) / (1 - |mu|)
};
DistortionForms distortion_forms(const Mat2& df, double det_floor = 1e-12);

/// Largest K with ||Df||^2 <= K det Df, and the matching coefficient bound.
inline double k_of_dilatation(double big_k) { return (big_k - 1.0) / (big_k + 1.0); }
inline double dilatation_of_k(double k) { return (1.0 + k) / (1.0 - k); }

/// Beltrami coefficient of g o f^{-1} at w = f(z).
cplx compose_coefficient(cplx mu_f, cplx mu_g, cplx f_z);

/// Convolution with the normalized radial bump exp(-1 / (1 - r^2/eta^2)).
/// Radii below one grid spacing give the identity kernel.
ComplexField mollify(const ComplexField& mu, double eta);

struct SolveOptions {
  int max_iter = 200;
  /// Neumann iteration stops when sup |h_{n+1} - h_n| <= iter_tol.
  double iter_tol = 1e-10;
  double res_tol = 1e-3;
  double k_margin = 0.02;
  double det_floor = 1e-12;
  /// Throw NoConvergence when the finite-difference residual exceeds res_tol.
  bool require_residual = true;
};

struct BeltramiSolution {
  /// f on the solver grid; Df from the spectral derivatives.
  QCMap map;
  double k = 0.0;
  int iterations = 0;
  /// Largest observed ratio |h_{n+1} - h_n|_2 / |h_n - h_{n-1}|_2.
  double max_contraction = 0.0;
  /// Independent finite-difference residual |f_zbar - mu f_z|, discrete L2 and sup.
  double residual_l2 = 0.0;
  double residual_max = 0.0;
  double min_det = 0.0;
};

/// Spectral Neumann solve of f_zbar = mu f_z on the periodic box of mu's grid,
/// f = z + C h with h = mu (1 + S h). The Cauchy transform keeps f_zbar = h
/// exactly, so f is conformal wherever mu vanishes.
BeltramiSolution solve_beltrami(const ComplexField& mu, const SolveOptions& opts = {});

struct InverseOptions {
  double inv_tol = 1e-8;
  int newton_max = 50;
  /// phi is kept where |phi(w)| < domain_radius.
  double domain_radius = 1.0;
};

struct Inverse {
  QCMap map;
  double max_residual = 0.0;
};

/// Newton inversion of the bilinear interpolant of rho on the nodes of
/// omega_grid, seeded by the nearest sampled value. Dphi = (Drho o phi)^{-1}.
Inverse invert(const QCMap& rho, const SquareGrid& omega_grid, const InverseOptions& opts = {});

/// Single point inversion; throws PointOutsideImage or NewtonDiverged.
Vec2 invert_point(const QCMap& rho, const Vec2& w, const InverseOptions& opts = {});

}  // namespace qcr
