#pragma once

#include "qcr/grid.hpp"
#include "qcr/qcmap.hpp"
#include "qcr/seminorm.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace qcr {

/// Cell-centred grid on [-1, 1]^2 restricted to the unit disc. Maps are
/// sampled on the disc cells (centre inside D); a disc cell is interior when
/// every finite-difference stencil point can be interpolated from disc cells.
class DiscGrid {
 public:
  /// Stencil radius in cells used by estimate_derivative.
  static constexpr double kStencilRadius = 1.0;

  explicit DiscGrid(int n);

  int n() const { return square_.n; }
  double spacing() const { return square_.spacing(); }
  double weight() const { return spacing() * spacing(); }
  const SquareGrid& square() const { return square_; }
  std::size_t size() const { return square_.size(); }
  Vec2 center(std::size_t k) const { return square_.node(k); }

  bool in_disc(std::size_t k) const { return disc_[k] != 0; }
  bool interior(std::size_t k) const { return interior_[k] != 0; }
  bool in_disc(int i, int j) const {
    return i >= 0 && j >= 0 && i < n() && j < n() && in_disc(square_.index(i, j));
  }
  /// Disc cells in ascending storage order; every quadrature sums in this order.
  std::span<const std::size_t> disc_cells() const { return disc_cells_; }

  /// Disc cell nearest to z (ties broken by storage order).
  std::size_t nearest_disc_cell(const Vec2& z) const;

  /// Bilinear interpolation weights of p over four disc cells. Returns false
  /// if any of the four cells lies outside the disc.
  bool bilinear(const Vec2& p, std::size_t cells[4], double weights[4]) const;

  bool operator==(const DiscGrid& o) const { return square_ == o.square_; }

 private:
  SquareGrid square_;
  std::vector<std::uint8_t> disc_;
  std::vector<std::uint8_t> interior_;
  std::vector<std::size_t> disc_cells_;
};

/// Normed targets R^d. Only the distance is used by the field estimator.
class TargetSpace {
 public:
  enum class Kind { Euclidean, QuadraticNorm, PolygonalNorm };

  static TargetSpace euclidean(int dim);
  /// d(x, y) = sqrt((x - y).G(x - y)), G symmetric positive definite.
  static TargetSpace quadratic_norm(const Eigen::MatrixXd& g);
  /// R^2 normed by a non-degenerate sampled gauge.
  static TargetSpace polygonal_norm(const SemiNorm2& gauge);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Eigen::MatrixXd& metric() const { return g_; }
  const SemiNorm2& gauge() const { return gauge_; }

  double norm(std::span<const double> v) const;
  double distance(std::span<const double> x, std::span<const double> y) const;

 private:
  Kind kind_ = Kind::Euclidean;
  int dim_ = 2;
  Eigen::MatrixXd g_;
  SemiNorm2 gauge_;
};

/// A map from the disc cells into a normed target.
struct SampledMap {
  DiscGrid grid;
  TargetSpace target;
  /// n * n * dim doubles; entries of cells outside the disc are unused.
  std::vector<double> values;

  std::span<const double> at(std::size_t cell) const {
    const auto d = static_cast<std::size_t>(target.dim());
    return {values.data() + cell * d, d};
  }

  using Function = std::function<Eigen::VectorXd(const Vec2&)>;
  static SampledMap from_function(int n, const TargetSpace& target, const Function& f);
};

struct EstimateOptions {
  /// Directions on the half circle for the quadratic least-squares fit.
  int quadratic_directions = 8;
  /// Directions for sampled (polygonal-target) semi-norms.
  int sampled_directions = kDefaultDirections;
};

/// One semi-norm per disc cell. Cells of the boundary band that cannot hold a
/// full stencil carry the semi-norm of their nearest interior cell.
struct DerivativeField {
  DiscGrid grid;
  std::vector<SemiNorm2> seminorms;
  std::vector<std::uint8_t> estimated;

  const SemiNorm2& at(std::size_t cell) const { return seminorms[cell]; }
  /// Semi-norm of the disc cell containing (or nearest to) z.
  const SemiNorm2& lookup(const Vec2& z) const;
};

SemiNorm2 estimate_derivative(const SampledMap& u, std::size_t cell, const EstimateOptions& opts = {});
DerivativeField estimate_field(const SampledMap& u, const EstimateOptions& opts = {});

/// Builds a field directly from a semi-norm valued function (testing and CLI).
DerivativeField field_from_function(int n, const std::function<SemiNorm2(const Vec2&)>& f);

using CellIntegrand = std::function<double(const SemiNorm2&)>;

/// Integrand values per disc cell, in disc_cells() order.
std::vector<double> cellwise(const DerivativeField& field, const CellIntegrand& integrand);
/// Midpoint quadrature over the disc cells, optionally restricted to a mask.
double integrate(const DerivativeField& field, const CellIntegrand& integrand,
                 std::span<const std::uint8_t> mask = {});

double energy(const DerivativeField& field);
double area_intrinsic(const DerivativeField& field);
double area_hausdorff(const DerivativeField& field);

/// E_+^2(u o phi) evaluated on phi's domain grid through the chain rule
/// ap md (u o phi)_w = ap md u_{phi(w)} o D phi(w), with nearest-cell lookup.
double composed_energy(const DerivativeField& field, const QCMap& phi);
/// Per-node integrand of composed_energy (0 on unmasked nodes).
std::vector<double> composed_energy_density(const DerivativeField& field, const QCMap& phi);

/// I_+^2(s o A).
double energy_plus_composed(const SemiNorm2& s, const Mat2& a);

}  // namespace qcr
