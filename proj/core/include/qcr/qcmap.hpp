#pragma once

#include "qcr/grid.hpp"
#include "qcr/linear.hpp"

#include <cstdint>
#include <vector>

namespace qcr {

/// A sampled orientation preserving diffeomorphism between planar domains:
/// values f(w) and differentials Df(w) at the masked nodes of a square grid,
/// together with the certified dilatation bound max ||Df||^2 / det Df.
struct QCMap {
  SquareGrid grid;
  std::vector<std::uint8_t> mask;
  std::vector<cplx> values;
  std::vector<Mat2> jacobians;
  double k_certified = 1.0;

  bool valid(std::size_t k) const { return mask[k] != 0; }
  std::size_t active_count() const;

  /// f(w) = A w on every node of the grid; k_certified from A.
  static QCMap linear(const SquareGrid& grid, const Mat2& a);
  static QCMap identity(const SquareGrid& grid) { return linear(grid, Mat2::Identity()); }

  /// Recomputes k_certified from the stored differentials and checks
  /// det Df > det_floor on every masked node (throws OrientationViolation).
  void certify(double det_floor = 1e-12);

  /// Post-composition with a rotation of the image: f -> R f.
  QCMap rotated_image(double angle) const;
};

}  // namespace qcr
