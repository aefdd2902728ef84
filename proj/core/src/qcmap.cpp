#include "qcr/qcmap.hpp"

#include "qcr/errors.hpp"

#include <algorithm>

namespace qcr {

std::size_t QCMap::active_count() const {
  return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](auto m) { return m != 0; }));
}

QCMap QCMap::linear(const SquareGrid& grid, const Mat2& a) {
  QCMap f;
  f.grid = grid;
  f.mask.assign(grid.size(), 1);
  f.values.resize(grid.size());
  f.jacobians.assign(grid.size(), a);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec2 w = a * grid.node(k);
    f.values[k] = {w.x(), w.y()};
  }
  f.certify();
  return f;
}

void QCMap::certify(double det_floor) {
  double k = 1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!valid(i)) continue;
    if (!(jacobians[i].determinant() > det_floor)) {
      throw Error(ErrorCode::OrientationViolation, "differential is not orientation preserving");
    }
    k = std::max(k, dilatation(jacobians[i]));
  }
  k_certified = k;
}

QCMap QCMap::rotated_image(double angle) const {
  QCMap f = *this;
  const Mat2 r = rotation(angle);
  const cplx e = std::polar(1.0, angle);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    f.values[k] *= e;
    f.jacobians[k] = r * jacobians[k];
  }
  return f;
}

}  // namespace qcr
