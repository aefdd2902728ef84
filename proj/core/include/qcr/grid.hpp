#pragma once

#include "qcr/linear.hpp"

#include <cmath>
#include <cstddef>

namespace qcr {

/// n x n cell-centred nodes on the square [-S, S]^2. Node (i, j) sits at
/// (-S + (i + 1/2) h, -S + (j + 1/2) h) with h = 2S / n; storage is row-major
/// with j as the row.
struct SquareGrid {
  double half_width = 1.0;
  int n = 0;

  double spacing() const { return 2.0 * half_width / n; }
  std::size_t size() const { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
  }
  int col(std::size_t k) const { return static_cast<int>(k % static_cast<std::size_t>(n)); }
  int row(std::size_t k) const { return static_cast<int>(k / static_cast<std::size_t>(n)); }
  double coord(int i) const { return -half_width + (i + 0.5) * spacing(); }
  Vec2 node(int i, int j) const { return {coord(i), coord(j)}; }
  Vec2 node(std::size_t k) const { return node(col(k), row(k)); }
  /// Continuous index coordinate of x: node i sits at i.
  double locate(double x) const { return (x + half_width) / spacing() - 0.5; }
  /// Index of the cell containing x, clamped to the grid.
  int cell_of(double x) const {
    const int i = static_cast<int>(std::floor((x + half_width) / spacing()));
    return i < 0 ? 0 : (i >= n ? n - 1 : i);
  }
  bool operator==(const SquareGrid&) const = default;
};

}  // namespace qcr
