#include "qcr/field.hpp"

#include "qcr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qcr {

namespace {

constexpr double kSnap = 1e-9;

// Nearest cell satisfying pred, searching square rings around (i, j).
template <class Pred>
std::size_t nearest_cell(const SquareGrid& g, const Vec2& z, Pred&& pred) {
  const int i0 = g.cell_of(z.x());
  const int j0 = g.cell_of(z.y());
  std::size_t best = std::numeric_limits<std::size_t>::max();
  double best_d = std::numeric_limits<double>::infinity();
  for (int r = 0; r < g.n; ++r) {
    for (int j = j0 - r; j <= j0 + r; ++j) {
      for (int i = i0 - r; i <= i0 + r; ++i) {
        if (std::max(std::abs(i - i0), std::abs(j - j0)) != r) continue;
        if (i < 0 || j < 0 || i >= g.n || j >= g.n) continue;
        const std::size_t k = g.index(i, j);
        if (!pred(k)) continue;
        const double d = (g.node(k) - z).squaredNorm();
        if (d < best_d || (d == best_d && k < best)) {
          best_d = d;
          best = k;
        }
      }
    }
    // Every cell of ring r + 1 is at least r * h away.
    if (best_d < std::pow(r * g.spacing(), 2)) break;
  }
  if (best == std::numeric_limits<std::size_t>::max()) {
    throw Error(ErrorCode::InputError, "grid has no admissible cell");
  }
  return best;
}

}  // namespace

DiscGrid::DiscGrid(int n) : square_{1.0, n} {
  if (n < 16) throw Error(ErrorCode::InputError, "disc grid needs n >= 16");
  disc_.assign(size(), 0);
  interior_.assign(size(), 0);
  for (std::size_t k = 0; k < size(); ++k) {
    if (center(k).norm() < 1.0) {
      disc_[k] = 1;
      disc_cells_.push_back(k);
    }
  }
  for (std::size_t k : disc_cells_) {
    const int i = square_.col(k);
    const int j = square_.row(k);
    bool ok = true;
    for (int dj = -1; dj <= 1 && ok; ++dj) {
      for (int di = -1; di <= 1 && ok; ++di) ok = in_disc(i + di, j + dj);
    }
    interior_[k] = ok ? 1 : 0;
  }
}

std::size_t DiscGrid::nearest_disc_cell(const Vec2& z) const {
  const int i = square_.cell_of(z.x());
  const int j = square_.cell_of(z.y());
  if (in_disc(i, j)) return square_.index(i, j);
  return nearest_cell(square_, z, [&](std::size_t k) { return in_disc(k); });
}

bool DiscGrid::bilinear(const Vec2& p, std::size_t cells[4], double weights[4]) const {
  double fx = square_.locate(p.x());
  double fy = square_.locate(p.y());
  const double rx = std::round(fx), ry = std::round(fy);
  if (std::abs(fx - rx) < kSnap) fx = rx;
  if (std::abs(fy - ry) < kSnap) fy = ry;
  const int i0 = static_cast<int>(std::floor(fx));
  const int j0 = static_cast<int>(std::floor(fy));
  const double tx = fx - i0, ty = fy - j0;
  const int ci[4] = {i0, i0 + 1, i0, i0 + 1};
  const int cj[4] = {j0, j0, j0 + 1, j0 + 1};
  const double w[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
  for (int q = 0; q < 4; ++q) {
    weights[q] = w[q];
    if (w[q] == 0.0) {
      cells[q] = 0;
      continue;
    }
    if (!in_disc(ci[q], cj[q])) return false;
    cells[q] = square_.index(ci[q], cj[q]);
  }
  return true;
}

TargetSpace TargetSpace::euclidean(int dim) {
  if (dim < 1) throw Error(ErrorCode::InputError, "target dimension must be >= 1");
  TargetSpace t;
  t.kind_ = Kind::Euclidean;
  t.dim_ = dim;
  return t;
}

TargetSpace TargetSpace::quadratic_norm(const Eigen::MatrixXd& g) {
  if (g.rows() != g.cols() || g.rows() < 1) {
    throw Error(ErrorCode::InputError, "target metric must be square");
  }
  const Eigen::MatrixXd sym = 0.5 * (g + g.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (!(es.eigenvalues().minCoeff() > 0.0)) {
    throw Error(ErrorCode::InputError, "target metric must be positive definite");
  }
  TargetSpace t;
  t.kind_ = Kind::QuadraticNorm;
  t.dim_ = static_cast<int>(g.rows());
  t.g_ = sym;
  return t;
}

TargetSpace TargetSpace::polygonal_norm(const SemiNorm2& gauge) {
  if (gauge.is_quadratic() || gauge.degenerate()) {
    throw Error(ErrorCode::InputError, "polygonal target needs a non-degenerate sampled gauge");
  }
  TargetSpace t;
  t.kind_ = Kind::PolygonalNorm;
  t.dim_ = 2;
  t.gauge_ = gauge;
  return t;
}

double TargetSpace::norm(std::span<const double> v) const {
  switch (kind_) {
    case Kind::Euclidean: {
      double s = 0.0;
      for (double x : v) s += x * x;
      return std::sqrt(s);
    }
    case Kind::QuadraticNorm: {
      const Eigen::Map<const Eigen::VectorXd> x(v.data(), static_cast<Eigen::Index>(v.size()));
      return std::sqrt(std::max(0.0, x.dot(g_ * x)));
    }
    case Kind::PolygonalNorm:
      return gauge_(Vec2(v[0], v[1]));
  }
  return 0.0;
}

double TargetSpace::distance(std::span<const double> x, std::span<const double> y) const {
  double diff[16];
  std::vector<double> big;
  double* d = diff;
  if (x.size() > 16) {
    big.resize(x.size());
    d = big.data();
  }
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
  return norm({d, x.size()});
}

SampledMap SampledMap::from_function(int n, const TargetSpace& target, const Function& f) {
  SampledMap u{DiscGrid(n), target, {}};
  const auto d = static_cast<std::size_t>(target.dim());
  u.values.assign(u.grid.size() * d, 0.0);
  for (std::size_t k : u.grid.disc_cells()) {
    const Eigen::VectorXd v = f(u.grid.center(k));
    if (static_cast<std::size_t>(v.size()) != d) {
      throw Error(ErrorCode::InputError, "map value has the wrong dimension");
    }
    for (std::size_t c = 0; c < d; ++c) u.values[k * d + c] = v(static_cast<Eigen::Index>(c));
  }
  return u;
}

const SemiNorm2& DerivativeField::lookup(const Vec2& z) const {
  return seminorms[grid.nearest_disc_cell(z)];
}

namespace {

// Symmetric distance quotient (d(u(z+hv), u(z)) + d(u(z-hv), u(z))) / 2h.
double quotient(const SampledMap& u, std::size_t cell, const Vec2& v, std::vector<double>& buf) {
  const DiscGrid& g = u.grid;
  const Vec2 z = g.center(cell);
  const double h = g.spacing() * DiscGrid::kStencilRadius;
  const auto d = static_cast<std::size_t>(u.target.dim());
  double sum = 0.0;
  for (double sign : {1.0, -1.0}) {
    std::size_t cells[4];
    double w[4];
    if (!g.bilinear(z + sign * h * v, cells, w)) {
      throw Error(ErrorCode::StencilOutOfDomain, "finite-difference stencil leaves the disc");
    }
    buf.assign(d, 0.0);
    for (int q = 0; q < 4; ++q) {
      if (w[q] == 0.0) continue;
      const auto x = u.at(cells[q]);
      for (std::size_t c = 0; c < d; ++c) buf[c] += w[q] * x[c];
    }
    sum += u.target.distance(buf, u.at(cell));
  }
  return sum / (2.0 * h);
}

}  // namespace

SemiNorm2 estimate_derivative(const SampledMap& u, std::size_t cell, const EstimateOptions& opts) {
  if (cell >= u.grid.size() || !u.grid.interior(cell)) {
    throw Error(ErrorCode::StencilOutOfDomain, "cell is not interior to the disc grid");
  }
  std::vector<double> buf;
  if (u.target.kind() == TargetSpace::Kind::PolygonalNorm) {
    const int m = opts.sampled_directions;
    std::vector<double> g(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) g[static_cast<std::size_t>(j)] = quotient(u, cell, SemiNorm2::direction(j, m), buf);
    return SemiNorm2::sampled_convexified(std::move(g));
  }
  // Least-squares fit of g_j^2 = v_j.Q v_j, then PSD projection.
  const int m = opts.quadratic_directions;
  Eigen::MatrixXd a(m, 3);
  Eigen::VectorXd rhs(m);
  for (int j = 0; j < m; ++j) {
    const Vec2 v = SemiNorm2::direction(j, m);
    a.row(j) << v.x() * v.x(), 2.0 * v.x() * v.y(), v.y() * v.y();
    const double q = quotient(u, cell, v, buf);
    rhs(j) = q * q;
  }
  const Eigen::Vector3d p = a.colPivHouseholderQr().solve(rhs);
  Mat2 q;
  q << p(0), p(1), p(1), p(2);
  Eigen::SelfAdjointEigenSolver<Mat2> es(q);
  const Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0);
  return SemiNorm2::quadratic(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
}

DerivativeField estimate_field(const SampledMap& u, const EstimateOptions& opts) {
  DerivativeField f{u.grid, std::vector<SemiNorm2>(u.grid.size()),
                    std::vector<std::uint8_t>(u.grid.size(), 0)};
  for (std::size_t k : u.grid.disc_cells()) {
    if (!u.grid.interior(k)) continue;
    f.seminorms[k] = estimate_derivative(u, k, opts);
    f.estimated[k] = 1;
  }
  for (std::size_t k : u.grid.disc_cells()) {
    if (f.estimated[k]) continue;
    const std::size_t src = nearest_cell(u.grid.square(), u.grid.center(k),
                                         [&](std::size_t c) { return f.estimated[c] != 0; });
    f.seminorms[k] = f.seminorms[src];
  }
  return f;
}

DerivativeField field_from_function(int n, const std::function<SemiNorm2(const Vec2&)>& fn) {
  DiscGrid grid(n);
  DerivativeField f{grid, std::vector<SemiNorm2>(grid.size()), std::vector<std::uint8_t>(grid.size(), 0)};
  for (std::size_t k : grid.disc_cells()) {
    f.seminorms[k] = fn(grid.center(k));
    f.estimated[k] = 1;
  }
  return f;
}

std::vector<double> cellwise(const DerivativeField& field, const CellIntegrand& integrand) {
  std::vector<double> out;
  out.reserve(field.grid.disc_cells().size());
  for (std::size_t k : field.grid.disc_cells()) out.push_back(integrand(field.at(k)));
  return out;
}

double integrate(const DerivativeField& field, const CellIntegrand& integrand,
                 std::span<const std::uint8_t> mask) {
  double sum = 0.0;
  for (std::size_t k : field.grid.disc_cells()) {
    if (!mask.empty() && !mask[k]) continue;
    sum += integrand(field.at(k));
  }
  return sum * field.grid.weight();
}

double energy(const DerivativeField& field) {
  return integrate(field, [](const SemiNorm2& s) { return energy_plus(s); });
}

double area_intrinsic(const DerivativeField& field) {
  return integrate(field, [](const SemiNorm2& s) { return jacobian_intrinsic(s); });
}

double area_hausdorff(const DerivativeField& field) {
  return integrate(field, [](const SemiNorm2& s) { return jacobian_hausdorff(s); });
}

double energy_plus_composed(const SemiNorm2& s, const Mat2& a) {
  if (s.is_quadratic()) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(a.transpose() * s.form() * a);
    return std::max(0.0, es.eigenvalues()(1));
  }
  const int m = s.directions();
  double best = 0.0;
  for (int j = 0; j < m; ++j) best = std::max(best, std::pow(s(a * SemiNorm2::direction(j, m)), 2));
  return best;
}

std::vector<double> composed_energy_density(const DerivativeField& field, const QCMap& phi) {
  std::vector<double> out(phi.grid.size(), 0.0);
  for (std::size_t k = 0; k < phi.grid.size(); ++k) {
    if (!phi.valid(k)) continue;
    const Vec2 z(phi.values[k].real(), phi.values[k].imag());
    if (z.norm() > 1.0 + 1e-9) {
      throw Error(ErrorCode::ImageOutsideDomain, "reparametrization leaves the unit disc");
    }
    out[k] = energy_plus_composed(field.lookup(z), phi.jacobians[k]);
  }
  return out;
}

double composed_energy(const DerivativeField& field, const QCMap& phi) {
  const auto density = composed_energy_density(field, phi);
  double sum = 0.0;
  for (double v : density) sum += v;
  const double h = phi.grid.spacing();
  return sum * h * h;
}

}  // namespace qcr
