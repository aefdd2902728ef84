#include "qcr/beltrami.hpp"

#include "qcr/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qcr {

double ComplexField::sup_norm() const {
  double m = 0.0;
  for (const cplx& v : values) m = std::max(m, std::abs(v));
  return m;
}

double ComplexField::support_radius() const {
  double r = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] != cplx(0.0)) r = std::max(r, grid.node(k).norm());
  }
  return r;
}

namespace {

// Derivative along one axis of a line of n samples with stride.
cplx diff(const cplx* f, int i, int n, std::size_t stride, double h) {
  auto at = [&](int j) { return f[static_cast<std::size_t>(j) * stride]; };
  if (i == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  if (i == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
  return (at(i + 1) - at(i - 1)) / (2.0 * h);
}

}  // namespace

std::pair<ComplexField, ComplexField> wirtinger(const ComplexField& f) {
  const SquareGrid& g = f.grid;
  if (g.n < 3) throw Error(ErrorCode::GridTooSmall, "Wirtinger derivatives need at least 3 nodes per axis");
  const double h = g.spacing();
  const auto n = static_cast<std::size_t>(g.n);
  auto fz = ComplexField::zeros(g);
  auto fzbar = ComplexField::zeros(g);
  const cplx i(0.0, 1.0);
  for (int r = 0; r < g.n; ++r) {
    for (int c = 0; c < g.n; ++c) {
      const std::size_t k = g.index(c, r);
      const cplx fx = diff(f.values.data() + g.index(0, r), c, g.n, 1, h);
      const cplx fy = diff(f.values.data() + g.index(c, 0), r, g.n, n, h);
      fz[k] = 0.5 * (fx - i * fy);
      fzbar[k] = 0.5 * (fx + i * fy);
    }
  }
  return {std::move(fz), std::move(fzbar)};
}

ComplexField beltrami_coefficient(const ComplexField& fz, const ComplexField& fzbar) {
  auto mu = ComplexField::zeros(fz.grid);
  for (std::size_t k = 0; k < mu.values.size(); ++k) {
    if (!(std::abs(fz[k]) > std::abs(fzbar[k]))) {
      throw Error(ErrorCode::OrientationViolation, "map is not orientation preserving at a node");
    }
    mu[k] = fzbar[k] / fz[k];
  }
  return mu;
}

ComplexField beltrami_coefficient(const ComplexField& f) {
  const auto [fz, fzbar] = wirtinger(f);
  return beltrami_coefficient(fz, fzbar);
}

DistortionForms distortion_forms(const Mat2& df, double det_floor) {
  const double det = df.determinant();
  if (!(det > det_floor)) throw Error(ErrorCode::OrientationViolation, "differential is not orientation preserving");
  Eigen::JacobiSVD<Mat2> svd(df);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(1);
  const double mu = std::abs(beltrami_of_linear(df));
  return {smax * smax / det, smax / smin, (1.0 + mu) / (1.0 - mu)};
}

double distortion(const Mat2& df, double det_floor) { return distortion_forms(df, det_floor).norm_ratio; }

double distortion(const QCMap& f, std::size_t node) {
  if (node >= f.grid.size() || !f.valid(node)) throw Error(ErrorCode::InputError, "node is not sampled");
  return distortion(f.jacobians[node]);
}

cplx compose_coefficient(cplx mu_f, cplx mu_g, cplx f_z) {
  const double a = std::abs(f_z);
  if (a == 0.0) throw Error(ErrorCode::DegenerateDerivative, "f_z vanishes");
  const cplx phase = f_z / a;
  return (mu_g - mu_f) / (1.0 - mu_g * std::conj(mu_f)) * phase * phase;
}

ComplexField mollify(const ComplexField& mu, double eta) {
  if (!(eta > 0.0)) throw Error(ErrorCode::InputError, "mollifier radius must be positive");
  const double support = mu.support_radius();
  if (support == 0.0) return mu;
  if (support + eta >= 1.0) {
    throw Error(ErrorCode::SupportTooClose, "mollified support would reach the unit circle");
  }
  const SquareGrid& g = mu.grid;
  const double h = g.spacing();
  const int r = static_cast<int>(std::ceil(eta / h));
  struct Tap {
    int di, dj;
    double w;
  };
  std::vector<Tap> taps;
  double mass = 0.0;
  for (int dj = -r; dj <= r; ++dj) {
    for (int di = -r; di <= r; ++di) {
      const double t = h * h * (di * di + dj * dj) / (eta * eta);
      if (t >= 1.0) continue;
      const double w = std::exp(-1.0 / (1.0 - t));
      taps.push_back({di, dj, w});
      mass += w;
    }
  }
  if (taps.size() == 1) return mu;
  for (Tap& t : taps) t.w /= mass;

  auto out = ComplexField::zeros(g);
  const double reach = support + eta + h;
  for (int j = 0; j < g.n; ++j) {
    for (int i = 0; i < g.n; ++i) {
      if (g.node(i, j).norm() > reach) continue;
      cplx s = 0.0;
      for (const Tap& t : taps) {
        const int a = i + t.di, b = j + t.dj;
        if (a < 0 || b < 0 || a >= g.n || b >= g.n) continue;
        s += t.w * mu[g.index(a, b)];
      }
      out[g.index(i, j)] = s;
    }
  }
  return out;
}

}  // namespace qcr
