#include "qcr/seminorm.hpp"

#include "qcr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qcr {

namespace {

// Normal n with n.u_a = s_a and n.u_b = s_b.
Vec2 chord_normal(const Vec2& ua, double sa, const Vec2& ub, double sb) {
  Mat2 a;
  a << ua.x(), ua.y(), ub.x(), ub.y();
  return a.inverse() * Vec2(sa, sb);
}

// Direction j extended periodically to the full circle: u_{j+m} = -u_j.
Vec2 dir_ext(int j, int m) {
  const int jj = ((j % (2 * m)) + 2 * m) % (2 * m);
  const Vec2 u = SemiNorm2::direction(jj % m, m);
  return jj >= m ? Vec2(-u) : u;
}

double val_ext(std::span<const double> v, int j) {
  const int m = static_cast<int>(v.size());
  return v[static_cast<std::size_t>(((j % m) + m) % m)];
}

// Largest amount by which s_j exceeds the chord of its neighbours.
double convexity_violation(std::span<const double> v, int j) {
  const int m = static_cast<int>(v.size());
  const Vec2 n = chord_normal(dir_ext(j - 1, m), val_ext(v, j - 1), dir_ext(j + 1, m),
                              val_ext(v, j + 1));
  return v[static_cast<std::size_t>(j)] - n.dot(dir_ext(j, m));
}

void check_values(const std::vector<double>& v) {
  if (v.size() < static_cast<std::size_t>(kMinDirections)) {
    throw Error(ErrorCode::InputError, "sampled semi-norm needs at least 8 directions");
  }
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) {
      throw Error(ErrorCode::InputError, "sampled semi-norm values must be finite and >= 0");
    }
  }
}

}  // namespace

SemiNorm2::SemiNorm2(Kind kind, Mat2 q, std::vector<double> values)
    : kind_(kind), q_(std::move(q)), values_(std::move(values)) {
  if (kind_ == Kind::Quadratic) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(q_);
    const double lmin = std::max(es.eigenvalues()(0), 0.0);
    const double lmax = std::max(es.eigenvalues()(1), 0.0);
    degenerate_ = lmax == 0.0 || std::sqrt(lmin) < kDegenTol * std::sqrt(lmax);
    return;
  }
  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  degenerate_ = *hi == 0.0 || *lo < kDegenTol * *hi;
  const int m = directions();
  normals_.resize(values_.size());
  for (int j = 0; j < m; ++j) {
    normals_[static_cast<std::size_t>(j)] =
        chord_normal(dir_ext(j, m), val_ext(values_, j), dir_ext(j + 1, m), val_ext(values_, j + 1));
  }
}

SemiNorm2 SemiNorm2::quadratic(const Mat2& q) {
  if (!q.allFinite()) throw Error(ErrorCode::InputError, "quadratic form must be finite");
  const Mat2 sym = 0.5 * (q + q.transpose());
  Eigen::SelfAdjointEigenSolver<Mat2> es(sym);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues()(0) < -1e-12 * scale) {
    throw Error(ErrorCode::InputError, "quadratic form is not positive semidefinite");
  }
  if (es.eigenvalues()(0) >= 0.0) return SemiNorm2(Kind::Quadratic, sym, {});
  // Clamp rounding-level negative eigenvalues.
  const Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0);
  const Mat2 psd = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  return SemiNorm2(Kind::Quadratic, 0.5 * (psd + psd.transpose()), {});
}

SemiNorm2 SemiNorm2::sampled(std::vector<double> values) {
  check_values(values);
  const double vmax = *std::max_element(values.begin(), values.end());
  for (int j = 0; j < static_cast<int>(values.size()); ++j) {
    if (convexity_violation(values, j) > 1e-9 * std::max(vmax, 1e-300)) {
      throw Error(ErrorCode::InputError, "sampled semi-norm is not convex");
    }
  }
  return SemiNorm2(Kind::Sampled, Mat2::Zero(), std::move(values));
}

SemiNorm2 SemiNorm2::sampled_convexified(std::vector<double> values) {
  check_values(values);
  const int m = static_cast<int>(values.size());
  const double vmax = *std::max_element(values.begin(), values.end());
  const double tol = 1e-14 * vmax;
  // Pushing a concave vertex out onto its neighbours' chord only lowers values;
  // the fixed point is the gauge of the convex hull.
  for (int sweep = 0; sweep < 100 * m; ++sweep) {
    bool changed = false;
    for (int j = 0; j < m; ++j) {
      const double excess = convexity_violation(values, j);
      if (excess > tol) {
        values[static_cast<std::size_t>(j)] =
            std::max(0.0, values[static_cast<std::size_t>(j)] - excess);
        changed = true;
      }
    }
    if (!changed) break;
  }
  return SemiNorm2(Kind::Sampled, Mat2::Zero(), std::move(values));
}

double SemiNorm2::operator()(const Vec2& v) const {
  if (is_quadratic()) return std::sqrt(std::max(0.0, v.dot(q_ * v)));
  double g = 0.0;
  for (const Vec2& n : normals_) g = std::max(g, std::abs(n.dot(v)));
  return g;
}

SemiNorm2 SemiNorm2::composed(const Mat2& a) const {
  if (is_quadratic()) return quadratic(a.transpose() * q_ * a);
  const int m = directions();
  std::vector<double> v(values_.size());
  for (int j = 0; j < m; ++j) v[static_cast<std::size_t>(j)] = (*this)(a * direction(j, m));
  return sampled_convexified(std::move(v));
}

SemiNorm2 SemiNorm2::scaled(double c) const {
  if (is_quadratic()) return quadratic(c * c * q_);
  std::vector<double> v(values_);
  for (double& x : v) x *= std::abs(c);
  return SemiNorm2(Kind::Sampled, Mat2::Zero(), std::move(v));
}

Ellipse2 Ellipse2::from_axes(double a, double b, double theta) {
  const Mat2 r = rotation(theta);
  Ellipse2 e;
  e.m = r * Eigen::Vector2d(1.0 / (a * a), 1.0 / (b * b)).asDiagonal() * r.transpose();
  return e;
}

double Ellipse2::semi_major() const {
  Eigen::SelfAdjointEigenSolver<Mat2> es(m);
  return 1.0 / std::sqrt(es.eigenvalues()(0));
}

double Ellipse2::semi_minor() const {
  Eigen::SelfAdjointEigenSolver<Mat2> es(m);
  return 1.0 / std::sqrt(es.eigenvalues()(1));
}

double Ellipse2::angle() const {
  Eigen::SelfAdjointEigenSolver<Mat2> es(m);
  const Vec2 v = es.eigenvectors().col(0);
  double t = std::atan2(v.y(), v.x());
  if (t < 0.0) t += kPi;
  if (t >= kPi) t -= kPi;
  return t;
}

double energy_plus(const SemiNorm2& s) {
  if (s.is_quadratic()) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(s.form());
    return std::max(0.0, es.eigenvalues()(1));
  }
  double best = 0.0;
  for (double v : s.values()) best = std::max(best, v * v);
  return best;
}

Ellipse2 john_ellipse(const SemiNorm2& s) {
  if (s.degenerate()) {
    throw Error(ErrorCode::DegenerateSemiNorm, "John ellipse of a degenerate semi-norm");
  }
  Ellipse2 e;
  e.m = s.is_quadratic() ? s.form() : detail::john_ellipse_of_polytope(s.facet_normals());
  return e;
}

double jacobian_intrinsic(const SemiNorm2& s) {
  if (s.degenerate()) return 0.0;
  if (s.is_quadratic()) return std::sqrt(std::max(0.0, s.form().determinant()));
  return kPi / john_ellipse(s).area();
}

double unit_ball_area(const SemiNorm2& s) {
  if (s.degenerate()) return std::numeric_limits<double>::infinity();
  if (s.is_quadratic()) return kPi / std::sqrt(s.form().determinant());
  const auto v = s.values();
  const int m = s.directions();
  const double wedge = std::sin(kPi / m);
  double sum = 0.0;
  for (int j = 0; j < m; ++j) sum += wedge / (v[static_cast<std::size_t>(j)] * val_ext(v, j + 1));
  // m triangles per half, two halves, each triangle of area wedge/(2 s_j s_{j+1}).
  return sum;
}

double jacobian_hausdorff(const SemiNorm2& s) {
  if (s.degenerate()) return 0.0;
  if (s.is_quadratic()) return std::sqrt(std::max(0.0, s.form().determinant()));
  return kPi / unit_ball_area(s);
}

double isotropy_defect(const SemiNorm2& s) { return energy_plus(s) - jacobian_intrinsic(s); }

SemiNorm2 regularize(const SemiNorm2& s, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InputError, "regularization needs delta > 0");
  if (s.is_quadratic()) return SemiNorm2::quadratic(s.form() + delta * delta * Mat2::Identity());
  std::vector<double> v(s.values().begin(), s.values().end());
  for (double& x : v) x = std::sqrt(x * x + delta * delta);
  return SemiNorm2::sampled_convexified(std::move(v));
}

cplx beltrami_of(const SemiNorm2& s) { return beltrami_of(john_ellipse(s)); }

cplx beltrami_of(const Ellipse2& e) {
  // T = M^{1/2} maps the John ellipse {v.Mv <= 1} onto the unit disc and is
  // orientation preserving; any other such map is a similarity times T and
  // has the same coefficient. For T = [[p, q], [q, r]]:
  // mu = (p - r + 2iq) / (p + r).
  const Mat2 t = spd_sqrt(e.m);
  return cplx(t(0, 0) - t(1, 1), 2.0 * t(0, 1)) / (t(0, 0) + t(1, 1));
}

}  // namespace qcr
