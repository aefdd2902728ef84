#pragma once

#include "qcr/linear.hpp"

#include <span>
#include <vector>

namespace qcr {

inline constexpr double kDegenTol = 1e-10;
inline constexpr int kDefaultDirections = 64;
inline constexpr int kMinDirections = 8;

/// A semi-norm on the plane.
///
/// Two representations are kept. Quadratic forms, s(v)^2 = v.Qv, are exact for
/// inner-product targets and have closed-form answers for every operation.
/// Sampled semi-norms store gauge values s(theta_j) at m directions
/// theta_j = j*pi/m on the half circle; the unit ball is the centrally
/// symmetric polygon through the points u_j / s(theta_j). Evaluation between
/// samples uses that polygon's gauge.
class SemiNorm2 {
 public:
  enum class Kind { Quadratic, Sampled };

  SemiNorm2() : SemiNorm2(quadratic(Mat2::Zero())) {}

  /// Q is symmetrized; eigenvalues below -1e-12 * scale are rejected.
  static SemiNorm2 quadratic(const Mat2& q);
  /// Values must describe a convex unit ball (checked to 1e-9 relative).
  static SemiNorm2 sampled(std::vector<double> values);
  /// Replaces the values by the gauge of the convex hull of the sampled ball.
  static SemiNorm2 sampled_convexified(std::vector<double> values);

  /// Samples an arbitrary gauge function at m directions.
  template <class Gauge>
  static SemiNorm2 sample(Gauge&& gauge, int m = kDefaultDirections) {
    std::vector<double> v(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) v[static_cast<std::size_t>(j)] = gauge(direction(j, m));
    return sampled_convexified(std::move(v));
  }

  static Vec2 direction(int j, int m) {
    const double t = kPi * j / m;
    return {std::cos(t), std::sin(t)};
  }

  Kind kind() const noexcept { return kind_; }
  bool is_quadratic() const noexcept { return kind_ == Kind::Quadratic; }
  bool degenerate() const noexcept { return degenerate_; }

  const Mat2& form() const noexcept { return q_; }
  std::span<const double> values() const noexcept { return values_; }
  int directions() const noexcept { return static_cast<int>(values_.size()); }

  /// Facet normals n_j of the sampled ball: the facet between directions j and
  /// j+1 is {x : n_j.x = 1}. The gauge is max_j |n_j.v|.
  std::span<const Vec2> facet_normals() const noexcept { return normals_; }

  double operator()(const Vec2& v) const;

  /// v -> s(A v). Exact for Quadratic; Sampled is resampled at the same
  /// directions through the polygon gauge.
  SemiNorm2 composed(const Mat2& a) const;
  SemiNorm2 scaled(double c) const;
  /// v -> s(R_angle v).
  SemiNorm2 rotated(double angle) const { return composed(rotation(angle)); }

 private:
  SemiNorm2(Kind kind, Mat2 q, std::vector<double> values);

  Kind kind_;
  Mat2 q_ = Mat2::Zero();
  std::vector<double> values_;
  std::vector<Vec2> normals_;
  bool degenerate_ = false;
};

/// Centered ellipse {v : v.Mv <= 1}.
struct Ellipse2 {
  Mat2 m = Mat2::Identity();

  static Ellipse2 from_axes(double a, double b, double theta);

  double semi_major() const;
  double semi_minor() const;
  /// Major-axis angle in [0, pi).
  double angle() const;
  double area() const { return kPi / std::sqrt(m.determinant()); }
  double eccentricity_ratio() const { return semi_major() / semi_minor(); }
  /// Point on the boundary in direction u (|u| = 1).
  Vec2 boundary_point(const Vec2& u) const { return u / std::sqrt(u.dot(m * u)); }
};

double energy_plus(const SemiNorm2& s);
Ellipse2 john_ellipse(const SemiNorm2& s);
double jacobian_intrinsic(const SemiNorm2& s);
double jacobian_hausdorff(const SemiNorm2& s);
double isotropy_defect(const SemiNorm2& s);
SemiNorm2 regularize(const SemiNorm2& s, double delta);
cplx beltrami_of(const SemiNorm2& s);
/// Coefficient of the normalizer M^{1/2} taking the ellipse to the unit disc.
cplx beltrami_of(const Ellipse2& e);

/// Lebesgue area of {s <= 1}; infinite for degenerate semi-norms.
double unit_ball_area(const SemiNorm2& s);

namespace detail {
/// Maximal-area centered ellipse inside {x : |n_i.x| <= 1 for all i}.
/// Returns the ellipse matrix M.
Mat2 john_ellipse_of_polytope(std::span<const Vec2> normals);
}  // namespace detail

}  // namespace qcr
