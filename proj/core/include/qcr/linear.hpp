#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>

namespace qcr {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Complex (Wirtinger) form of a real-linear map of the plane:
/// A h = dz * h + dzbar * conj(h).
struct Wirtinger {
  cplx dz;
  cplx dzbar;
};

inline Wirtinger wirtinger_of(const Mat2& a) {
  const cplx fx(a(0, 0), a(1, 0));
  const cplx fy(a(0, 1), a(1, 1));
  const cplx i(0.0, 1.0);
  return {0.5 * (fx - i * fy), 0.5 * (fx + i * fy)};
}

inline Mat2 matrix_of(const Wirtinger& w) {
  const cplx fx = w.dz + w.dzbar;
  const cplx fy = cplx(0.0, 1.0) * (w.dz - w.dzbar);
  Mat2 a;
  a << fx.real(), fy.real(), fx.imag(), fy.imag();
  return a;
}

inline Mat2 rotation(double angle) {
  Mat2 r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

/// Beltrami coefficient of an orientation preserving linear map.
inline cplx beltrami_of_linear(const Mat2& a) {
  const Wirtinger w = wirtinger_of(a);
  return w.dzbar / w.dz;
}

/// ||A||^2 / det A for an orientation preserving linear map.
inline double dilatation(const Mat2& a) {
  Eigen::JacobiSVD<Mat2> svd(a);
  const double smax = svd.singularValues()(0);
  return smax * smax / a.determinant();
}

/// Symmetric square root of a symmetric positive semidefinite matrix.
inline Mat2 spd_sqrt(const Mat2& m) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(m);
  const Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace qcr
