#pragma once

// Independent reference computations used to freeze expected values in the
// tests. Nothing here calls into the code paths it is used to check.

#include "qcr/linear.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace qcr::oracle {

struct Axes {
  double a = 0.0;
  double b = 0.0;
  double theta = 0.0;
};

/// Vertices of the centrally symmetric polygon through u_j / s_j, j < 2m.
inline std::vector<Vec2> ball_vertices(const std::vector<double>& s) {
  const int m = static_cast<int>(s.size());
  std::vector<Vec2> p;
  for (int j = 0; j < 2 * m; ++j) {
    const double t = kPi * j / m;
    p.emplace_back(Vec2(std::cos(t), std::sin(t)) / s[static_cast<std::size_t>(j % m)]);
  }
  return p;
}

/// Maximizes the area a*b of an ellipse with semi-axes (a, b) at angle theta
/// inside the polygon, by a dense theta sweep plus golden-section refinement.
/// For fixed theta the constraints are linear in (a^2, b^2).
inline Axes john_axes_bruteforce(const std::vector<double>& s) {
  const auto v = ball_vertices(s);
  const std::size_t nv = v.size();
  // Edge i: {x : n_i.x <= c_i}, computed from vertex cross products.
  std::vector<Vec2> nrm;
  std::vector<double> off;
  for (std::size_t i = 0; i < nv; ++i) {
    const Vec2 e = v[(i + 1) % nv] - v[i];
    Vec2 n(e.y(), -e.x());
    double c = n.dot(v[i]);
    if (c < 0) { n = -n; c = -c; }
    nrm.push_back(n / c);
    off.push_back(1.0);
  }
  auto best_xy = [&](double theta, double& xo, double& yo) {
    const Vec2 e1(std::cos(theta), std::sin(theta));
    const Vec2 e2(-std::sin(theta), std::cos(theta));
    std::vector<double> cc, dd;
    for (const Vec2& n : nrm) {
      cc.push_back(std::pow(n.dot(e1), 2));
      dd.push_back(std::pow(n.dot(e2), 2));
    }
    double xmax = 1e300;
    for (std::size_t i = 0; i < cc.size(); ++i)
      if (cc[i] > 0) xmax = std::min(xmax, 1.0 / cc[i]);
    auto g = [&](double x) {
      double y = 1e300;
      for (std::size_t i = 0; i < cc.size(); ++i)
        if (dd[i] > 0) y = std::min(y, (1.0 - cc[i] * x) / dd[i]);
      return std::make_pair(x * y, y);
    };
    double lo = 0.0, hi = xmax;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200; ++it) {
      const double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      if (g(x1).first < g(x2).first) lo = x1; else hi = x2;
    }
    xo = 0.5 * (lo + hi);
    yo = g(xo).second;
    return xo * yo;
  };
  const int nt = 720;
  double best = -1.0, bt = 0.0;
  for (int k = 0; k < nt; ++k) {
    double x, y;
    const double th = kPi * k / nt;
    const double f = best_xy(th, x, y);
    if (f > best) { best = f; bt = th; }
  }
  double lo = bt - kPi / nt, hi = bt + kPi / nt;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x, y;
  for (int it = 0; it < 100; ++it) {
    const double t1 = hi - gr * (hi - lo), t2 = lo + gr * (hi - lo);
    if (best_xy(t1, x, y) < best_xy(t2, x, y)) lo = t1; else hi = t2;
  }
  const double th = 0.5 * (lo + hi);
  best_xy(th, x, y);
  Axes r{std::sqrt(x), std::sqrt(y), th};
  if (r.a < r.b) { std::swap(r.a, r.b); r.theta += kPi / 2; }
  r.theta = std::fmod(r.theta + 2 * kPi, kPi);
  return r;
}

/// Shoelace area of the sampled unit ball.
inline double ball_area_shoelace(const std::vector<double>& s) {
  const auto v = ball_vertices(s);
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % v.size()];
    a += p.x() * q.y() - p.y() * q.x();
  }
  return 0.5 * a;
}

/// max over a dense sweep of unit vectors of g(v)^2.
inline double max_sq_sweep(const std::function<double(const Vec2&)>& g, int n = 200000) {
  double best = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = kPi * k / n;
    best = std::max(best, std::pow(g(Vec2(std::cos(t), std::sin(t))), 2));
  }
  return best;
}

/// Wirtinger derivatives of a linear map written as x -> A x, by the
/// textbook formulas f_z = (f_x - i f_y)/2, f_zbar = (f_x + i f_y)/2.
inline std::pair<std::complex<double>, std::complex<double>> wirtinger_linear(const Mat2& a) {
  const std::complex<double> fx(a(0, 0), a(1, 0)), fy(a(0, 1), a(1, 1)), i(0, 1);
  return {0.5 * (fx - i * fy), 0.5 * (fx + i * fy)};
}

}  // namespace qcr::oracle
