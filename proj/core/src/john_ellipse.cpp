#include "qcr/errors.hpp"
#include "qcr/seminorm.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qcr::detail {

namespace {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

bool positive_definite(const Vec3& p) { return p(0) > 0.0 && p(0) * p(2) - p(1) * p(1) > 0.0; }

// P = [[p0, p1], [p1, p2]] is the inverse ellipse matrix; the ellipse
// {x : x.P^{-1}x <= 1} has support function sqrt(n.Pn), so containment in the
// polytope is the linear constraint a_i.p <= 1 with a_i = (n1^2, 2 n1 n2, n2^2).
// Maximizing the area maximizes log det P. Primal-dual interior point method
// on all constraints with slacks s_i = 1 - a_i.p and multipliers l_i.
// Returns false if the iteration cap is hit; p holds the last iterate.
bool solve_ipm(const std::vector<Vec3>& rows, Vec3& p) {
  const std::size_t m = rows.size();
  double trace_max = 0.0;
  for (const Vec3& a : rows) trace_max = std::max(trace_max, a(0) + a(2));
  p = Vec3(0.5 / trace_max, 0.0, 0.5 / trace_max);
  std::vector<double> s(m), l(m), ds(m), dl(m);
  for (std::size_t i = 0; i < m; ++i) {
    s[i] = 1.0 - rows[i].dot(p);
    l[i] = 1.0 / s[i];
  }

  const Mat3 hd = (Mat3() << 0, 0, 1, 0, -2, 0, 1, 0, 0).finished();
  const double sigma = 0.1;
  for (int it = 0; it < 200; ++it) {
    double gap = 0.0;
    for (std::size_t i = 0; i < m; ++i) gap += s[i] * l[i];
    const double mu = gap / static_cast<double>(m);

    const double d = p(0) * p(2) - p(1) * p(1);
    const Vec3 dd(p(2), -2.0 * p(1), p(0));
    // Gradient and Hessian of -log det P.
    Vec3 rd = -dd / d;
    Mat3 h = -(hd / d - dd * dd.transpose() / (d * d));
    double rp_max = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      rd += l[i] * rows[i];
      rp_max = std::max(rp_max, std::abs(rows[i].dot(p) + s[i] - 1.0));
    }
    if (gap < 1e-13 && rd.lpNorm<Eigen::Infinity>() < 1e-9 && rp_max < 1e-12) return true;

    // Newton step on the perturbed KKT system, reduced to dp.
    Vec3 rhs = -rd;
    for (std::size_t i = 0; i < m; ++i) {
      const double rp = rows[i].dot(p) + s[i] - 1.0;
      const double rc = s[i] * l[i] - sigma * mu;
      h += (l[i] / s[i]) * rows[i] * rows[i].transpose();
      rhs -= rows[i] * ((-rc + l[i] * rp) / s[i]);
    }
    const Vec3 dp = h.ldlt().solve(rhs);
    double alpha = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double rp = rows[i].dot(p) + s[i] - 1.0;
      const double rc = s[i] * l[i] - sigma * mu;
      ds[i] = -rp - rows[i].dot(dp);
      dl[i] = (-rc - l[i] * ds[i]) / s[i];
      if (ds[i] < 0.0) alpha = std::min(alpha, -0.99 * s[i] / ds[i]);
      if (dl[i] < 0.0) alpha = std::min(alpha, -0.99 * l[i] / dl[i]);
    }
    while (!positive_definite(p + alpha * dp) && alpha > 1e-14) alpha *= 0.5;
    p += alpha * dp;
    for (std::size_t i = 0; i < m; ++i) {
      s[i] += alpha * ds[i];
      l[i] += alpha * dl[i];
    }
  }
  return false;
}

}  // namespace

Mat2 john_ellipse_of_polytope(std::span<const Vec2> normals) {
  if (normals.empty()) throw Error(ErrorCode::DegenerateSemiNorm, "polytope is unbounded");
  // The problem is affine equivariant: with x = T y the normals become T^t n
  // and M_x = T^{-t} M_y T^{-1}. Whitening the normals keeps the interior
  // point iteration well conditioned for elongated bodies.
  Mat2 second = Mat2::Zero();
  for (const Vec2& n : normals) second += n * n.transpose();
  if (!(second.determinant() > 0.0) || !second.allFinite()) {
    throw Error(ErrorCode::DegenerateSemiNorm, "polytope is unbounded or empty");
  }
  Mat2 t = spd_sqrt((second / static_cast<double>(normals.size())).inverse());

  for (int attempt = 0; attempt < 4; ++attempt) {
    std::vector<Vec2> tn;
    tn.reserve(normals.size());
    double nmax = 0.0;
    for (const Vec2& n : normals) {
      tn.push_back(t.transpose() * n);
      nmax = std::max(nmax, tn.back().norm());
    }
    std::vector<Vec3> rows;
    rows.reserve(tn.size());
    for (const Vec2& n0 : tn) {
      const Vec2 n = n0 / nmax;
      const Vec3 row(n.x() * n.x(), 2.0 * n.x() * n.y(), n.y() * n.y());
      // Collinear samples produce repeated facets.
      const bool repeated = std::any_of(rows.begin(), rows.end(),
                                        [&](const Vec3& r) { return (r - row).lpNorm<Eigen::Infinity>() < 1e-13; });
      if (!repeated) rows.push_back(row);
    }

    Vec3 p;
    const bool converged = solve_ipm(rows, p);
    // Scale until the ellipse touches the polytope.
    double gmax = 0.0;
    for (const Vec3& a : rows) gmax = std::max(gmax, a.dot(p));
    p /= gmax;
    Mat2 pm;
    pm << p(0), p(1), p(1), p(2);
    // P scales like 1/nmax^2 under the normalization of the normals.
    const Mat2 my = pm.inverse() * (nmax * nmax);
    const Mat2 tinv = t.inverse();
    if (converged) {
      const Mat2 mx = tinv.transpose() * my * tinv;
      return 0.5 * (mx + mx.transpose());
    }
    // Re-whiten with the current iterate: y = M_y^{-1/2} z.
    t = t * spd_sqrt(my.inverse());
  }
  throw Error(ErrorCode::NoConvergence, "John ellipse iteration did not converge");
}

}  // namespace qcr::detail
