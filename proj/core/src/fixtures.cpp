#include "qcr/fixtures.hpp"

#include "qcr/errors.hpp"

#include <cmath>
#include <random>

namespace qcr::fixtures {

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

SampledMap identity(int n) {
  return SampledMap::from_function(n, TargetSpace::euclidean(2), [](const Vec2& z) { return vec({z.x(), z.y()}); });
}

SampledMap stretch(int n) {
  return SampledMap::from_function(n, TargetSpace::euclidean(2),
                                   [](const Vec2& z) { return vec({2.0 * z.x(), z.y()}); });
}

SampledMap linf_identity(int n, int directions) {
  const SemiNorm2 linf =
      SemiNorm2::sample([](const Vec2& v) { return std::max(std::abs(v.x()), std::abs(v.y())); }, directions);
  return SampledMap::from_function(n, TargetSpace::polygonal_norm(linf),
                                   [](const Vec2& z) { return vec({z.x(), z.y()}); });
}

SampledMap random_diffeo(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  // z + sum_k a_k sin(w_k.z + p_k) d_k with sum_k a_k |w_k| = 1/2.
  struct Wave {
    Vec2 w, d;
    double a, p;
  };
  std::vector<Wave> waves(3);
  double total = 0.0;
  for (Wave& wv : waves) {
    const double t = uni(0, 2 * kPi), s = uni(0, 2 * kPi);
    wv.w = uni(0.5, 3.0) * Vec2(std::cos(t), std::sin(t));
    wv.d = Vec2(std::cos(s), std::sin(s));
    wv.a = uni(0.2, 1.0);
    wv.p = uni(0, 2 * kPi);
    total += wv.a * wv.w.norm();
  }
  for (Wave& wv : waves) wv.a *= 0.5 / total;
  Mat2 a;
  do {
    a << uni(-2, 2), uni(-2, 2), uni(-2, 2), uni(-2, 2);
    if (a.determinant() < 0) a.col(0) *= -1.0;
  } while (a.determinant() < 0.25 || dilatation(a) > 6.0);
  return SampledMap::from_function(n, TargetSpace::euclidean(2), [=](const Vec2& z) {
    Vec2 p = z;
    for (const Wave& wv : waves) p += wv.a * std::sin(wv.w.dot(z) + wv.p) * wv.d;
    const Vec2 q = a * p;
    return vec({q.x(), q.y()});
  });
}

SampledMap saddle_graph(int n) {
  return SampledMap::from_function(n, TargetSpace::euclidean(3), [](const Vec2& z) {
    return vec({z.x(), z.y(), 0.5 * (z.x() * z.x() - z.y() * z.y())});
  });
}

ComplexField bump_coefficient(const SquareGrid& grid, double k, double radius) {
  return ComplexField::from_function(grid, [=](cplx z) {
    const double r = std::abs(z) / radius;
    return cplx(r < 1.0 ? k * std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0);
  });
}

std::vector<std::string> map_names() { return {"identity", "stretch", "linf-identity", "diffeo", "graph"}; }

SampledMap map_by_name(const std::string& name, int n, std::uint64_t seed) {
  if (name == "identity") return identity(n);
  if (name == "stretch") return stretch(n);
  if (name == "linf-identity") return linf_identity(n);
  if (name == "diffeo") return random_diffeo(n, seed);
  if (name == "graph") return saddle_graph(n);
  throw Error(ErrorCode::InputError, "unknown fixture '" + name + "'");
}

}  // namespace qcr::fixtures
