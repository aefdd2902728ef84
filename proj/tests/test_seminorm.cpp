#include "generators.hpp"
#include "oracles.hpp"

#include "qcr/errors.hpp"
#include "qcr/seminorm.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace qcr;

namespace {

std::vector<double> vals(const SemiNorm2& s) { return {s.values().begin(), s.values().end()}; }

}  // namespace

TEST_CASE("energy_plus examples") {
  CHECK(energy_plus(SemiNorm2::quadratic(Eigen::Vector2d(4, 1).asDiagonal())) == doctest::Approx(4.0));
  CHECK(energy_plus(SemiNorm2::quadratic(Mat2::Zero())) == 0.0);
  CHECK(energy_plus(SemiNorm2::sampled(std::vector<double>(16, 0.0))) == 0.0);

  // Dense sweep of (|cos t| + |sin t|)^2.
  const double expected = oracle::max_sq_sweep([](const Vec2& v) { return std::abs(v.x()) + std::abs(v.y()); });
  CHECK(expected == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(energy_plus(gen::l1_norm()) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("john_ellipse examples") {
  const auto q = SemiNorm2::quadratic(Eigen::Vector2d(4, 1).asDiagonal());
  const Ellipse2 e = john_ellipse(q);
  CHECK(e.semi_major() == doctest::Approx(1.0));
  CHECK(e.semi_minor() == doctest::Approx(0.5));
  CHECK(e.angle() == doctest::Approx(kPi / 2));

  // Frozen against oracle::john_axes_bruteforce: the square gives the unit
  // disc, the diamond the disc of radius 1/sqrt(2).
  const auto linf = gen::linf_norm();
  const auto ref_inf = oracle::john_axes_bruteforce(vals(linf));
  CHECK(ref_inf.a == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(ref_inf.b == doctest::Approx(1.0).epsilon(1e-6));
  const Ellipse2 einf = john_ellipse(linf);
  CHECK(einf.semi_major() == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(einf.semi_minor() == doctest::Approx(1.0).epsilon(1e-7));

  const auto l1 = gen::l1_norm();
  const auto ref_1 = oracle::john_axes_bruteforce(vals(l1));
  CHECK(ref_1.a == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
  const Ellipse2 e1 = john_ellipse(l1);
  CHECK(e1.semi_major() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-7));
  CHECK(e1.semi_minor() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-7));

  CHECK_THROWS_AS(john_ellipse(SemiNorm2::quadratic(Eigen::Vector2d(1, 0).asDiagonal())), Error);
}

TEST_CASE("john_ellipse agrees with the brute-force axis search on random norms") {
  gen::Rng rng(7);
  for (int trial = 0; trial < 12; ++trial) {
    const SemiNorm2 s = gen::random_sampled(rng);
    const auto ref = oracle::john_axes_bruteforce(vals(s));
    const Ellipse2 e = john_ellipse(s);
    CHECK(e.area() == doctest::Approx(kPi * ref.a * ref.b).epsilon(1e-6));
    CHECK(e.area() >= kPi * ref.a * ref.b * (1 - 1e-9));
  }
}

TEST_CASE("jacobians") {
  const auto q = SemiNorm2::quadratic(Eigen::Vector2d(4, 1).asDiagonal());
  CHECK(jacobian_intrinsic(q) == doctest::Approx(2.0));
  CHECK(jacobian_hausdorff(q) == doctest::Approx(2.0));
  CHECK(jacobian_intrinsic(SemiNorm2::quadratic(Eigen::Vector2d(3, 0).asDiagonal())) == 0.0);
  CHECK(jacobian_hausdorff(SemiNorm2::quadratic(Mat2::Zero())) == 0.0);

  const auto linf = gen::linf_norm();
  const auto l1 = gen::l1_norm();
  CHECK(oracle::ball_area_shoelace(vals(linf)) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(oracle::ball_area_shoelace(vals(l1)) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(jacobian_intrinsic(linf) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(jacobian_hausdorff(linf) == doctest::Approx(kPi / 4).epsilon(1e-12));
  CHECK(jacobian_hausdorff(l1) == doctest::Approx(kPi / 2).epsilon(1e-12));

  // Degenerate sampled semi-norm |cos t|.
  const auto rank1 = SemiNorm2::sample([](const Vec2& v) { return std::abs(v.x()); });
  CHECK(rank1.degenerate());
  CHECK(jacobian_intrinsic(rank1) == 0.0);
  CHECK(jacobian_hausdorff(rank1) == 0.0);
  CHECK(energy_plus(rank1) == doctest::Approx(1.0));
}

TEST_CASE("isotropy_defect") {
  CHECK(isotropy_defect(SemiNorm2::quadratic(3.0 * Mat2::Identity())) == doctest::Approx(0.0));
  CHECK(isotropy_defect(SemiNorm2::quadratic(Eigen::Vector2d(4, 1).asDiagonal())) == doctest::Approx(2.0));
  CHECK(std::abs(isotropy_defect(gen::linf_norm())) < 1e-7);
  CHECK(std::abs(isotropy_defect(gen::l1_norm())) < 1e-7);
}

TEST_CASE("regularize") {
  const auto z = regularize(SemiNorm2::quadratic(Mat2::Zero()), 1.0);
  CHECK(z.form().isApprox(Mat2::Identity()));
  const auto r = regularize(SemiNorm2::quadratic(Eigen::Vector2d(4, 1).asDiagonal()), 1.0);
  CHECK(r.form().isApprox(Mat2(Eigen::Vector2d(5, 2).asDiagonal())));
  CHECK_FALSE(regularize(SemiNorm2::sampled(std::vector<double>(16, 0.0)), 0.3).degenerate());

  gen::Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const double delta = gen::uniform(rng, 0.01, 2.0);
    const SemiNorm2 q = SemiNorm2::quadratic(gen::random_psd(rng));
    CHECK(energy_plus(regularize(q, delta)) == doctest::Approx(energy_plus(q) + delta * delta));
    const SemiNorm2 s = gen::random_sampled(rng);
    CHECK(energy_plus(regularize(s, delta)) == doctest::Approx(energy_plus(s) + delta * delta));
  }
  CHECK_THROWS_AS(regularize(SemiNorm2(), 0.0), Error);
}

TEST_CASE("beltrami_of") {
  CHECK(std::abs(beltrami_of(SemiNorm2::quadratic(2.0 * Mat2::Identity()))) < 1e-15);
  CHECK(std::abs(beltrami_of(gen::linf_norm())) < 1e-7);

  // T = Q^{1/2} = diag(2, 1) maps the John ellipse onto the unit disc.
  const auto q = SemiNorm2::quadratic(Eigen::Vector2d(4, 1).asDiagonal());
  const auto [tz, tzb] = oracle::wirtinger_linear(Eigen::Vector2d(2, 1).asDiagonal());
  const cplx expected = tzb / tz;
  CHECK(std::abs(expected - cplx(1.0 / 3.0, 0.0)) < 1e-15);
  CHECK(std::abs(beltrami_of(q) - expected) < 1e-12);

  // Rotating s by alpha (s o R_alpha) rotates the ellipse by -alpha; the
  // normalizing map becomes T R_alpha.
  gen::Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    const double alpha = gen::uniform(rng, -kPi, kPi);
    const Mat2 qf = gen::random_spd(rng);
    const Mat2 t = spd_sqrt(qf) * rotation(alpha);
    const auto [rz, rzb] = oracle::wirtinger_linear(t);
    const auto rotated = SemiNorm2::quadratic(qf).rotated(alpha);
    CHECK(std::abs(beltrami_of(rotated) - rzb / rz) < 1e-10);
    CHECK(std::abs(beltrami_of(rotated) - beltrami_of(SemiNorm2::quadratic(qf)) *
                                              std::polar(1.0, -2.0 * alpha)) < 1e-10);
  }
  CHECK_THROWS_AS(beltrami_of(SemiNorm2()), Error);
}

TEST_CASE("beltrami_of modulus matches the ellipse axes") {
  gen::Rng rng(5);
  for (int i = 0; i < 30; ++i) {
    const SemiNorm2 s = gen::random_sampled(rng);
    const Ellipse2 e = john_ellipse(s);
    const double a = e.semi_major(), b = e.semi_minor();
    CHECK(std::abs(beltrami_of(s)) == doctest::Approx((a - b) / (a + b)).epsilon(1e-9));
  }
}

TEST_CASE("invariants on random semi-norms") {
  gen::Rng rng(2024);
  for (int i = 0; i < 200; ++i) {
    const SemiNorm2 q = SemiNorm2::quadratic(gen::random_psd(rng));
    CHECK(jacobian_intrinsic(q) <= energy_plus(q) + 1e-9);
    CHECK(jacobian_hausdorff(q) == doctest::Approx(jacobian_intrinsic(q)));

    const SemiNorm2 s = gen::random_sampled(rng);
    CHECK(jacobian_intrinsic(s) <= energy_plus(s) + 1e-3);
    CHECK(jacobian_hausdorff(s) <= jacobian_intrinsic(s) * (1 + 1e-9));
    CHECK(jacobian_intrinsic(s) <= 4.0 / kPi * jacobian_hausdorff(s) * (1 + 1e-9));

    // John containment E in {s <= 1} in sqrt(2) E.
    const Ellipse2 e = john_ellipse(s);
    const int m = s.directions();
    for (int j = 0; j < m; ++j) {
      const Vec2 u = SemiNorm2::direction(j, m);
      CHECK(s(e.boundary_point(u)) <= 1.0 + 1e-6);
      const Vec2 p = u / s.values()[static_cast<std::size_t>(j)];
      CHECK(p.dot(e.m * p) <= 2.0 * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("quadratic and sampled pipelines agree") {
  // The sampled ball is the polygon inscribed at uniform angles. After
  // mapping the John ellipse to a disc, neighbouring vertices are at most
  // ratio*pi/m apart, so the radius deficit is bounded by
  // 1 - cos(ratio*pi/(2m)). For round norms at m = 64 this is below 1e-3.
  gen::Rng rng(99);
  const int m = 64;
  for (int i = 0; i < 60; ++i) {
    const double ratio = i < 20 ? 1.0 : gen::uniform(rng, 1.0, 4.0);
    const double tol = (1.0 / std::pow(std::cos(ratio * kPi / (2 * m)), 2) - 1.0) * (1 + 1e-6);
    const double c = gen::uniform(rng, 0.2, 5.0);
    const Mat2 r = rotation(gen::uniform(rng, 0.0, kPi));
    const Mat2 qf = c * r * Eigen::Vector2d(1.0, ratio * ratio).asDiagonal() * r.transpose();
    const SemiNorm2 q = SemiNorm2::quadratic(qf);
    const SemiNorm2 s = SemiNorm2::sample([&](const Vec2& v) { return q(v); }, m);
    if (ratio == 1.0) CHECK(tol < 1e-3);
    CHECK(std::abs(energy_plus(s) - energy_plus(q)) <= tol * energy_plus(q));
    CHECK(std::abs(jacobian_intrinsic(s) - jacobian_intrinsic(q)) <= tol * jacobian_intrinsic(q));
    CHECK(std::abs(beltrami_of(s) - beltrami_of(q)) <= tol);
  }
}

TEST_CASE("scaling") {
  gen::Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const double c = gen::uniform(rng, 0.1, 5.0);
    for (const SemiNorm2& s : {SemiNorm2::quadratic(gen::random_spd(rng)), gen::random_sampled(rng)}) {
      const SemiNorm2 cs = s.scaled(c);
      CHECK(energy_plus(cs) == doctest::Approx(c * c * energy_plus(s)));
      CHECK(jacobian_intrinsic(cs) == doctest::Approx(c * c * jacobian_intrinsic(s)).epsilon(1e-8));
      CHECK(std::abs(beltrami_of(cs) - beltrami_of(s)) < 1e-8);
    }
  }
}

TEST_CASE("construction errors and convexification") {
  CHECK_THROWS_AS(SemiNorm2::sampled(std::vector<double>(4, 1.0)), Error);
  CHECK_THROWS_AS(SemiNorm2::sampled({1, 1, 1, 1, -1, 1, 1, 1}), Error);
  Mat2 neg;
  neg << 1, 0, 0, -1;
  CHECK_THROWS_AS(SemiNorm2::quadratic(neg), Error);

  // A dent at one direction violates convexity; convexification fills it.
  std::vector<double> v(16, 1.0);
  v[4] = 2.0;
  CHECK_THROWS_AS(SemiNorm2::sampled(v), Error);
  const auto c = SemiNorm2::sampled_convexified(v);
  CHECK(c.values()[4] < 2.0);
  CHECK(c.values()[4] == doctest::Approx(1.0 / std::cos(kPi / 16)));
  CHECK_NOTHROW(SemiNorm2::sampled({c.values().begin(), c.values().end()}));
}
