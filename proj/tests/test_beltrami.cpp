#include "generators.hpp"
#include "oracles.hpp"

#include "qcr/beltrami.hpp"
#include "qcr/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace qcr;

namespace {

const cplx I(0.0, 1.0);

double max_abs_diff(const ComplexField& f, cplx c) {
  double m = 0.0;
  for (const cplx& v : f.values) m = std::max(m, std::abs(v - c));
  return m;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InputError;
}

}  // namespace

TEST_CASE("wirtinger derivatives of linear maps are exact") {
  const SquareGrid g{1.5, 17};
  {
    const auto [fz, fzbar] = wirtinger(ComplexField::from_function(g, [](cplx z) { return z; }));
    CHECK(max_abs_diff(fz, 1.0) < 1e-12);
    CHECK(max_abs_diff(fzbar, 0.0) < 1e-12);
  }
  {
    const auto [fz, fzbar] = wirtinger(ComplexField::from_function(g, [](cplx z) { return std::conj(z); }));
    CHECK(max_abs_diff(fz, 0.0) < 1e-12);
    CHECK(max_abs_diff(fzbar, 1.0) < 1e-12);
  }
  const auto f = ComplexField::from_function(g, [](cplx z) { return z + 0.5 * std::conj(z); });
  const auto [fz, fzbar] = wirtinger(f);
  CHECK(max_abs_diff(fz, 1.0) < 1e-12);
  CHECK(max_abs_diff(fzbar, 0.5) < 1e-12);
  CHECK(max_abs_diff(beltrami_coefficient(f), 0.5) < 1e-12);

  CHECK(code_of([] { wirtinger(ComplexField::zeros(SquareGrid{1.0, 2})); }) == ErrorCode::GridTooSmall);
}

TEST_CASE("beltrami coefficient of conformal maps and conformal post-composition") {
  const SquareGrid g{0.4, 65};
  const auto f = ComplexField::from_function(g, [](cplx z) { return z * z * z + z; });
  CHECK(beltrami_coefficient(f).sup_norm() < 1e-3);

  // Quadratic polynomials in x, y are differentiated exactly.
  const cplx mu_g = 0.3 * std::exp(I);
  const SquareGrid small{0.2, 33};
  const auto g_lin = ComplexField::from_function(small, [&](cplx z) { return z + mu_g * std::conj(z); });
  const auto rho_g = ComplexField::from_function(small, [&](cplx z) {
    const cplx w = z + mu_g * std::conj(z);
    return w * w + w;
  });
  CHECK(max_abs_diff(beltrami_coefficient(g_lin), mu_g) < 1e-12);
  CHECK(max_abs_diff(beltrami_coefficient(rho_g), mu_g) < 1e-10);

  const auto flip = ComplexField::from_function(small, [](cplx z) { return std::conj(z); });
  CHECK(code_of([&] { beltrami_coefficient(flip); }) == ErrorCode::OrientationViolation);
}

TEST_CASE("distortion examples") {
  const Mat2 a = matrix_of({1.0, 0.5});
  CHECK(distortion(a) == doctest::Approx(3.0));
  const Mat2 d = Eigen::Vector2d(2, 1).asDiagonal();
  const auto forms = distortion_forms(d);
  CHECK(forms.norm_ratio == doctest::Approx(2.0));
  CHECK(forms.singular_ratio == doctest::Approx(2.0));
  CHECK(forms.mu_ratio == doctest::Approx(2.0));
  CHECK(std::abs(beltrami_of_linear(d)) == doctest::Approx(1.0 / 3.0));
  CHECK(distortion(rotation(0.4) * 3.0) == doctest::Approx(1.0));

  Mat2 reflect = Mat2::Identity();
  reflect(1, 1) = -1;
  CHECK(code_of([&] { distortion(reflect); }) == ErrorCode::OrientationViolation);

  const QCMap q = QCMap::linear(SquareGrid{1.0, 4}, d);
  CHECK(distortion(q, 5) == doctest::Approx(2.0));
}

TEST_CASE("distortion identity and K-equivalence on random linear maps") {
  gen::Rng rng(2024);
  for (int t = 0; t < 1000; ++t) {
    const Mat2 a = gen::random_orientation_preserving(rng);
    const auto f = distortion_forms(a);
    CHECK(std::abs(f.norm_ratio - f.singular_ratio) <= 1e-9 * f.norm_ratio);
    CHECK(std::abs(f.norm_ratio - f.mu_ratio) <= 1e-9 * f.norm_ratio);

    // Oracle: |mu| from textbook Wirtinger formulas.
    const auto [fz, fzbar] = oracle::wirtinger_linear(a);
    const double mu = std::abs(fzbar / fz);
    const double big_k = f.norm_ratio;
    for (double scale : {1.0 + 1e-6, 1.0 - 1e-6}) {
      const double kk = big_k * scale;
      const bool qc = a.norm() >= 0 && std::pow(a.operatorNorm(), 2) <= kk * a.determinant();
      CHECK(qc == (mu <= k_of_dilatation(kk)));
    }
  }
}

TEST_CASE("composition formula") {
  CHECK(std::abs(compose_coefficient(0.3, 0.3, 2.0 * I)) == 0.0);
  const cplx mu_g(0.2, -0.1), fz(1.0, 2.0);
  CHECK(std::abs(compose_coefficient(0.0, mu_g, fz) - mu_g * std::pow(fz / std::abs(fz), 2)) < 1e-15);
  CHECK(code_of([] { compose_coefficient(0.1, 0.2, 0.0); }) == ErrorCode::DegenerateDerivative);

  gen::Rng rng(77);
  for (int t = 0; t < 1000; ++t) {
    const Mat2 f = gen::random_orientation_preserving(rng);
    const Mat2 g = gen::random_orientation_preserving(rng);
    const auto [ff_z, ff_zbar] = oracle::wirtinger_linear(f);
    const auto [gf_z, gf_zbar] = oracle::wirtinger_linear(g);
    const auto [h_z, h_zbar] = oracle::wirtinger_linear(g * f.inverse());
    const cplx expected = h_zbar / h_z;
    const cplx got = compose_coefficient(ff_zbar / ff_z, gf_zbar / gf_z, ff_z);
    CHECK(std::abs(got - expected) <= 1e-10);
    CHECK(std::abs(got) < 1.0);
  }
}

TEST_CASE("mollification") {
  const SquareGrid g{2.0, 256};
  const double h = g.spacing();
  const auto mu = ComplexField::from_function(g, [](cplx z) { return std::abs(z) < 0.7 ? cplx(0.3, 0.1) : 0.0; });

  const double eta = 0.1;
  const auto sm = mollify(mu, eta);
  double deep = 0.0, outside = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double r = g.node(k).norm();
    if (r < 0.7 - eta - h) deep = std::max(deep, std::abs(sm[k] - mu[k]));
    if (r > 0.7 + eta + h) outside = std::max(outside, std::abs(sm[k]));
  }
  CHECK(deep < 1e-14);
  CHECK(outside == 0.0);
  CHECK(sm.sup_norm() <= mu.sup_norm() * (1 + 1e-14));

  gen::Rng rng(5);
  auto rnd = ComplexField::from_function(g, [&](cplx z) {
    return std::abs(z) < 0.5 ? cplx(gen::uniform(rng, -0.5, 0.5), gen::uniform(rng, -0.5, 0.5)) : 0.0;
  });
  for (double e : {0.02, 0.05, 0.2}) CHECK(mollify(rnd, e).sup_norm() <= rnd.sup_norm() * (1 + 1e-14));

  // Shrinking eta: error at a continuity point goes to zero (exactly once
  // the kernel no longer reaches the jump).
  const std::size_t probe = g.index(128 + 40, 128);  // |z| about 0.63
  double last = std::abs(mollify(mu, 0.3)[probe] - mu[probe]);
  CHECK(last > 1e-3);
  for (double e : {0.15, 0.1, 0.06}) {
    const double err = std::abs(mollify(mu, e)[probe] - mu[probe]);
    CHECK(err <= last);
    last = err;
  }
  CHECK(last < 1e-14);

  CHECK(max_abs_diff(mollify(ComplexField::zeros(g), 0.5), 0.0) == 0.0);
  const auto id = mollify(mu, 0.5 * h);
  CHECK(id.values == mu.values);
  CHECK(code_of([&] { mollify(mu, 0.31); }) == ErrorCode::SupportTooClose);
  CHECK(code_of([&] { mollify(mu, 0.0); }) == ErrorCode::InputError);
}
