#include "qcr/beltrami.hpp"

#include "qcr/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace qcr {

namespace {

// In-place 2D complex FFT on fftw_malloc storage with fixed ESTIMATE plans.
class Fft2 {
 public:
  explicit Fft2(int n) : n_(n), size_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size_));
    fwd_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft2() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;

  cplx* data() { return reinterpret_cast<cplx*>(buf_); }
  void forward() { fftw_execute(fwd_); }
  // Normalized inverse.
  void backward() {
    fftw_execute(bwd_);
    const double s = 1.0 / static_cast<double>(size_);
    cplx* d = data();
    for (std::size_t k = 0; k < size_; ++k) d[k] *= s;
  }

 private:
  int n_;
  std::size_t size_;
  fftw_complex* buf_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

// zeta = k1 + i k2 per Fourier mode; storage row-major with j as the row.
// Nyquist modes are marked with zeta = 0 and dropped by every multiplier so
// that the grid symmetries are preserved exactly.
std::vector<cplx> wavenumbers(const SquareGrid& g) {
  const double base = 2.0 * kPi / (2.0 * g.half_width);
  auto freq = [&](int i) { return base * (i < g.n / 2 ? i : i - g.n); };
  std::vector<cplx> zeta(g.size());
  for (int j = 0; j < g.n; ++j) {
    for (int i = 0; i < g.n; ++i) {
      if (i == g.n / 2 || j == g.n / 2) continue;
      zeta[g.index(i, j)] = {freq(i), freq(j)};
    }
  }
  return zeta;
}

double l2(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const cplx& x : v) s += std::norm(x);
  return std::sqrt(s);
}

}  // namespace

BeltramiSolution solve_beltrami(const ComplexField& mu, const SolveOptions& opts) {
  const SquareGrid& g = mu.grid;
  if (g.n < 8) throw Error(ErrorCode::GridTooSmall, "solver grid needs at least 8 nodes per axis");
  if (!(g.half_width > 1.0)) throw Error(ErrorCode::InputError, "solver box must contain the unit disc");
  if (mu.support_radius() >= 1.0) {
    throw Error(ErrorCode::InputError, "coefficient must be supported in the unit disc");
  }
  const double k = mu.sup_norm();
  if (!(k < 1.0 - opts.k_margin)) throw Error(ErrorCode::CoefficientTooLarge, "coefficient sup norm too close to 1");

  const std::size_t size = g.size();
  const auto zeta = wavenumbers(g);
  Fft2 fft(g.n);
  cplx* buf = fft.data();

  // S h with multiplier conj(zeta)/zeta, zero mode dropped.
  auto beurling = [&](const std::vector<cplx>& h, std::vector<cplx>& out) {
    std::copy(h.begin(), h.end(), buf);
    fft.forward();
    for (std::size_t q = 0; q < size; ++q) buf[q] = zeta[q] == 0.0 ? 0.0 : buf[q] * std::conj(zeta[q]) / zeta[q];
    fft.backward();
    out.assign(buf, buf + size);
  };

  BeltramiSolution sol;
  sol.k = k;
  std::vector<cplx> h(mu.values), sh, next(size);
  double prev_step = 0.0;
  bool converged = k == 0.0;
  for (int it = 1; it <= opts.max_iter && !converged; ++it) {
    beurling(h, sh);
    double step_sup = 0.0;
    for (std::size_t q = 0; q < size; ++q) {
      next[q] = mu[q] * (1.0 + sh[q]);
      step_sup = std::max(step_sup, std::abs(next[q] - h[q]));
    }
    double step = 0.0;
    for (std::size_t q = 0; q < size; ++q) step += std::norm(next[q] - h[q]);
    step = std::sqrt(step);
    if (prev_step > 0.0) sol.max_contraction = std::max(sol.max_contraction, step / prev_step);
    prev_step = step;
    h.swap(next);
    sol.iterations = it;
    converged = step_sup <= opts.iter_tol;
  }
  if (!converged) throw Error(ErrorCode::NoConvergence, "Neumann iteration did not converge");

  // f_z = 1 + S h, f_zbar = h, f = z + dbar^{-1}(h - mean h) + mean(h) zbar.
  beurling(h, sh);
  cplx mean = 0.0;
  for (const cplx& v : h) mean += v;
  mean /= static_cast<double>(size);
  std::copy(h.begin(), h.end(), buf);
  fft.forward();
  const cplx i2(0.0, 0.5);
  for (std::size_t q = 0; q < size; ++q) buf[q] = zeta[q] == 0.0 ? 0.0 : buf[q] / (i2 * zeta[q]);
  fft.backward();

  QCMap& f = sol.map;
  f.grid = g;
  f.mask.assign(size, 1);
  f.values.resize(size);
  f.jacobians.resize(size);
  auto fvals = ComplexField::zeros(g);
  for (std::size_t q = 0; q < size; ++q) {
    const Vec2 p = g.node(q);
    const cplx z(p.x(), p.y());
    f.values[q] = z + buf[q] + mean * std::conj(z);
    fvals[q] = f.values[q];
    f.jacobians[q] = matrix_of({1.0 + sh[q], h[q]});
  }
  f.certify(opts.det_floor);
  sol.min_det = std::numeric_limits<double>::infinity();
  for (const Mat2& d : f.jacobians) sol.min_det = std::min(sol.min_det, d.determinant());

  const auto [fz, fzbar] = wirtinger(fvals);
  std::vector<cplx> res(size);
  for (std::size_t q = 0; q < size; ++q) {
    res[q] = fzbar[q] - mu[q] * fz[q];
    sol.residual_max = std::max(sol.residual_max, std::abs(res[q]));
  }
  sol.residual_l2 = l2(res) * g.spacing();
  if (opts.require_residual && !(sol.residual_l2 <= opts.res_tol)) {
    throw Error(ErrorCode::NoConvergence, "finite-difference residual exceeds tolerance");
  }
  return sol;
}

namespace {

// Bilinear evaluation of rho and Drho at a continuous point of its grid.
struct Interpolant {
  const QCMap& rho;

  bool eval(const Vec2& z, Vec2& value, Mat2& jac) const {
    const SquareGrid& g = rho.grid;
    const double fx = g.locate(z.x()), fy = g.locate(z.y());
    if (!(fx >= 0.0 && fy >= 0.0 && fx <= g.n - 1 && fy <= g.n - 1)) return false;
    const int i0 = std::min(static_cast<int>(fx), g.n - 2);
    const int j0 = std::min(static_cast<int>(fy), g.n - 2);
    const double tx = fx - i0, ty = fy - j0;
    const std::size_t idx[4] = {g.index(i0, j0), g.index(i0 + 1, j0), g.index(i0, j0 + 1), g.index(i0 + 1, j0 + 1)};
    const double w[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
    cplx v = 0.0;
    jac.setZero();
    for (int q = 0; q < 4; ++q) {
      if (!rho.valid(idx[q])) return false;
      v += w[q] * rho.values[idx[q]];
      jac += w[q] * rho.jacobians[idx[q]];
    }
    value = {v.real(), v.imag()};
    return true;
  }
};

// Uniform buckets over sampled values of rho, for nearest-seed queries.
class SeedIndex {
 public:
  SeedIndex(const QCMap& rho, double radius) : rho_(rho) {
    double max_jac = 0.0;
    for (std::size_t k = 0; k < rho.grid.size(); ++k) {
      if (!rho.valid(k) || rho.grid.node(k).norm() > radius) continue;
      seeds_.push_back(k);
      const cplx v = rho.values[k];
      lo_ = lo_.cwiseMin(Vec2(v.real(), v.imag()));
      hi_ = hi_.cwiseMax(Vec2(v.real(), v.imag()));
      Eigen::JacobiSVD<Mat2> svd(rho.jacobians[k]);
      max_jac = std::max(max_jac, svd.singularValues()(0));
    }
    if (seeds_.empty()) throw Error(ErrorCode::PointOutsideImage, "map has no samples near the domain");
    reach_ = 2.0 * rho.grid.spacing() * max_jac;
    b_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(seeds_.size()))));
    cell_ = std::max((hi_ - lo_).maxCoeff() / b_, std::numeric_limits<double>::min());
    buckets_.resize(static_cast<std::size_t>(b_) * static_cast<std::size_t>(b_));
    for (std::size_t k : seeds_) buckets_[bucket(value(k))].push_back(k);
  }

  /// Nearest seed within reach, or npos.
  std::size_t nearest(const Vec2& w) const {
    const int ci = coord(w.x() - lo_.x()), cj = coord(w.y() - lo_.y());
    std::size_t best = npos;
    double best_d = reach_ * reach_;
    const int rings = static_cast<int>(std::ceil(reach_ / cell_)) + 1;
    for (int r = 0; r <= rings; ++r) {
      for (int j = cj - r; j <= cj + r; ++j) {
        for (int i = ci - r; i <= ci + r; ++i) {
          if (std::max(std::abs(i - ci), std::abs(j - cj)) != r) continue;
          if (i < 0 || j < 0 || i >= b_ || j >= b_) continue;
          for (std::size_t k : buckets_[static_cast<std::size_t>(j) * b_ + i]) {
            const double d = (value(k) - w).squaredNorm();
            if (d < best_d || (d == best_d && k < best)) {
              best_d = d;
              best = k;
            }
          }
        }
      }
    }
    return best;
  }

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

 private:
  Vec2 value(std::size_t k) const { return {rho_.values[k].real(), rho_.values[k].imag()}; }
  int coord(double x) const { return std::clamp(static_cast<int>(std::floor(x / cell_)), -1, b_); }
  std::size_t bucket(const Vec2& v) const {
    const int i = std::clamp(coord(v.x() - lo_.x()), 0, b_ - 1);
    const int j = std::clamp(coord(v.y() - lo_.y()), 0, b_ - 1);
    return static_cast<std::size_t>(j) * b_ + i;
  }

  const QCMap& rho_;
  std::vector<std::size_t> seeds_;
  Vec2 lo_ = Vec2::Constant(std::numeric_limits<double>::infinity());
  Vec2 hi_ = Vec2::Constant(-std::numeric_limits<double>::infinity());
  double reach_ = 0.0;
  double cell_ = 1.0;
  int b_ = 1;
  std::vector<std::vector<std::size_t>> buckets_;
};

enum class NewtonStatus { Converged, Diverged };

NewtonStatus newton(const Interpolant& p, const Vec2& w, Vec2& z, const InverseOptions& opts) {
  Vec2 v;
  Mat2 jac;
  if (!p.eval(z, v, jac)) return NewtonStatus::Diverged;
  double res = (v - w).norm();
  const double target = 0.01 * opts.inv_tol;
  for (int it = 0; it < opts.newton_max; ++it) {
    if (res <= target) return NewtonStatus::Converged;
    const Vec2 step = jac.partialPivLu().solve(v - w);
    double t = 1.0;
    bool moved = false;
    for (int halving = 0; halving < 20; ++halving, t *= 0.5) {
      const Vec2 zn = z - t * step;
      Vec2 vn;
      Mat2 jn;
      if (p.eval(zn, vn, jn) && (vn - w).norm() < res) {
        z = zn;
        v = vn;
        jac = jn;
        res = (vn - w).norm();
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return res <= target ? NewtonStatus::Converged : NewtonStatus::Diverged;
}

}  // namespace

Inverse invert(const QCMap& rho, const SquareGrid& omega_grid, const InverseOptions& opts) {
  const double h = rho.grid.spacing();
  const SeedIndex index(rho, opts.domain_radius + 3.0 * h);
  const Interpolant interp{rho};

  Inverse inv;
  QCMap& phi = inv.map;
  phi.grid = omega_grid;
  phi.mask.assign(omega_grid.size(), 0);
  phi.values.assign(omega_grid.size(), 0.0);
  phi.jacobians.assign(omega_grid.size(), Mat2::Zero());
  for (std::size_t q = 0; q < omega_grid.size(); ++q) {
    const Vec2 w = omega_grid.node(q);
    const std::size_t seed = index.nearest(w);
    if (seed == SeedIndex::npos) continue;
    Vec2 z = rho.grid.node(seed);
    if (newton(interp, w, z, opts) != NewtonStatus::Converged) {
      if (rho.grid.node(seed).norm() < opts.domain_radius - 2.0 * h) {
        throw Error(ErrorCode::NewtonDiverged, "Newton inversion diverged inside the domain");
      }
      continue;
    }
    if (!(z.norm() < opts.domain_radius)) continue;
    Vec2 v;
    Mat2 jac;
    interp.eval(z, v, jac);
    inv.max_residual = std::max(inv.max_residual, (v - w).norm());
    phi.mask[q] = 1;
    phi.values[q] = {z.x(), z.y()};
    phi.jacobians[q] = jac.inverse();
  }
  if (phi.active_count() == 0) throw Error(ErrorCode::PointOutsideImage, "no grid node lies in the image");
  phi.certify();
  return inv;
}

Vec2 invert_point(const QCMap& rho, const Vec2& w, const InverseOptions& opts) {
  const SeedIndex index(rho, std::numeric_limits<double>::infinity());
  const std::size_t seed = index.nearest(w);
  if (seed == SeedIndex::npos) throw Error(ErrorCode::PointOutsideImage, "point is not in the sampled image");
  Vec2 z = rho.grid.node(seed);
  if (newton(Interpolant{rho}, w, z, opts) != NewtonStatus::Converged) {
    throw Error(ErrorCode::NewtonDiverged, "Newton inversion diverged");
  }
  return z;
}

}  // namespace qcr
