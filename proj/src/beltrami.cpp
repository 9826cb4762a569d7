#include "lab/beltrami.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "lab/modulus.hpp"
#include "lab/parallel.hpp"

namespace lab {

namespace {

// FFTW plan creation/destruction is not thread safe; execution on the plan's
// own array is.  One grid per solve, reused across iterations.
std::mutex fftw_lock;

struct FftGrid {
  int n = 0;
  fftw_complex* a = nullptr;
  fftw_plan fwd = nullptr, bwd = nullptr;

  explicit FftGrid(int n_) : n(n_) {
    std::lock_guard<std::mutex> hold(fftw_lock);
    a = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
    require(a != nullptr, "fft allocation failed");
    fwd = fftw_plan_dft_2d(n, n, a, a, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_2d(n, n, a, a, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~FftGrid() {
    std::lock_guard<std::mutex> hold(fftw_lock);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(a);
  }
  FftGrid(const FftGrid&) = delete;
  FftGrid& operator=(const FftGrid&) = delete;

  cpx* data() { return reinterpret_cast<cpx*>(a); }
  void forward() { fftw_execute(fwd); }
  void backward() { fftw_execute(bwd); }
};

// signed frequency index of DFT bin s
inline int freq_index(int s, int n) { return s <= n / 2 ? s : s - n; }

// complex frequency kappa_x + i kappa_y of bin (i, j) on period 2 * extent
inline cpx bin_frequency(int i, int j, int n, double extent) {
  double unit = std::numbers::pi / extent;
  return {unit * freq_index(i, n), unit * freq_index(j, n)};
}

bool cell_compactly_inside(const Domain& dom, Point a, Point b, Point c,
                           Point d) {
  if (!dom.strictly_contains(a) || !dom.strictly_contains(b) ||
      !dom.strictly_contains(c) || !dom.strictly_contains(d))
    return false;
  if (dom.kind == Domain::Kind::polygon) {
    // corners inside is not enough for a non-convex boundary
    const Point e[5] = {a, b, c, d, a};
    for (int s = 0; s < 4; ++s)
      if (segment_crosses_polygon(e[s], e[s + 1], dom.polygon)) return false;
  }
  return true;
}

}  // namespace

AffineMap affine_for_constant(cpx mu) {
  require(std::abs(mu) < 1.0, "constant dilatation must lie in the unit disk");
  AffineMap m;
  m.a = 1.0 / (1.0 + mu);
  m.b = mu / (1.0 + mu);
  m.c = 0.0;
  return m;
}

DilatationLaw DilatationLaw::point_mass(cpx mu) {
  require(std::abs(mu) < 1.0, "dilatation values must lie in the unit disk");
  DilatationLaw law;
  law.kind = Kind::point_mass;
  law.mu1 = mu;
  return law;
}

DilatationLaw DilatationLaw::two_point(cpx m1, cpx m2, double p) {
  require(std::abs(m1) < 1.0 && std::abs(m2) < 1.0,
          "dilatation values must lie in the unit disk");
  require(p >= 0.0 && p <= 1.0, "two point probability must be in [0,1]");
  DilatationLaw law;
  law.kind = Kind::two_point;
  law.mu1 = m1;
  law.mu2 = m2;
  law.prob = p;
  return law;
}

DilatationLaw DilatationLaw::uniform_disk(double radius) {
  require(radius >= 0.0 && radius < 1.0,
          "uniform disk radius must be in [0,1)");
  DilatationLaw law;
  law.kind = Kind::uniform_disk;
  law.k_max = radius;
  return law;
}

DilatationLaw DilatationLaw::radial(
    std::vector<std::pair<double, double>> prof) {
  require(!prof.empty(), "radial profile must not be empty");
  double total = 0.0;
  for (auto& [r, wgt] : prof) {
    require(r >= 0.0 && r < 1.0, "radial profile radii must be in [0,1)");
    require(wgt > 0.0, "radial profile weights must be positive");
    total += wgt;
  }
  require(total > 0.0, "radial profile weights must be positive");
  DilatationLaw law;
  law.kind = Kind::radial;
  law.profile = std::move(prof);
  return law;
}

cpx DilatationLaw::sample(Rng& rng) const {
  switch (kind) {
    case Kind::point_mass:
      return mu1;
    case Kind::two_point:
      return rng.uniform() < prob ? mu1 : mu2;
    case Kind::uniform_disk: {
      double r = k_max * std::sqrt(rng.uniform());
      double ang = 2.0 * std::numbers::pi * rng.uniform();
      return std::polar(r, ang);
    }
    case Kind::radial: {
      double total = 0.0;
      for (auto& [r, wgt] : profile) total += wgt;
      double u = rng.uniform() * total;
      double radius = profile.back().first;
      for (auto& [r, wgt] : profile) {
        if (u < wgt) {
          radius = r;
          break;
        }
        u -= wgt;
      }
      double ang = 2.0 * std::numbers::pi * rng.uniform();
      return std::polar(radius, ang);
    }
  }
  throw std::runtime_error("unknown dilatation law kind");
}

cpx BeltramiField::at(Point p) const {
  long long i = static_cast<long long>(std::floor(p.x / delta)) - ix0;
  long long j = static_cast<long long>(std::floor(p.y / delta)) - iy0;
  if (i < 0 || j < 0 || i >= nx || j >= ny) return mu0;
  return mu[static_cast<std::size_t>(j) * nx + static_cast<std::size_t>(i)];
}

double BeltramiField::sup_abs() const {
  double s = std::abs(mu0);
  for (const cpx& m : mu) s = std::max(s, std::abs(m));
  return s;
}

BeltramiField sample_field(const DilatationLaw& law, double delta,
                           const Domain& domain, cpx mu0, std::uint64_t seed) {
  require(delta > 0.0, "cell size must be positive");
  require(std::abs(mu0) < 1.0,
          "exterior coefficient must lie in the unit disk");

  Point lo, hi;
  domain.bounding_box(lo, hi);
  BeltramiField f;
  f.delta = delta;
  f.mu0 = mu0;
  f.ix0 = static_cast<long long>(std::floor(lo.x / delta));
  f.iy0 = static_cast<long long>(std::floor(lo.y / delta));
  long long ix_end = static_cast<long long>(std::floor(hi.x / delta)) + 1;
  long long iy_end = static_cast<long long>(std::floor(hi.y / delta)) + 1;
  f.nx = static_cast<int>(ix_end - f.ix0);
  f.ny = static_cast<int>(iy_end - f.iy0);
  require(f.nx > 0 && f.ny > 0, "domain has empty bounding box");
  require(static_cast<long long>(f.nx) * f.ny <= 64LL * 1000 * 1000,
          "field grid too large");
  f.mu.assign(static_cast<std::size_t>(f.nx) * f.ny, mu0);

  // one stream; draws happen only for cells compactly inside, in row-major
  // order, so the field is reproducible for fixed domain and delta
  Rng rng(seed);
  for (int j = 0; j < f.ny; ++j) {
    for (int i = 0; i < f.nx; ++i) {
      double x0 = (f.ix0 + i) * delta, y0 = (f.iy0 + j) * delta;
      Point a{x0, y0}, b{x0 + delta, y0}, c{x0 + delta, y0 + delta},
          d{x0, y0 + delta};
      if (!cell_compactly_inside(domain, a, b, c, d)) continue;
      cpx m = law.sample(rng);
      double am = std::abs(m);
      if (am > 0.99) {  // keep the dilatation locally bounded
        m *= 0.99 / am;
        f.truncated = true;
      }
      f.mu[static_cast<std::size_t>(j) * f.nx + i] = m;
    }
  }
  return f;
}

BeltramiField strips_field(double delta, double k, double width_extent) {
  require(delta > 0.0, "cell size must be positive");
  require(k >= 0.0 && k < 1.0, "strip dilatation must be in [0,1)");
  require(width_extent > 0.0, "extent must be positive");
  int n = static_cast<int>(std::ceil(width_extent / delta));
  BeltramiField f;
  f.delta = delta;
  f.ix0 = -n;
  f.iy0 = -n;
  f.nx = 2 * n;
  f.ny = 2 * n;
  f.mu0 = 0.0;
  f.mu.assign(static_cast<std::size_t>(f.nx) * f.ny, cpx(0.0, 0.0));
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      long long ix = f.ix0 + i;
      bool even = ((ix % 2) + 2) % 2 == 0;
      f.mu[static_cast<std::size_t>(j) * f.nx + i] = even ? cpx(k, 0.0)
                                                          : cpx(-k, 0.0);
    }
  return f;
}

std::vector<cpx> beurling_transform(const std::vector<cpx>& values, int n,
                                    double extent) {
  require(n >= 2, "grid too small");
  require(extent > 0.0, "extent must be positive");
  require(values.size() == static_cast<std::size_t>(n) * n,
          "value count must match the grid");
  FftGrid fft(n);
  std::copy(values.begin(), values.end(), fft.data());
  fft.forward();
  cpx* a = fft.data();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      cpx k = bin_frequency(i, j, n, extent);
      std::size_t idx = static_cast<std::size_t>(j) * n + i;
      a[idx] = (k == cpx(0.0, 0.0)) ? cpx(0.0, 0.0)
                                    : a[idx] * (std::conj(k) / k);
    }
  fft.backward();
  std::vector<cpx> out(values.size());
  double inv = 1.0 / (static_cast<double>(n) * n);
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = a[t] * inv;
  return out;
}

DiscreteMap solve_beltrami(const BeltramiField& field, double h,
                           double tolerance, SolveOptions opt) {
  require(h > 0.0, "resolution must be positive");
  require(tolerance > 0.0, "tolerance must be positive");
  require(opt.extent > 0.0, "extent must be positive");
  require(opt.truncation > 0.0 && opt.truncation < 1.0,
          "truncation level must be in (0,1)");
  int n = static_cast<int>(std::llround(2.0 * opt.extent / h));
  require(n >= 8, "grid too small");
  require(std::abs(n * h - 2.0 * opt.extent) <= 1e-9,
          "supercell extent must be a multiple of the resolution");
  require(static_cast<long long>(n) * n <= 64LL * 1000 * 1000,
          "sample grid too large");
  // the normalization is anchored at the nodes 0 and 1
  int i0 = static_cast<int>(std::llround(opt.extent / h));
  int i1 = static_cast<int>(std::llround((opt.extent + 1.0) / h));
  require(i0 >= 0 && i1 < n && std::abs(i0 * h - opt.extent) <= 1e-9 &&
              std::abs(i1 * h - opt.extent - 1.0) <= 1e-9,
          "sample grid must contain the points 0 and 1 as nodes");

  DiscreteMap map;
  map.h = h;
  map.extent = opt.extent;
  map.n = n;
  map.tolerance = tolerance;

  std::size_t total = static_cast<std::size_t>(n) * n;
  std::vector<cpx> mu(total);
  double sup_mu = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      cpx m = field.at(Point{-opt.extent + i * h, -opt.extent + j * h});
      double am = std::abs(m);
      if (am > opt.truncation) {
        m *= opt.truncation / am;
        map.truncated = true;
      }
      sup_mu = std::max(sup_mu, std::abs(m));
      mu[static_cast<std::size_t>(j) * n + i] = m;
    }
  map.truncated = map.truncated || field.truncated;

  FftGrid fft(n);
  cpx* a = fft.data();
  double inv_total = 1.0 / static_cast<double>(total);

  // fixed point g = mu (1 + S g), starting from g = mu
  std::vector<cpx> g = mu;
  std::vector<cpx> sg(total);
  auto apply_beurling = [&]() {
    std::copy(g.begin(), g.end(), a);
    fft.forward();
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        cpx k = bin_frequency(i, j, n, opt.extent);
        std::size_t idx = static_cast<std::size_t>(j) * n + i;
        a[idx] = (k == cpx(0.0, 0.0)) ? cpx(0.0, 0.0)
                                      : a[idx] * (std::conj(k) / k);
      }
    fft.backward();
    for (std::size_t t = 0; t < total; ++t) sg[t] = a[t] * inv_total;
  };

  double diff = 0.0;
  bool converged = false;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    apply_beurling();
    diff = 0.0;
    for (std::size_t t = 0; t < total; ++t) {
      cpx next = mu[t] * (1.0 + sg[t]);
      diff = std::max(diff, std::abs(next - g[t]));
      g[t] = next;
    }
    map.iterations = it;
    if (diff <= tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw std::runtime_error(
        "dilatation iteration did not converge: successive difference " +
        std::to_string(diff) + " after " +
        std::to_string(opt.max_iterations) + " sweeps (sup |mu| = " +
        std::to_string(sup_mu) + ")");

  // residual of the settled iterate, with transform-consistent derivatives:
  // dbar w = g and dw = 1 + S g hold exactly for w = z + mean conj(z) + C g
  apply_beurling();
  double raw_residual = 0.0;
  for (std::size_t t = 0; t < total; ++t)
    raw_residual =
        std::max(raw_residual, std::abs(g[t] - mu[t] * (1.0 + sg[t])));

  std::copy(g.begin(), g.end(), a);
  fft.forward();
  cpx mean = a[0] * inv_total;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      cpx k = bin_frequency(i, j, n, opt.extent);
      std::size_t idx = static_cast<std::size_t>(j) * n + i;
      a[idx] = (k == cpx(0.0, 0.0))
                   ? cpx(0.0, 0.0)
                   : a[idx] * (cpx(0.0, -2.0) / k);  // 1 / dbar symbol
    }
  fft.backward();

  map.w.resize(total);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      std::size_t idx = static_cast<std::size_t>(j) * n + i;
      cpx z{-opt.extent + i * h, -opt.extent + j * h};
      map.w[idx] = z + mean * std::conj(z) + a[idx] * inv_total;
    }

  std::size_t idx0 = static_cast<std::size_t>(i0) * n + i0;
  std::size_t idx1 = static_cast<std::size_t>(i0) * n + i1;
  cpx w0 = map.w[idx0];
  cpx w1 = map.w[idx1];
  require(std::abs(w1 - w0) > 1e-12, "degenerate normalization: w(1) = w(0)");
  cpx scale = 1.0 / (w1 - w0);
  for (cpx& v : map.w) v = (v - w0) * scale;
  map.w[idx0] = 0.0;  // the division above is exact only up to rounding
  map.w[idx1] = 1.0;
  map.normalization_shift = w0;
  map.normalization_scale = scale;
  map.residual = raw_residual * std::abs(scale);

  // centered-difference residual on the normalized map (diagnostic)
  double fd = 0.0;
  for (int j = 1; j + 1 < n; ++j)
    for (int i = 1; i + 1 < n; ++i) {
      std::size_t idx = static_cast<std::size_t>(j) * n + i;
      cpx wx = (map.w[idx + 1] - map.w[idx - 1]) / (2.0 * h);
      cpx wy = (map.w[idx + n] - map.w[idx - n]) / (2.0 * h);
      cpx dbar = 0.5 * (wx + cpx(0.0, 1.0) * wy);
      cpx dz = 0.5 * (wx - cpx(0.0, 1.0) * wy);
      fd = std::max(fd, std::abs(dbar - mu[idx] * dz));
    }
  map.fd_residual = fd;

  for (int j = 0; j + 1 < n; ++j)
    for (int i = 0; i + 1 < n; ++i) {
      std::size_t idx = static_cast<std::size_t>(j) * n + i;
      cpx dx = map.w[idx + 1] - map.w[idx];
      cpx dy = map.w[idx + n] - map.w[idx];
      double jac = std::imag(std::conj(dx) * dy);
      if (!(jac > 0.0)) ++map.flagged;
    }
  return map;
}

cpx DiscreteMap::eval(cpx z) const {
  double fx = (z.real() + extent) / h;
  double fy = (z.imag() + extent) / h;
  require(fx >= 0.0 && fy >= 0.0 && fx <= n - 1 && fy <= n - 1,
          "evaluation point outside the sampled supercell");
  int i = std::min(static_cast<int>(fx), n - 2);
  int j = std::min(static_cast<int>(fy), n - 2);
  double tx = fx - i, ty = fy - j;
  std::size_t idx = static_cast<std::size_t>(j) * n + i;
  return (1.0 - tx) * (1.0 - ty) * w[idx] + tx * (1.0 - ty) * w[idx + 1] +
         (1.0 - tx) * ty * w[idx + n] + tx * ty * w[idx + n + 1];
}

AffineFit fit_affine(const DiscreteMap& m, double window) {
  require(window > 0.0 && window <= m.extent, "fit window out of range");
  Eigen::Matrix3cd normal = Eigen::Matrix3cd::Zero();
  Eigen::Vector3cd rhs = Eigen::Vector3cd::Zero();
  int lo = static_cast<int>(std::ceil((m.extent - window) / m.h - 1e-9));
  int hi = static_cast<int>(std::floor((m.extent + window) / m.h + 1e-9));
  lo = std::max(lo, 0);
  hi = std::min(hi, m.n - 1);
  int count = 0;
  for (int j = lo; j <= hi; ++j)
    for (int i = lo; i <= hi; ++i) {
      cpx z = m.node(i, j);
      cpx phi[3] = {z, std::conj(z), cpx(1.0, 0.0)};
      cpx val = m.value(i, j);
      for (int r = 0; r < 3; ++r) {
        for (int col = 0; col < 3; ++col)
          normal(r, col) += std::conj(phi[r]) * phi[col];
        rhs(r) += std::conj(phi[r]) * val;
      }
      ++count;
    }
  require(count >= 3, "fit window contains too few grid nodes");
  Eigen::Vector3cd sol = normal.fullPivLu().solve(rhs);
  AffineFit fit;
  fit.map.a = sol(0);
  fit.map.b = sol(1);
  fit.map.c = sol(2);
  fit.nodes = count;
  double ss = 0.0;
  for (int j = lo; j <= hi; ++j)
    for (int i = lo; i <= hi; ++i) {
      cpx z = m.node(i, j);
      ss += std::norm(fit.map.apply(z) - m.value(i, j));
    }
  fit.rms = std::sqrt(ss / count);
  return fit;
}

double sup_distance(const DiscreteMap& m, const AffineMap& a, double window) {
  require(window > 0.0 && window <= m.extent, "window out of range");
  int lo = static_cast<int>(std::ceil((m.extent - window) / m.h - 1e-9));
  int hi = static_cast<int>(std::floor((m.extent + window) / m.h + 1e-9));
  lo = std::max(lo, 0);
  hi = std::min(hi, m.n - 1);
  double sup = 0.0;
  for (int j = lo; j <= hi; ++j)
    for (int i = lo; i <= hi; ++i) {
      cpx z = m.node(i, j);
      sup = std::max(sup, std::abs(m.value(i, j) - a.apply(z)));
    }
  return sup;
}

LawEstimate estimate_A_lambda(const DilatationLaw& law, double delta,
                              const Domain& domain, int trials,
                              std::uint64_t seed, EstimateOptions opt) {
  require(trials >= 1, "need at least one trial");
  SolveOptions sopt;
  sopt.extent = opt.extent;
  sopt.max_iterations = opt.max_iterations;

  std::vector<AffineMap> fits(trials);
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    BeltramiField f =
        sample_field(law, delta, domain, cpx(0.0, 0.0), derive_seed(seed, t));
    DiscreteMap m = solve_beltrami(f, opt.h, opt.tolerance, sopt);
    fits[t] = fit_affine(m, opt.window).map;
  });

  LawEstimate est;
  est.trial_fits = fits;
  cpx sa = 0.0, sb = 0.0, sc = 0.0;
  for (const AffineMap& f : fits) {
    sa += f.a;
    sb += f.b;
    sc += f.c;
  }
  est.map.a = sa / static_cast<double>(trials);
  est.map.b = sb / static_cast<double>(trials);
  est.map.c = sc / static_cast<double>(trials);
  est.mu_lambda = est.map.dilatation();

  // an affine difference attains its sup over a square at a corner
  const double wdw = opt.window;
  const cpx corners[4] = {{wdw, wdw}, {-wdw, wdw}, {-wdw, -wdw}, {wdw, -wdw}};
  for (const AffineMap& f : fits)
    for (cpx z : corners)
      est.dispersion =
          std::max(est.dispersion, std::abs(f.apply(z) - est.map.apply(z)));
  est.flagged = est.dispersion > opt.dispersion_threshold;
  return est;
}

double KstarEstimate::quantile(double p) const {
  require(!moduli.empty(), "empty distribution");
  require(p >= 0.0 && p <= 1.0, "quantile level must be in [0,1]");
  double pos = p * (moduli.size() - 1);
  std::size_t k = static_cast<std::size_t>(pos);
  if (k + 1 >= moduli.size()) return moduli.back();
  double frac = pos - k;
  return moduli[k] * (1.0 - frac) + moduli[k + 1] * frac;
}

KstarEstimate estimate_Kstar(const DilatationLaw& law, double theta,
                             Rect square, double delta, int trials,
                             std::uint64_t seed, KstarOptions opt) {
  require(trials >= 1, "need at least one trial");
  require(opt.per_side >= 2, "need at least two samples per side");
  double circum = std::hypot(square.hw, square.hh);
  Point c = square.center;
  double half = opt.domain_scale * circum;
  require(std::abs(c.x) + half < opt.extent && std::abs(c.y) + half < opt.extent,
          "square (with its sampling margin) must fit inside the supercell");
  Domain window = Domain::rectangle(Point{c.x - half, c.y - half},
                                    Point{c.x + half, c.y + half});
  Rect rotated{square.center, square.hw, square.hh, square.angle + theta};

  SolveOptions sopt;
  sopt.extent = opt.extent;
  sopt.max_iterations = opt.max_iterations;

  std::vector<double> mods(trials);
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    BeltramiField f =
        sample_field(law, delta, window, cpx(0.0, 0.0), derive_seed(seed, t));
    DiscreteMap m = solve_beltrami(f, opt.h, opt.tolerance, sopt);

    auto corners = rotated.corners();
    std::vector<Point> img;
    Quadrilateral q;
    for (int s = 0; s < 4; ++s) {
      Point from = corners[s], to = corners[(s + 1) % 4];
      for (int u = 0; u < opt.per_side; ++u) {
        double frac = static_cast<double>(u) / opt.per_side;
        Point p{from.x + frac * (to.x - from.x),
                from.y + frac * (to.y - from.y)};
        cpx image = m.eval(cpx(p.x, p.y));
        img.push_back(Point{image.real(), image.imag()});
        if (u == 0) q.marked[s] = img.back();
      }
    }
    q.polygon = std::move(img);
    q.marked_pair = 0;
    mods[t] = modulus_quadrilateral(q, opt.mesh_level).value;
  });

  KstarEstimate est;
  est.moduli = std::move(mods);
  std::sort(est.moduli.begin(), est.moduli.end());
  return est;
}

}  // namespace lab
