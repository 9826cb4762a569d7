#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "lab/core.hpp"
#include "lab/domain.hpp"
#include "lab/rng.hpp"

namespace lab {

// Affine map z -> a z + b conj(z) + c.  Orientation preserving iff |a| > |b|.
struct AffineMap {
  cpx a{1.0, 0.0};
  cpx b{0.0, 0.0};
  cpx c{0.0, 0.0};

  cpx apply(cpx z) const { return a * z + b * std::conj(z) + c; }
  cpx dilatation() const { return b / a; }
  // ellipse distortion K = (1+|mu|)/(1-|mu|)
  double distortion() const {
    double m = std::abs(b / a);
    return (1.0 + m) / (1.0 - m);
  }
  // |d/dx| over |d/dy|
  double stretch_ratio() const { return std::abs(a + b) / std::abs(a - b); }
};

// The affine solution of dbar w = mu dw fixing 0 and 1:
// w(z) = (z + mu conj(z)) / (1 + mu).
AffineMap affine_for_constant(cpx mu);

// Per-cell dilatation distribution; every sample lies in the open unit disk.
struct DilatationLaw {
  enum class Kind { point_mass, two_point, uniform_disk, radial };

  Kind kind = Kind::point_mass;
  cpx mu1{0.0, 0.0};
  cpx mu2{0.0, 0.0};
  double prob = 0.5;  // two_point: probability of mu1
  double k_max = 0.5; // uniform_disk: radius of the support
  std::vector<std::pair<double, double>> profile;  // radial: (|mu|, weight)

  static DilatationLaw point_mass(cpx mu);
  static DilatationLaw two_point(cpx m1, cpx m2, double p);
  static DilatationLaw uniform_disk(double radius);
  static DilatationLaw radial(std::vector<std::pair<double, double>> prof);

  cpx sample(Rng& rng) const;
};

// Piecewise-constant coefficient on the square grid of mesh delta.  Cell
// (i, j) covers [i d, (i+1) d) x [j d, (j+1) d); stored window starts at cell
// (ix0, iy0).  Outside the window the coefficient is mu0.
struct BeltramiField {
  double delta = 1.0;
  long long ix0 = 0, iy0 = 0;
  int nx = 0, ny = 0;
  std::vector<cpx> mu;  // row major, j * nx + i
  cpx mu0{0.0, 0.0};
  bool truncated = false;  // a sample was clamped away from |mu| = 1

  cpx at(Point p) const;
  double sup_abs() const;
};

// Independent per-cell samples on the cells compactly contained in the
// domain, mu0 on every other cell.  Deterministic per seed.
BeltramiField sample_field(const DilatationLaw& law, double delta,
                           const Domain& domain, cpx mu0, std::uint64_t seed);

// Vertical strips: +k on x in [2m d, (2m+1) d), -k on the rest.
BeltramiField strips_field(double delta, double k, double width_extent);

struct SolveOptions {
  double extent = 4.0;       // periodic supercell [-extent, extent)^2
  int max_iterations = 500;
  double truncation = 0.99;  // clamp on sup |mu|
};

// Solution of dbar w = mu dw sampled on the uniform supercell grid,
// normalized to fix 0 and 1.
struct DiscreteMap {
  double h = 0.0;
  double extent = 0.0;
  int n = 0;  // nodes per axis; node (i,j) sits at (-extent + i h, -extent + j h)
  std::vector<cpx> w;  // row major, j * n + i

  double residual = 0.0;     // sup |dbar w - mu dw|, transform derivatives
  double fd_residual = 0.0;  // centered-difference version; stays O(|mu jump|)
                             // across cell interfaces where w' is not continuous
  double tolerance = 0.0;
  int iterations = 0;
  bool truncated = false;
  int flagged = 0;  // grid quads with non-positive discrete Jacobian
  cpx normalization_shift{0.0, 0.0};  // raw w at 0
  cpx normalization_scale{1.0, 0.0};  // 1 / (raw w(1) - raw w(0))

  cpx node(int i, int j) const { return {-extent + i * h, -extent + j * h}; }
  cpx value(int i, int j) const { return w[static_cast<std::size_t>(j) * n + i]; }
  cpx eval(cpx z) const;  // bilinear interpolation, exact at grid nodes
};

// Neumann-series fixed point g = mu (1 + S g) with a Fourier-multiplier
// Beurling transform on the periodic supercell; w = z + mean(g) conj(z) + C g.
// The grid must contain 0 and 1 as nodes (they anchor the normalization).
DiscreteMap solve_beltrami(const BeltramiField& field, double h,
                           double tolerance, SolveOptions opt = {});

// Discrete Beurling transform on the n x n periodic grid over
// [-extent, extent)^2: multiplier conj(k)/k, zero mean mode.
std::vector<cpx> beurling_transform(const std::vector<cpx>& values, int n,
                                    double extent);

struct AffineFit {
  AffineMap map;
  double rms = 0.0;
  int nodes = 0;
};

// Least-squares affine fit over the grid nodes in [-window, window]^2.
AffineFit fit_affine(const DiscreteMap& m, double window);

// sup over grid nodes in [-window, window]^2 of |w(z) - a(z)|.
double sup_distance(const DiscreteMap& m, const AffineMap& a, double window);

struct EstimateOptions {
  double h = 1.0 / 64;
  double tolerance = 1e-10;
  double extent = 4.0;
  double window = 1.0;                 // compact set K = [-window, window]^2
  double dispersion_threshold = 0.25;  // flag when trials disagree more
  int max_iterations = 500;
};

struct LawEstimate {
  AffineMap map;            // trial-averaged coefficients
  cpx mu_lambda{0.0, 0.0};  // dilatation of the averaged map
  double dispersion = 0.0;  // max over trials of sup_K |fit_t - average|
  bool flagged = false;     // dispersion above the threshold (delta too coarse)
  std::vector<AffineMap> trial_fits;
};

// Trial-averaged affine fit of independent solutions of the law.
LawEstimate estimate_A_lambda(const DilatationLaw& law, double delta,
                              const Domain& domain, int trials,
                              std::uint64_t seed, EstimateOptions opt = {});

struct KstarOptions {
  double h = 1.0 / 64;
  double tolerance = 1e-9;
  double extent = 4.0;
  int per_side = 24;          // boundary samples per square side
  int mesh_level = 5;         // modulus solver refinement level
  double domain_scale = 3.0;  // field window: square circumradius times this
  int max_iterations = 500;
};

struct KstarEstimate {
  std::vector<double> moduli;  // sorted Mod w(S_theta), one per trial
  double quantile(double p) const;
};

// Empirical distribution of the modulus of the image of the square rotated
// by theta about its center, under independent solutions of the field law.
KstarEstimate estimate_Kstar(const DilatationLaw& law, double theta,
                             Rect square, double delta, int trials,
                             std::uint64_t seed, KstarOptions opt = {});

}  // namespace lab
