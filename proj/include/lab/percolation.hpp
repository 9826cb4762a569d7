#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lab/core.hpp"

namespace lab {

// Site coloring of the (2N+1)^2 cells indexed by [-N,N]^2.  Cell (i,j) is
// the half-open square [(i-1/2)d, (i+1/2)d) x [(j-1/2)d, (j+1/2)d) of mesh
// d = delta, centered at the lattice point (i d, j d).  Yellow has
// probability r, independently per cell, reproducibly per seed.
struct GridColoring {
  int N = 0;
  double delta = 1.0;
  double r = 0.0;
  uint64_t seed = 0;
  std::vector<uint8_t> yellow;  // row-major, rows j = -N..N, columns i = -N..N

  int side() const { return 2 * N + 1; }
  size_t idx(int i, int j) const {
    return static_cast<size_t>(j + N) * side() + static_cast<size_t>(i + N);
  }
  bool in_grid(int i, int j) const { return i >= -N && i <= N && j >= -N && j <= N; }
  bool is_yellow(int i, int j) const { return yellow[idx(i, j)] != 0; }
  bool is_blue(int i, int j) const { return !is_yellow(i, j); }
  // Cell index of a continuous point; requires the point inside the extent.
  std::array<int, 2> cell_of(Point p) const;
};

GridColoring color_grid(int N, double r, uint64_t seed, double delta = 1.0);

// Minimum number of blue-cell steps over 4-adjacent lattice paths from x to
// y.  Counting convention: the blue cells a path visits, both endpoints
// included, minus one (floored at zero), so an all-blue grid gives the
// combinatorial distance and d_chem <= d_Z2 always holds.
int chemical_distance(const GridColoring& c, std::array<int, 2> x, std::array<int, 2> y);

// Total Euclidean length of the polyline's intersection with blue cells.
double continuous_chemical_length(const GridColoring& c, const std::vector<Point>& path);

// Cells whose full m x m neighborhood lies in the grid and is entirely blue.
struct DeepBlueMask {
  int N = 0;
  int m = 1;
  std::vector<uint8_t> deep;  // same indexing as GridColoring

  bool is_deep(int i, int j) const {
    return deep[static_cast<size_t>(j + N) * (2 * N + 1) + static_cast<size_t>(i + N)] != 0;
  }
};

DeepBlueMask deep_blue(const GridColoring& c, int m);

// Probability that a path of length >= ceil(ln N) collects at least a tenth
// of its vertices yellow, union-bounded: 2 (2N+1)^2 sum_{L>=L0} (8 r^{1/10})^L.
// Divergent (infinity) when 8 r^{1/10} >= 1.
double analytic_union_bound(int N, double r);

struct PercolationBoundReport {
  double success_fraction = 0.0;  // trials where all sampled pairs pass
  double worst_ratio = 0.0;       // min d_chem / d_Z2 seen
  std::array<int, 2> worst_x{0, 0}, worst_y{0, 0};
  uint64_t worst_seed = 0;
  double analytic_bound = 0.0;
  int trials = 0;
  int pairs_per_trial = 0;
};

// Monte Carlo check that d_chem >= theta * d_Z2 for sampled far-apart pairs
// (lattice distance >= ceil(ln N)), with the analytic bound for comparison.
PercolationBoundReport verify_percolation_bound(int N, double r, int trials, double theta,
                                                uint64_t seed, int pairs_per_trial = 50);

// Local rules over an underlying iid field (window (m-1)/2 around the cell):
//   identity - cell yellow iff its own uniform falls below r (iid coloring);
//   dilate   - cell yellow iff any uniform in the window falls below r.
// Colors of cells at lattice distance >= m are independent.
enum class ColorRule { identity, dilate };

GridColoring m_dependent_coloring(int N, double r, int m, ColorRule rule, uint64_t seed,
                                  double delta = 1.0);

}  // namespace lab
