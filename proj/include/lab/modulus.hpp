#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "lab/core.hpp"
#include "lab/domain.hpp"
#include "lab/packing.hpp"

namespace lab {

// Jordan polygon with four marked boundary points in counterclockwise cyclic
// order.  Side k runs from marked[k] to marked[k+1 mod 4] along the boundary.
// marked_pair selects the distinguished opposite pair: 0 marks sides (0,2),
// 1 marks sides (1,3).  The modulus of the quadrilateral is the modulus of
// the curve family joining the two marked sides.
struct Quadrilateral {
  std::vector<Point> polygon;  // ccw, simple
  std::array<Point, 4> marked;
  int marked_pair = 0;
};

// Same geometry, other distinguished pair.
Quadrilateral conjugate(const Quadrilateral& q);

// Throws with a reason when q is not a valid quadrilateral.
void validate_quadrilateral(const Quadrilateral& q);

// Polygon with the marked points inserted as vertices, one side label per
// edge, and the vertex index of each marked corner.
struct CanonicalQuad {
  std::vector<Point> polygon;
  std::vector<int> edge_label;  // side 0..3 for edge (i, i+1)
  std::array<int, 4> corner;
};
CanonicalQuad canonicalize(const Quadrilateral& q);

// Exact modulus of a geometric rectangle: (marked side length)/(other length).
double modulus_rectangle(double width, double height, int marked_pair);

struct ModulusResult {
  double value = 0.0;  // midpoint of the energy enclosure at the finer mesh
  double error = 0.0;  // max(enclosure halfwidth, Richardson two-mesh estimate)
  double primal_energy = 0.0;  // Dirichlet energy, marked sides at potential 0/1
  double dual_energy = 0.0;    // same for the conjugate pair
  double lo = 0.0, hi = 0.0;   // enclosure [1/dual, primal]
  int mesh_vertices = 0;
};

// Finite element modulus: harmonic potential 0/1 on the marked sides,
// insulating on the others; the Dirichlet energy is the modulus.  The same
// mesh solves the conjugate problem, whose reciprocal bounds the value from
// below.  level sets the mesh size (longest edge ~ diam / 2^level, graded
// toward the marked corners).
ModulusResult modulus_quadrilateral(const Quadrilateral& q, int level = 6);

// Finitely supported sum of scaled disk indicators.
struct ContinuousMetric {
  struct Atom {
    Point center;
    double radius = 0.0;
    double weight = 0.0;
  };
  std::vector<Atom> atoms;

  double eval(Point p) const;
  double area() const;  // integral of the squared pointwise sum
  double length_along(const std::vector<Point>& polyline) const;
};

struct TransferResult {
  ContinuousMetric metric;
  double eta = 0.0;       // half the empirical ring ratio at the degree bound
  double constant = 0.0;  // C(N) = (N+1) ((1+eta)/eta)^2
};

// Turns a vertex metric on packing circles into a continuous metric of
// comparable area: one disk atom B(center_v, (1+eta) r_v) of weight
// rho(v)/(eta r_v) per supported vertex.  Every supported vertex must have
// degree at most max_degree.
TransferResult transfer_metric(const CirclePacking& p, const std::vector<double>& rho,
                               int max_degree);

struct RoughQcResult {
  double K = 1.0;  // max over samples of max(Mod f(R)/Mod R, Mod R/Mod f(R))
  Rect witness;    // rectangle attaining K (or the degenerate one)
  bool degenerate = false;  // an image polygon failed simplicity/orientation
  int samples_used = 0;
};

// Estimates the rough quasiconformality constant of f on the domain by
// sampling rectangles with side lengths >= epsilon and comparing moduli.
RoughQcResult rough_qc_test(const std::function<Point(Point)>& f, const Domain& dom,
                            double epsilon, int samples, uint64_t seed, int mesh_level = 5);

// max/min of |f(z) - f(x)| over sampled points of the circle |z - x| = 2r.
double quasisymmetry_ratio(const std::function<Point(Point)>& f, Point x, double r,
                           int samples);

// The finite collection of grid squares compactly contained in the domain:
// grids e^{2 pi i k/n} (j eps) Z^2 for 1 <= j,k <= n with n = ceil(1/eps),
// deduplicated, in canonical order.
std::vector<Rect> square_family(const Domain& dom, double epsilon);

}  // namespace lab
