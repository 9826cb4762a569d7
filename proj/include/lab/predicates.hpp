#pragma once

#include <cstddef>

#include "lab/core.hpp"

namespace lab {

// Sign of the orientation determinant: +1 if (a,b,c) is counterclockwise,
// -1 clockwise, 0 collinear.  Evaluated in doubles behind a forward error
// filter; on an inconclusive filter the sign is recomputed in exact rational
// arithmetic, so the result is always the true sign.
int orient2d(Point a, Point b, Point c);

// Sign of the in-circle determinant: +1 if d lies strictly inside the
// circumcircle of the counterclockwise triangle (a,b,c), -1 strictly
// outside, 0 exactly on it.  Same filter + exact fallback as orient2d.
int incircle(Point a, Point b, Point c, Point d);

// In-circle with symbolic perturbation.  Vertices are identified by their
// global indices; ties (exactly cocircular quadruples) are broken by
// infinitesimally lowering the paraboloid lift of lower-indexed vertices,
// which makes the perturbed answer nonzero and independent of insertion
// order, so every point set has one canonical Delaunay triangulation.
// Returns +1 (inside) or -1 (outside); 0 only if all four points are
// collinear, which cannot occur for a valid triangle (a,b,c).
int incircle_perturbed(Point a, Point b, Point c, Point d,
                       std::size_t ia, std::size_t ib, std::size_t ic, std::size_t id);

}  // namespace lab
