#include "lab/predicates.hpp"

#include <gmpxx.h>

#include <cmath>
#include <utility>

namespace lab {

namespace {

// Forward error bounds for the naively evaluated determinants, in the style
// of the classical filtered predicates: if |det| exceeds bound * permanent
// the floating-point sign is certain.
constexpr double kOrientBound = 3.3306690738754716e-16;   // (3 + 16u)u
constexpr double kIncircleBound = 1.1102230246251577e-14; // (10 + 96u)u

int sign_of(const mpq_class& q) { return sgn(q); }

int orient2d_exact(Point a, Point b, Point c) {
  mpq_class ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
  mpq_class det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx);
  return sign_of(det);
}

int incircle_exact(Point a, Point b, Point c, Point d) {
  mpq_class adx = mpq_class(a.x) - mpq_class(d.x);
  mpq_class ady = mpq_class(a.y) - mpq_class(d.y);
  mpq_class bdx = mpq_class(b.x) - mpq_class(d.x);
  mpq_class bdy = mpq_class(b.y) - mpq_class(d.y);
  mpq_class cdx = mpq_class(c.x) - mpq_class(d.x);
  mpq_class cdy = mpq_class(c.y) - mpq_class(d.y);
  mpq_class alift = adx * adx + ady * ady;
  mpq_class blift = bdx * bdx + bdy * bdy;
  mpq_class clift = cdx * cdx + cdy * cdy;
  mpq_class det = alift * (bdx * cdy - bdy * cdx) -
                  blift * (adx * cdy - ady * cdx) +
                  clift * (adx * bdy - ady * bdx);
  return sign_of(det);
}

}  // namespace

int orient2d(Point a, Point b, Point c) {
  double detl = (a.x - c.x) * (b.y - c.y);
  double detr = (a.y - c.y) * (b.x - c.x);
  double det = detl - detr;
  double perm = std::abs(detl) + std::abs(detr);
  if (std::abs(det) > kOrientBound * perm) return det > 0 ? 1 : -1;
  if (perm == 0.0) return 0;  // repeated points, exactly zero
  return orient2d_exact(a, b, c);
}

int incircle(Point a, Point b, Point c, Point d) {
  double adx = a.x - d.x, ady = a.y - d.y;
  double bdx = b.x - d.x, bdy = b.y - d.y;
  double cdx = c.x - d.x, cdy = c.y - d.y;
  double alift = adx * adx + ady * ady;
  double blift = bdx * bdx + bdy * bdy;
  double clift = cdx * cdx + cdy * cdy;
  double bxcy = bdx * cdy, bycx = bdy * cdx;
  double axcy = adx * cdy, aycx = ady * cdx;
  double axby = adx * bdy, aybx = ady * bdx;
  double det = alift * (bxcy - bycx) - blift * (axcy - aycx) + clift * (axby - aybx);
  double perm = alift * (std::abs(bxcy) + std::abs(bycx)) +
                blift * (std::abs(axcy) + std::abs(aycx)) +
                clift * (std::abs(axby) + std::abs(aybx));
  if (std::abs(det) > kIncircleBound * perm) return det > 0 ? 1 : -1;
  return incircle_exact(a, b, c, d);
}

int incircle_perturbed(Point a, Point b, Point c, Point d,
                       std::size_t ia, std::size_t ib, std::size_t ic, std::size_t id) {
  int s = incircle(a, b, c, d);
  if (s != 0) return s;
  // Exactly cocircular.  Perturb lifted heights |p|^2 -> |p|^2 - eta_i with
  // eta strictly decreasing in the vertex index; expanding the lifted 4x4
  // determinant in its height column, the perturbation contributes
  //   - eta_a*orient(b,c,d) + eta_b*orient(a,c,d)
  //   - eta_c*orient(a,b,d) + eta_d*orient(a,b,c),
  // so the smallest index with a nonzero cofactor decides the sign.
  struct Term {
    std::size_t idx;
    Point p, q, r;
    int coef;
  };
  Term terms[4] = {
      {ia, b, c, d, -1},
      {ib, a, c, d, +1},
      {ic, a, b, d, -1},
      {id, a, b, c, +1},
  };
  // Selection sort by index, ascending; four entries only.
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (terms[j].idx < terms[i].idx) std::swap(terms[i], terms[j]);
  for (const Term& t : terms) {
    int o = orient2d(t.p, t.q, t.r);
    if (o != 0) return t.coef * o;
  }
  return 0;  // all four collinear
}

}  // namespace lab
