#include "weilmmp/lp.hpp"

#include "weilmmp/cone.hpp"

namespace weilmmp {

namespace {

IntVec homogenize_row(const IntMat& lhs, const RatVec& rhs, Index i, Index n) {
  RatVec row(n + 1);
  for (Index j = 0; j < n; ++j) row(j) = Rat(lhs(i, j));
  row(n) = -rhs(i);
  return scale_to_int(row);
}

}  // namespace

LexLpResult lex_min_vertex(const LinearSystem& sys, Index nvars) {
  const Index n = nvars;
  HRep h;
  {
    const Index ni = sys.ineq_lhs.rows();
    IntMat ineq(ni + 1, n + 1);
    for (Index i = 0; i < ni; ++i) ineq.row(i) = homogenize_row(sys.ineq_lhs, sys.ineq_rhs, i, n).transpose();
    ineq.row(ni).setZero();
    ineq(ni, n) = 1;  // t >= 0
    IntMat eq(sys.eq_lhs.rows(), n + 1);
    for (Index i = 0; i < eq.rows(); ++i) eq.row(i) = homogenize_row(sys.eq_lhs, sys.eq_rhs, i, n).transpose();
    h.halfspaces = ineq;
    h.equalities = eq;
  }

  VRep v = rays_from_halfspaces(h, n + 1);
  if (v.lineality.rows() > 0) {
    // pin: lineality directions have zero t-component, add them as equalities
    IntMat eq2(h.equalities.rows() + v.lineality.rows(), n + 1);
    if (h.equalities.rows() > 0) eq2.topRows(h.equalities.rows()) = h.equalities;
    eq2.bottomRows(v.lineality.rows()) = v.lineality;
    h.equalities = eq2;
    v = rays_from_halfspaces(h, n + 1);
  }

  LexLpResult out;
  bool found = false;
  RatVec best;
  for (Index i = 0; i < v.rays.rows(); ++i) {
    if (v.rays(i, n) <= 0) continue;
    RatVec x(n);
    for (Index j = 0; j < n; ++j) x(j) = make_rat(v.rays(i, j), v.rays(i, n));
    if (!found) {
      best = x;
      found = true;
      continue;
    }
    for (Index j = 0; j < n; ++j) {
      if (x(j) == best(j)) continue;
      if (x(j) < best(j)) best = x;
      break;
    }
  }
  out.feasible = found;
  if (found) out.vertex = best;
  return out;
}

}  // namespace weilmmp
