#include "weilmmp/cone.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "weilmmp/lp.hpp"

namespace weilmmp {

namespace {

bool lex_less(const IntVec& a, const IntVec& b) {
  for (Index i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return a(i) < b(i);
  return false;
}

IntMat sorted_primitive_rows(const std::vector<IntVec>& in, Index cols) {
  std::vector<IntVec> rows;
  rows.reserve(in.size());
  for (const IntVec& v : in)
    if (gcd_of_entries(v) != 0) rows.push_back(primitive(v));
  std::sort(rows.begin(), rows.end(), lex_less);
  rows.erase(std::unique(rows.begin(), rows.end(),
                         [](const IntVec& a, const IntVec& b) { return a == b; }),
             rows.end());
  IntMat out(static_cast<Index>(rows.size()), cols);
  for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = rows[i].transpose();
  return out;
}

IntMat sorted_primitive_rows(const IntMat& m) {
  std::vector<IntVec> rows;
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(m.row(i).transpose());
  return sorted_primitive_rows(rows, m.cols());
}

IntMat stack_rows(const IntMat& a, const IntMat& b) {
  IntMat out(a.rows() + b.rows(), a.cols() > 0 || a.rows() > 0 ? a.cols() : b.cols());
  if (a.rows() > 0) out.topRows(a.rows()) = a;
  if (b.rows() > 0) out.bottomRows(b.rows()) = b;
  return out;
}

// Extremal rays of {x : A x >= 0} under the precondition ker A = 0.
// Rows are inserted in lexicographic order (after an initial independent
// seed), adjacency decided by exact rank.
std::vector<IntVec> dd_pointed(const IntMat& a_in, Index k) {
  std::vector<IntVec> rays;
  if (k == 0) return rays;
  const IntMat a = sorted_primitive_rows(a_in);
  const Index m = a.rows();

  // initial simplicial subcone from the first k independent rows
  std::vector<Index> seed;
  {
    RatMat acc(0, k);
    for (Index i = 0; i < m && static_cast<Index>(seed.size()) < k; ++i) {
      RatMat trial(acc.rows() + 1, k);
      trial.topRows(acc.rows()) = acc;
      for (Index j = 0; j < k; ++j) trial(acc.rows(), j) = Rat(a(i, j));
      if (rat_rank(trial) > acc.rows()) {
        acc = trial;
        seed.push_back(i);
      }
    }
    if (static_cast<Index>(seed.size()) != k)
      throw Error("InternalLineality", "double description seed rank deficiency");
  }
  RatMat seed_mat(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) seed_mat(i, j) = Rat(a(seed[static_cast<size_t>(i)], j));
  const RatMat inv = rat_inverse(seed_mat);
  for (Index j = 0; j < k; ++j) {
    RatVec col = inv.col(j);
    rays.push_back(primitive(scale_to_int(col)));
  }

  std::vector<Index> inserted(seed.begin(), seed.end());
  std::set<Index> in_seed(seed.begin(), seed.end());

  auto pairing = [&](Index row, const IntVec& r) {
    Int s = 0;
    for (Index j = 0; j < k; ++j) s += a(row, j) * r(j);
    return s;
  };

  for (Index row = 0; row < m; ++row) {
    if (in_seed.count(row)) continue;
    std::vector<IntVec> pos, zero, neg;
    std::vector<Int> val;
    for (const IntVec& r : rays) {
      Int s = pairing(row, r);
      if (s > 0)
        pos.push_back(r);
      else if (s == 0)
        zero.push_back(r);
      else
        neg.push_back(r);
    }
    if (neg.empty()) {
      inserted.push_back(row);
      continue;
    }
    auto tight_rows = [&](const IntVec& r) {
      std::vector<Index> t;
      for (Index j : inserted)
        if (pairing(j, r) == 0) t.push_back(j);
      std::sort(t.begin(), t.end());
      return t;
    };
    std::vector<IntVec> next = pos;
    next.insert(next.end(), zero.begin(), zero.end());
    for (const IntVec& p : pos) {
      const std::vector<Index> tp = tight_rows(p);
      for (const IntVec& n : neg) {
        const std::vector<Index> tn = tight_rows(n);
        std::vector<Index> common;
        std::set_intersection(tp.begin(), tp.end(), tn.begin(), tn.end(),
                              std::back_inserter(common));
        RatMat sub(static_cast<Index>(common.size()), k);
        for (size_t i = 0; i < common.size(); ++i)
          for (Index j = 0; j < k; ++j) sub(static_cast<Index>(i), j) = Rat(a(common[i], j));
        if (rat_rank(sub) != k - 2) continue;  // not adjacent
        IntVec span = pairing(row, p) * n - pairing(row, n) * p;
        next.push_back(primitive(span));
      }
    }
    rays = std::move(next);
    inserted.push_back(row);
  }
  return rays;
}

}  // namespace

VRep rays_from_halfspaces(const HRep& h, Index ambient) {
  VRep out;
  const IntMat eq = h.equalities.rows() > 0 ? h.equalities : IntMat(0, ambient);
  const IntMat hs = h.halfspaces.rows() > 0 ? h.halfspaces : IntMat(0, ambient);

  // restrict to the equality kernel: x = K z
  IntMat kbasis = integer_kernel_basis(eq.rows() > 0 ? eq : IntMat::Zero(1, ambient));
  const Index n0 = kbasis.rows();
  IntMat K(ambient, n0);  // columns
  for (Index i = 0; i < n0; ++i) K.col(i) = kbasis.row(i).transpose();

  IntMat hk(hs.rows(), n0);
  if (hs.rows() > 0) hk = hs * K;

  // split off the lineality of the reduced cone: z = T w
  IntMat lin0 = integer_kernel_basis(hk.rows() > 0 ? hk : IntMat::Zero(1, n0));
  const Index l = lin0.rows();
  AdaptedBasis ab = adapted_basis(lin0, n0);
  if (lin0.rows() == 0) ab.rank = 0;
  const Index kdim = n0 - ab.rank;
  IntMat a(hk.rows(), kdim);
  if (hk.rows() > 0) {
    IntMat ht = hk * ab.basis;
    for (Index i = 0; i < ht.rows(); ++i)
      for (Index j = 0; j < ab.rank; ++j)
        if (ht(i, j) != 0) throw Error("Internal", "lineality not eliminated");
    a = ht.rightCols(kdim);
  }

  const std::vector<IntVec> w = dd_pointed(a, kdim);
  std::vector<IntVec> rays;
  for (const IntVec& wi : w) {
    IntVec z = IntVec::Zero(n0);
    for (Index j = 0; j < kdim; ++j) z += wi(j) * ab.basis.col(ab.rank + j);
    rays.push_back(IntVec(K * z));
  }
  out.rays = sorted_primitive_rows(rays, ambient);

  std::vector<IntVec> lin;
  for (Index i = 0; i < l; ++i) {
    IntVec z = IntVec::Zero(n0);
    for (Index j = 0; j < n0; ++j) z(j) = lin0(i, j);
    // lin0 rows are in z-coordinates of the reduced space
    lin.push_back(IntVec(K * z));
  }
  IntMat linm(static_cast<Index>(lin.size()), ambient);
  for (size_t i = 0; i < lin.size(); ++i) linm.row(static_cast<Index>(i)) = lin[i].transpose();
  out.lineality = hermite_row_basis(linm);
  return out;
}

HRep halfspaces_from_rays(const VRep& v, Index ambient) {
  // the dual cone of cone(V) has H-representation given by V itself
  HRep dual_h;
  dual_h.equalities = v.lineality.rows() > 0 ? v.lineality : IntMat(0, ambient);
  dual_h.halfspaces = v.rays.rows() > 0 ? v.rays : IntMat(0, ambient);
  const VRep dual_v = rays_from_halfspaces(dual_h, ambient);
  HRep out;
  out.equalities = dual_v.lineality;
  out.halfspaces = dual_v.rays;
  return out;
}

PolyhedralCone cone_from_rep(const VRep& v, Index ambient) {
  PolyhedralCone c;
  c.ambient = ambient;
  c.has_v = true;
  c.lineality = v.lineality.rows() > 0 ? v.lineality : IntMat(0, ambient);
  c.rays = v.rays.rows() > 0 ? v.rays : IntMat(0, ambient);
  return c;
}

PolyhedralCone cone_from_rep(const HRep& h, Index ambient) {
  PolyhedralCone c;
  c.ambient = ambient;
  c.has_h = true;
  c.equalities = h.equalities.rows() > 0 ? h.equalities : IntMat(0, ambient);
  c.halfspaces = h.halfspaces.rows() > 0 ? h.halfspaces : IntMat(0, ambient);
  return c;
}

PolyhedralCone cone_from_rays(const IntMat& rays, Index ambient) {
  VRep v;
  v.lineality = IntMat(0, ambient);
  v.rays = rays;
  return cone_from_rep(v, ambient);
}

PolyhedralCone cone_from_rays(const RatMat& rays, Index ambient) {
  IntMat rows(rays.rows(), ambient);
  for (Index i = 0; i < rays.rows(); ++i)
    rows.row(i) = scale_to_int(RatVec(rays.row(i).transpose())).transpose();
  return cone_from_rays(rows, ambient);
}

PolyhedralCone cone_from_halfspaces(const IntMat& halfspaces, Index ambient) {
  HRep h;
  h.equalities = IntMat(0, ambient);
  h.halfspaces = halfspaces;
  return cone_from_rep(h, ambient);
}

PolyhedralCone zero_cone(Index ambient) {
  return dd_convert(cone_from_rays(IntMat(0, ambient), ambient));
}

PolyhedralCone full_cone(Index ambient) {
  return dd_convert(cone_from_halfspaces(IntMat(0, ambient), ambient));
}

PolyhedralCone dd_convert(const PolyhedralCone& c) {
  if (c.canonical) return c;
  if (!c.has_v && !c.has_h) throw Error("NoRepresentation", "cone with neither representation");
  PolyhedralCone out;
  out.ambient = c.ambient;
  out.has_v = out.has_h = true;
  out.canonical = true;
  if (c.has_v) {
    VRep v0{c.lineality, c.rays};
    const HRep h = halfspaces_from_rays(v0, c.ambient);
    const VRep v = rays_from_halfspaces(h, c.ambient);
    out.lineality = v.lineality;
    out.rays = v.rays;
    out.equalities = h.equalities;
    out.halfspaces = h.halfspaces;
  } else {
    HRep h0{c.equalities, c.halfspaces};
    const VRep v = rays_from_halfspaces(h0, c.ambient);
    const HRep h = halfspaces_from_rays(v, c.ambient);
    out.lineality = v.lineality;
    out.rays = v.rays;
    out.equalities = h.equalities;
    out.halfspaces = h.halfspaces;
  }
  return out;
}

bool cones_equal(const PolyhedralCone& a, const PolyhedralCone& b) {
  if (a.ambient != b.ambient) return false;
  const PolyhedralCone ca = dd_convert(a);
  const PolyhedralCone cb = dd_convert(b);
  return ca.rays == cb.rays && ca.lineality == cb.lineality &&
         ca.halfspaces == cb.halfspaces && ca.equalities == cb.equalities;
}

bool is_zero_cone(const PolyhedralCone& c) {
  const PolyhedralCone cc = dd_convert(c);
  return cc.rays.rows() == 0 && cc.lineality.rows() == 0;
}

Index cone_dim(const PolyhedralCone& c) {
  const PolyhedralCone cc = dd_convert(c);
  return int_rank(stack_rows(cc.lineality, cc.rays));
}

Index lineality_dim(const PolyhedralCone& c) { return dd_convert(c).lineality.rows(); }

IntMat span_basis(const PolyhedralCone& c) {
  const PolyhedralCone cc = dd_convert(c);
  return saturate_rows(stack_rows(cc.lineality, cc.rays));
}

PolyhedralCone dual_cone(const PolyhedralCone& c) {
  const PolyhedralCone cc = dd_convert(c);
  PolyhedralCone out;
  out.ambient = cc.ambient;
  out.has_v = out.has_h = true;
  out.canonical = true;
  out.rays = cc.halfspaces;
  out.lineality = cc.equalities;
  out.halfspaces = cc.rays;
  out.equalities = cc.lineality;
  return out;
}

IntMat extremal_rays(const PolyhedralCone& c) {
  const PolyhedralCone cc = dd_convert(c);
  if (cc.lineality.rows() > 0)
    throw Error("HasLineality", "extremal rays of a cone with nontrivial lineality");
  return cc.rays;
}

std::vector<Face> faces(const PolyhedralCone& c) {
  const PolyhedralCone cc = dd_convert(c);
  if (cc.lineality.rows() > 0)
    throw Error("HasLineality", "face lattice of a cone with nontrivial lineality");
  const Index nr = cc.rays.rows();
  const Index nf = cc.halfspaces.rows();

  std::vector<std::set<int>> facet_tight(static_cast<size_t>(nf));
  for (Index i = 0; i < nf; ++i)
    for (Index j = 0; j < nr; ++j) {
      Int s = 0;
      for (Index k = 0; k < cc.ambient; ++k) s += cc.halfspaces(i, k) * cc.rays(j, k);
      if (s == 0) facet_tight[static_cast<size_t>(i)].insert(static_cast<int>(j));
    }

  std::set<int> all;
  for (Index j = 0; j < nr; ++j) all.insert(static_cast<int>(j));
  std::set<std::set<int>> seen{all};
  std::vector<std::set<int>> queue{all};
  for (size_t q = 0; q < queue.size(); ++q) {
    const std::set<int> cur = queue[q];
    for (Index i = 0; i < nf; ++i) {
      std::set<int> inter;
      std::set_intersection(cur.begin(), cur.end(), facet_tight[static_cast<size_t>(i)].begin(),
                            facet_tight[static_cast<size_t>(i)].end(),
                            std::inserter(inter, inter.begin()));
      if (!seen.count(inter)) {
        seen.insert(inter);
        queue.push_back(inter);
      }
    }
  }
  if (nr > 0 && !seen.count(std::set<int>{})) seen.insert(std::set<int>{});

  std::vector<Face> out;
  for (const std::set<int>& s : seen) {
    Face f;
    f.ray_indices.assign(s.begin(), s.end());
    f.generators = IntMat(static_cast<Index>(s.size()), cc.ambient);
    Index r = 0;
    for (int j : s) f.generators.row(r++) = cc.rays.row(j);
    f.dim = int_rank(f.generators);
    // supporting covector: sum of all facets containing the face
    IntVec sup = IntVec::Zero(cc.ambient);
    for (Index i = 0; i < nf; ++i) {
      bool contains_face = std::includes(facet_tight[static_cast<size_t>(i)].begin(),
                                         facet_tight[static_cast<size_t>(i)].end(), s.begin(),
                                         s.end());
      if (contains_face) sup += cc.halfspaces.row(i).transpose();
    }
    f.support = sup;
    out.push_back(std::move(f));
  }
  std::sort(out.begin(), out.end(), [](const Face& a, const Face& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.ray_indices < b.ray_indices;
  });
  return out;
}

PolyhedralCone intersect(const PolyhedralCone& a, const PolyhedralCone& b) {
  if (a.ambient != b.ambient) throw Error("DimensionMismatch", "cone intersection");
  const PolyhedralCone ca = dd_convert(a);
  const PolyhedralCone cb = dd_convert(b);
  HRep h;
  h.equalities = stack_rows(ca.equalities, cb.equalities);
  h.halfspaces = stack_rows(ca.halfspaces, cb.halfspaces);
  return dd_convert(cone_from_rep(h, a.ambient));
}

PolyhedralCone minkowski_sum(const PolyhedralCone& a, const PolyhedralCone& b) {
  if (a.ambient != b.ambient) throw Error("DimensionMismatch", "cone sum");
  const PolyhedralCone ca = dd_convert(a);
  const PolyhedralCone cb = dd_convert(b);
  VRep v;
  v.lineality = stack_rows(ca.lineality, cb.lineality);
  v.rays = stack_rows(ca.rays, cb.rays);
  return dd_convert(cone_from_rep(v, a.ambient));
}

bool contains(const PolyhedralCone& c, const RatVec& x) {
  const PolyhedralCone cc = dd_convert(c);
  for (Index i = 0; i < cc.equalities.rows(); ++i) {
    Rat s = 0;
    for (Index j = 0; j < cc.ambient; ++j) s += Rat(cc.equalities(i, j)) * x(j);
    if (s != 0) return false;
  }
  for (Index i = 0; i < cc.halfspaces.rows(); ++i) {
    Rat s = 0;
    for (Index j = 0; j < cc.ambient; ++j) s += Rat(cc.halfspaces(i, j)) * x(j);
    if (s < 0) return false;
  }
  return true;
}

bool contains(const PolyhedralCone& c, const IntVec& x) { return contains(c, to_rat(x)); }

IntVec relative_interior_point(const PolyhedralCone& c) {
  const PolyhedralCone cc = dd_convert(c);
  if (cc.rays.rows() == 0 && cc.lineality.rows() == 0)
    throw Error("ZeroCone", "relative interior point of the zero cone");
  IntVec p = IntVec::Zero(cc.ambient);
  for (Index i = 0; i < cc.rays.rows(); ++i) p += cc.rays.row(i).transpose();
  return p;  // zero for a pure subspace, interior to it
}

IntVec strict_separator(const Face& f, const PolyhedralCone& w) {
  const PolyhedralCone cw = dd_convert(w);
  const Index n = cw.ambient;

  // precondition: span(F) meets W only at the origin
  VRep span_rep;
  span_rep.lineality = f.generators;
  span_rep.rays = IntMat(0, n);
  const PolyhedralCone span_cone = dd_convert(cone_from_rep(span_rep, n));
  if (!is_zero_cone(intersect(span_cone, cw)))
    throw Error("NotSeparable", "face span meets the cone to separate from");
  if (cw.lineality.rows() > 0)
    throw Error("NotSeparable", "cannot be strictly positive on a line");

  // pin the lineality of the feasible set so a vertex exists
  const IntMat directions = stack_rows(f.generators, cw.rays);
  const IntMat pin =
      integer_kernel_basis(directions.rows() > 0 ? directions : IntMat::Zero(1, n));

  LinearSystem sys;
  sys.eq_lhs = stack_rows(f.generators, pin);
  sys.eq_rhs = RatVec::Zero(sys.eq_lhs.rows());
  sys.ineq_lhs = cw.rays;
  sys.ineq_rhs = RatVec::Ones(cw.rays.rows());
  const LexLpResult r = lex_min_vertex(sys, n);
  if (!r.feasible) throw Error("NotSeparable", "separation system infeasible");
  const IntVec h = scale_to_int(r.vertex);
  if (gcd_of_entries(h) == 0) return h;  // zero separator (W = {0}, F spans)
  return primitive(h);
}

}  // namespace weilmmp
