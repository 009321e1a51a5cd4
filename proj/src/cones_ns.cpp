#include "weilmmp/cones_ns.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "weilmmp/lp.hpp"

namespace weilmmp {

namespace {

RatMat class_right_inverse(const ClassGroup& cg) { return to_rat(cg.lift_map); }

// H-representation rows of a cone in class coordinates, from functionals on
// divisor coefficient vectors that vanish on principal divisors
IntMat rows_to_class_halfspaces(const std::vector<RatVec>& rows, const ClassGroup& cg) {
  const RatMat section = class_right_inverse(cg);
  IntMat out(static_cast<Index>(rows.size()), cg.rank);
  for (size_t i = 0; i < rows.size(); ++i) {
    RatVec rc(cg.rank);
    for (Index j = 0; j < cg.rank; ++j) {
      Rat s = 0;
      for (Index r = 0; r < section.rows(); ++r) s += rows[i](r) * section(r, j);
      rc(j) = s;
    }
    out.row(static_cast<Index>(i)) = scale_to_int(rc).transpose();
  }
  return out;
}

}  // namespace

std::vector<RatVec> absolute_convexity_rows(const Fan& f) {
  std::vector<RatVec> rows;
  const Index nrays = f.rays.rows();
  for (const auto& tau : f.max_cones) {
    RatMat vt(static_cast<Index>(tau.size()), f.rank);
    for (size_t i = 0; i < tau.size(); ++i)
      for (Index j = 0; j < f.rank; ++j) vt(static_cast<Index>(i), j) = Rat(f.rays(tau[i], j));
    for (Index r = 0; r < nrays; ++r) {
      if (std::find(tau.begin(), tau.end(), static_cast<int>(r)) != tau.end()) continue;
      const auto c = rat_solve(vt.transpose(), to_rat(IntVec(f.rays.row(r).transpose())));
      if (!c) throw Error("Internal", "maximal cone does not span on a complete fan");
      RatVec row = RatVec::Zero(nrays);
      row(r) = 1;
      for (size_t i = 0; i < tau.size(); ++i) row(tau[i]) -= (*c)(static_cast<Index>(i));
      rows.push_back(row);
    }
  }
  return rows;
}

const WeilCones& weil_cones(const Fan& f) {
  static std::map<std::string, WeilCones> cache;
  const std::string key = fan_key(f);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  if (!is_complete(f)) throw Error("RequiresComplete", "Weil cones of a non-complete fan");
  const ClassGroup cg = class_group(f);
  WeilCones out;
  const QFactorializationList qf = small_projective_qfactorializations(f);
  if (qf.models.empty()) throw Error("Internal", "no projective Q-factorialization found");
  bool first = true;
  for (const QFactorialization& q : qf.models) {
    // the model shares the ray matrix, so its class coordinates agree
    const IntMat half = rows_to_class_halfspaces(absolute_convexity_rows(q.fan), cg);
    const PolyhedralCone nef_model = dd_convert(cone_from_halfspaces(half, cg.rank));
    std::ostringstream tag;
    tag << "model-" << out.per_model.size();
    out.per_model.push_back({tag.str(), nef_model});
    out.nef_w = first ? nef_model : minkowski_sum(out.nef_w, nef_model);
    first = false;
  }
  out.ne_w = dual_cone(out.nef_w);

  // the hull must still consist of nef classes (the union is convex) and the
  // nef cone of a complete toric fan is pointed
  if (out.nef_w.lineality.rows() > 0)
    throw Error("NumericallyTrivialNonzero", "Weil nef cone has nontrivial lineality");
  const IntMat rays = out.nef_w.rays;
  for (Index i = 0; i < rays.rows(); ++i) {
    bool in_some_model = false;
    for (const auto& [tag, cone] : out.per_model)
      if (contains(cone, IntVec(rays.row(i).transpose()))) {
        in_some_model = true;
        break;
      }
    if (!in_some_model)
      throw Error("Internal", "nef hull ray escapes every per-model nef cone");
    const IntVec lift = cg.lift_map * IntVec(rays.row(i).transpose());
    if (!is_nef(make_divisor(f, to_rat(lift))).yes())
      throw Error("Internal", "nef hull ray fails the divisor-level nef test");
  }
  return cache.emplace(key, std::move(out)).first->second;
}

PolyhedralCone nef_cone_w(const Fan& f) { return weil_cones(f).nef_w; }
PolyhedralCone ne_cone_w(const Fan& f) { return weil_cones(f).ne_w; }

NsSpace ns_w(const Fan& f) {
  if (!is_complete(f)) throw Error("RequiresComplete", "Weil Neron-Severi space");
  NsSpace out;
  out.fan = f;
  out.cg = class_group(f);
  out.rho_w = out.cg.rank;

  // Q-Cartier divisor subspace: coefficients extending to a linear function
  // on every maximal cone; eliminate the per-cone linear data by a kernel
  const Index nrays = f.rays.rows();
  const Index ncones = static_cast<Index>(f.max_cones.size());
  Index neq = 0;
  for (const auto& sigma : f.max_cones) neq += static_cast<Index>(sigma.size());
  RatMat sys = RatMat::Zero(neq, nrays + ncones * f.rank);
  Index row = 0;
  for (Index c = 0; c < ncones; ++c)
    for (int r : f.max_cones[static_cast<size_t>(c)]) {
      sys(row, r) = 1;
      for (Index j = 0; j < f.rank; ++j) sys(row, nrays + c * f.rank + j) = Rat(f.rays(r, j));
      ++row;
    }
  const RatMat ker = rat_kernel(sys);
  RatMat acoords(nrays, ker.cols());
  for (Index j = 0; j < ker.cols(); ++j)
    for (Index i = 0; i < nrays; ++i) acoords(i, j) = ker(i, j);
  // image of the Q-Cartier subspace in class coordinates
  RatMat classes = out.cg.class_map * acoords;
  // canonical column basis via echelon of the transpose
  RatMat t = classes.transpose();
  std::vector<RatVec> basis;
  {
    RatMat e = t;
    // reuse rank-style elimination and collect the nonzero rows
    Index rrow = 0;
    for (Index col = 0; col < e.cols() && rrow < e.rows(); ++col) {
      Index p = -1;
      for (Index i = rrow; i < e.rows(); ++i)
        if (e(i, col) != 0) {
          p = i;
          break;
        }
      if (p < 0) continue;
      e.row(rrow).swap(e.row(p));
      const Rat inv = Rat(1) / e(rrow, col);
      e.row(rrow) *= inv;
      for (Index i = 0; i < e.rows(); ++i) {
        if (i == rrow || e(i, col) == 0) continue;
        e.row(i) -= e(i, col) * e.row(rrow);
      }
      ++rrow;
    }
    for (Index i = 0; i < rrow; ++i) basis.push_back(e.row(i).transpose());
  }
  out.rho = static_cast<Index>(basis.size());
  out.cartier_basis = RatMat(out.rho_w, out.rho);
  for (size_t j = 0; j < basis.size(); ++j)
    out.cartier_basis.col(static_cast<Index>(j)) = to_rat(scale_to_int(basis[j]));

  // numerically trivial Weil classes are zero exactly when the nef cone is
  // pointed; weil_cones throws otherwise
  (void)weil_cones(f);
  return out;
}

bool kleiman_ample(const Fan& f, const WeilDivisor& d) {
  const WeilCones& wc = weil_cones(f);
  const RatVec cls = class_of(d);
  const IntMat rays = extremal_rays(wc.ne_w);
  for (Index i = 0; i < rays.rows(); ++i) {
    Rat s = 0;
    for (Index j = 0; j < cls.size(); ++j) s += cls(j) * Rat(rays(i, j));
    if (s <= 0) return false;
  }
  return true;
}

std::vector<Face> k_negative_extremal_faces(const Fan& f) {
  const WeilCones& wc = weil_cones(f);
  const RatVec kc = class_of(canonical_divisor(f));
  std::vector<Face> out;
  for (const Face& face : faces(wc.ne_w)) {
    bool knegative = true;
    for (Index i = 0; i < face.generators.rows(); ++i) {
      Rat s = 0;
      for (Index j = 0; j < kc.size(); ++j) s += kc(j) * Rat(face.generators(i, j));
      if (s >= 0) {
        knegative = false;
        break;
      }
    }
    if (knegative) out.push_back(face);
  }
  return out;
}

namespace {

bool face_is_k_negative_extremal(const Fan& f, const Face& g) {
  for (const Face& face : k_negative_extremal_faces(f))
    if (face.ray_indices == g.ray_indices && face.generators == g.generators) return true;
  return false;
}

}  // namespace

WeilDivisor supporting_divisor(const Fan& f, const Face& g) {
  if (!face_is_k_negative_extremal(f, g))
    throw Error("NotExtremalFace", "supporting divisor needs a K-negative extremal face");
  const WeilCones& wc = weil_cones(f);
  const ClassGroup cg = class_group(f);
  const RatVec kc = class_of(canonical_divisor(f));
  const Index rho = cg.rank;

  // ample class H and eps with K + eps H still negative on the face
  const IntVec h_ample = relative_interior_point(wc.nef_w);
  Rat eps = 1;
  for (Index i = 0; i < g.generators.rows(); ++i) {
    Rat knum = 0, hnum = 0;
    for (Index j = 0; j < rho; ++j) {
      knum += kc(j) * Rat(g.generators(i, j));
      hnum += Rat(h_ample(j)) * Rat(g.generators(i, j));
    }
    const Rat bound = -knum / hnum;  // hnum > 0: interior class against a curve ray
    if (bound / 2 < eps) eps = bound / 2;
  }

  // W = NE_{K+eps H >= 0} + sum of the extremal rays off the face
  RatVec trunc(rho);
  for (Index j = 0; j < rho; ++j) trunc(j) = kc(j) + eps * Rat(h_ample(j));
  IntMat trunc_row(1, rho);
  trunc_row.row(0) = scale_to_int(trunc).transpose();
  const PolyhedralCone kpart = intersect(wc.ne_w, cone_from_halfspaces(trunc_row, rho));

  const IntMat ne_rays = extremal_rays(wc.ne_w);
  std::set<int> in_face(g.ray_indices.begin(), g.ray_indices.end());
  std::vector<IntVec> off;
  for (Index i = 0; i < ne_rays.rows(); ++i)
    if (!in_face.count(static_cast<int>(i))) off.push_back(ne_rays.row(i).transpose());
  IntMat off_mat(static_cast<Index>(off.size()), rho);
  for (size_t i = 0; i < off.size(); ++i) off_mat.row(static_cast<Index>(i)) = off[i].transpose();
  const PolyhedralCone w = minkowski_sum(kpart, dd_convert(cone_from_rays(off_mat, rho)));

  const IntVec cls = strict_separator(g, w);
  const IntVec lift = cg.lift_map * cls;
  const WeilDivisor d = make_divisor(f, to_rat(lift));

  // the separator must cut out exactly the face and be nef
  for (Index i = 0; i < ne_rays.rows(); ++i) {
    Int s = 0;
    for (Index j = 0; j < rho; ++j) s += cls(j) * ne_rays(i, j);
    const bool on_face = in_face.count(static_cast<int>(i)) > 0;
    if (on_face && s != 0) throw Error("Internal", "supporting class does not vanish on the face");
    if (!on_face && s <= 0) throw Error("Internal", "supporting class vanishes off the face");
  }
  if (ne_rays.rows() > 0 && !is_nef(d).yes())
    throw Error("Internal", "supporting divisor is not nef");
  return d;
}

bool is_rational_face(const Fan& f, const Face& g) {
  const WeilCones& wc = weil_cones(f);
  const NsSpace ns = ns_w(f);
  const IntMat ne_rays = extremal_rays(wc.ne_w);
  std::set<int> in_face(g.ray_indices.begin(), g.ray_indices.end());

  // c = cartier_basis * lambda, c = 0 on the face, c >= 1 off it
  const Index nl = ns.rho;
  std::vector<RatVec> eq, ineq;
  for (Index i = 0; i < g.generators.rows(); ++i) {
    RatVec row(nl);
    for (Index l = 0; l < nl; ++l) {
      Rat s = 0;
      for (Index j = 0; j < ns.rho_w; ++j) s += Rat(g.generators(i, j)) * ns.cartier_basis(j, l);
      row(l) = s;
    }
    eq.push_back(row);
  }
  for (Index i = 0; i < ne_rays.rows(); ++i) {
    if (in_face.count(static_cast<int>(i))) continue;
    RatVec row(nl);
    for (Index l = 0; l < nl; ++l) {
      Rat s = 0;
      for (Index j = 0; j < ns.rho_w; ++j) s += Rat(ne_rays(i, j)) * ns.cartier_basis(j, l);
      row(l) = s;
    }
    ineq.push_back(row);
  }
  LinearSystem sys;
  sys.eq_lhs = IntMat(static_cast<Index>(eq.size()), nl);
  for (size_t i = 0; i < eq.size(); ++i) sys.eq_lhs.row(static_cast<Index>(i)) = scale_to_int(eq[i]).transpose();
  sys.eq_rhs = RatVec::Zero(sys.eq_lhs.rows());
  sys.ineq_lhs = IntMat(static_cast<Index>(ineq.size()), nl);
  for (size_t i = 0; i < ineq.size(); ++i) sys.ineq_lhs.row(static_cast<Index>(i)) = scale_to_int(ineq[i]).transpose();
  sys.ineq_rhs = RatVec::Ones(sys.ineq_lhs.rows());
  return lex_min_vertex(sys, nl).feasible;
}

RelativeClassSpace relative_class_space(const FanMorphism& f) {
  if (f.kind != FanMorphism::Kind::Refinement)
    throw Error("UnsupportedMorphism", "relative class space of a non-refinement");
  RelativeClassSpace out;
  out.morphism = f;
  out.wall_rows = relative_convexity_rows(f.target, f.source);
  // independent subset in deterministic order
  RatMat acc(0, f.source.rays.rows());
  for (size_t i = 0; i < out.wall_rows.size(); ++i) {
    RatMat trial(acc.rows() + 1, f.source.rays.rows());
    if (acc.rows() > 0) trial.topRows(acc.rows()) = acc;
    trial.row(acc.rows()) = out.wall_rows[i].transpose();
    if (rat_rank(trial) > acc.rows()) {
      acc = trial;
      out.basis_rows.push_back(i);
    }
  }
  out.dim = static_cast<Index>(out.basis_rows.size());
  return out;
}

RatVec relative_class_of(const RelativeClassSpace& rel, const WeilDivisor& d) {
  RatVec out(rel.dim);
  for (Index i = 0; i < rel.dim; ++i) {
    Rat s = 0;
    const RatVec& row = rel.wall_rows[rel.basis_rows[static_cast<size_t>(i)]];
    for (Index j = 0; j < row.size(); ++j) s += row(j) * d.coeffs(j);
    out(i) = s;
  }
  return out;
}

PolyhedralCone nef_cone_w_relative(const FanMorphism& f) {
  const RelativeClassSpace rel = relative_class_space(f);
  if (!is_simplicial(f.source))
    throw Error("RequiresSimplicial", "relative nef cone needs a simplicial source");
  // image of {all wall rows >= 0} under the selected coordinates
  const Index nrays = f.source.rays.rows();
  IntMat half(static_cast<Index>(rel.wall_rows.size()), nrays);
  for (size_t i = 0; i < rel.wall_rows.size(); ++i)
    half.row(static_cast<Index>(i)) = scale_to_int(rel.wall_rows[i]).transpose();
  const PolyhedralCone pre = dd_convert(cone_from_halfspaces(half, nrays));
  std::vector<RatVec> images;
  auto push_image = [&](const IntVec& v, bool both_signs) {
    WeilDivisor d{f.source, to_rat(v)};
    images.push_back(relative_class_of(rel, d));
    if (both_signs) images.push_back(RatVec(-images.back()));
  };
  for (Index i = 0; i < pre.rays.rows(); ++i) push_image(pre.rays.row(i).transpose(), false);
  for (Index i = 0; i < pre.lineality.rows(); ++i) push_image(pre.lineality.row(i).transpose(), true);
  RatMat gens(static_cast<Index>(images.size()), rel.dim);
  for (size_t i = 0; i < images.size(); ++i) gens.row(static_cast<Index>(i)) = images[i].transpose();
  return dd_convert(cone_from_rays(gens, rel.dim));
}

PolyhedralCone ne_cone_w_relative(const FanMorphism& f) {
  return dual_cone(nef_cone_w_relative(f));
}

RatMat relative_curve_embedding(const FanMorphism& f) {
  const RelativeClassSpace rel = relative_class_space(f);
  const ClassGroup cg = class_group(f.source);
  // wall functional in class coordinates, one column per relative coordinate
  RatMat out(cg.rank, rel.dim);
  const RatMat section = to_rat(cg.lift_map);
  for (Index c = 0; c < rel.dim; ++c) {
    const RatVec& row = rel.wall_rows[rel.basis_rows[static_cast<size_t>(c)]];
    for (Index j = 0; j < cg.rank; ++j) {
      Rat s = 0;
      for (Index r = 0; r < section.rows(); ++r) s += row(r) * section(r, j);
      out(j, c) = s;
    }
  }
  return out;
}

}  // namespace weilmmp
