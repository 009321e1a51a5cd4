#include "weilmmp/fan.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "weilmmp/lp.hpp"

namespace weilmmp {

namespace {

bool lex_less_vec(const IntVec& a, const IntVec& b) {
  for (Index i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return a(i) < b(i);
  return false;
}

}  // namespace

IntVec ray(const Fan& f, int i) { return f.rays.row(i).transpose(); }

PolyhedralCone cone_of(const Fan& f, const std::vector<int>& ray_indices) {
  IntMat rows(static_cast<Index>(ray_indices.size()), f.rank);
  for (size_t i = 0; i < ray_indices.size(); ++i)
    rows.row(static_cast<Index>(i)) = f.rays.row(ray_indices[i]);
  return dd_convert(cone_from_rays(rows, f.rank));
}

PolyhedralCone max_cone(const Fan& f, size_t i) { return cone_of(f, f.max_cones[i]); }

namespace {

// facets of a cone as sorted lists of the generating ray indices (relative
// to the given index list), paired with the facet covector
struct FacetInfo {
  std::vector<int> rays;  // global ray indices
  IntVec covector;
};

std::vector<FacetInfo> facets_of(const Fan& f, const std::vector<int>& idx,
                                 const PolyhedralCone& cone) {
  std::vector<FacetInfo> out;
  for (Index h = 0; h < cone.halfspaces.rows(); ++h) {
    FacetInfo fi;
    fi.covector = cone.halfspaces.row(h).transpose();
    for (int r : idx) {
      Int s = 0;
      for (Index j = 0; j < f.rank; ++j) s += cone.halfspaces(h, j) * f.rays(r, j);
      if (s == 0) fi.rays.push_back(r);
    }
    std::sort(fi.rays.begin(), fi.rays.end());
    out.push_back(std::move(fi));
  }
  std::sort(out.begin(), out.end(),
            [](const FacetInfo& a, const FacetInfo& b) { return a.rays < b.rays; });
  return out;
}

// minimal face of `cone` containing the point p (p inside the cone)
PolyhedralCone minimal_face_containing(const PolyhedralCone& cone, const IntVec& p) {
  std::vector<IntVec> eqs;
  for (Index h = 0; h < cone.halfspaces.rows(); ++h) {
    Int s = 0;
    for (Index j = 0; j < cone.ambient; ++j) s += cone.halfspaces(h, j) * p(j);
    if (s == 0) eqs.push_back(cone.halfspaces.row(h).transpose());
  }
  PolyhedralCone out = cone;
  out.canonical = false;
  out.has_v = false;
  IntMat extra(static_cast<Index>(eqs.size()), cone.ambient);
  for (size_t i = 0; i < eqs.size(); ++i) extra.row(static_cast<Index>(i)) = eqs[i].transpose();
  IntMat alleq(cone.equalities.rows() + extra.rows(), cone.ambient);
  if (cone.equalities.rows() > 0) alleq.topRows(cone.equalities.rows()) = cone.equalities;
  if (extra.rows() > 0) alleq.bottomRows(extra.rows()) = extra;
  out.equalities = alleq;
  return dd_convert(out);
}

bool is_common_face(const PolyhedralCone& a, const PolyhedralCone& b) {
  const PolyhedralCone inter = intersect(a, b);
  if (is_zero_cone(inter)) return true;  // the origin is a face of every strongly convex cone
  const IntVec p = relative_interior_point(inter);
  return cones_equal(minimal_face_containing(a, p), inter) &&
         cones_equal(minimal_face_containing(b, p), inter);
}

}  // namespace

std::vector<FanViolation> validate_fan(const Fan& f) {
  std::vector<FanViolation> out;
  if (f.rays.cols() != f.rank && f.rays.rows() > 0) {
    out.push_back({"BadRayWidth", "ray entries do not match the lattice rank"});
    return out;
  }
  for (Index i = 0; i < f.rays.rows(); ++i) {
    IntVec v = f.rays.row(i).transpose();
    if (gcd_of_entries(v) == 0) {
      out.push_back({"ZeroRay", "ray " + std::to_string(i) + " is zero"});
      continue;
    }
    if (gcd_of_entries(v) != 1)
      out.push_back({"NonPrimitiveRay", "ray " + std::to_string(i) + " is not primitive"});
    for (Index j = i + 1; j < f.rays.rows(); ++j)
      if (f.rays.row(i) == f.rays.row(j))
        out.push_back({"DuplicateRay",
                       "rays " + std::to_string(i) + " and " + std::to_string(j) + " coincide"});
  }
  if (!out.empty()) return out;

  for (size_t c = 0; c < f.max_cones.size(); ++c) {
    const std::vector<int>& idx = f.max_cones[c];
    if (idx.empty()) {
      out.push_back({"EmptyCone", "maximal cone " + std::to_string(c) + " lists no rays"});
      continue;
    }
    std::set<int> uniq(idx.begin(), idx.end());
    if (uniq.size() != idx.size() || *uniq.begin() < 0 ||
        *uniq.rbegin() >= static_cast<int>(f.rays.rows())) {
      out.push_back({"BadConeIndex", "maximal cone " + std::to_string(c) + " has bad indices"});
      continue;
    }
    const PolyhedralCone cone = cone_of(f, idx);
    if (cone.lineality.rows() > 0) {
      out.push_back({"NotStronglyConvex", "maximal cone " + std::to_string(c)});
      continue;
    }
    if (cone.rays.rows() != static_cast<Index>(idx.size()))
      out.push_back({"RayNotExtremal",
                     "maximal cone " + std::to_string(c) + " lists a non-extremal ray"});
    for (Index r = 0; r < f.rays.rows(); ++r) {
      if (uniq.count(static_cast<int>(r))) continue;
      if (contains(cone, IntVec(f.rays.row(r).transpose())))
        out.push_back({"StrayRayInCone", "ray " + std::to_string(r) + " lies in maximal cone " +
                                             std::to_string(c) + " but is not listed"});
    }
  }
  if (!out.empty()) return out;

  for (size_t a = 0; a < f.max_cones.size(); ++a)
    for (size_t b = a + 1; b < f.max_cones.size(); ++b) {
      const PolyhedralCone ca = max_cone(f, a);
      const PolyhedralCone cb = max_cone(f, b);
      std::set<int> sa(f.max_cones[a].begin(), f.max_cones[a].end());
      std::set<int> sb(f.max_cones[b].begin(), f.max_cones[b].end());
      if (std::includes(sa.begin(), sa.end(), sb.begin(), sb.end()) ||
          std::includes(sb.begin(), sb.end(), sa.begin(), sa.end())) {
        // genuine containment of cones, not just index sets
        bool a_in_b = true, b_in_a = true;
        for (int r : f.max_cones[a])
          if (!contains(cb, IntVec(f.rays.row(r).transpose()))) a_in_b = false;
        for (int r : f.max_cones[b])
          if (!contains(ca, IntVec(f.rays.row(r).transpose()))) b_in_a = false;
        if (a_in_b || b_in_a) {
          out.push_back({"NestedMaxCones", "maximal cones " + std::to_string(a) + " and " +
                                               std::to_string(b) + " are nested"});
          continue;
        }
      }
      if (!is_common_face(ca, cb))
        out.push_back({"BadIntersection", "maximal cones " + std::to_string(a) + " and " +
                                              std::to_string(b) +
                                              " do not meet in a common face"});
    }
  return out;
}

bool is_valid_fan(const Fan& f) { return validate_fan(f).empty(); }

bool is_simplicial(const Fan& f) {
  for (const auto& idx : f.max_cones) {
    IntMat rows(static_cast<Index>(idx.size()), f.rank);
    for (size_t i = 0; i < idx.size(); ++i) rows.row(static_cast<Index>(i)) = f.rays.row(idx[i]);
    if (int_rank(rows) != static_cast<Index>(idx.size())) return false;
  }
  return true;
}

bool is_complete(const Fan& f) {
  if (f.rank == 0) return true;
  std::vector<PolyhedralCone> cones;
  for (size_t c = 0; c < f.max_cones.size(); ++c) {
    cones.push_back(max_cone(f, c));
    if (cone_dim(cones.back()) != f.rank) return false;
  }
  // complete iff no maximal cone has a boundary facet
  for (size_t c = 0; c < f.max_cones.size(); ++c) {
    const std::vector<FacetInfo> fs = facets_of(f, f.max_cones[c], cones[c]);
    for (const FacetInfo& facet : fs) {
      int sharers = 0;
      for (size_t d = 0; d < f.max_cones.size(); ++d) {
        if (d == c) continue;
        bool inside = true;
        for (int r : facet.rays)
          if (!contains(cones[d], IntVec(f.rays.row(r).transpose()))) {
            inside = false;
            break;
          }
        // a facet with no rays is the origin facet of a 1-dimensional cone
        if (facet.rays.empty()) {
          IntVec zero = IntVec::Zero(f.rank);
          inside = contains(cones[d], zero);
        }
        if (inside) ++sharers;
      }
      if (sharers != 1) return false;
    }
  }
  return true;
}

Fan canonical_fan(const Fan& f) {
  std::vector<std::pair<IntVec, int>> order;
  for (Index i = 0; i < f.rays.rows(); ++i) order.push_back({f.rays.row(i).transpose(), static_cast<int>(i)});
  std::sort(order.begin(), order.end(),
            [](const auto& a, const auto& b) { return lex_less_vec(a.first, b.first); });
  std::vector<int> newindex(order.size());
  Fan out;
  out.rank = f.rank;
  out.rays = IntMat(f.rays.rows(), f.rank);
  for (size_t i = 0; i < order.size(); ++i) {
    out.rays.row(static_cast<Index>(i)) = order[i].first.transpose();
    newindex[static_cast<size_t>(order[i].second)] = static_cast<int>(i);
  }
  for (const auto& cone : f.max_cones) {
    std::vector<int> c;
    for (int r : cone) c.push_back(newindex[static_cast<size_t>(r)]);
    std::sort(c.begin(), c.end());
    out.max_cones.push_back(c);
  }
  std::sort(out.max_cones.begin(), out.max_cones.end());
  return out;
}

bool fans_equal(const Fan& a, const Fan& b) {
  const Fan ca = canonical_fan(a);
  const Fan cb = canonical_fan(b);
  return ca.rank == cb.rank && ca.rays == cb.rays && ca.max_cones == cb.max_cones;
}

ClassGroup class_group(const Fan& f) {
  if (int_rank(f.rays) != f.rank)
    throw Error("RaysDegenerate", "rays do not span the ambient lattice");
  const SmithNormalForm snf = smith_normal_form(f.rays);
  const Index r = snf.rank();
  const Index nrays = f.rays.rows();
  ClassGroup out;
  out.rank = nrays - r;
  for (Index i = 0; i < r; ++i)
    if (snf.S(i, i) > 1) out.torsion.push_back(snf.S(i, i));
  out.class_map = RatMat(out.rank, nrays);
  for (Index i = 0; i < out.rank; ++i)
    for (Index j = 0; j < nrays; ++j) out.class_map(i, j) = Rat(snf.U(r + i, j));
  const RatMat uinv = rat_inverse(to_rat(snf.U));
  out.lift_map = IntMat(nrays, out.rank);
  for (Index i = 0; i < nrays; ++i)
    for (Index j = 0; j < out.rank; ++j) out.lift_map(i, j) = rat_num(uinv(i, r + j));
  return out;
}

FanMorphism refinement_morphism(const Fan& source, const Fan& target) {
  FanMorphism m;
  m.source = source;
  m.target = target;
  m.lattice_map = IntMat::Identity(source.rank, source.rank);
  m.kind = FanMorphism::Kind::Refinement;
  return m;
}

FanMorphism identity_morphism(const Fan& f) { return refinement_morphism(f, f); }

namespace {

std::set<std::vector<Int>> ray_set(const Fan& f) {
  std::set<std::vector<Int>> s;
  for (Index i = 0; i < f.rays.rows(); ++i) {
    std::vector<Int> v;
    for (Index j = 0; j < f.rank; ++j) v.push_back(f.rays(i, j));
    s.insert(v);
  }
  return s;
}

// do the given full-dimensional cones of `f` subdivide `target` exactly?
// (facet matching: every facet of a piece lies on the boundary of the target
// or is shared with exactly one other piece)
bool pieces_subdivide(const Fan& f, const std::vector<std::vector<int>>& pieces,
                      const PolyhedralCone& target, const Fan& target_fan,
                      const std::vector<int>& target_idx) {
  if (pieces.empty()) return false;
  const std::vector<FacetInfo> target_facets = facets_of(target_fan, target_idx, target);
  std::map<std::vector<int>, int> wall_count;
  for (const auto& piece : pieces) {
    const PolyhedralCone pc = cone_of(f, piece);
    for (const FacetInfo& facet : facets_of(f, piece, pc)) {
      // boundary facet: supported by a facet covector of the target
      bool boundary = false;
      for (Index h = 0; h < target.halfspaces.rows(); ++h) {
        bool all_tight = true;
        for (int r : facet.rays) {
          Int s = 0;
          for (Index j = 0; j < f.rank; ++j) s += target.halfspaces(h, j) * f.rays(r, j);
          if (s != 0) {
            all_tight = false;
            break;
          }
        }
        if (all_tight && !facet.rays.empty()) {
          boundary = true;
          break;
        }
      }
      if (!boundary) wall_count[facet.rays] += 1;
    }
  }
  for (const auto& [wall, count] : wall_count)
    if (count != 2) return false;
  return true;
}

}  // namespace

std::vector<FanViolation> check_refinement(const FanMorphism& m) {
  std::vector<FanViolation> out;
  if (m.kind == FanMorphism::Kind::Refinement) {
    if (m.source.rank != m.target.rank ||
        m.lattice_map != IntMat::Identity(m.source.rank, m.source.rank))
      out.push_back({"NonIdentityMap", "refinement must carry the identity lattice map"});
    // each target ray must persist in the source
    const auto src_rays = ray_set(m.source);
    for (Index i = 0; i < m.target.rays.rows(); ++i) {
      std::vector<Int> v;
      for (Index j = 0; j < m.target.rank; ++j) v.push_back(m.target.rays(i, j));
      if (!src_rays.count(v))
        out.push_back({"MissingRay", "target ray " + std::to_string(i) + " absent in source"});
    }
    if (!out.empty()) return out;
    for (size_t tc = 0; tc < m.target.max_cones.size(); ++tc) {
      const PolyhedralCone target = max_cone(m.target, tc);
      std::vector<std::vector<int>> inside;
      for (const auto& sc : m.source.max_cones) {
        bool in = true;
        for (int r : sc)
          if (!contains(target, IntVec(m.source.rays.row(r).transpose()))) {
            in = false;
            break;
          }
        if (in) inside.push_back(sc);
      }
      // target cone must be subdivided by the source cones inside it
      std::vector<int> tidx = m.target.max_cones[tc];
      // express target cone in source indexing for boundary tests
      if (!pieces_subdivide(m.source, inside, target, m.target, tidx))
        out.push_back({"TargetNotCovered",
                       "target cone " + std::to_string(tc) + " is not exactly subdivided"});
    }
    // every source cone must land inside some target cone
    for (size_t sc = 0; sc < m.source.max_cones.size(); ++sc) {
      bool nested = false;
      for (size_t tc = 0; tc < m.target.max_cones.size() && !nested; ++tc) {
        const PolyhedralCone target = max_cone(m.target, tc);
        nested = true;
        for (int r : m.source.max_cones[sc])
          if (!contains(target, IntVec(m.source.rays.row(r).transpose()))) {
            nested = false;
            break;
          }
      }
      if (!nested)
        out.push_back({"ConeNotNested",
                       "source cone " + std::to_string(sc) + " is not inside a target cone"});
    }
  } else {
    if (m.lattice_map.rows() != m.target.rank || m.lattice_map.cols() != m.source.rank)
      out.push_back({"BadLatticeMap", "lattice map shape mismatch"});
    else
      for (size_t sc = 0; sc < m.source.max_cones.size(); ++sc) {
        bool nested = false;
        for (size_t tc = 0; tc < m.target.max_cones.size() && !nested; ++tc) {
          const PolyhedralCone target = max_cone(m.target, tc);
          nested = true;
          for (int r : m.source.max_cones[sc]) {
            IntVec img = m.lattice_map * IntVec(m.source.rays.row(r).transpose());
            if (!contains(target, img)) {
              nested = false;
              break;
            }
          }
        }
        if (!nested)
          out.push_back({"ImageNotInCone", "image of source cone " + std::to_string(sc) +
                                               " lies in no target cone"});
      }
  }
  return out;
}

bool is_small(const FanMorphism& m) {
  if (m.kind != FanMorphism::Kind::Refinement) return false;
  if (!check_refinement(m).empty()) return false;
  return ray_set(m.source) == ray_set(m.target);
}

namespace {

using RayList = std::vector<int>;
using Subdivision = std::vector<RayList>;

// all subdivisions of one maximal cone using only its own rays
std::vector<Subdivision> cone_subdivisions(const Fan& f, const RayList& sigma) {
  const PolyhedralCone big = cone_of(f, sigma);
  const Index d = cone_dim(big);
  if (static_cast<Index>(sigma.size()) == d) return {{sigma}};

  // candidate full-dimensional subcones spanned by subsets of the rays
  std::vector<RayList> cands;
  const size_t n = sigma.size();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    RayList s;
    for (size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) s.push_back(sigma[i]);
    if (static_cast<Index>(s.size()) < d) continue;
    const PolyhedralCone c = cone_of(f, s);
    if (cone_dim(c) != d) continue;
    if (c.rays.rows() != static_cast<Index>(s.size())) continue;  // non-extremal generator
    bool stray = false;
    for (int r : sigma) {
      if (std::find(s.begin(), s.end(), r) != s.end()) continue;
      if (contains(c, IntVec(f.rays.row(r).transpose()))) {
        stray = true;
        break;
      }
    }
    if (!stray) cands.push_back(s);
  }
  std::sort(cands.begin(), cands.end());

  std::vector<PolyhedralCone> cand_cones;
  std::vector<std::vector<FacetInfo>> cand_facets;
  for (const RayList& s : cands) {
    cand_cones.push_back(cone_of(f, s));
    cand_facets.push_back(facets_of(f, s, cand_cones.back()));
  }
  const std::vector<FacetInfo> big_facets = facets_of(f, sigma, big);

  auto is_boundary = [&](const std::vector<int>& wall) {
    for (Index h = 0; h < big.halfspaces.rows(); ++h) {
      bool tight = true;
      for (int r : wall) {
        Int s = 0;
        for (Index j = 0; j < f.rank; ++j) s += big.halfspaces(h, j) * f.rays(r, j);
        if (s != 0) {
          tight = false;
          break;
        }
      }
      if (tight) return true;
    }
    return false;
  };

  auto compatible = [&](size_t a, size_t b) {
    const PolyhedralCone inter = intersect(cand_cones[a], cand_cones[b]);
    if (cone_dim(inter) >= d) return false;  // overlapping interiors
    if (is_zero_cone(inter)) return true;
    const IntVec p = relative_interior_point(inter);
    return cones_equal(minimal_face_containing(cand_cones[a], p), inter) &&
           cones_equal(minimal_face_containing(cand_cones[b], p), inter);
  };

  std::set<Subdivision> found;
  std::vector<size_t> chosen;
  auto record = [&]() {
    Subdivision s;
    for (size_t i : chosen) s.push_back(cands[i]);
    std::sort(s.begin(), s.end());
    found.insert(s);
  };

  std::function<void()> dfs = [&]() {
    // first unmatched interior wall
    std::map<std::vector<int>, int> wall_count;
    for (size_t i : chosen)
      for (const FacetInfo& facet : cand_facets[i])
        if (!is_boundary(facet.rays)) wall_count[facet.rays] += 1;
    const std::vector<int>* open_wall = nullptr;
    for (const auto& [wall, count] : wall_count) {
      if (count > 2) return;  // dead branch
      if (count == 1) {
        open_wall = &wall;
        break;
      }
    }
    if (!open_wall) {
      record();
      return;
    }
    for (size_t c = 0; c < cands.size(); ++c) {
      if (std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
      bool has_wall = false;
      for (const FacetInfo& facet : cand_facets[c])
        if (facet.rays == *open_wall) {
          has_wall = true;
          break;
        }
      if (!has_wall) continue;
      bool ok = true;
      for (size_t i : chosen)
        if (!compatible(c, i)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      chosen.push_back(c);
      dfs();
      chosen.pop_back();
    }
  };

  // seed on the first facet of the big cone
  const FacetInfo& seed_facet = big_facets.front();
  for (size_t c = 0; c < cands.size(); ++c) {
    bool has = false;
    for (const FacetInfo& facet : cand_facets[c])
      if (facet.rays == seed_facet.rays) {
        has = true;
        break;
      }
    if (!has) continue;
    chosen.assign(1, c);
    dfs();
  }

  std::vector<Subdivision> out(found.begin(), found.end());
  std::sort(out.begin(), out.end(), [](const Subdivision& a, const Subdivision& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

}  // namespace

std::vector<Fan> small_refinements(const Fan& f) {
  std::vector<std::vector<Subdivision>> per_cone;
  for (const auto& sigma : f.max_cones) per_cone.push_back(cone_subdivisions(f, sigma));

  std::vector<Fan> out;
  std::vector<size_t> pick(per_cone.size(), 0);
  for (;;) {
    Fan cand;
    cand.rank = f.rank;
    cand.rays = f.rays;
    for (size_t c = 0; c < per_cone.size(); ++c)
      for (const RayList& piece : per_cone[c][pick[c]]) {
        RayList p = piece;
        std::sort(p.begin(), p.end());
        cand.max_cones.push_back(p);
      }
    std::sort(cand.max_cones.begin(), cand.max_cones.end());
    if (validate_fan(cand).empty()) out.push_back(cand);
    // advance the product counter
    size_t i = 0;
    for (; i < pick.size(); ++i) {
      if (++pick[i] < per_cone[i].size()) break;
      pick[i] = 0;
    }
    if (i == pick.size()) break;
  }
  std::sort(out.begin(), out.end(), [](const Fan& a, const Fan& b) {
    if (a.max_cones.size() != b.max_cones.size()) return a.max_cones.size() < b.max_cones.size();
    return a.max_cones < b.max_cones;
  });
  return out;
}

std::vector<RatVec> relative_convexity_rows(const Fan& base, const Fan& refinement) {
  std::vector<RatVec> rows;
  const Index nrays = refinement.rays.rows();
  for (const auto& sigma : base.max_cones) {
    const PolyhedralCone big = cone_of(base, sigma);
    // refinement rays inside this cone, in refinement indexing
    std::vector<int> inside_rays;
    for (Index r = 0; r < nrays; ++r)
      if (contains(big, IntVec(refinement.rays.row(r).transpose())))
        inside_rays.push_back(static_cast<int>(r));
    for (const auto& tau : refinement.max_cones) {
      bool nested = true;
      for (int r : tau)
        if (!contains(big, IntVec(refinement.rays.row(r).transpose()))) {
          nested = false;
          break;
        }
      if (!nested) continue;
      RatMat vt(static_cast<Index>(tau.size()), refinement.rank);
      for (size_t i = 0; i < tau.size(); ++i)
        for (Index j = 0; j < refinement.rank; ++j) vt(static_cast<Index>(i), j) = Rat(refinement.rays(tau[i], j));
      for (int r : inside_rays) {
        if (std::find(tau.begin(), tau.end(), r) != tau.end()) continue;
        const auto c = rat_solve(vt.transpose(), to_rat(IntVec(refinement.rays.row(r).transpose())));
        if (!c) throw Error("Internal", "subcone does not span its parent");
        RatVec row = RatVec::Zero(nrays);
        row(r) = 1;
        for (size_t i = 0; i < tau.size(); ++i) row(tau[i]) -= (*c)(static_cast<Index>(i));
        rows.push_back(row);
      }
    }
  }
  return rows;
}

bool certificate_is_strictly_convex(const Fan& base, const Fan& refinement,
                                    const IntVec& values) {
  for (const RatVec& row : relative_convexity_rows(base, refinement)) {
    Rat s = 0;
    for (Index j = 0; j < row.size(); ++j) s += row(j) * Rat(values(j));
    if (s <= 0) return false;
  }
  return true;
}

QFactorializationList small_projective_qfactorializations(const Fan& f) {
  QFactorializationList out;
  for (const Fan& cand : small_refinements(f)) {
    if (!is_simplicial(cand)) continue;
    const std::vector<RatVec> rows = relative_convexity_rows(f, cand);
    LinearSystem sys;
    sys.ineq_lhs = IntMat(static_cast<Index>(rows.size()), cand.rays.rows());
    for (size_t i = 0; i < rows.size(); ++i)
      sys.ineq_lhs.row(static_cast<Index>(i)) = scale_to_int(rows[i]).transpose();
    sys.ineq_rhs = RatVec::Ones(sys.ineq_lhs.rows());
    sys.eq_lhs = IntMat(0, cand.rays.rows());
    sys.eq_rhs = RatVec(0);
    const LexLpResult lp = lex_min_vertex(sys, cand.rays.rows());
    if (!lp.feasible) {
      ++out.irregular_excluded;
      continue;
    }
    QFactorialization q;
    q.fan = cand;
    q.morphism = refinement_morphism(cand, f);
    q.certificate = scale_to_int(lp.vertex);
    out.models.push_back(std::move(q));
  }
  return out;
}

std::string fan_key(const Fan& f) {
  // raw serialization: ray order matters to callers caching per-index data
  std::ostringstream os;
  os << f.rank << ";";
  for (Index i = 0; i < f.rays.rows(); ++i) {
    for (Index j = 0; j < f.rank; ++j) os << f.rays(i, j).get_str() << ",";
    os << "|";
  }
  os << ";";
  for (const auto& cone : f.max_cones) {
    for (int r : cone) os << r << ",";
    os << "|";
  }
  return os.str();
}

}  // namespace weilmmp
