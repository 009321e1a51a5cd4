#include "weilmmp/mmp.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "weilmmp/lp.hpp"

namespace weilmmp {

namespace {

Fan point_fan() {
  Fan f;
  f.rank = 0;
  f.rays = IntMat(0, 0);
  return f;
}

// fan of the generic fiber: intersections of the maximal cones with the
// kernel subspace, in coordinates of the kernel lattice
Fan generic_fiber_fan(const Fan& total, const IntMat& kernel_basis) {
  Fan out;
  out.rank = kernel_basis.rows();
  if (out.rank == 0) return point_fan();
  std::vector<std::vector<Int>> rays;
  std::vector<std::vector<int>> cones;
  const RatMat kb = to_rat(kernel_basis).transpose();  // columns
  VRep span_rep;
  span_rep.lineality = kernel_basis;
  span_rep.rays = IntMat(0, total.rank);
  const PolyhedralCone span_cone = dd_convert(cone_from_rep(span_rep, total.rank));
  for (size_t c = 0; c < total.max_cones.size(); ++c) {
    const PolyhedralCone slice = intersect(max_cone(total, c), span_cone);
    const IntMat srays = extremal_rays(slice);
    std::vector<int> cone_idx;
    for (Index i = 0; i < srays.rows(); ++i) {
      const auto t = rat_solve(kb, to_rat(IntVec(srays.row(i).transpose())));
      if (!t) throw Error("Internal", "fiber ray outside the kernel lattice span");
      const IntVec v = primitive(scale_to_int(*t));
      std::vector<Int> key;
      for (Index j = 0; j < out.rank; ++j) key.push_back(v(j));
      int idx = -1;
      for (size_t k = 0; k < rays.size(); ++k)
        if (rays[k] == key) {
          idx = static_cast<int>(k);
          break;
        }
      if (idx < 0) {
        idx = static_cast<int>(rays.size());
        rays.push_back(key);
      }
      cone_idx.push_back(idx);
    }
    if (!cone_idx.empty()) {
      std::sort(cone_idx.begin(), cone_idx.end());
      cones.push_back(cone_idx);
    }
  }
  out.rays = IntMat(static_cast<Index>(rays.size()), out.rank);
  for (size_t i = 0; i < rays.size(); ++i)
    for (Index j = 0; j < out.rank; ++j) out.rays(static_cast<Index>(i), j) = rays[i][static_cast<size_t>(j)];
  // keep only maximal slices
  std::sort(cones.begin(), cones.end());
  cones.erase(std::unique(cones.begin(), cones.end()), cones.end());
  std::vector<std::vector<int>> maximal;
  for (const auto& a : cones) {
    bool contained = false;
    for (const auto& b : cones) {
      if (a == b) continue;
      if (std::includes(b.begin(), b.end(), a.begin(), a.end())) {
        contained = true;
        break;
      }
    }
    if (!contained) maximal.push_back(a);
  }
  out.max_cones = maximal;
  return out;
}

// projectivity of a complete fan: a strictly convex support function exists
bool has_strictly_convex_support(const Fan& f) {
  if (f.rank == 0) return true;
  std::vector<RatVec> rows = absolute_convexity_rows(f);
  LinearSystem sys;
  sys.ineq_lhs = IntMat(static_cast<Index>(rows.size()), f.rays.rows());
  for (size_t i = 0; i < rows.size(); ++i)
    sys.ineq_lhs.row(static_cast<Index>(i)) = scale_to_int(rows[i]).transpose();
  sys.ineq_rhs = RatVec::Ones(sys.ineq_lhs.rows());
  sys.eq_lhs = IntMat(0, f.rays.rows());
  sys.eq_rhs = RatVec(0);
  return lex_min_vertex(sys, f.rays.rows()).feasible;
}

}  // namespace

ContractionDiagram contract_face(const Fan& f, const Face& g) {
  ContractionDiagram out;
  out.source = f;
  out.support = supporting_divisor(f, g);  // validates the face

  const QCartierization qc = q_cartierization(out.support);
  out.middle = qc.model;
  out.f = qc.morphism;
  out.transform = qc.transform;
  if (!is_small(out.f)) throw Error("Internal", "Q-Cartierization is not small");
  if (!is_nef(out.transform).yes())
    throw Error("Internal", "transform of the supporting divisor is not nef");

  out.rho_source = ns_w(f).rho;
  out.rho_middle = ns_w(out.middle).rho;
  if (out.rho_middle > out.rho_source + 1)
    throw Error("Internal", "Picard rank grows by more than one on the small model");

  // the face, embedded in the curve space of the middle model, is cut out by
  // the transform's class and is rational there
  {
    const WeilCones& wcm = weil_cones(out.middle);
    const RatVec cls = class_of(out.transform);
    const IntMat mrays = extremal_rays(wcm.ne_w);
    std::vector<int> cut;
    for (Index i = 0; i < mrays.rows(); ++i) {
      Rat s = 0;
      for (Index j = 0; j < cls.size(); ++j) s += cls(j) * Rat(mrays(i, j));
      if (s == 0) cut.push_back(static_cast<int>(i));
    }
    std::optional<Face> embedded;
    for (const Face& face : faces(wcm.ne_w))
      if (face.ray_indices == cut) {
        embedded = face;
        break;
      }
    if (!embedded) throw Error("Internal", "transform class cuts no face of the middle curves");
    PolyhedralCone face_cone = dd_convert(cone_from_rays(g.generators, cls.size()));
    PolyhedralCone emb_cone = dd_convert(cone_from_rays(embedded->generators, cls.size()));
    if (!cones_equal(face_cone, emb_cone))
      throw Error("Internal", "face does not embed as the cut face on the middle model");
    out.face_rational_on_middle = is_rational_face(out.middle, *embedded);
    if (!out.face_rational_on_middle)
      throw Error("Internal", "embedded face is not rational on the middle model");
  }

  // glue the linearity domains of the support function
  const auto u = support_data(out.transform);
  std::vector<RatVec> distinct;
  for (const RatVec& ui : *u) {
    bool seen = false;
    for (const RatVec& uj : distinct)
      if (uj == ui) {
        seen = true;
        break;
      }
    if (!seen) distinct.push_back(ui);
  }
  std::vector<PolyhedralCone> domains;
  bool pointed = true;
  for (const RatVec& ui : distinct) {
    IntMat half(static_cast<Index>(distinct.size()) - 1, f.rank);
    Index row = 0;
    for (const RatVec& uj : distinct) {
      if (uj == ui) continue;
      half.row(row++) = scale_to_int(RatVec(uj - ui)).transpose();
    }
    const PolyhedralCone dom = dd_convert(cone_from_halfspaces(half, f.rank));
    if (dom.lineality.rows() > 0) pointed = false;
    domains.push_back(dom);
  }

  if (distinct.size() == u->size() && pointed &&
      static_cast<size_t>(distinct.size()) == out.middle.max_cones.size()) {
    // no gluing at all: the support is ample and nothing is contracted
    out.target = out.middle;
    out.phi = identity_morphism(out.middle);
    out.fiber_type = false;
    out.step_kind = "embedding";
    return out;
  }

  if (pointed) {
    // birational: domains are the maximal cones of the target fan
    std::vector<std::vector<Int>> rays;
    std::vector<std::vector<int>> cones;
    for (const PolyhedralCone& dom : domains) {
      const IntMat drays = extremal_rays(dom);
      std::vector<int> cone_idx;
      for (Index i = 0; i < drays.rows(); ++i) {
        std::vector<Int> key;
        for (Index j = 0; j < f.rank; ++j) key.push_back(drays(i, j));
        int idx = -1;
        for (size_t k = 0; k < rays.size(); ++k)
          if (rays[k] == key) {
            idx = static_cast<int>(k);
            break;
          }
        if (idx < 0) {
          idx = static_cast<int>(rays.size());
          rays.push_back(key);
        }
        cone_idx.push_back(idx);
      }
      std::sort(cone_idx.begin(), cone_idx.end());
      cones.push_back(cone_idx);
    }
    Fan y;
    y.rank = f.rank;
    y.rays = IntMat(static_cast<Index>(rays.size()), f.rank);
    for (size_t i = 0; i < rays.size(); ++i)
      for (Index j = 0; j < f.rank; ++j) y.rays(static_cast<Index>(i), j) = rays[i][static_cast<size_t>(j)];
    std::sort(cones.begin(), cones.end());
    y.max_cones = cones;
    if (!validate_fan(y).empty()) throw Error("Internal", "glued target is not a fan");
    out.target = y;
    out.phi = refinement_morphism(out.middle, y);
    if (!check_refinement(out.phi).empty())
      throw Error("Internal", "middle model does not refine the glued target");
    out.fiber_type = false;
    out.step_kind = is_small(out.phi) ? "small" : "divisorial";
    return out;
  }

  // fiber type: quotient by the annihilator of the section polyhedron span
  const std::vector<RatVec> verts = polyhedron_vertices(section_polyhedron(out.transform, 1));
  if (verts.empty()) throw Error("Internal", "nef divisor with empty section polyhedron");
  IntMat span_rows(static_cast<Index>(verts.size()) - 1, f.rank);
  for (size_t i = 1; i < verts.size(); ++i)
    span_rows.row(static_cast<Index>(i - 1)) = scale_to_int(RatVec(verts[i] - verts[0])).transpose();
  const IntMat kernel =
      integer_kernel_basis(span_rows.rows() > 0 ? span_rows : IntMat::Zero(1, f.rank));

  const AdaptedBasis ab = adapted_basis(kernel, f.rank);
  const Index l = ab.rank;  // dimension of the annihilator
  const RatMat tinv = rat_inverse(to_rat(ab.basis));
  IntMat proj(f.rank - l, f.rank);
  for (Index i = 0; i < f.rank - l; ++i)
    for (Index j = 0; j < f.rank; ++j) proj(i, j) = rat_num(tinv(l + i, j));

  Fan y;
  if (f.rank - l == 0) {
    y = point_fan();
  } else {
    std::vector<std::vector<Int>> rays;
    std::vector<std::vector<int>> cones;
    for (const PolyhedralCone& dom : domains) {
      IntMat gens(dom.rays.rows() + 2 * dom.lineality.rows(), f.rank);
      gens.topRows(dom.rays.rows()) = dom.rays;
      gens.middleRows(dom.rays.rows(), dom.lineality.rows()) = dom.lineality;
      gens.bottomRows(dom.lineality.rows()) = -dom.lineality;
      IntMat img(gens.rows(), f.rank - l);
      for (Index i = 0; i < gens.rows(); ++i)
        img.row(i) = (proj * IntVec(gens.row(i).transpose())).transpose();
      const PolyhedralCone image = dd_convert(cone_from_rays(img, f.rank - l));
      if (image.lineality.rows() > 0)
        throw Error("Internal", "image of a linearity domain is not strongly convex");
      const IntMat irays = extremal_rays(image);
      std::vector<int> cone_idx;
      for (Index i = 0; i < irays.rows(); ++i) {
        std::vector<Int> key;
        for (Index j = 0; j < f.rank - l; ++j) key.push_back(irays(i, j));
        int idx = -1;
        for (size_t k = 0; k < rays.size(); ++k)
          if (rays[k] == key) {
            idx = static_cast<int>(k);
            break;
          }
        if (idx < 0) {
          idx = static_cast<int>(rays.size());
          rays.push_back(key);
        }
        cone_idx.push_back(idx);
      }
      std::sort(cone_idx.begin(), cone_idx.end());
      if (!cone_idx.empty()) cones.push_back(cone_idx);
    }
    std::sort(cones.begin(), cones.end());
    cones.erase(std::unique(cones.begin(), cones.end()), cones.end());
    // drop cones contained in others
    std::vector<std::vector<int>> maximal;
    for (const auto& a : cones) {
      bool contained = false;
      for (const auto& b : cones) {
        if (a == b) continue;
        if (std::includes(b.begin(), b.end(), a.begin(), a.end())) {
          contained = true;
          break;
        }
      }
      if (!contained) maximal.push_back(a);
    }
    y.rank = f.rank - l;
    y.rays = IntMat(static_cast<Index>(rays.size()), y.rank);
    for (size_t i = 0; i < rays.size(); ++i)
      for (Index j = 0; j < y.rank; ++j) y.rays(static_cast<Index>(i), j) = rays[i][static_cast<size_t>(j)];
    y.max_cones = maximal;
    if (!validate_fan(y).empty()) throw Error("Internal", "fiber target is not a fan");
  }

  out.target = y;
  out.phi.source = out.middle;
  out.phi.target = y;
  out.phi.lattice_map = proj;
  out.phi.kind = FanMorphism::Kind::Quotient;
  if (y.rank > 0 && !check_refinement(out.phi).empty())
    throw Error("Internal", "middle cones do not map into the fiber target");
  out.fiber_type = true;
  out.step_kind = "fiber";

  const Fan fiber = generic_fiber_fan(out.middle, kernel);
  out.fiber_log_fano = is_complete(fiber) && has_strictly_convex_support(fiber);
  return out;
}

std::pair<Fan, FanMorphism> qfactorialization_with_nef_K(const Fan& f) {
  const QFactorializationList qf = small_projective_qfactorializations(f);
  for (const QFactorialization& q : qf.models) {
    const WeilDivisor k = canonical_divisor(q.fan);
    if (is_relatively_nef(k, q.morphism).yes()) return {q.fan, q.morphism};
  }
  throw Error("Internal", "no Q-factorialization with relatively nef canonical divisor");
}

std::string selector_name(Selector s) {
  switch (s) {
    case Selector::MaxFace:
      return "max-face";
    case Selector::RayFirst:
      return "ray-first";
    case Selector::Callback:
      return "interactive";
  }
  return "?";
}

std::optional<Selector> selector_from_name(const std::string& name) {
  if (name == "max-face") return Selector::MaxFace;
  if (name == "ray-first") return Selector::RayFirst;
  if (name == "interactive" || name == "interactive-callback") return Selector::Callback;
  return std::nullopt;
}

std::string fan_fingerprint(const Fan& f) {
  std::ostringstream os;
  os << "r" << f.rank << ";n" << f.rays.rows() << ";c" << f.max_cones.size();
  std::vector<size_t> sizes;
  for (const auto& c : f.max_cones) sizes.push_back(c.size());
  std::sort(sizes.begin(), sizes.end());
  os << ";s";
  for (size_t s : sizes) os << s << ",";
  std::vector<int> degrees(static_cast<size_t>(f.rays.rows()), 0);
  for (const auto& c : f.max_cones)
    for (int r : c) degrees[static_cast<size_t>(r)] += 1;
  std::sort(degrees.begin(), degrees.end());
  os << ";d";
  for (int d : degrees) os << d << ",";
  if (f.rank > 0 && f.rays.rows() > 0) {
    const ClassGroup cg = class_group(f);
    os << ";cl" << cg.rank << "t";
    for (const Int& t : cg.torsion) os << t.get_str() << ",";
  }
  return os.str();
}

FanEquivalence equivalent_fans(const Fan& a, const Fan& b, long attempt_bound) {
  if (fan_fingerprint(a) != fan_fingerprint(b)) return FanEquivalence::No;
  if (a.rank == 0) return FanEquivalence::Yes;
  const Fan ca = canonical_fan(a);
  const Fan cb = canonical_fan(b);
  if (ca.rays == cb.rays && ca.max_cones == cb.max_cones) return FanEquivalence::Yes;

  // anchor: first linearly independent ray tuple of a
  std::vector<int> anchor;
  {
    IntMat acc(0, a.rank);
    for (Index i = 0; i < ca.rays.rows() && static_cast<Index>(anchor.size()) < ca.rank; ++i) {
      IntMat trial(acc.rows() + 1, ca.rank);
      if (acc.rows() > 0) trial.topRows(acc.rows()) = acc;
      trial.row(acc.rows()) = ca.rays.row(i);
      if (int_rank(trial) > acc.rows()) {
        acc = trial;
        anchor.push_back(static_cast<int>(i));
      }
    }
    if (static_cast<Index>(anchor.size()) != ca.rank)
      throw Error("RaysDegenerate", "fan comparison needs spanning rays");
  }
  RatMat amat(ca.rank, ca.rank);
  for (size_t i = 0; i < anchor.size(); ++i)
    for (Index j = 0; j < ca.rank; ++j) amat(static_cast<Index>(i), j) = Rat(ca.rays(anchor[i], j));
  const RatMat ainv = rat_inverse(amat);

  const std::set<std::vector<Int>> brayset = [&] {
    std::set<std::vector<Int>> s;
    for (Index i = 0; i < cb.rays.rows(); ++i) {
      std::vector<Int> v;
      for (Index j = 0; j < cb.rank; ++j) v.push_back(cb.rays(i, j));
      s.insert(v);
    }
    return s;
  }();
  const std::set<std::vector<std::vector<Int>>> bconeset = [&] {
    std::set<std::vector<std::vector<Int>>> s;
    for (const auto& c : cb.max_cones) {
      std::vector<std::vector<Int>> cone;
      for (int r : c) {
        std::vector<Int> v;
        for (Index j = 0; j < cb.rank; ++j) v.push_back(cb.rays(r, j));
        cone.push_back(v);
      }
      std::sort(cone.begin(), cone.end());
      s.insert(cone);
    }
    return s;
  }();

  long attempts = 0;
  const Index n = ca.rank;
  std::vector<int> image(static_cast<size_t>(n), -1);
  std::vector<bool> used(static_cast<size_t>(cb.rays.rows()), false);
  bool exhausted_bound = false;

  std::function<bool(size_t)> search = [&](size_t level) -> bool {
    if (++attempts > attempt_bound) {
      exhausted_bound = true;
      return false;
    }
    if (level == anchor.size()) {
      RatMat bmat(n, n);
      for (size_t i = 0; i < anchor.size(); ++i)
        for (Index j = 0; j < n; ++j) bmat(static_cast<Index>(i), j) = Rat(cb.rays(image[i], j));
      // solve M with M * a_i = b_i: M = bmat^T * ainv^T
      const RatMat m = bmat.transpose() * ainv.transpose();
      IntMat mi(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
          if (rat_den(m(i, j)) != 1) return false;
          mi(i, j) = rat_num(m(i, j));
        }
      if (!is_unimodular(mi)) return false;
      // rays map bijectively onto rays
      for (Index r = 0; r < ca.rays.rows(); ++r) {
        const IntVec img = mi * IntVec(ca.rays.row(r).transpose());
        std::vector<Int> key;
        for (Index j = 0; j < n; ++j) key.push_back(img(j));
        if (!brayset.count(key)) return false;
      }
      // cones map onto cones
      for (const auto& c : ca.max_cones) {
        std::vector<std::vector<Int>> cone;
        for (int r : c) {
          const IntVec img = mi * IntVec(ca.rays.row(r).transpose());
          std::vector<Int> key;
          for (Index j = 0; j < n; ++j) key.push_back(img(j));
          cone.push_back(key);
        }
        std::sort(cone.begin(), cone.end());
        if (!bconeset.count(cone)) return false;
      }
      return true;
    }
    for (Index cand = 0; cand < cb.rays.rows(); ++cand) {
      if (used[static_cast<size_t>(cand)]) continue;
      image[level] = static_cast<int>(cand);
      used[static_cast<size_t>(cand)] = true;
      if (search(level + 1)) return true;
      used[static_cast<size_t>(cand)] = false;
      if (exhausted_bound) return false;
    }
    return false;
  };

  if (search(0)) return FanEquivalence::Yes;
  return exhausted_bound ? FanEquivalence::Inconclusive : FanEquivalence::No;
}

CycleScan detect_cycle(const MmpTrace& trace) {
  CycleScan out;
  for (size_t i = 0; i < trace.steps.size(); ++i) {
    for (size_t j = i + 1; j < trace.steps.size(); ++j) {
      const FanEquivalence eq = equivalent_fans(trace.steps[i].model, trace.steps[j].model);
      if (eq == FanEquivalence::Yes) {
        if (!out.cycle) out.cycle = {static_cast<int>(i), static_cast<int>(j)};
      } else if (eq == FanEquivalence::Inconclusive) {
        out.possible_cycles.push_back({static_cast<int>(i), static_cast<int>(j)});
      }
    }
    if (out.cycle) break;
  }
  return out;
}

MmpTrace run_mmp(const Fan& f, Selector selector, const MmpLimits& limits,
                 const FaceChooser& chooser) {
  MmpTrace trace;
  trace.selector = selector_name(selector);
  Fan current = f;

  for (int step = 0;; ++step) {
    if (step >= limits.max_steps) {
      trace.status = "inconclusive";
      trace.final_model = current;
      return trace;
    }
    // cycle check against the recorded models
    for (size_t i = 0; i < trace.steps.size(); ++i) {
      const FanEquivalence eq = equivalent_fans(trace.steps[i].model, current);
      if (eq == FanEquivalence::Yes) {
        trace.status = "cycle-detected";
        trace.cycle = {static_cast<int>(i), step};
        trace.final_model = current;
        return trace;
      }
      if (eq == FanEquivalence::Inconclusive)
        trace.possible_cycles.push_back({static_cast<int>(i), step});
    }

    MmpStep rec;
    rec.model = current;
    rec.fingerprint = fan_fingerprint(current);

    const WeilDivisor k = canonical_divisor(current);
    if (is_nef(k).yes()) {
      rec.action = "qfactorialize";
      auto [xhat, morphism] = qfactorialization_with_nef_K(current);
      rec.qfact_model = xhat;
      trace.steps.push_back(std::move(rec));
      trace.status = "minimal-model";
      trace.final_model = xhat;
      return trace;
    }

    std::vector<Face> offered;
    for (const Face& face : k_negative_extremal_faces(current))
      if (face.dim >= 1) offered.push_back(face);
    if (offered.empty()) throw Error("Internal", "K not nef but no K-negative face found");

    int pick = -1;
    switch (selector) {
      case Selector::MaxFace: {
        Index best = -1;
        for (size_t i = 0; i < offered.size(); ++i)
          if (offered[i].dim > best) {
            best = offered[i].dim;
            pick = static_cast<int>(i);
          }
        break;
      }
      case Selector::RayFirst: {
        for (size_t i = 0; i < offered.size(); ++i)
          if (offered[i].dim == 1) {
            pick = static_cast<int>(i);
            break;
          }
        if (pick < 0) pick = 0;
        break;
      }
      case Selector::Callback: {
        if (!chooser) throw Error("NoChooser", "interactive selector without a chooser");
        pick = chooser(current, offered);
        if (pick < 0) {
          trace.status = "user-abort";
          trace.final_model = current;
          return trace;
        }
        if (pick >= static_cast<int>(offered.size()))
          throw Error("BadChoice", "face index out of range");
        break;
      }
    }

    rec.action = "contract";
    rec.face_index = pick;
    rec.face_dim = offered[static_cast<size_t>(pick)].dim;
    rec.face_generators = offered[static_cast<size_t>(pick)].generators;
    rec.diagram = contract_face(current, offered[static_cast<size_t>(pick)]);
    rec.fiber_log_fano = rec.diagram.fiber_log_fano;
    trace.steps.push_back(std::move(rec));
    const ContractionDiagram& diagram = trace.steps.back().diagram;

    if (diagram.fiber_type) {
      if (limits.restart_on_fiber && diagram.target.rank >= 1) {
        current = diagram.target;
        continue;
      }
      trace.status = "mori-fiber-space";
      trace.final_model = diagram.target;
      return trace;
    }
    current = diagram.target;
  }
}

}  // namespace weilmmp
