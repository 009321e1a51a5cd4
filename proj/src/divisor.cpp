#include "weilmmp/divisor.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

namespace weilmmp {

namespace {

std::string vec_str(const RatVec& v) {
  std::ostringstream os;
  os << "(";
  for (Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << format_rat(v(i));
  os << ")";
  return os.str();
}

std::string vec_str(const IntVec& v) { return vec_str(to_rat(v)); }

}  // namespace

long lattice_search_budget() {
  if (const char* env = std::getenv("WEILMMP_MAX_LATTICE_SEARCH")) {
    const long v = std::atol(env);
    if (v > 0) return v;
  }
  return 4000000;
}

WeilDivisor make_divisor(const Fan& f, const RatVec& coeffs) {
  if (coeffs.size() != f.rays.rows())
    throw Error("BadCoefficients", "coefficient count differs from ray count");
  return WeilDivisor{f, coeffs};
}

WeilDivisor prime_divisor(const Fan& f, int ray_index) {
  RatVec c = RatVec::Zero(f.rays.rows());
  c(ray_index) = 1;
  return WeilDivisor{f, c};
}

WeilDivisor zero_divisor(const Fan& f) { return WeilDivisor{f, RatVec::Zero(f.rays.rows())}; }

WeilDivisor canonical_divisor(const Fan& f) {
  RatVec c = RatVec::Constant(f.rays.rows(), Rat(-1));
  return WeilDivisor{f, c};
}

WeilDivisor dsum(const WeilDivisor& a, const WeilDivisor& b) {
  if (!fans_equal(a.fan, b.fan)) throw Error("FanMismatch", "sum of divisors on different fans");
  return WeilDivisor{a.fan, a.coeffs + b.coeffs};
}

WeilDivisor dscale(const Rat& s, const WeilDivisor& a) {
  return WeilDivisor{a.fan, RatVec(s * a.coeffs)};
}

RatVec class_of(const ClassGroup& cg, const RatVec& coeffs) { return cg.class_map * coeffs; }

RatVec class_of(const WeilDivisor& d) { return class_of(class_group(d.fan), d.coeffs); }

std::optional<std::vector<RatVec>> support_data(const WeilDivisor& d) {
  std::vector<RatVec> out;
  for (const auto& sigma : d.fan.max_cones) {
    RatMat rows(static_cast<Index>(sigma.size()), d.fan.rank);
    RatVec rhs(static_cast<Index>(sigma.size()));
    for (size_t i = 0; i < sigma.size(); ++i) {
      for (Index j = 0; j < d.fan.rank; ++j) rows(static_cast<Index>(i), j) = Rat(d.fan.rays(sigma[i], j));
      rhs(static_cast<Index>(i)) = -d.coeffs(sigma[i]);
    }
    const auto u = rat_solve(rows, rhs);
    if (!u) return std::nullopt;
    out.push_back(*u);
  }
  return out;
}

CartierLevel cartier_level(const WeilDivisor& d) {
  CartierLevel out;
  Int k = 1;
  for (size_t c = 0; c < d.fan.max_cones.size(); ++c) {
    const auto& sigma = d.fan.max_cones[c];
    IntMat rows(static_cast<Index>(sigma.size()), d.fan.rank);
    RatVec rhs(static_cast<Index>(sigma.size()));
    for (size_t i = 0; i < sigma.size(); ++i) {
      rows.row(static_cast<Index>(i)) = d.fan.rays.row(sigma[i]);
      rhs(static_cast<Index>(i)) = -d.coeffs(sigma[i]);
    }
    if (!rat_solve(to_rat(rows), rhs)) {
      out.kind = CartierLevel::Kind::NotQCartier;
      out.obstruction = "no rational support function on maximal cone " + std::to_string(c);
      return out;
    }
    // minimal k with an integral solution of <u, v> = -k a on this cone:
    // with S = U A V, solutions need k * (U(-a))_i / d_i integral
    const SmithNormalForm snf = smith_normal_form(rows);
    const Index r = snf.rank();
    RatVec w(rows.rows());
    for (Index i = 0; i < rows.rows(); ++i) {
      Rat s = 0;
      for (Index j = 0; j < rows.rows(); ++j) s += Rat(snf.U(i, j)) * rhs(j);
      w(i) = s;
    }
    for (Index i = 0; i < r; ++i) {
      const Rat need = w(i) / Rat(snf.S(i, i));  // k * need must be integral
      k = lcm(k, rat_den(need));
    }
  }
  out.index = k;
  out.kind = k == 1 ? CartierLevel::Kind::Cartier : CartierLevel::Kind::QCartier;
  return out;
}

namespace {

// memoized small refinements per fan
const std::vector<Fan>& cached_small_refinements(const Fan& f) {
  static std::map<std::string, std::vector<Fan>> cache;
  const std::string key = fan_key(f);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, small_refinements(f)).first;
  return it->second;
}

const std::vector<RatVec>& cached_convexity_rows(const Fan& base, const Fan& refinement) {
  static std::map<std::string, std::vector<RatVec>> cache;
  const std::string key = fan_key(base) + "/" + fan_key(refinement);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, relative_convexity_rows(base, refinement)).first;
  return it->second;
}

bool cached_is_complete(const Fan& f) {
  static std::map<std::string, bool> cache;
  const std::string key = fan_key(f);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, is_complete(f)).first;
  return it->second;
}

bool is_q_cartier_on(const WeilDivisor& d) { return support_data(d).has_value(); }

// strict transform of d onto a small refinement sharing the ray matrix
WeilDivisor transform_to(const WeilDivisor& d, const Fan& model) {
  if (model.rays == d.fan.rays) return WeilDivisor{model, d.coeffs};
  RatVec c(model.rays.rows());
  for (Index i = 0; i < model.rays.rows(); ++i) {
    bool found = false;
    for (Index j = 0; j < d.fan.rays.rows(); ++j)
      if (model.rays.row(i) == d.fan.rays.row(j)) {
        c(i) = d.coeffs(j);
        found = true;
        break;
      }
    if (!found) throw Error("RayMismatch", "model does not share the divisor's rays");
  }
  return WeilDivisor{model, c};
}

}  // namespace

QCartierization q_cartierization(const WeilDivisor& d) {
  for (const Fan& cand : cached_small_refinements(d.fan)) {
    const WeilDivisor dy = transform_to(d, cand);
    if (!is_q_cartier_on(dy)) continue;
    bool strictly_convex = true;
    for (const RatVec& row : cached_convexity_rows(d.fan, cand)) {
      Rat s = 0;
      for (Index j = 0; j < row.size(); ++j) s += row(j) * dy.coeffs(j);
      if (s <= 0) {
        strictly_convex = false;
        break;
      }
    }
    if (!strictly_convex) continue;
    QCartierization out;
    out.model = cand;
    out.morphism = refinement_morphism(cand, d.fan);
    out.transform = dy;
    return out;
  }
  throw Error("NoQCartierization",
              "no small refinement carries the divisor as Q-Cartier relatively ample");
}

WeilDivisor pushforward(const WeilDivisor& d, const FanMorphism& f) {
  if (!fans_equal(d.fan, f.source))
    throw Error("FanMismatch", "divisor does not live on the morphism source");
  if (f.kind == FanMorphism::Kind::Refinement) {
    RatVec c(f.target.rays.rows());
    for (Index i = 0; i < f.target.rays.rows(); ++i) {
      bool found = false;
      for (Index j = 0; j < d.fan.rays.rows(); ++j)
        if (f.target.rays.row(i) == d.fan.rays.row(j)) {
          c(i) = d.coeffs(j);
          found = true;
          break;
        }
      if (!found) throw Error("RayImageMissing", "target ray absent from source fan");
    }
    return WeilDivisor{f.target, c};
  }
  RatVec c = RatVec::Zero(f.target.rays.rows());
  for (Index j = 0; j < d.fan.rays.rows(); ++j) {
    IntVec img = f.lattice_map * IntVec(d.fan.rays.row(j).transpose());
    if (gcd_of_entries(img) == 0) continue;  // contracted ray
    const IntVec p = primitive(img);
    bool found = false;
    for (Index i = 0; i < f.target.rays.rows(); ++i)
      if (f.target.rays.row(i).transpose() == p) {
        c(i) += d.coeffs(j);
        found = true;
        break;
      }
    if (!found) throw Error("RayImageMissing", "surviving ray image is not a target ray");
  }
  return WeilDivisor{f.target, c};
}

PositivityVerdict is_nef(const WeilDivisor& d) {
  if (!cached_is_complete(d.fan)) throw Error("RequiresComplete", "absolute nefness test");
  const QCartierization qc = q_cartierization(d);
  const auto u = support_data(qc.transform);
  const Fan& y = qc.model;
  for (size_t c = 0; c < y.max_cones.size(); ++c)
    for (Index r = 0; r < y.rays.rows(); ++r) {
      Rat s = 0;
      for (Index j = 0; j < y.rank; ++j) s += (*u)[c](j) * Rat(y.rays(r, j));
      if (s < -qc.transform.coeffs(r))
        return {PositivityVerdict::Kind::No,
                "support function fails convexity at ray " + vec_str(IntVec(y.rays.row(r).transpose())) +
                    " against cone " + std::to_string(c) + " on the Q-Cartierization"};
    }
  return {PositivityVerdict::Kind::Yes,
          "convex support function on the Q-Cartierization with " +
              std::to_string(y.max_cones.size()) + " maximal cones"};
}

PositivityVerdict is_ample(const WeilDivisor& d) {
  if (!cached_is_complete(d.fan)) throw Error("RequiresComplete", "absolute ampleness test");
  const QCartierization qc = q_cartierization(d);
  const auto u = support_data(qc.transform);
  const Fan& y = qc.model;
  for (size_t c = 0; c < y.max_cones.size(); ++c) {
    const std::set<int> in_cone(y.max_cones[c].begin(), y.max_cones[c].end());
    for (Index r = 0; r < y.rays.rows(); ++r) {
      if (in_cone.count(static_cast<int>(r))) continue;
      Rat s = 0;
      for (Index j = 0; j < y.rank; ++j) s += (*u)[c](j) * Rat(y.rays(r, j));
      if (s <= -qc.transform.coeffs(r))
        return {PositivityVerdict::Kind::No,
                "support function not strictly convex at ray " +
                    vec_str(IntVec(y.rays.row(r).transpose())) + " against cone " +
                    std::to_string(c)};
    }
  }
  return {PositivityVerdict::Kind::Yes, "strictly convex support function on the Q-Cartierization"};
}

namespace {

PositivityVerdict relative_positivity(const WeilDivisor& d, const FanMorphism& f, bool strict) {
  if (f.kind != FanMorphism::Kind::Refinement)
    throw Error("UnsupportedMorphism", "relative positivity is defined over refinements");
  if (!fans_equal(d.fan, f.source))
    throw Error("FanMismatch", "divisor does not live on the morphism source");
  const QCartierization qc = q_cartierization(d);
  // qc.model refines d.fan refines f.target
  for (const RatVec& row : cached_convexity_rows(f.target, qc.model)) {
    Rat s = 0;
    for (Index j = 0; j < row.size(); ++j) s += row(j) * qc.transform.coeffs(j);
    if (strict ? s <= 0 : s < 0)
      return {PositivityVerdict::Kind::No,
              std::string("relative wall inequality fails") + (strict ? " strictly" : "")};
  }
  return {PositivityVerdict::Kind::Yes,
          strict ? "relative support function strictly convex over every base cone"
                 : "relative support function convex over every base cone"};
}

}  // namespace

PositivityVerdict is_relatively_nef(const WeilDivisor& d, const FanMorphism& f) {
  return relative_positivity(d, f, false);
}

PositivityVerdict is_relatively_ample(const WeilDivisor& d, const FanMorphism& f) {
  return relative_positivity(d, f, true);
}

SectionPolyhedron section_polyhedron(const WeilDivisor& d, const Int& m) {
  SectionPolyhedron p;
  p.normals = d.fan.rays;
  p.rhs = RatVec(-Rat(m) * d.coeffs);
  return p;
}

SectionPolyhedron local_section_polyhedron(const WeilDivisor& d, const Int& m, size_t cone) {
  const auto& sigma = d.fan.max_cones[cone];
  SectionPolyhedron p;
  p.normals = IntMat(static_cast<Index>(sigma.size()), d.fan.rank);
  p.rhs = RatVec(static_cast<Index>(sigma.size()));
  for (size_t i = 0; i < sigma.size(); ++i) {
    p.normals.row(static_cast<Index>(i)) = d.fan.rays.row(sigma[i]);
    p.rhs(static_cast<Index>(i)) = -Rat(m) * d.coeffs(sigma[i]);
  }
  return p;
}

namespace {

// homogenization cone {(u,t): N u - rhs t >= 0, t >= 0}
PolyhedralCone homogenize(const SectionPolyhedron& p) {
  const Index n = p.normals.cols();
  IntMat rows(p.normals.rows() + 1, n + 1);
  for (Index i = 0; i < p.normals.rows(); ++i) {
    RatVec row(n + 1);
    for (Index j = 0; j < n; ++j) row(j) = Rat(p.normals(i, j));
    row(n) = -p.rhs(i);
    rows.row(i) = scale_to_int(row).transpose();
  }
  rows.row(p.normals.rows()).setZero();
  rows(p.normals.rows(), n) = 1;
  return dd_convert(cone_from_halfspaces(rows, n + 1));
}

}  // namespace

Index affine_dim(const SectionPolyhedron& p) {
  const PolyhedralCone c = homogenize(p);
  const Index n = p.normals.cols();
  bool nonempty = false;
  for (Index i = 0; i < c.rays.rows() && !nonempty; ++i)
    if (c.rays(i, n) > 0) nonempty = true;
  if (!nonempty) return -1;
  return cone_dim(c) - 1;
}

std::vector<RatVec> polyhedron_vertices(const SectionPolyhedron& p) {
  const PolyhedralCone c = homogenize(p);
  const Index n = p.normals.cols();
  std::vector<RatVec> out;
  for (Index i = 0; i < c.rays.rows(); ++i) {
    if (c.rays(i, n) <= 0) continue;
    RatVec v(n);
    for (Index j = 0; j < n; ++j) v(j) = make_rat(c.rays(i, j), c.rays(i, n));
    out.push_back(v);
  }
  return out;
}

namespace {

Int floor_rat(const Rat& r) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), rat_num(r).get_mpz_t(), rat_den(r).get_mpz_t());
  return q;
}

Int ceil_rat(const Rat& r) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), rat_num(r).get_mpz_t(), rat_den(r).get_mpz_t());
  return q;
}

// recursive box enumeration with last-coordinate interval collapse
void enumerate_rec(const SectionPolyhedron& p, const std::vector<std::pair<Int, Int>>& box,
                   IntVec& point, Index level, long& budget, std::vector<IntVec>& out) {
  const Index n = p.normals.cols();
  if (level == n - 1) {
    // bound the last coordinate by every row with nonzero last coefficient
    Int lo = box[static_cast<size_t>(level)].first;
    Int hi = box[static_cast<size_t>(level)].second;
    bool empty = false;
    for (Index i = 0; i < p.normals.rows() && !empty; ++i) {
      Rat partial = -p.rhs(i);
      for (Index j = 0; j + 1 < n; ++j) partial += Rat(p.normals(i, j)) * Rat(point(j));
      const Int c = p.normals(i, n - 1);
      // c * x >= -partial
      if (c == 0) {
        if (partial < 0) empty = true;
      } else if (c > 0) {
        lo = std::max(lo, ceil_rat(-partial / Rat(c)));
      } else {
        hi = std::min(hi, floor_rat(-partial / Rat(c)));
      }
    }
    if (empty) return;
    for (Int x = lo; x <= hi; ++x) {
      if (--budget < 0) throw Error("SearchBudget", "lattice enumeration budget exhausted");
      point(n - 1) = x;
      out.push_back(point);
    }
    return;
  }
  for (Int x = box[static_cast<size_t>(level)].first; x <= box[static_cast<size_t>(level)].second;
       ++x) {
    if (--budget < 0) throw Error("SearchBudget", "lattice enumeration budget exhausted");
    point(level) = x;
    enumerate_rec(p, box, point, level + 1, budget, out);
  }
}

}  // namespace

std::vector<IntVec> lattice_points(const SectionPolyhedron& p) {
  const Index n = p.normals.cols();
  if (n == 0) {
    // empty ambient: the polyhedron is a point iff all constraints hold at 0
    for (Index i = 0; i < p.rhs.size(); ++i)
      if (p.rhs(i) > 0) return {};
    return {IntVec(0)};
  }
  const PolyhedralCone c = homogenize(p);
  // bounded iff the recession cone (rays with t = 0) is trivial
  for (Index i = 0; i < c.rays.rows(); ++i)
    if (c.rays(i, n) == 0) throw Error("Unbounded", "lattice points of an unbounded polyhedron");
  if (c.lineality.rows() > 0) throw Error("Unbounded", "lattice points of an unbounded polyhedron");
  std::vector<std::pair<Int, Int>> box;
  bool empty = true;
  for (Index j = 0; j < n; ++j) {
    Rat lo, hi;
    bool first = true;
    for (Index i = 0; i < c.rays.rows(); ++i) {
      if (c.rays(i, n) <= 0) continue;
      empty = false;
      const Rat v = make_rat(c.rays(i, j), c.rays(i, n));
      if (first || v < lo) lo = v;
      if (first || v > hi) hi = v;
      first = false;
    }
    box.push_back({ceil_rat(lo), floor_rat(hi)});
  }
  if (empty) return {};
  std::vector<IntVec> raw;
  IntVec point(n);
  long budget = lattice_search_budget();
  enumerate_rec(p, box, point, 0, budget, raw);
  // the last-level collapse already enforces rows touching the last
  // coordinate; re-check all rows for safety at other levels
  std::vector<IntVec> out;
  for (const IntVec& u : raw) {
    bool ok = true;
    for (Index i = 0; i < p.normals.rows() && ok; ++i) {
      Rat s = 0;
      for (Index j = 0; j < n; ++j) s += Rat(p.normals(i, j)) * Rat(u(j));
      if (s < p.rhs(i)) ok = false;
    }
    if (ok) out.push_back(u);
  }
  return out;
}

namespace {

std::vector<std::vector<int>> triangulate_cone_indices(const PolyhedralCone& cone) {
  const IntMat rays = extremal_rays(cone);
  const Index d = cone_dim(cone);
  std::vector<std::vector<int>> out;
  if (rays.rows() == d) {
    std::vector<int> all;
    for (Index i = 0; i < rays.rows(); ++i) all.push_back(static_cast<int>(i));
    out.push_back(all);
    return out;
  }
  // pulling triangulation: cone the first ray over the facets avoiding it
  const IntVec apex = rays.row(0).transpose();
  for (Index h = 0; h < cone.halfspaces.rows(); ++h) {
    Int s = 0;
    for (Index j = 0; j < cone.ambient; ++j) s += cone.halfspaces(h, j) * apex(j);
    if (s == 0) continue;  // facet contains the apex
    std::vector<int> tight;
    for (Index r = 0; r < rays.rows(); ++r) {
      Int t = 0;
      for (Index j = 0; j < cone.ambient; ++j) t += cone.halfspaces(h, j) * rays(r, j);
      if (t == 0) tight.push_back(static_cast<int>(r));
    }
    IntMat sub(static_cast<Index>(tight.size()), cone.ambient);
    for (size_t i = 0; i < tight.size(); ++i) sub.row(static_cast<Index>(i)) = rays.row(tight[i]);
    const PolyhedralCone facet = dd_convert(cone_from_rays(sub, cone.ambient));
    for (const auto& piece : triangulate_cone_indices(facet)) {
      std::vector<int> lifted{0};
      const IntMat facet_rays = extremal_rays(facet);
      for (int pi : piece) {
        for (Index r = 0; r < rays.rows(); ++r)
          if (rays.row(r).transpose() == facet_rays.row(pi).transpose()) {
            lifted.push_back(static_cast<int>(r));
            break;
          }
      }
      std::sort(lifted.begin(), lifted.end());
      out.push_back(lifted);
    }
  }
  return out;
}

}  // namespace

std::vector<IntVec> hilbert_basis_of_dual(const PolyhedralCone& cone) {
  static std::map<std::string, std::vector<IntVec>> cache;
  std::ostringstream key;
  const PolyhedralCone cc = dd_convert(cone);
  key << cc.ambient << ";";
  for (Index i = 0; i < cc.rays.rows(); ++i)
    for (Index j = 0; j < cc.ambient; ++j) key << cc.rays(i, j).get_str() << ",";
  auto it = cache.find(key.str());
  if (it != cache.end()) return it->second;

  const PolyhedralCone dual = dual_cone(cc);
  if (dual.lineality.rows() > 0)
    throw Error("HasLineality", "Hilbert basis of a non-pointed dual semigroup");
  const IntMat gens = dual.rays;
  const Index n = cc.ambient;

  std::set<std::vector<Int>> cand_set;
  auto add_cand = [&](const IntVec& v) {
    std::vector<Int> key2;
    for (Index j = 0; j < n; ++j) key2.push_back(v(j));
    cand_set.insert(key2);
  };
  for (Index i = 0; i < gens.rows(); ++i) add_cand(gens.row(i).transpose());

  for (const auto& simplex : triangulate_cone_indices(dual)) {
    IntMat g(static_cast<Index>(simplex.size()), n);
    for (size_t i = 0; i < simplex.size(); ++i) g.row(static_cast<Index>(i)) = gens.row(simplex[i]);
    // lattice points of the half-open parallelepiped of the simplex generators
    std::vector<std::pair<Int, Int>> box;
    for (Index j = 0; j < n; ++j) {
      Int lo = 0, hi = 0;
      for (Index i = 0; i < g.rows(); ++i) {
        if (g(i, j) < 0) lo += g(i, j);
        if (g(i, j) > 0) hi += g(i, j);
      }
      box.push_back({lo, hi});
    }
    const RatMat gt = to_rat(g).transpose();
    IntVec point(n);
    long budget = lattice_search_budget();
    std::function<void(Index)> rec = [&](Index level) {
      if (level == n) {
        const auto t = rat_solve(gt, to_rat(point));
        if (!t) return;
        // inside the half-open parallelepiped, excluding the origin corner
        bool inside = true, zero = true;
        for (Index i = 0; i < t->size(); ++i) {
          if ((*t)(i) < 0 || (*t)(i) >= 1) inside = false;
          if ((*t)(i) != 0) zero = false;
        }
        if (inside && !zero) add_cand(point);
        return;
      }
      for (Int x = box[static_cast<size_t>(level)].first;
           x <= box[static_cast<size_t>(level)].second; ++x) {
        if (--budget < 0) throw Error("SearchBudget", "Hilbert basis enumeration budget");
        point(level) = x;
        rec(level + 1);
      }
    };
    rec(0);
  }

  // reduce to irreducibles, in increasing order of total pairing with the
  // primal rays (strictly positive grading on the dual semigroup)
  std::vector<IntVec> cands;
  for (const auto& v : cand_set) {
    IntVec u(n);
    for (Index j = 0; j < n; ++j) u(j) = v[static_cast<size_t>(j)];
    cands.push_back(u);
  }
  auto grade = [&](const IntVec& u) {
    Int s = 0;
    for (Index i = 0; i < cc.rays.rows(); ++i)
      for (Index j = 0; j < n; ++j) s += cc.rays(i, j) * u(j);
    return s;
  };
  std::sort(cands.begin(), cands.end(), [&](const IntVec& a, const IntVec& b) {
    const Int ga = grade(a), gb = grade(b);
    if (ga != gb) return ga < gb;
    for (Index j = 0; j < n; ++j)
      if (a(j) != b(j)) return a(j) < b(j);
    return false;
  });
  std::vector<IntVec> basis;
  for (const IntVec& c0 : cands) {
    bool reducible = false;
    for (const IntVec& h : basis) {
      IntVec diff = c0 - h;
      if (gcd_of_entries(diff) == 0) continue;  // equal elements
      if (contains(dual, diff)) {
        reducible = true;
        break;
      }
    }
    if (!reducible) basis.push_back(c0);
  }
  cache.emplace(key.str(), basis);
  return basis;
}

std::vector<IntVec> local_module_generators(const WeilDivisor& d, const Int& m, size_t cone) {
  const auto& sigma = d.fan.max_cones[cone];
  const PolyhedralCone sc = cone_of(d.fan, sigma);
  if (cone_dim(sc) != d.fan.rank)
    throw Error("LowerDimensionalCone", "module generators need a full-dimensional cone");
  const std::vector<IntVec> hilbert = hilbert_basis_of_dual(sc);
  const SectionPolyhedron local = local_section_polyhedron(d, m, cone);

  // generators fail domination against every Hilbert element; split the
  // disjunction into one bounded polytope per choice of failing ray
  std::set<std::vector<Int>> found;
  std::vector<size_t> choice(hilbert.size(), 0);
  std::vector<std::vector<Index>> options;
  for (const IntVec& h : hilbert) {
    std::vector<Index> opts;
    for (Index i = 0; i < local.normals.rows(); ++i) {
      Int s = 0;
      for (Index j = 0; j < d.fan.rank; ++j) s += local.normals(i, j) * h(j);
      if (s > 0) opts.push_back(i);
    }
    if (opts.empty()) throw Error("Internal", "Hilbert element pairs zero with every ray");
    options.push_back(opts);
  }

  for (;;) {
    // piece: local polyhedron plus, per Hilbert element, the chosen strict
    // failure <u, v_rho> <= rhs_rho + <h, v_rho> - 1
    SectionPolyhedron piece;
    const Index extra = static_cast<Index>(hilbert.size());
    piece.normals = IntMat(local.normals.rows() + extra, d.fan.rank);
    piece.rhs = RatVec(local.normals.rows() + extra);
    piece.normals.topRows(local.normals.rows()) = local.normals;
    piece.rhs.head(local.normals.rows()) = local.rhs;
    for (size_t h = 0; h < hilbert.size(); ++h) {
      const Index row = options[h][choice[h]];
      Int hv = 0;
      for (Index j = 0; j < d.fan.rank; ++j) hv += local.normals(row, j) * hilbert[h](j);
      piece.normals.row(local.normals.rows() + static_cast<Index>(h)) = -local.normals.row(row);
      piece.rhs(local.normals.rows() + static_cast<Index>(h)) =
          -(local.rhs(row) + Rat(hv) - 1);
    }
    for (const IntVec& u : lattice_points(piece)) {
      std::vector<Int> key;
      for (Index j = 0; j < u.size(); ++j) key.push_back(u(j));
      found.insert(key);
    }
    size_t i = 0;
    for (; i < choice.size(); ++i) {
      if (++choice[i] < options[i].size()) break;
      choice[i] = 0;
    }
    if (i == choice.size()) break;
  }

  std::vector<IntVec> out;
  for (const auto& v : found) {
    IntVec u(d.fan.rank);
    for (Index j = 0; j < d.fan.rank; ++j) u(j) = v[static_cast<size_t>(j)];
    out.push_back(u);
  }
  return out;
}

GenerationResult is_globally_generated(const WeilDivisor& d, const Int& m) {
  for (Index i = 0; i < d.coeffs.size(); ++i)
    if (rat_den(Rat(Rat(m) * d.coeffs(i))) != 1)
      throw Error("NonIntegralLevel", "m D has non-integral coefficients");
  std::vector<IntVec> globals;
  try {
    globals = lattice_points(section_polyhedron(d, m));
  } catch (const Error& e) {
    if (std::string(e.code()) == "SearchBudget")
      return {GenerationResult::Kind::Unknown, "global section enumeration exceeded the budget"};
    throw;
  }
  for (size_t c = 0; c < d.fan.max_cones.size(); ++c) {
    std::vector<IntVec> gens;
    try {
      gens = local_module_generators(d, m, c);
    } catch (const Error& e) {
      if (std::string(e.code()) == "SearchBudget")
        return {GenerationResult::Kind::Unknown, "local generator enumeration exceeded the budget"};
      throw;
    }
    const auto& sigma = d.fan.max_cones[c];
    for (const IntVec& g : gens) {
      bool covered = false;
      for (const IntVec& s : globals) {
        bool dominated = true;
        for (size_t i = 0; i < sigma.size() && dominated; ++i) {
          Int lhs = 0;
          for (Index j = 0; j < d.fan.rank; ++j)
            lhs += d.fan.rays(sigma[i], j) * (g(j) - s(j));
          if (lhs < 0) dominated = false;
        }
        if (dominated) {
          covered = true;
          break;
        }
      }
      if (!covered)
        return {GenerationResult::Kind::No,
                "local section " + vec_str(g) + " on maximal cone " + std::to_string(c) +
                    " is not generated by global sections"};
    }
  }
  return {GenerationResult::Kind::Yes,
          "all local module generators lift to global sections at level " + m.get_str()};
}

PositivityVerdict is_big(const WeilDivisor& d) {
  if (!cached_is_complete(d.fan)) throw Error("RequiresComplete", "bigness test");
  const Index dim = affine_dim(section_polyhedron(d, 1));
  if (dim == d.fan.rank)
    return {PositivityVerdict::Kind::Yes, "section polyhedron has full affine dimension"};
  return {PositivityVerdict::Kind::No,
          "section polyhedron has affine dimension " + std::to_string(dim)};
}

PositivityVerdict is_pseff(const WeilDivisor& d) {
  if (!cached_is_complete(d.fan)) throw Error("RequiresComplete", "pseudo-effectivity test");
  const ClassGroup cg = class_group(d.fan);
  RatMat ray_classes(d.fan.rays.rows(), cg.rank);
  for (Index r = 0; r < d.fan.rays.rows(); ++r) {
    RatVec e = RatVec::Zero(d.fan.rays.rows());
    e(r) = 1;
    ray_classes.row(r) = class_of(cg, e).transpose();
  }
  const PolyhedralCone eff = dd_convert(cone_from_rays(ray_classes, cg.rank));
  if (contains(eff, RatVec(class_of(cg, d.coeffs))))
    return {PositivityVerdict::Kind::Yes, "class lies in the cone of effective classes"};
  return {PositivityVerdict::Kind::No, "class lies outside the cone of effective classes"};
}

PositivityVerdict is_agg(const WeilDivisor& d, const AggOptions& opt) {
  if (!cached_is_complete(d.fan)) throw Error("RequiresComplete", "agg test");
  const PositivityVerdict nef = is_nef(d);
  if (nef.no())
    return {PositivityVerdict::Kind::No, "not nef: " + nef.certificate};

  Int mstar = lcm_of_denominators(d.coeffs);
  {
    const QCartierization qc = q_cartierization(d);
    const CartierLevel lvl = cartier_level(qc.transform);
    mstar *= lvl.index;
  }

  const GenerationResult first = is_globally_generated(d, mstar);
  if (first.kind == GenerationResult::Kind::Yes)
    return {PositivityVerdict::Kind::Yes, "globally generated at m=" + mstar.get_str()};

  const WeilDivisor k = canonical_divisor(d.fan);
  for (int a = 1; a <= opt.theorem_max_a; ++a) {
    const WeilDivisor cand = dsum(dscale(Rat(a), d), dscale(Rat(-1), k));
    if (is_nef(cand).yes() && is_big(cand).yes())
      return {PositivityVerdict::Kind::Yes,
              "nef with aD-K nef and big at a=" + std::to_string(a)};
  }

  bool saw_unknown = first.kind == GenerationResult::Kind::Unknown;
  for (int step = 2; step <= opt.schedule_steps; ++step) {
    const Int m = mstar * step;
    const GenerationResult g = is_globally_generated(d, m);
    if (g.kind == GenerationResult::Kind::Yes)
      return {PositivityVerdict::Kind::Yes, "globally generated at m=" + m.get_str()};
    if (g.kind == GenerationResult::Kind::Unknown) saw_unknown = true;
  }
  std::ostringstream os;
  os << "undecided: schedule m in {";
  for (int step = 1; step <= opt.schedule_steps; ++step)
    os << (step > 1 ? "," : "") << Int(mstar * step).get_str();
  os << "} exhausted, sufficient-condition search up to a=" << opt.theorem_max_a
     << (saw_unknown ? ", with budget-limited levels" : "");
  return {PositivityVerdict::Kind::Unknown, os.str()};
}

}  // namespace weilmmp
