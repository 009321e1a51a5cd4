#pragma once

#include <string>
#include <vector>

#include "weilmmp/exactla.hpp"

namespace weilmmp {

/// Rational polyhedral cone, stored with integral data (generators and
/// covectors are scaled primitive). Either representation may be absent
/// until canonicalize() is applied; canonical cones carry both, with
/// pointed rays / facet covectors lex-sorted and lineality / equality
/// lattices in Hermite form, so cones compare by structural equality.
struct PolyhedralCone {
  Index ambient = 0;
  bool has_v = false;
  IntMat lineality;   // rows: basis of the lineality lattice
  IntMat rays;        // rows: pointed generators
  bool has_h = false;
  IntMat equalities;  // rows: e with <e,x> = 0 on the cone
  IntMat halfspaces;  // rows: h with <h,x> >= 0 on the cone
  bool canonical = false;
};

struct VRep {
  IntMat lineality;
  IntMat rays;
};
struct HRep {
  IntMat equalities;
  IntMat halfspaces;
};

/// Double description: minimal V-representation of
/// {x : equalities x = 0, halfspaces x >= 0}.
VRep rays_from_halfspaces(const HRep& h, Index ambient);
HRep halfspaces_from_rays(const VRep& v, Index ambient);

PolyhedralCone cone_from_rays(const IntMat& rays, Index ambient);
PolyhedralCone cone_from_rays(const RatMat& rays, Index ambient);
PolyhedralCone cone_from_halfspaces(const IntMat& halfspaces, Index ambient);
PolyhedralCone cone_from_rep(const VRep& v, Index ambient);
PolyhedralCone cone_from_rep(const HRep& h, Index ambient);
PolyhedralCone zero_cone(Index ambient);
PolyhedralCone full_cone(Index ambient);

/// Ensures both representations are present, consistent and canonical.
PolyhedralCone dd_convert(const PolyhedralCone& c);
inline PolyhedralCone canonicalize(const PolyhedralCone& c) { return dd_convert(c); }

bool cones_equal(const PolyhedralCone& a, const PolyhedralCone& b);
bool is_zero_cone(const PolyhedralCone& c);
Index cone_dim(const PolyhedralCone& c);
Index lineality_dim(const PolyhedralCone& c);

PolyhedralCone dual_cone(const PolyhedralCone& c);

/// Minimal generators of a pointed cone, primitive, lex-sorted.
/// Throws Error("HasLineality") otherwise.
IntMat extremal_rays(const PolyhedralCone& c);

struct Face {
  IntMat generators;            // rows: extremal rays of the face
  IntVec support;               // covector: >= 0 on parent, = 0 exactly here
  Index dim = 0;
  std::vector<int> ray_indices; // into extremal_rays(parent)
};

/// All faces of a pointed cone, {0} and the cone itself included,
/// ordered by dimension then lexicographically.
std::vector<Face> faces(const PolyhedralCone& c);

PolyhedralCone intersect(const PolyhedralCone& a, const PolyhedralCone& b);
PolyhedralCone minkowski_sum(const PolyhedralCone& a, const PolyhedralCone& b);

bool contains(const PolyhedralCone& c, const RatVec& x);
bool contains(const PolyhedralCone& c, const IntVec& x);

/// Deterministic point in the relative interior (sum of the pointed
/// generators). Throws Error("ZeroCone") on the zero cone.
IntVec relative_interior_point(const PolyhedralCone& c);

/// Integral covector vanishing on F and strictly positive on the extremal
/// rays of W; the lexicographically smallest vertex of the exact feasibility
/// polyhedron {h : h|F = 0, <h, r> >= 1}, cleared to primitive integral form.
/// Throws Error("NotSeparable") when span(F) meets W outside the origin or
/// no separator exists.
IntVec strict_separator(const Face& f, const PolyhedralCone& w);

/// Rows spanning the linear span of the cone.
IntMat span_basis(const PolyhedralCone& c);

}  // namespace weilmmp
