#pragma once

#include "weilmmp/divisor.hpp"

namespace weilmmp {

/// The Weil Neron-Severi space of a complete fan, with the subspace of
/// Q-Cartier classes singled out.
struct NsSpace {
  Fan fan;
  ClassGroup cg;
  Index rho_w = 0;        // dim NS_W = rank Cl (x) Q
  RatMat cartier_basis;   // columns: basis of the Q-Cartier class subspace
  Index rho = 0;          // dim of that subspace
};

NsSpace ns_w(const Fan& f);

/// Weil nef cone together with the tagged per-model nef cones whose union
/// it is, and the dual cone of Weil curves. All cones live in the class
/// coordinates of class_group(fan).
struct WeilCones {
  PolyhedralCone nef_w;
  PolyhedralCone ne_w;
  std::vector<std::pair<std::string, PolyhedralCone>> per_model;
};

const WeilCones& weil_cones(const Fan& f);  // memoized per fan
PolyhedralCone nef_cone_w(const Fan& f);
PolyhedralCone ne_cone_w(const Fan& f);

/// Classical per-wall nef criterion of a simplicial complete fan, one row per
/// (maximal cone, outside ray) pair, acting on divisor coefficient vectors.
std::vector<RatVec> absolute_convexity_rows(const Fan& f);

/// Kleiman test: strict positivity of the class on every extremal ray of the
/// cone of Weil curves.
bool kleiman_ample(const Fan& f, const WeilDivisor& d);

/// Faces of ne_w whose nonzero extremal rays all pair strictly negatively
/// with the canonical class; the zero face is included.
std::vector<Face> k_negative_extremal_faces(const Fan& f);

/// Integral nef divisor vanishing exactly on the face G inside ne_w and
/// strictly positive on the complementary structure cone; deterministic
/// via the lexicographically smallest separator.
WeilDivisor supporting_divisor(const Fan& f, const Face& g);

/// Whether some Q-Cartier class cuts G out of ne_w (exact LP over the
/// Cartier subspace).
bool is_rational_face(const Fan& f, const Face& g);

/// Relative class space of a refinement: wall functionals on divisor
/// coefficient vectors, with a selected independent subset as coordinates.
struct RelativeClassSpace {
  FanMorphism morphism;
  std::vector<RatVec> wall_rows;   // all convexity functionals
  std::vector<size_t> basis_rows;  // independent subset, the coordinates
  Index dim = 0;
};

RelativeClassSpace relative_class_space(const FanMorphism& f);
RatVec relative_class_of(const RelativeClassSpace& rel, const WeilDivisor& d);

/// Relative nef cone in the relative class coordinates (source simplicial).
PolyhedralCone nef_cone_w_relative(const FanMorphism& f);
PolyhedralCone ne_cone_w_relative(const FanMorphism& f);

/// Embedding of the relative curve space into N_1(source)_W, in the dual
/// class coordinates: columns are the images of the relative coordinates.
RatMat relative_curve_embedding(const FanMorphism& f);

}  // namespace weilmmp
