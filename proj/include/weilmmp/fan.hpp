#pragma once

#include <optional>
#include <string>
#include <vector>

#include "weilmmp/cone.hpp"

namespace weilmmp {

/// Complete combinatorial model of a toric variety: primitive rays and
/// maximal cones given as ray index sets.
struct Fan {
  Index rank = 0;
  IntMat rays;                              // rows
  std::vector<std::vector<int>> max_cones;  // sorted ray indices
};

struct FanViolation {
  std::string code;
  std::string detail;
};

std::vector<FanViolation> validate_fan(const Fan& f);
bool is_valid_fan(const Fan& f);

bool is_complete(const Fan& f);
bool is_simplicial(const Fan& f);

/// Fans compare after sorting rays lexicographically and renumbering cones.
Fan canonical_fan(const Fan& f);
bool fans_equal(const Fan& a, const Fan& b);

PolyhedralCone cone_of(const Fan& f, const std::vector<int>& ray_indices);
PolyhedralCone max_cone(const Fan& f, size_t i);
IntVec ray(const Fan& f, int i);

/// Presentation of Cl(X): 0 -> M -> Z^rays -> Cl -> 0 resolved by the
/// Smith normal form of the ray pairing matrix.
struct ClassGroup {
  Index rank = 0;                // free rank of Cl
  std::vector<Int> torsion;      // invariant factors > 1
  RatMat class_map;              // rank x #rays, divisor coeffs -> Cl (x) Q coords
  IntMat lift_map;               // #rays x rank integral section: class_map * lift_map = id
};

ClassGroup class_group(const Fan& f);

struct FanMorphism {
  enum class Kind { Refinement, Quotient };
  Fan source;
  Fan target;
  IntMat lattice_map;  // target rank x source rank (identity for refinements)
  Kind kind = Kind::Refinement;
};

FanMorphism refinement_morphism(const Fan& source, const Fan& target);
FanMorphism identity_morphism(const Fan& f);

std::vector<FanViolation> check_refinement(const FanMorphism& f);
bool is_small(const FanMorphism& f);

/// All fans refining f by subdividing each maximal cone with existing rays
/// only; the input fan itself comes first. Deterministic order by
/// (number of maximal cones, cone lists).
std::vector<Fan> small_refinements(const Fan& f);

struct QFactorialization {
  Fan fan;
  FanMorphism morphism;
  IntVec certificate;  // ray values of a relatively strictly convex support function
};

struct QFactorializationList {
  std::vector<QFactorialization> models;
  int irregular_excluded = 0;  // triangulations without a projectivity certificate
};

/// Simplicial small refinements carrying an exact relative-projectivity
/// certificate; contains the identity when the fan is simplicial.
QFactorializationList small_projective_qfactorializations(const Fan& f);

/// Re-check of a relative strict convexity certificate.
bool certificate_is_strictly_convex(const Fan& base, const Fan& refinement, const IntVec& values);

/// Convexity functionals of a refinement, one per (subcone, ray-of-parent)
/// pair, acting on divisor coefficient vectors of the refinement: a divisor
/// is relatively nef over the base iff every row pairs >= 0 with its
/// coefficients, relatively ample iff strictly positive.
std::vector<RatVec> relative_convexity_rows(const Fan& base, const Fan& refinement);

/// Serialization key for cache maps (rays and cones of the canonical fan).
std::string fan_key(const Fan& f);

}  // namespace weilmmp
