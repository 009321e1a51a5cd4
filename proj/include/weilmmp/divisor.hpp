#pragma once

#include <optional>
#include <string>
#include <vector>

#include "weilmmp/fan.hpp"

namespace weilmmp {

/// Weil divisor on a fan: one exact rational coefficient per ray.
struct WeilDivisor {
  Fan fan;
  RatVec coeffs;
};

WeilDivisor make_divisor(const Fan& f, const RatVec& coeffs);
WeilDivisor prime_divisor(const Fan& f, int ray_index);
WeilDivisor zero_divisor(const Fan& f);
/// K_X = -sum of the prime toric divisors: coefficient -1 on every ray.
WeilDivisor canonical_divisor(const Fan& f);

WeilDivisor dsum(const WeilDivisor& a, const WeilDivisor& b);
WeilDivisor dscale(const Rat& s, const WeilDivisor& a);

/// Class in Cl (x) Q coordinates of the fan's class group.
RatVec class_of(const WeilDivisor& d);
RatVec class_of(const ClassGroup& cg, const RatVec& coeffs);

struct CartierLevel {
  enum class Kind { NotQCartier, QCartier, Cartier } kind;
  Int index = 1;            // minimal k with kD Cartier (when Q-Cartier)
  std::string obstruction;  // cone witnessing failure, when not Q-Cartier
};

CartierLevel cartier_level(const WeilDivisor& d);

/// Per-maximal-cone linear data u_sigma with <u_sigma, v_rho> = -a_rho on the
/// cone's rays; nullopt when some cone admits no rational solution.
std::optional<std::vector<RatVec>> support_data(const WeilDivisor& d);

struct QCartierization {
  Fan model;              // Y, a small refinement of d.fan
  FanMorphism morphism;   // Y -> X
  WeilDivisor transform;  // strict transform: same coefficients on Y
};

/// The unique small projective model on which the strict transform is
/// Q-Cartier and relatively ample; identity when d is already Q-Cartier.
QCartierization q_cartierization(const WeilDivisor& d);

/// Refinements copy coefficients onto the shared rays; quotients transport
/// them to the primitive images of the surviving rays.
WeilDivisor pushforward(const WeilDivisor& d, const FanMorphism& f);

struct PositivityVerdict {
  enum class Kind { Yes, No, Unknown } kind;
  std::string certificate;
  bool yes() const { return kind == Kind::Yes; }
  bool no() const { return kind == Kind::No; }
};

PositivityVerdict is_nef(const WeilDivisor& d);
PositivityVerdict is_relatively_nef(const WeilDivisor& d, const FanMorphism& f);
PositivityVerdict is_ample(const WeilDivisor& d);
PositivityVerdict is_relatively_ample(const WeilDivisor& d, const FanMorphism& f);
PositivityVerdict is_big(const WeilDivisor& d);
PositivityVerdict is_pseff(const WeilDivisor& d);

/// Inequalities <u, v_rho> >= rhs_rho, globally or over one cone.
struct SectionPolyhedron {
  IntMat normals;
  RatVec rhs;
};

SectionPolyhedron section_polyhedron(const WeilDivisor& d, const Int& m);
SectionPolyhedron local_section_polyhedron(const WeilDivisor& d, const Int& m, size_t cone);

/// Dimension of the affine hull, -1 for the empty polyhedron.
Index affine_dim(const SectionPolyhedron& p);
std::vector<RatVec> polyhedron_vertices(const SectionPolyhedron& p);
/// All lattice points of a bounded polyhedron. Throws
/// Error("SearchBudget") past the lattice search cap.
std::vector<IntVec> lattice_points(const SectionPolyhedron& p);

/// Hilbert basis of the dual semigroup of a full-dimensional cone.
std::vector<IntVec> hilbert_basis_of_dual(const PolyhedralCone& cone);

/// Minimal generators of the local section module over one maximal cone.
std::vector<IntVec> local_module_generators(const WeilDivisor& d, const Int& m, size_t cone);

struct GenerationResult {
  enum class Kind { Yes, No, Unknown } kind;
  std::string certificate;
};

/// Level-m global generation of O(mD): every local module generator is a
/// global section plus a dual-semigroup element.
GenerationResult is_globally_generated(const WeilDivisor& d, const Int& m);

struct AggOptions {
  int schedule_steps = 8;   // m in {m*, 2m*, ..., steps * m*}
  int theorem_max_a = 8;    // a tested for the nef-and-big sufficient path
};

PositivityVerdict is_agg(const WeilDivisor& d, const AggOptions& opt = {});

/// Lattice enumeration cap (overridden by WEILMMP_MAX_LATTICE_SEARCH).
long lattice_search_budget();

}  // namespace weilmmp
