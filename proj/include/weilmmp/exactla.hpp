#pragma once

#include <optional>
#include <vector>

#include "weilmmp/rational.hpp"

namespace weilmmp {

/// S = U * M * V with U, V unimodular and S diagonal, d_i | d_{i+1}, d_i >= 0.
struct SmithNormalForm {
  IntMat S;
  IntMat U;
  IntMat V;
  Index rank() const;
  std::vector<Int> invariant_factors() const;  // the nonzero d_i
};

SmithNormalForm smith_normal_form(const IntMat& m);

/// Lattice basis of {x : M x = 0}; rows of the result. The basis is
/// saturated (spans the kernel lattice, not a finite-index sublattice).
IntMat integer_kernel_basis(const IntMat& m);

/// v / gcd(entries). Throws Error("ZeroVector") on v = 0.
IntVec primitive(const IntVec& v);

Int gcd_of_entries(const IntVec& v);

Index int_rank(const IntMat& m);

// -- exact rational elimination -------------------------------------------

Index rat_rank(const RatMat& m);

/// One solution of A x = b, if any.
std::optional<RatVec> rat_solve(const RatMat& a, const RatVec& b);

/// Basis of {x : A x = 0}, columns of the result.
RatMat rat_kernel(const RatMat& a);

/// Inverse of a square nonsingular matrix; throws on singular input.
RatMat rat_inverse(const RatMat& a);

/// Row-style Hermite normal form of the lattice spanned by the rows:
/// canonical basis usable for structural equality of lattices/subspaces.
IntMat hermite_row_basis(const IntMat& rows);

/// Saturated integral basis (rows) of the rational row span.
IntMat saturate_rows(const IntMat& rows);

/// Unimodular n x n matrix whose first k columns span (the saturation of)
/// the lattice generated by the rows of `rows`; k = rank is returned.
struct AdaptedBasis {
  IntMat basis;  // n x n, unimodular
  Index rank;
};
AdaptedBasis adapted_basis(const IntMat& rows, Index ambient);

bool is_unimodular(const IntMat& m);

}  // namespace weilmmp
