#pragma once

#include "weilmmp/exactla.hpp"

namespace weilmmp {

/// {x : ineq_lhs x >= ineq_rhs, eq_lhs x = eq_rhs}, all data exact.
struct LinearSystem {
  IntMat ineq_lhs;
  RatVec ineq_rhs;
  IntMat eq_lhs;
  RatVec eq_rhs;
};

struct LexLpResult {
  bool feasible = false;
  RatVec vertex;  // lexicographically smallest vertex of the (pinned) polyhedron
};

/// Exact feasibility via double description of the homogenization. When the
/// feasible set has lineality it is pinned to the canonical orthogonal slice
/// first, so the returned vertex is deterministic.
LexLpResult lex_min_vertex(const LinearSystem& sys, Index nvars);

inline bool feasible(const LinearSystem& sys, Index nvars) {
  return lex_min_vertex(sys, nvars).feasible;
}

}  // namespace weilmmp
