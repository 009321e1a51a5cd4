#include "weilmmp/exactla.hpp"

#include <algorithm>

namespace weilmmp {

Rat parse_rat(const std::string& token) {
  const auto slash = token.find('/');
  const std::string num = token.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : token.substr(slash + 1);
  auto integral = [](const std::string& s) {
    if (s.empty()) return false;
    size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (!isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
  };
  if (!integral(num) || !integral(den))
    throw Error("BadRational", "expected p or p/q, got '" + token + "'");
  return make_rat(Int(num), Int(den));
}

std::string format_rat(const Rat& r) {
  if (rat_den(r) == 1) return rat_num(r).get_str();
  return rat_num(r).get_str() + "/" + rat_den(r).get_str();
}

RatVec to_rat(const IntVec& v) {
  RatVec r(v.size());
  for (Index i = 0; i < v.size(); ++i) r(i) = Rat(v(i));
  return r;
}

RatMat to_rat(const IntMat& m) {
  RatMat r(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) r(i, j) = Rat(m(i, j));
  return r;
}

Int lcm_of_denominators(const RatVec& v) {
  Int l = 1;
  for (Index i = 0; i < v.size(); ++i) l = lcm(l, rat_den(v(i)));
  return l;
}

IntVec scale_to_int(const RatVec& v) {
  const Int l = lcm_of_denominators(v);
  IntVec out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    Rat s = v(i) * Rat(l);
    out(i) = rat_num(s);
  }
  return out;
}

Index SmithNormalForm::rank() const {
  Index r = 0;
  const Index n = std::min(S.rows(), S.cols());
  for (Index i = 0; i < n; ++i)
    if (S(i, i) != 0) ++r;
  return r;
}

std::vector<Int> SmithNormalForm::invariant_factors() const {
  std::vector<Int> d;
  const Index n = std::min(S.rows(), S.cols());
  for (Index i = 0; i < n; ++i)
    if (S(i, i) != 0) d.push_back(S(i, i));
  return d;
}

namespace {

void swap_rows(IntMat& m, IntMat& u, Index a, Index b) {
  m.row(a).swap(m.row(b));
  u.row(a).swap(u.row(b));
}

void swap_cols(IntMat& m, IntMat& v, Index a, Index b) {
  m.col(a).swap(m.col(b));
  v.col(a).swap(v.col(b));
}

void add_row(IntMat& m, IntMat& u, Index dst, Index src, const Int& q) {
  m.row(dst) += q * m.row(src);
  u.row(dst) += q * u.row(src);
}

void add_col(IntMat& m, IntMat& v, Index dst, Index src, const Int& q) {
  m.col(dst) += q * m.col(src);
  v.col(dst) += q * v.col(src);
}

}  // namespace

SmithNormalForm smith_normal_form(const IntMat& m) {
  SmithNormalForm out;
  out.S = m;
  out.U = IntMat::Identity(m.rows(), m.rows());
  out.V = IntMat::Identity(m.cols(), m.cols());
  IntMat& s = out.S;
  const Index nmin = std::min(s.rows(), s.cols());

  for (Index k = 0; k < nmin; ++k) {
    // pivot: smallest nonzero absolute value in the trailing block,
    // ties broken by row-major position so the result is deterministic
    Index pr = -1, pc = -1;
    Int best = 0;
    for (Index i = k; i < s.rows(); ++i)
      for (Index j = k; j < s.cols(); ++j) {
        if (s(i, j) == 0) continue;
        Int a = abs(s(i, j));
        if (pr < 0 || a < best) {
          best = a;
          pr = i;
          pc = j;
        }
      }
    if (pr < 0) break;  // trailing block is zero
    swap_rows(s, out.U, k, pr);
    swap_cols(s, out.V, k, pc);

    for (;;) {
      bool again = false;
      for (Index i = k + 1; i < s.rows(); ++i) {
        if (s(i, k) == 0) continue;
        Int q = s(i, k) / s(k, k);  // truncated division keeps entries small
        if (q != 0) add_row(s, out.U, i, k, -q);
        if (s(i, k) != 0) {
          swap_rows(s, out.U, k, i);
          again = true;
        }
      }
      for (Index j = k + 1; j < s.cols(); ++j) {
        if (s(k, j) == 0) continue;
        Int q = s(k, j) / s(k, k);
        if (q != 0) add_col(s, out.V, j, k, -q);
        if (s(k, j) != 0) {
          swap_cols(s, out.V, k, j);
          again = true;
        }
      }
      if (!again) break;
    }

    // divisibility: fold any non-multiple into the pivot position
    for (;;) {
      Index bi = -1, bj = -1;
      for (Index i = k + 1; i < s.rows() && bi < 0; ++i)
        for (Index j = k + 1; j < s.cols(); ++j)
          if (s(i, j) % s(k, k) != 0) {
            bi = i;
            bj = j;
            break;
          }
      if (bi < 0) break;
      add_row(s, out.U, k, bi, 1);
      // re-clear the row, which shrinks the pivot to gcd(pivot, offender)
      for (;;) {
        bool again = false;
        for (Index j = k + 1; j < s.cols(); ++j) {
          if (s(k, j) == 0) continue;
          Int q = s(k, j) / s(k, k);
          if (q != 0) add_col(s, out.V, j, k, -q);
          if (s(k, j) != 0) {
            swap_cols(s, out.V, k, j);
            again = true;
          }
        }
        for (Index i = k + 1; i < s.rows(); ++i) {
          if (s(i, k) == 0) continue;
          Int q = s(i, k) / s(k, k);
          if (q != 0) add_row(s, out.U, i, k, -q);
          if (s(i, k) != 0) {
            swap_rows(s, out.U, k, i);
            again = true;
          }
        }
        if (!again) break;
      }
    }
    if (s(k, k) < 0) {
      s.row(k) = -s.row(k);
      out.U.row(k) = -out.U.row(k);
    }
  }
  return out;
}

IntMat integer_kernel_basis(const IntMat& m) {
  const SmithNormalForm snf = smith_normal_form(m);
  const Index r = snf.rank();
  const Index n = m.cols();
  // M = U^-1 S V^-1, so ker M = V * ker S = span of the trailing columns of V
  IntMat out(n - r, n);
  for (Index j = r; j < n; ++j) out.row(j - r) = snf.V.col(j).transpose();
  // canonicalize: primitive rows, leading entry positive, sorted
  std::vector<IntVec> rows;
  for (Index i = 0; i < out.rows(); ++i) {
    IntVec v = primitive(IntVec(out.row(i).transpose()));
    for (Index k = 0; k < v.size(); ++k) {
      if (v(k) != 0) {
        if (v(k) < 0) v = -v;
        break;
      }
    }
    rows.push_back(v);
  }
  std::sort(rows.begin(), rows.end(), [](const IntVec& a, const IntVec& b) {
    for (Index i = 0; i < a.size(); ++i)
      if (a(i) != b(i)) return a(i) < b(i);
    return false;
  });
  for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = rows[i].transpose();
  return out;
}

Int gcd_of_entries(const IntVec& v) {
  Int g = 0;
  for (Index i = 0; i < v.size(); ++i) g = gcd(g, v(i));
  return g;
}

IntVec primitive(const IntVec& v) {
  const Int g = gcd_of_entries(v);
  if (g == 0) throw Error("ZeroVector", "primitive part of the zero vector");
  IntVec out(v.size());
  for (Index i = 0; i < v.size(); ++i) out(i) = v(i) / g;
  return out;
}

Index int_rank(const IntMat& m) { return smith_normal_form(m).rank(); }

namespace {

// Gaussian elimination to row echelon form; returns pivot columns.
// Pivot choice: first nonzero in column order, so results are deterministic.
std::vector<Index> echelonize(RatMat& a) {
  std::vector<Index> pivots;
  Index row = 0;
  for (Index col = 0; col < a.cols() && row < a.rows(); ++col) {
    Index p = -1;
    for (Index i = row; i < a.rows(); ++i)
      if (a(i, col) != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    a.row(row).swap(a.row(p));
    const Rat inv = Rat(1) / a(row, col);
    a.row(row) *= inv;
    for (Index i = 0; i < a.rows(); ++i) {
      if (i == row || a(i, col) == 0) continue;
      a.row(i) -= a(i, col) * a.row(row);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

Index rat_rank(const RatMat& m) {
  RatMat a = m;
  return static_cast<Index>(echelonize(a).size());
}

std::optional<RatVec> rat_solve(const RatMat& a, const RatVec& b) {
  RatMat aug(a.rows(), a.cols() + 1);
  aug.leftCols(a.cols()) = a;
  aug.col(a.cols()) = b;
  const std::vector<Index> pivots = echelonize(aug);
  if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;  // inconsistent
  RatVec x = RatVec::Zero(a.cols());
  for (size_t i = 0; i < pivots.size(); ++i) x(pivots[i]) = aug(static_cast<Index>(i), a.cols());
  return x;
}

RatMat rat_kernel(const RatMat& a) {
  RatMat e = a;
  const std::vector<Index> pivots = echelonize(e);
  std::vector<bool> is_pivot(a.cols(), false);
  for (Index p : pivots) is_pivot[p] = true;
  const Index k = a.cols() - static_cast<Index>(pivots.size());
  RatMat out = RatMat::Zero(a.cols(), k);
  Index col = 0;
  for (Index j = 0; j < a.cols(); ++j) {
    if (is_pivot[j]) continue;
    out(j, col) = 1;
    for (size_t i = 0; i < pivots.size(); ++i) out(pivots[i], col) = -e(static_cast<Index>(i), j);
    ++col;
  }
  return out;
}

RatMat rat_inverse(const RatMat& a) {
  if (a.rows() != a.cols()) throw Error("NotSquare", "inverse of a non-square matrix");
  RatMat aug(a.rows(), 2 * a.cols());
  aug.leftCols(a.cols()) = a;
  aug.rightCols(a.cols()) = RatMat::Identity(a.rows(), a.cols());
  const std::vector<Index> pivots = echelonize(aug);
  if (static_cast<Index>(pivots.size()) != a.rows() || pivots.back() >= a.cols())
    throw Error("Singular", "inverse of a singular matrix");
  return aug.rightCols(a.cols());
}

IntMat hermite_row_basis(const IntMat& rows) {
  IntMat h = rows;
  Index row = 0;
  for (Index col = 0; col < h.cols() && row < h.rows(); ++col) {
    // gcd all entries of this column below `row` into position (row, col)
    for (;;) {
      Index p = -1;
      Int best = 0;
      for (Index i = row; i < h.rows(); ++i) {
        if (h(i, col) == 0) continue;
        Int a = abs(h(i, col));
        if (p < 0 || a < best) {
          p = i;
          best = a;
        }
      }
      if (p < 0) break;
      h.row(row).swap(h.row(p));
      bool clean = true;
      for (Index i = row + 1; i < h.rows(); ++i) {
        if (h(i, col) == 0) continue;
        Int q = h(i, col) / h(row, col);
        h.row(i) -= q * h.row(row);
        if (h(i, col) != 0) clean = false;
      }
      if (clean) break;
    }
    if (row < h.rows() && h(row, col) != 0) {
      if (h(row, col) < 0) h.row(row) = -h.row(row);
      // reduce the entries above the pivot into [0, pivot)
      for (Index i = 0; i < row; ++i) {
        Int q = h(i, col) / h(row, col);
        if (h(i, col) - q * h(row, col) < 0) q -= 1;
        if (q != 0) h.row(i) -= q * h.row(row);
      }
      ++row;
    }
  }
  return h.topRows(row);
}

IntMat saturate_rows(const IntMat& rows) {
  if (rows.rows() == 0) return rows;
  // saturation = double orthogonal complement, both kernels saturated by SNF
  const IntMat perp = integer_kernel_basis(rows);
  if (perp.rows() == 0) return hermite_row_basis(IntMat::Identity(rows.cols(), rows.cols()));
  return hermite_row_basis(integer_kernel_basis(perp));
}

AdaptedBasis adapted_basis(const IntMat& rows, Index ambient) {
  AdaptedBasis out;
  if (rows.rows() == 0) {
    out.basis = IntMat::Identity(ambient, ambient);
    out.rank = 0;
    return out;
  }
  const SmithNormalForm snf = smith_normal_form(IntMat(rows.transpose()));
  const RatMat uinv = rat_inverse(to_rat(snf.U));
  out.basis = IntMat(ambient, ambient);
  for (Index i = 0; i < ambient; ++i)
    for (Index j = 0; j < ambient; ++j) out.basis(i, j) = rat_num(uinv(i, j));
  out.rank = snf.rank();
  return out;
}

bool is_unimodular(const IntMat& m) {
  if (m.rows() != m.cols()) return false;
  const SmithNormalForm snf = smith_normal_form(m);
  if (snf.rank() != m.rows()) return false;
  for (Index i = 0; i < m.rows(); ++i)
    if (snf.S(i, i) != 1) return false;
  return true;
}

}  // namespace weilmmp
