#include "twistkit/intmat.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace twk {

IntMat IntMat::transpose() const {
  IntMat t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
  return t;
}

std::size_t IntMat::rank_bareiss() const {
  IntMat w = *this;
  std::size_t m = w.rows(), n = w.cols();
  Int prev = 1;
  std::size_t r = 0;
  for (std::size_t k = 0; r < m && k < n; ++k) {
    // Pivot search in column k at or below row r.
    std::size_t piv = m;
    for (std::size_t i = r; i < m; ++i)
      if (w.at(i, k) != 0) {
        piv = i;
        break;
      }
    if (piv == m) continue;
    if (piv != r)
      for (std::size_t j = 0; j < n; ++j) std::swap(w.at(piv, j), w.at(r, j));
    for (std::size_t i = r + 1; i < m; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Int num = w.at(r, k) * w.at(i, j) - w.at(i, k) * w.at(r, j);
        mpz_divexact(w.at(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
      w.at(i, k) = 0;
    }
    prev = w.at(r, k);
    ++r;
  }
  return r;
}

namespace {

void swap_rows(IntMat& a, std::size_t i, std::size_t j) {
  for (std::size_t c = 0; c < a.cols(); ++c) std::swap(a.at(i, c), a.at(j, c));
}
void swap_cols(IntMat& a, std::size_t i, std::size_t j) {
  for (std::size_t r = 0; r < a.rows(); ++r) std::swap(a.at(r, i), a.at(r, j));
}
// row i -= q * row j
void row_axpy(IntMat& a, std::size_t i, std::size_t j, const Int& q) {
  for (std::size_t c = 0; c < a.cols(); ++c) a.at(i, c) -= q * a.at(j, c);
}
void col_axpy(IntMat& a, std::size_t i, std::size_t j, const Int& q) {
  for (std::size_t r = 0; r < a.rows(); ++r) a.at(r, i) -= q * a.at(r, j);
}

IntMat identity(std::size_t n) {
  IntMat e(n, n);
  for (std::size_t i = 0; i < n; ++i) e.at(i, i) = 1;
  return e;
}

}  // namespace

Smith smith_normal_form(const IntMat& A) {
  std::size_t m = A.rows(), n = A.cols();
  IntMat w = A;
  IntMat u = identity(m), v = identity(n);
  // Invariant: u * A * v == w.
  std::size_t t = 0;
  while (t < m && t < n) {
    // Find a nonzero entry with minimal absolute value in the trailing block.
    std::size_t pi = m, pj = n;
    Int best = 0;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j) {
        if (w.at(i, j) == 0) continue;
        Int a = abs(w.at(i, j));
        if (pi == m || a < best) {
          best = a;
          pi = i;
          pj = j;
        }
      }
    if (pi == m) break;  // trailing block is zero
    if (pi != t) {
      swap_rows(w, pi, t);
      swap_rows(u, pi, t);
    }
    if (pj != t) {
      swap_cols(w, pj, t);
      swap_cols(v, pj, t);
    }
    bool clean = true;
    for (std::size_t i = t + 1; i < m; ++i) {
      if (w.at(i, t) == 0) continue;
      Int q;
      mpz_fdiv_q(q.get_mpz_t(), w.at(i, t).get_mpz_t(), w.at(t, t).get_mpz_t());
      row_axpy(w, i, t, q);
      row_axpy(u, i, t, q);
      if (w.at(i, t) != 0) clean = false;
    }
    for (std::size_t j = t + 1; j < n; ++j) {
      if (w.at(t, j) == 0) continue;
      Int q;
      mpz_fdiv_q(q.get_mpz_t(), w.at(t, j).get_mpz_t(), w.at(t, t).get_mpz_t());
      col_axpy(w, j, t, q);
      col_axpy(v, j, t, q);
      if (w.at(t, j) != 0) clean = false;
    }
    if (!clean) continue;  // remainders left; repeat with smaller pivot
    // Divisibility fix-up: pivot must divide the rest of the block.
    bool divides = true;
    for (std::size_t i = t + 1; i < m && divides; ++i)
      for (std::size_t j = t + 1; j < n; ++j)
        if (w.at(i, j) % w.at(t, t) != 0) {
          // Fold row i into row t and restart this pivot.
          row_axpy(w, t, i, Int(-1));
          row_axpy(u, t, i, Int(-1));
          divides = false;
          break;
        }
    if (!divides) continue;
    if (w.at(t, t) < 0) {
      for (std::size_t j = 0; j < n; ++j) w.at(t, j) = -w.at(t, j);
      for (std::size_t j = 0; j < m; ++j) u.at(t, j) = -u.at(t, j);
    }
    ++t;
  }
  Smith s;
  for (std::size_t i = 0; i < t; ++i) s.diag.push_back(w.at(i, i));
  s.U = u;
  s.V = v;
  return s;
}

bool solve_integer(const IntMat& A, const std::vector<Int>& b, std::vector<Int>& x) {
  if (b.size() != A.rows()) throw std::invalid_argument("solve_integer: size mismatch");
  Smith s = smith_normal_form(A);
  std::size_t m = A.rows(), n = A.cols(), r = s.diag.size();
  std::vector<Int> c(m, Int(0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) c[i] += s.U.at(i, j) * b[j];
  std::vector<Int> y(n, Int(0));
  for (std::size_t i = 0; i < r; ++i) {
    if (c[i] % s.diag[i] != 0) return false;
    y[i] = c[i] / s.diag[i];
  }
  for (std::size_t i = r; i < m; ++i)
    if (c[i] != 0) return false;
  x.assign(n, Int(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) x[i] += s.V.at(i, j) * y[j];
  return true;
}

bool CokerClass::is_zero() const {
  for (const auto& [res, mod] : torsion)
    if (res != 0) return false;
  for (const auto& f : free_part)
    if (f != 0) return false;
  return true;
}

std::string CokerClass::str() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [res, mod] : torsion) {
    if (!first) os << " ";
    os << res.get_str() << " (mod " << mod.get_str() << ")";
    first = false;
  }
  for (const auto& f : free_part) {
    if (!first) os << " ";
    os << f.get_str();
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

CokerClass coker_class(const IntMat& A, const std::vector<Int>& b) {
  if (b.size() != A.rows()) throw std::invalid_argument("coker_class: size mismatch");
  Smith s = smith_normal_form(A);
  std::size_t m = A.rows(), r = s.diag.size();
  std::vector<Int> c(m, Int(0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) c[i] += s.U.at(i, j) * b[j];
  CokerClass out;
  for (std::size_t i = 0; i < r; ++i) {
    if (s.diag[i] == 1) continue;
    Int res;
    mpz_fdiv_r(res.get_mpz_t(), c[i].get_mpz_t(), s.diag[i].get_mpz_t());
    out.torsion.emplace_back(res, s.diag[i]);
  }
  for (std::size_t i = r; i < m; ++i) out.free_part.push_back(c[i]);
  return out;
}

}  // namespace twk
