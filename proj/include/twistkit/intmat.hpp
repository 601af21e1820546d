#pragma once

#include <vector>

#include "twistkit/rational.hpp"

namespace twk {

// Dense integer matrix. Row-major.
class IntMat {
 public:
  IntMat() = default;
  IntMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, Int(0)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Int& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Int& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  IntMat transpose() const;

  // Rank over Q by fraction-free (Bareiss) elimination.
  std::size_t rank_bareiss() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Int> a_;
};

// Smith normal form: returns diag entries d_1 | d_2 | ... (nonzero ones) plus
// unimodular U, V with U*A*V = D. U is rows x rows, V is cols x cols.
struct Smith {
  std::vector<Int> diag;  // nonzero invariant factors, each dividing the next
  IntMat U, V;
};
Smith smith_normal_form(const IntMat& A);

// Solve A x = b over the integers. Returns false when no integer solution.
bool solve_integer(const IntMat& A, const std::vector<Int>& b, std::vector<Int>& x);

// Class of b in coker(A) = Z^rows / im(A), expressed in invariant-factor
// coordinates: pairs (value mod d_i) for the torsion part and exact values on
// the free part. Used for degree-3 cocycle classes.
struct CokerClass {
  std::vector<std::pair<Int, Int>> torsion;  // (residue, modulus) with modulus > 1
  std::vector<Int> free_part;
  bool is_zero() const;
  std::string str() const;
};
CokerClass coker_class(const IntMat& A, const std::vector<Int>& b);

}  // namespace twk
