#pragma once

#include <optional>
#include <vector>

#include "twistkit/intmat.hpp"
#include "twistkit/rational.hpp"

namespace twk {

using QVec = std::vector<Rat>;

// Dense rational matrix, row-major. Columns act on coordinate vectors, so a
// linear map f: Q^n -> Q^m is an m x n matrix and im(f) is the column span.
class QMat {
 public:
  QMat() = default;
  QMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, Rat(0)) {}

  static QMat identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rat& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Rat& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  QMat operator*(const QMat& rhs) const;
  QVec apply(const QVec& v) const;
  QMat transpose() const;
  bool is_zero() const;

  // Rank via fraction-free elimination on the denominator-cleared matrix.
  std::size_t rank() const;

  // Basis of the kernel (right null space).
  std::vector<QVec> kernel_basis() const;

  // Particular solution of A x = b, if any.
  std::optional<QVec> solve(const QVec& b) const;

  // Integer matrix with the same rank profile (rows scaled by lcm of dens).
  IntMat cleared() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Rat> a_;
};

// Incremental row-echelon span tracker over Q: used to extend an image basis
// to a kernel basis when picking cohomology representatives.
class IncrementalSpan {
 public:
  explicit IncrementalSpan(std::size_t dim) : dim_(dim) {}
  // Returns true when v enlarged the span.
  bool add(QVec v);
  std::size_t dimension() const { return rows_.size(); }
  bool contains(QVec v) const;

 private:
  void reduce(QVec& v) const;
  std::size_t dim_;
  std::vector<std::pair<std::size_t, QVec>> rows_;  // (pivot index, echelon row)
};

}  // namespace twk
