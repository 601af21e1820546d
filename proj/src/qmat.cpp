#include "twistkit/qmat.hpp"

#include <stdexcept>

namespace twk {

QMat QMat::identity(std::size_t n) {
  QMat e(n, n);
  for (std::size_t i = 0; i < n; ++i) e.at(i, i) = 1;
  return e;
}

QMat QMat::operator*(const QMat& rhs) const {
  if (cols_ != rhs.rows_) throw std::invalid_argument("QMat: dimension mismatch in product");
  QMat out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Rat& aik = at(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) out.at(i, j) += aik * rhs.at(k, j);
    }
  return out;
}

QVec QMat::apply(const QVec& v) const {
  if (v.size() != cols_) throw std::invalid_argument("QMat: dimension mismatch in apply");
  QVec out(rows_, Rat(0));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (at(i, j) != 0) out[i] += at(i, j) * v[j];
  return out;
}

QMat QMat::transpose() const {
  QMat t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
  return t;
}

bool QMat::is_zero() const {
  for (const auto& x : a_)
    if (x != 0) return false;
  return true;
}

IntMat QMat::cleared() const {
  IntMat m(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    Int l = 1;
    for (std::size_t j = 0; j < cols_; ++j) l = lcm(l, at(i, j).get_den());
    for (std::size_t j = 0; j < cols_; ++j) {
      Rat scaled = at(i, j) * Rat(l);
      m.at(i, j) = scaled.get_num();
    }
  }
  return m;
}

std::size_t QMat::rank() const { return cleared().rank_bareiss(); }

namespace {

// Reduced row echelon form in place; returns pivot column per row.
std::vector<std::size_t> rref(QMat& w) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < w.cols() && r < w.rows(); ++c) {
    std::size_t piv = w.rows();
    for (std::size_t i = r; i < w.rows(); ++i)
      if (w.at(i, c) != 0) {
        piv = i;
        break;
      }
    if (piv == w.rows()) continue;
    if (piv != r)
      for (std::size_t j = 0; j < w.cols(); ++j) std::swap(w.at(piv, j), w.at(r, j));
    Rat inv = 1 / w.at(r, c);
    for (std::size_t j = c; j < w.cols(); ++j) w.at(r, j) *= inv;
    for (std::size_t i = 0; i < w.rows(); ++i) {
      if (i == r || w.at(i, c) == 0) continue;
      Rat f = w.at(i, c);
      for (std::size_t j = c; j < w.cols(); ++j) w.at(i, j) -= f * w.at(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

std::vector<QVec> QMat::kernel_basis() const {
  QMat w = *this;
  std::vector<std::size_t> pivots = rref(w);
  std::vector<bool> is_pivot(cols_, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<QVec> basis;
  for (std::size_t free = 0; free < cols_; ++free) {
    if (is_pivot[free]) continue;
    QVec v(cols_, Rat(0));
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -w.at(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<QVec> QMat::solve(const QVec& b) const {
  if (b.size() != rows_) throw std::invalid_argument("QMat::solve: size mismatch");
  QMat w(rows_, cols_ + 1);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) w.at(i, j) = at(i, j);
    w.at(i, cols_) = b[i];
  }
  std::vector<std::size_t> pivots = rref(w);
  for (auto c : pivots)
    if (c == cols_) return std::nullopt;  // inconsistent
  QVec x(cols_, Rat(0));
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = w.at(r, cols_);
  return x;
}

void IncrementalSpan::reduce(QVec& v) const {
  for (const auto& [p, row] : rows_) {
    if (v[p] == 0) continue;
    Rat f = v[p];
    for (std::size_t j = 0; j < dim_; ++j) v[j] -= f * row[j];
  }
}

bool IncrementalSpan::add(QVec v) {
  if (v.size() != dim_) throw std::invalid_argument("IncrementalSpan: size mismatch");
  reduce(v);
  for (std::size_t j = 0; j < dim_; ++j) {
    if (v[j] == 0) continue;
    Rat inv = 1 / v[j];
    for (std::size_t k = 0; k < dim_; ++k) v[k] *= inv;
    rows_.emplace_back(j, std::move(v));
    return true;
  }
  return false;
}

bool IncrementalSpan::contains(QVec v) const {
  reduce(v);
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

}  // namespace twk
