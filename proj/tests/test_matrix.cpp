#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "twistkit/intmat.hpp"
#include "twistkit/qmat.hpp"
#include "twistkit/rational.hpp"

using namespace twk;

namespace {

IntMat imat(std::size_t r, std::size_t c, std::initializer_list<long> vals) {
  IntMat m(r, c);
  auto it = vals.begin();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m.at(i, j) = *it++;
  return m;
}

QMat qmat(std::size_t r, std::size_t c, std::initializer_list<long> vals) {
  QMat m(r, c);
  auto it = vals.begin();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m.at(i, j) = *it++;
  return m;
}

IntMat mul(const IntMat& a, const IntMat& b) {
  IntMat out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) out.at(i, j) += a.at(i, k) * b.at(k, j);
  return out;
}

bool unimodular(const IntMat& m) {
  // |det| = 1 via Bareiss on a square matrix: full rank and the SNF of a
  // unimodular matrix is the identity, but a cheap certificate is enough here.
  if (m.rows() != m.cols()) return false;
  return m.rank_bareiss() == m.rows();
}

}  // namespace

TEST_CASE("integer rank") {
  CHECK(imat(2, 3, {1, 2, 3, 2, 4, 6}).rank_bareiss() == 1);
  CHECK(imat(3, 3, {2, 0, 0, 0, 3, 0, 0, 0, 5}).rank_bareiss() == 3);
  CHECK(IntMat(3, 4).rank_bareiss() == 0);
  CHECK(imat(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9}).rank_bareiss() == 2);
}

TEST_CASE("smith normal form invariants") {
  auto check_snf = [](const IntMat& A, std::initializer_list<long> expect) {
    Smith s = smith_normal_form(A);
    REQUIRE(s.diag.size() == expect.size());
    auto it = expect.begin();
    for (const Int& d : s.diag) CHECK(d == *it++);
    for (std::size_t i = 0; i + 1 < s.diag.size(); ++i) CHECK(s.diag[i + 1] % s.diag[i] == 0);
    CHECK(unimodular(s.U));
    CHECK(unimodular(s.V));
    IntMat D = mul(mul(s.U, A), s.V);
    for (std::size_t i = 0; i < D.rows(); ++i)
      for (std::size_t j = 0; j < D.cols(); ++j) {
        Int want = (i == j && i < s.diag.size()) ? s.diag[i] : Int(0);
        CHECK(D.at(i, j) == want);
      }
  };
  check_snf(imat(2, 2, {2, 4, 6, 8}), {2, 4});
  check_snf(imat(2, 2, {1, 0, 0, 1}), {1, 1});
  check_snf(imat(3, 2, {2, 0, 0, 3, 0, 0}), {1, 6});
  check_snf(imat(2, 3, {6, 10, 15, 0, 0, 0}), {1});
  check_snf(IntMat(2, 2), {});
  // boundary map of the 2-torus style complex: torsion Z/2
  check_snf(imat(1, 1, {2}), {2});
}

TEST_CASE("integer solve") {
  IntMat A = imat(2, 2, {2, 0, 0, 3});
  std::vector<Int> x;
  CHECK(solve_integer(A, {4, 9}, x));
  CHECK(x[0] == 2);
  CHECK(x[1] == 3);
  CHECK_FALSE(solve_integer(A, {1, 0}, x));

  IntMat B = imat(2, 3, {1, 2, 3, 0, 0, 2});
  REQUIRE(solve_integer(B, {5, 4}, x));
  CHECK(x[0] + 2 * x[1] + 3 * x[2] == 5);
  CHECK(2 * x[2] == 4);
}

TEST_CASE("cokernel classes") {
  // coker([2]) = Z/2
  IntMat A = imat(1, 1, {2});
  auto odd = coker_class(A, {3});
  CHECK_FALSE(odd.is_zero());
  REQUIRE(odd.torsion.size() == 1);
  CHECK(odd.torsion[0].second == 2);
  CHECK(odd.torsion[0].first == 1);
  CHECK(coker_class(A, {4}).is_zero());

  // coker of the zero map Z -> Z^2: free of rank 2
  IntMat Z(2, 1);
  auto cls = coker_class(Z, {5, -7});
  CHECK(cls.torsion.empty());
  REQUIRE(cls.free_part.size() == 2);
  CHECK_FALSE(cls.is_zero());
  CHECK(coker_class(Z, {0, 0}).is_zero());
}

TEST_CASE("rational rank kernel solve") {
  QMat A = qmat(3, 4, {1, 2, 0, 1, 0, 1, 1, 0, 1, 3, 1, 1});
  CHECK(A.rank() == 2);
  auto ker = A.kernel_basis();
  REQUIRE(ker.size() == 2);
  for (const auto& v : ker) {
    QVec img = A.apply(v);
    for (const Rat& r : img) CHECK(r == 0);
  }
  QVec b = A.apply({rat(1), rat(1, 2), rat(-3), rat(2)});
  auto sol = A.solve(b);
  REQUIRE(sol.has_value());
  QVec img = A.apply(*sol);
  for (std::size_t i = 0; i < img.size(); ++i) CHECK(img[i] == b[i]);
  CHECK_FALSE(A.solve({rat(1), rat(0), rat(0)}).has_value());

  QMat I = QMat::identity(3);
  CHECK(I.rank() == 3);
  CHECK(I.kernel_basis().empty());
}

TEST_CASE("incremental span") {
  IncrementalSpan span(3);
  CHECK(span.add({rat(1), rat(0), rat(1)}));
  CHECK(span.add({rat(0), rat(1), rat(0)}));
  CHECK_FALSE(span.add({rat(2), rat(3), rat(2)}));
  CHECK(span.dimension() == 2);
  CHECK(span.contains({rat(1), rat(1), rat(1)}));
  CHECK_FALSE(span.contains({rat(0), rat(0), rat(1)}));
  CHECK(span.add({rat(0), rat(0), rat(1)}));
  CHECK(span.dimension() == 3);
}
