#pragma once
#include "twistkit/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace twk {

// Graded coefficient rings for the twisted complexes.
//   N = Q[z, p1, p2, ...]  with z in degree 2 and p_i in degree 4i (form side)
//   V = Q[u, x4, x8, ...]  with u in degree 2 and x_{4i} in degree 4i (chain side)
enum class Ring { V, N };

// Exponent vector: slot 0 is the power of z (resp. u), slot i >= 1 the power
// of p_i (resp. x_{4i}).  Trailing zeros are trimmed so equal monomials
// compare equal as map keys.
using Mono = std::vector<unsigned>;

Mono mono_trim(Mono m);
Mono mono_mul(const Mono& a, const Mono& b);
int mono_degree(const Mono& m);

struct GradedPoly {
  Ring ring;
  std::map<Mono, Rat> terms;  // canonical: no zero coefficients

  explicit GradedPoly(Ring r = Ring::N) : ring(r) {}

  bool is_zero() const { return terms.empty(); }
  void add_term(const Mono& m, const Rat& c);
  Rat coeff(const Mono& m) const;
  int degree() const;  // -1 for the zero polynomial
  bool homogeneous() const;
  GradedPoly graded_part(int deg) const;
  GradedPoly truncated(int maxdeg) const;

  bool operator==(const GradedPoly& o) const {
    return ring == o.ring && terms == o.terms;
  }
};

GradedPoly poly_zero(Ring r);
GradedPoly poly_one(Ring r);
GradedPoly poly_var(Ring r, int slot, unsigned power = 1);

GradedPoly poly_add(const GradedPoly& a, const GradedPoly& b);
GradedPoly poly_sub(const GradedPoly& a, const GradedPoly& b);
GradedPoly poly_scale(const Rat& c, const GradedPoly& a);
GradedPoly poly_mul(const GradedPoly& a, const GradedPoly& b);

// Derivative d/dz on the N side.
GradedPoly dzeta(const GradedPoly& phi);

// Cap action of V on N: phi * u = dzeta(phi); phi * x_{4i} strips one p_i
// factor (zero if absent).  Extended multiplicatively and bilinearly.
GradedPoly star(const GradedPoly& phi, const GradedPoly& v);

// <p_I z^k, x_J u^m> = k! when I = J and k = m, else 0.  Both arguments must
// be homogeneous of the same degree.
Rat pair_coeff(const GradedPoly& phi, const GradedPoly& v);

struct CharSeries {
  int trunc = 0;     // terms of degree <= trunc are kept
  GradedPoly value;  // element of N
};

// A-hat genus written in the Pontryagin generators p_i, all terms of degree
// <= trunc.  trunc must be even and >= 0.
CharSeries ahat_series(int trunc);

// sum_k z^k / k! truncated to degree <= trunc.
GradedPoly exp_zeta(int trunc);

// Every monomial of the given total degree, in map order. The grading weights
// are the same in both rings, so no ring tag is needed. Empty for odd or
// negative degrees.
std::vector<Mono> monos_of_degree(int degree);

// Text form, e.g. "3/2*z^2*p1 + p2" (ring N) or "u*x4" (ring V).  poly_parse
// accepts exactly what poly_str emits plus arbitrary interior whitespace.
std::string poly_str(const GradedPoly& p);
GradedPoly poly_parse(const std::string& text, Ring ring);

}  // namespace twk
