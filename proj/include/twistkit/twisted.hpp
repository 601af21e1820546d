#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "twistkit/cdga.hpp"
#include "twistkit/coeff.hpp"
#include "twistkit/qmat.hpp"
#include "twistkit/report.hpp"

namespace twk {

inline constexpr int kMaxCoeffDegreeDefault = 20;

// A degree-3 closed form on a fixed model. The zero twist is allowed and
// recovers the untwisted complexes.
struct Twist {
  const CdgaModel* model = nullptr;
  Form h;
};

Twist make_twist(const CdgaModel& m, const Form& h);

// Element of Omega(X) tensor coefficient ring. Keys are (basis slot, monomial).
// With ring N the slot indexes a basis form (cochain side); with ring V it
// indexes the dual functional of that basis form (chain side), so the entry is
// a coefficient of a current.
struct CoeffForm {
  const CdgaModel* model = nullptr;
  Ring ring = Ring::N;
  std::map<std::pair<std::size_t, Mono>, Rat> terms;

  bool is_zero() const;
  bool homogeneous() const;  // single total degree
  int degree() const;        // total degree, -1 for zero
  bool operator==(const CoeffForm& o) const;
};
using CoeffCurrent = CoeffForm;

CoeffForm cf_zero(const CdgaModel& m, Ring ring);
CoeffForm cf_tensor(const Form& w, const GradedPoly& p);
CoeffCurrent cc_tensor(const Current& t, const GradedPoly& p);
CoeffForm cf_add(const CoeffForm& a, const CoeffForm& b);
CoeffForm cf_sub(const CoeffForm& a, const CoeffForm& b);
CoeffForm cf_scale(const Rat& c, const CoeffForm& a);
CoeffForm cf_part(const CoeffForm& a, int degree);
// Drop terms whose coefficient degree exceeds the bound.
CoeffForm cf_truncate(const CoeffForm& a, int max_coeff_degree);
std::string cf_str(const CoeffForm& a);

// Cochain differential d + H ^ d/dzeta on N-valued forms.
CoeffForm apply_DH(const Twist& t, const CoeffForm& a);
// Chain differential on V-valued currents, adjoint to apply_DH:
// boundary term <bT, w> = <T, dw> and twist term (H T) tensor u*(-) with
// (H T)(w) = T(H ^ w).
CoeffCurrent apply_dH_chain(const Twist& t, const CoeffCurrent& b);
// Variant with the Leibniz sign convention b(a ^ T) = da ^ T + (-1)^|a| a ^ bT;
// both the boundary and the twist wedge carry Koszul signs.
CoeffCurrent apply_deltaH(const Twist& t, const CoeffCurrent& b);

// <w tensor phi, T tensor v> = T(w) * <phi, v>. Zero when degrees differ.
Rat pair(const CoeffForm& a, const CoeffCurrent& b);

enum class ComplexKind { FormDH, ChainBdH, ChainDeltaH, KTheory };

// Finite slab of a twisted complex with assembled differential matrices.
// Graded flavors index basis elements by (form slot, coefficient monomial);
// the K flavor by (form slot, Laurent exponent of t).
struct TwistedComplex {
  ComplexKind kind = ComplexKind::FormDH;
  Twist twist;
  int max_coeff_degree = kMaxCoeffDegreeDefault;
  int t_band = 0;
  int lo = 0, hi = 0;  // inclusive total-degree band
  std::map<int, std::vector<std::pair<std::size_t, Mono>>> basis;
  std::map<int, std::vector<std::pair<std::size_t, int>>> kbasis;
  std::map<int, QMat> d;  // matrix of the differential leaving each degree

  std::size_t dim(int n) const;
  // Direction of the differential: +1 for cochain flavors, -1 for chain ones.
  int step() const {
    return (kind == ComplexKind::ChainBdH || kind == ComplexKind::ChainDeltaH) ? -1 : 1;
  }
};

TwistedComplex build_complex(const Twist& t, ComplexKind kind,
                             int max_coeff_degree = kMaxCoeffDegreeDefault);
// Laurent complex Omega(X)[t, 1/t] with d_H = d - H ^ t^{-1}; deg(w t^m) =
// |w| + 2m, exponents clipped to |m| <= t_band and degrees to [-4, ...].
TwistedComplex build_k_complex(const Twist& t, int t_band);

CoeffForm complex_element(const TwistedComplex& c, int n, const QVec& coords);

struct DegreeHomology {
  int degree = 0;
  int rank_z = 0;  // cycles
  int rank_b = 0;  // boundaries
  int betti = 0;
  std::vector<QVec> rep_coords;
  std::vector<CoeffForm> reps;  // graded flavors only
};

DegreeHomology cohomology(const TwistedComplex& c, int n);

// Untwisted model cohomology, used for Kunneth baselines and the spectral
// comparison below.
int model_betti(const CdgaModel& m, int i);
std::vector<Form> model_cohomology_basis(const CdgaModel& m, int i);
// Coordinates of a closed form's class in model_cohomology_basis(m, deg).
QVec model_class_coords(const CdgaModel& m, const Form& a);

CoeffForm random_coeff_form(const CdgaModel& m, Ring ring, int degree,
                            int max_coeff_degree, Rng& rng);

// Samples (alpha, beta) pairs and checks <D_H alpha, beta> = <alpha, d_H beta>
// exactly; the report records the seed and any counterexample.
Report verify_adjoint(const Twist& t, int trials, std::uint64_t seed);

// Rank comparison against the two-step spectral computation: start from
// untwisted cohomology tensor the coefficient ring, apply the cup-with-twist
// differential, and compare ranks with the full twisted complex in degree n.
struct SsCheck {
  bool refused = false;
  int e4_rank = 0;
  int actual = 0;
  Report report;
};

SsCheck ss_d3_check(const Twist& t, int n,
                    int max_coeff_degree = kMaxCoeffDegreeDefault);

}  // namespace twk
