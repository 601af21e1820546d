#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "twistkit/cdga.hpp"
#include "twistkit/chern.hpp"
#include "twistkit/report.hpp"
#include "twistkit/twisted.hpp"

namespace twk {

// Geometric cycle over the twisted model X: a closed target model M together
// with an algebra map realizing the pullback, Pontryagin data and a 2-form
// kappa_m with d kappa_m = pullback(H), plus an optional current correction
// on X.  A null target is the empty cycle (current datum only).
struct DiffCycle {
  std::string name;
  Twist twist;
  const CdgaModel* m = nullptr;
  CdgaMap pullback;        // X model -> M model
  std::vector<Form> pont;  // p_i(M), degree 4i, closed
  Form kappa_m;            // degree 2 on M
  CoeffCurrent phi;        // ring V current on X
};

DiffCycle make_cycle(std::string name, const Twist& t, const CdgaModel& m,
                     const CdgaMap& pullback, std::vector<Form> pont,
                     const Form& kappa_m, const CoeffCurrent& phi);
DiffCycle empty_cycle(std::string name, const Twist& t,
                      const CoeffCurrent& phi);

// The functional  w (x) p_I zeta^k  |->  integral_M pull(w)^p_I(M)^kappa_m^k,
// assembled as an exact dual vector; a closed current when M is closed.
CoeffCurrent cw_cycle(const DiffCycle& c);
// cw_cycle minus the boundary of the current correction.
CoeffCurrent R_spinc(const DiffCycle& c);
// Current-only cycle.
DiffCycle a_spinc(std::string name, const Twist& t, const CoeffCurrent& phi);
// Topological shadow: the target model's name.
std::string I_spinc(const DiffCycle& c);

// The two independent sides of the Stokes argument for cw closedness: the
// assembled chain differential of cw against the defect functional
//   f (x) p_I zeta^k |-> (-1)^{|f|} k Int pull(f)^P_I^kappa^{k-1}^(pull(H) - d kappa).
// They agree for every cycle; both vanish when d kappa_m = pull(H).
CoeffCurrent cycle_stokes_defect(const DiffCycle& c);

// Product cobordism datum over X with fiber F: Pontryagin forms on the total
// model, a closed comparison 2-form, and a current correction on X.
struct CobordCochain {
  const ProductModel* pm = nullptr;
  std::vector<Form> pont;  // on the product model, degree 4i, closed
  Form kappa_n;            // degree 2 on the product model, closed
  CoeffCurrent alpha;      // ring V current on X
};

CobordCochain make_cochain(const ProductModel& pm, std::vector<Form> pont,
                           const Form& kappa_n, const CoeffCurrent& alpha);
CobordCochain trivial_cochain(const ProductModel& pm);

// Substitute the cochain's geometric data into the coefficient monomials,
// multiplicatively:  p_i -> p_i + p_i(c)  and  zeta -> zeta + kappa_n.
CoeffForm cochain_transfer(const CobordCochain& c, const CoeffForm& a);
// Slotwise integration over the fiber factor; result lives on the base model.
CoeffForm fiber_integrate_coeff(const ProductModel& pm, const CoeffForm& a);
// Adjoint of (fiber_integrate_coeff . cochain_transfer) on currents.
CoeffCurrent current_transfer(const CobordCochain& c, const CoeffCurrent& phi,
                              int max_coeff_degree = kMaxCoeffDegreeDefault);

// w (x) p_I zeta^k |-> Int_{X x F} pull_X(w) ^ p_I(N) ^ kappa_n^k  as a
// current on X; base is the twist on X.
CoeffCurrent cw_cochain(const CobordCochain& c, const Twist& base);
// Chain differential of cw_cochain computed two ways (assembled vs the Stokes
// defect formula); the report records both and checks exact agreement.
Report cochain_stokes_report(const CobordCochain& c, const Twist& base);

// Fiber product of a base cycle with the cochain: target M x F, Pontryagin
// and comparison data summed, current datum transferred.
struct BuiltCycle {
  std::shared_ptr<const ProductModel> target;  // null when the base is empty
  DiffCycle cycle;
};

BuiltCycle product_cycle(const CobordCochain& c, const Twist& prod_twist,
                         const DiffCycle& base,
                         int max_coeff_degree = kMaxCoeffDegreeDefault);

// Mixed product of a coefficient form with a coefficient current:
//   (w (x) phi) ^* (T (x) v) = (w ^ T) (x) (phi * v),
// an N-valued current (keys are dual slots with ring-N monomials).
using MixedCurrent = CoeffForm;
MixedCurrent mixed_product(const CoeffForm& a, const CoeffCurrent& b);
// Differential on N-valued currents making the twisted Leibniz rule
//   D_{H1+H2}(a ^* b) = D_{H1}(a) ^* b + (-1)^{deg a} a ^* delta_{H2}(b)
// hold with the shipped form- and chain-side conventions.
MixedCurrent apply_DH_mixed(const Twist& t, const MixedCurrent& m);

// Value of the circle-valued functional h on a cycle; unavailable outcomes
// carry the reason (the eta term only exists for circle targets with
// diagonal pulled-back connection data).
struct HValue {
  bool available = true;
  Rat value;  // in [0,1)
  std::string why;
};

struct AndersonH;

// Closed coefficient form of total degree n on X plus an intensional
// evaluator for the circle-valued partner functional.
struct AndersonPair {
  Twist twist;
  CoeffForm omega;
  std::shared_ptr<const AndersonH> h;
};

HValue h_eval(const AndersonPair& p, const DiffCycle& c);

// alpha |-> (D_H alpha, <R_spinc(-), alpha> mod 1).
AndersonPair a_IOmega(const Twist& t, const CoeffForm& alpha);
// Pair with a table of values keyed by cycle name.
AndersonPair tabulated_pair(const Twist& t, const CoeffForm& omega,
                            std::map<std::string, Rat> values);

// omega = { (ch_super - (d - G) rho) (x) Ahat e^zeta }^(deg2k) for a class
// over the twist G; the output pair lives over the inverse twist -G.  The h
// evaluator computes eta term - <cw, rho (x) Ahat e^zeta> - <phi, omega>.
AndersonPair anomaly_map(const DiffKClass& k, int deg2k);

// (omega, h) |-> (fiber-integrated omega ^ transfer, h . product_cycle).
AndersonPair pushforward(const AndersonPair& pair, const CobordCochain& c,
                         const Twist& base);
AndersonPair s1_integration(const AndersonPair& pair, const ProductModel& pm,
                            const Twist& base);

// h(a_spinc(phi)) = -<phi, omega> mod 1 on seeded random currents.
Report verify_compatibility(const AndersonPair& p, int trials,
                            std::uint64_t seed);

// Before/after comparison of anomaly_map under a connection move: equal
// omega, equal h where available, and the eta difference against the
// transgression integral on circle targets; also prints the closed-target
// exactness term Int_M d(Ahat e^kappa ^ pull(rho)) for inspection.
Report cs_descent_report(const DiffKClass& k, const MatForm& theta_plus,
                         const MatForm& theta_minus,
                         const std::vector<DiffCycle>& battery, int deg2k);

// Text form, several blocks per file:
//   cycle <name> on <X-model>
//   m-model <registry-model or empty>
//   pullback <gen> = <form-expr>, ...
//   p1 = <form-expr>
//   kappa = <form-expr>
//   phi = <current-expr>
// with <current-expr> a signed sum of  [rat *] dual(<basis>) [* <V-poly>].
// Text form of a ring V current: a signed sum of [rat *] dual(<basis>)
// [* <V-poly>] terms. current_parse accepts what current_str emits plus
// arbitrary interior whitespace.
std::string current_str(const CoeffCurrent& phi);
CoeffCurrent current_parse(const CdgaModel& m, const std::string& text,
                           const std::string& source = "<current>");

std::string cycles_str(const std::vector<DiffCycle>& cycles);
std::vector<DiffCycle> parse_cycles(const Twist& t, const std::string& text,
                                    const std::string& source = "<cycles>");
std::vector<DiffCycle> load_cycle_file(const Twist& t,
                                       const std::string& path);

}  // namespace twk
