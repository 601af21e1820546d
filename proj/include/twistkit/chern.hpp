#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "twistkit/cdga.hpp"
#include "twistkit/report.hpp"
#include "twistkit/twisted.hpp"

namespace twk {

// Module connection in the global-gauge regime: one connection matrix of
// 1-forms for the whole model plus a scalar curving absorber kappa0 whose
// differential is the twist curvature.
struct ModuleConn {
  Twist twist;
  std::size_t rank = 0;
  MatForm theta;  // rank x rank, entries of degree 1 (or zero)
  Form kappa0;    // degree 2, d kappa0 = twist.h
};

ModuleConn make_module_conn(const Twist& t, const MatForm& theta,
                            const Form& kappa0);
ModuleConn flat_conn(const Twist& t, std::size_t rank, const Form& kappa0);

// F~ = d Theta + Theta^Theta + kappa0 . id
MatForm curvature_descended(const ModuleConn& m);
// d F~ - [F~, Theta] - H . id; identically zero for every legal connection.
MatForm bianchi_residual(const ModuleConn& m);

// (d - H) a, for inhomogeneous a.
Form twisted_d(const Twist& t, const Form& a);

// tr exp(F~); (d - H)-closed.
Form ch_twisted(const ModuleConn& m);

// Formal difference of two module connections sharing twist, curving absorber
// and rank (the finite shadow of the trace-class condition).
struct SuperModuleConn {
  ModuleConn plus;
  ModuleConn minus;
};

SuperModuleConn make_super(const ModuleConn& plus, const ModuleConn& minus);
Form ch_super(const SuperModuleConn& s);

// Transgression along the linear path between the two connection matrices,
// integrated exactly in the path parameter:
//   (d - H) cs = ch(m1) - ch(m0).
Form cs_transgression(const ModuleConn& m0, const ModuleConn& m1);
Form cs_super(const SuperModuleConn& s0, const SuperModuleConn& s1);

// Generator of the difference-class group: a super connection plus an
// odd-degree potential rho, stored as a representative.
struct DiffKClass {
  SuperModuleConn gen;
  Form rho;  // odd-degree components only
};

DiffKClass make_kclass(const SuperModuleConn& gen, const Form& rho);
// Flat equal pair with rho = 0.
DiffKClass kclass_zero(const Twist& t, const Form& kappa0,
                       std::size_t rank = 1);
// rho-only class: flat equal pair carrying the potential.
DiffKClass a_K(const Twist& t, const Form& kappa0, const Form& rho);

DiffKClass kclass_add(const DiffKClass& a, const DiffKClass& b);
DiffKClass kclass_negate(const DiffKClass& k);
// Replace both connection matrices along linear paths and absorb the
// transgression into rho, so R_K is unchanged.
DiffKClass kclass_cs_shift(const DiffKClass& k, const MatForm& theta_plus,
                           const MatForm& theta_minus);

// ch_super(gen) - (d - H) rho, with H the class's own twist curvature.
Form R_K(const DiffKClass& k);
// Rank difference of the super pair (zero under the equal-rank rule; kept as
// the topological shadow).
long I_K(const DiffKClass& k);

// Spinor designation plus Pontryagin data for the underlying model.
struct GerbeModuleGeom {
  ModuleConn spinor;
  std::vector<Form> pont;  // pont[i-1] has degree 4i and is closed
};

GerbeModuleGeom make_gerbe_geom(const ModuleConn& spinor,
                                std::vector<Form> pont);
// tr(F~)/rank; d kappa_prime = H.
Form kappa_prime(const GerbeModuleGeom& g);

// Connection matrix with seeded random 1-form entries.
MatForm random_matform1(const CdgaModel& m, std::size_t rank, Rng& rng);

// Text form:
//   kclass <name> on <model> twist <form-expr>
//   kappa0 = <form-expr>
//   theta+ = [[<form-expr>,...],...]
//   theta- = [[<form-expr>,...],...]
//   rho = <form-expr>
// Models are resolved through the registry.
struct KClassFile {
  std::string name;
  DiffKClass cls;
};

std::string kclass_str(const std::string& name, const DiffKClass& k);
KClassFile parse_kclass(const std::string& text,
                        const std::string& source = "<kclass>");
KClassFile load_kclass_file(const std::string& path);

}  // namespace twk
