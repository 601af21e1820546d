#pragma once
#include "twistkit/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace twk {

// Finite rational de Rham model of a closed manifold: a graded basis with a
// differential, a multiplication table, and an integration functional on the
// top degree.  Index 0 is always the unit "1".
struct CdgaModel {
  std::string name;
  int dim = 0;

  struct BasisElem {
    std::string name;
    int deg = 0;
  };
  std::vector<BasisElem> basis;
  std::vector<std::vector<Rat>> diff;               // d(e_i) as a coefficient vector
  std::vector<std::vector<std::vector<Rat>>> mult;  // e_i ∧ e_j as a coefficient vector
  std::vector<Rat> integral;                        // ∫ e_i (nonzero only in top degree)
  std::map<std::string, std::size_t> index;         // basis name -> slot

  std::size_t n() const { return basis.size(); }
  std::size_t slot(const std::string& nm) const;  // throws on unknown name
  std::vector<std::size_t> degree_slots(int deg) const;
};

// Structural checks: grading, d^2 = 0, graded commutativity, associativity,
// Leibniz, unit, Stokes, integral supported on the top degree.  Throws with a
// message naming the failing pair/degree.
void validate_model(const CdgaModel& m);

struct Form {
  const CdgaModel* model = nullptr;
  std::vector<Rat> c;

  bool is_zero() const;
  int degree() const;  // top nonzero degree, -1 for 0
  bool homogeneous() const;
  bool operator==(const Form& o) const;
};

Form form_zero(const CdgaModel& m);
Form form_unit(const CdgaModel& m);
Form form_basis(const CdgaModel& m, std::size_t slot);
Form form_gen(const CdgaModel& m, const std::string& name);
Form form_add(const Form& a, const Form& b);
Form form_sub(const Form& a, const Form& b);
Form form_scale(const Rat& k, const Form& a);
Form form_part(const Form& a, int deg);
Form wedge(const Form& a, const Form& b);
Form dform(const Form& a);
Rat integrate(const Form& a);

std::string form_str(const Form& a);
// Expressions over the model's basis names with + - * ^ and rational
// literals; source is used in error messages.
Form form_parse(const CdgaModel& m, const std::string& text,
                const std::string& source = "<expr>");

// Functional on forms of one fixed degree (dual basis coefficients).
struct Current {
  const CdgaModel* model = nullptr;
  int deg = 0;
  std::vector<Rat> c;  // dense over the basis; only degree-deg slots are used

  bool is_zero() const;
};

Current current_zero(const CdgaModel& m, int deg);
Current current_dual(const CdgaModel& m, std::size_t slot);
Current fundamental_current(const CdgaModel& m);
Current current_add(const Current& a, const Current& b);
Current current_scale(const Rat& k, const Current& a);
Rat current_eval(const Current& t, const Form& a);
// Adjoint of dform: <boundary T, a> = <T, da>, degree drops by one.
Current boundary_current(const Current& t);
// (a ∧ T)(w) = (-1)^{|a| |T|} T(a ∧ w) for homogeneous a.
Current current_wedge(const Form& a, const Current& t);
// Plain adjoint of left multiplication, no Koszul sign: (a · T)(w) = T(a ∧ w).
Current current_lmul(const Form& a, const Current& t);

// Square matrix of forms.
struct MatForm {
  const CdgaModel* model = nullptr;
  std::size_t r = 0;
  std::vector<Form> e;  // row-major, r*r

  Form& at(std::size_t i, std::size_t j) { return e[i * r + j]; }
  const Form& at(std::size_t i, std::size_t j) const { return e[i * r + j]; }
  bool is_zero() const;
};

MatForm mat_zero(const CdgaModel& m, std::size_t r);
MatForm mat_identity(const CdgaModel& m, std::size_t r);
MatForm mat_add(const MatForm& a, const MatForm& b);
MatForm mat_sub(const MatForm& a, const MatForm& b);
MatForm mat_scale(const Rat& k, const MatForm& a);
// Matrix product with wedge on entries.
MatForm mat_wedge(const MatForm& a, const MatForm& b);
MatForm mat_d(const MatForm& a);
Form mat_trace(const MatForm& a);
// exp(M) = sum M^k / k!; requires every entry to have degree >= 2 so the
// series terminates by nilpotency.
MatForm mat_exp_nilpotent(const MatForm& a);

// Tensor product model with Koszul signs; integral = product of integrals.
struct ProductModel {
  CdgaModel model;
  const CdgaModel* x = nullptr;
  const CdgaModel* f = nullptr;
  std::vector<std::pair<std::size_t, std::size_t>> factor;  // slot -> (X slot, F slot)
};

ProductModel product_model(const CdgaModel& X, const CdgaModel& F);
Form pullback_x(const ProductModel& p, const Form& w);  // pr_X^*
Form inject_f(const ProductModel& p, const Form& b);    // 1 ⊗ b
// Integrate over the fiber factor F: e ⊗ f ↦ e · ∫_F f.
Form fiber_integrate(const ProductModel& p, const Form& a);

// Algebra morphism given by images of every basis element; checked to be a
// unital ring map commuting with d.
struct CdgaMap {
  const CdgaModel* src = nullptr;
  const CdgaModel* dst = nullptr;
  std::vector<Form> image;  // per src basis slot
};

// Build from generator images (by name); images of remaining basis elements
// are derived through the multiplication table where possible.
CdgaMap make_map(const CdgaModel& src, const CdgaModel& dst,
                 const std::map<std::string, Form>& gen_images);
void validate_map(const CdgaMap& m);
Form map_apply(const CdgaMap& m, const Form& a);
// x ↦ then(first(x)); first.dst must be then.src.
CdgaMap compose_maps(const CdgaMap& first, const CdgaMap& then);
bool maps_equal(const CdgaMap& a, const CdgaMap& b);

// Shipped model library: pt, s1, t2, t3, s2, s3, s4, cp2, plus chart3 (a
// contractible chart whose degree-3 form v = dy is exact, used for twisted
// connection algebra where a global curving primitive must exist).
const CdgaModel& model_registry(const std::string& name);
std::vector<std::string> model_registry_names();

// Model file format: `model <name>`, `dim <n>`, `gen <sym> deg <d>`,
// `d <sym> = <expr>`, `mul <a>*<b> = <expr>`, `integral <expr> = <rational>`.
CdgaModel parse_model(const std::string& text, const std::string& source = "<model>");

}  // namespace twk
