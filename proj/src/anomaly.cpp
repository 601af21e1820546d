#include "twistkit/anomaly.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "twistkit/eta.hpp"

namespace twk {

namespace {

Rat factorial(unsigned k) {
  Rat r(1);
  for (unsigned i = 2; i <= k; ++i) r *= static_cast<long>(i);
  return r;
}

Rat binom(unsigned n, unsigned k) {
  Rat r(1);
  for (unsigned i = 0; i < k; ++i) r *= Rat(static_cast<long>(n - i), static_cast<long>(i + 1));
  return r;
}

void drop_zeros(CoeffForm& a) {
  for (auto it = a.terms.begin(); it != a.terms.end();)
    it = (it->second == 0) ? a.terms.erase(it) : std::next(it);
}

// kappa^{mu_0} ^ prod_i pont[i-1]^{mu_i}; zero when a needed Pontryagin form
// is missing.
Form geo_form(const CdgaModel& m, const Mono& mu, const Form& kappa,
              const std::vector<Form>& pont) {
  Form out = form_unit(m);
  unsigned k = mu.empty() ? 0 : mu[0];
  for (unsigned j = 0; j < k; ++j) out = wedge(out, kappa);
  for (std::size_t i = 1; i < mu.size(); ++i) {
    if (mu[i] == 0) continue;
    if (i - 1 >= pont.size()) return form_zero(m);
    for (unsigned j = 0; j < mu[i]; ++j) out = wedge(out, pont[i - 1]);
  }
  return out;
}

// The functional  e_s (x) p_I zeta^k  |->  Int_M pull[s] ^ P_I ^ kappa^k,
// stored with the dual (1/k!) normalization.
CoeffCurrent cw_functional(const CdgaModel& X, const CdgaModel& M,
                           const std::vector<Form>& pull,
                           const std::vector<Form>& pont, const Form& kappa) {
  CoeffCurrent out = cf_zero(X, Ring::V);
  for (int cd = 0; cd <= M.dim; cd += 2) {
    for (const Mono& mu : monos_of_degree(cd)) {
      Form geo = geo_form(M, mu, kappa, pont);
      if (geo.is_zero()) continue;
      Rat kf = factorial(mu.empty() ? 0 : mu[0]);
      for (std::size_t s = 0; s < X.n(); ++s) {
        Rat val = integrate(wedge(pull[s], geo));
        if (val != 0) out.terms[{s, mu}] = val / kf;
      }
    }
  }
  return out;
}

// Assembled Stokes defect of a cw-type functional:
//   e_s (x) p_I zeta^k |->
//     (-1)^{|e_s|} k Int_M pull[s] ^ P_I ^ kappa^{k-1} ^ defect3
// with defect3 = pulled twist - d kappa.
CoeffCurrent stokes_defect(const CdgaModel& X, const CdgaModel& M,
                           const std::vector<Form>& pull,
                           const std::vector<Form>& pont, const Form& kappa,
                           const Form& defect3) {
  CoeffCurrent out = cf_zero(X, Ring::V);
  if (defect3.is_zero()) return out;
  for (int cd = 2; cd <= M.dim + 2; cd += 2) {
    for (const Mono& mu : monos_of_degree(cd)) {
      if (mu.empty() || mu[0] == 0) continue;
      Mono lower = mu;
      lower[0] -= 1;
      Form geo = wedge(geo_form(M, mono_trim(lower), kappa, pont), defect3);
      if (geo.is_zero()) continue;
      Rat kf = factorial(mu[0] - 1);
      for (std::size_t s = 0; s < X.n(); ++s) {
        Rat val = integrate(wedge(pull[s], geo));
        if (val == 0) continue;
        Rat sg = X.basis[s].deg % 2 ? Rat(-1) : Rat(1);
        out.terms[{s, mu}] = sg * val / kf;
      }
    }
  }
  return out;
}

void require_current(const CoeffForm& phi, const CdgaModel& m, const char* who) {
  if (phi.model != &m || phi.ring != Ring::V)
    throw std::invalid_argument(std::string(who) +
                                ": current datum must be a ring V current on "
                                "the twisted model");
}

void require_pont(const std::vector<Form>& pont, const CdgaModel& m,
                  const char* who) {
  for (std::size_t i = 0; i < pont.size(); ++i) {
    const Form& p = pont[i];
    std::string tag = "p" + std::to_string(i + 1);
    if (p.model != &m)
      throw std::invalid_argument(std::string(who) + ": " + tag +
                                  " lives on the wrong model");
    if (!p.is_zero() &&
        (!p.homogeneous() || p.degree() != 4 * static_cast<int>(i + 1)))
      throw std::invalid_argument(std::string(who) + ": " + tag +
                                  " must have degree " +
                                  std::to_string(4 * (i + 1)));
    if (!dform(p).is_zero())
      throw std::invalid_argument(std::string(who) + ": " + tag +
                                  " is not closed");
  }
}

}  // namespace

DiffCycle make_cycle(std::string name, const Twist& t, const CdgaModel& m,
                     const CdgaMap& pullback, std::vector<Form> pont,
                     const Form& kappa_m, const CoeffCurrent& phi) {
  if (pullback.src != t.model || pullback.dst != &m)
    throw std::invalid_argument(
        "make_cycle: pullback must map the twisted model onto the target");
  validate_map(pullback);
  if (kappa_m.model != &m ||
      (!kappa_m.is_zero() && (!kappa_m.homogeneous() || kappa_m.degree() != 2)))
    throw std::invalid_argument("make_cycle: kappa must be a 2-form on the target");
  if (!(dform(kappa_m) == map_apply(pullback, t.h)))
    throw std::invalid_argument(
        "make_cycle: d kappa does not match the pulled-back twist");
  require_pont(pont, m, "make_cycle");
  require_current(phi, *t.model, "make_cycle");
  return DiffCycle{std::move(name), t, &m, pullback, std::move(pont), kappa_m,
                   phi};
}

DiffCycle empty_cycle(std::string name, const Twist& t,
                      const CoeffCurrent& phi) {
  require_current(phi, *t.model, "empty_cycle");
  DiffCycle c;
  c.name = std::move(name);
  c.twist = t;
  c.phi = phi;
  return c;
}

CoeffCurrent cw_cycle(const DiffCycle& c) {
  if (!c.m) return cf_zero(*c.twist.model, Ring::V);
  return cw_functional(*c.twist.model, *c.m, c.pullback.image, c.pont,
                       c.kappa_m);
}

CoeffCurrent R_spinc(const DiffCycle& c) {
  return cf_sub(cw_cycle(c), apply_dH_chain(c.twist, c.phi));
}

DiffCycle a_spinc(std::string name, const Twist& t, const CoeffCurrent& phi) {
  return empty_cycle(std::move(name), t, phi);
}

std::string I_spinc(const DiffCycle& c) { return c.m ? c.m->name : "empty"; }

CoeffCurrent cycle_stokes_defect(const DiffCycle& c) {
  if (!c.m) return cf_zero(*c.twist.model, Ring::V);
  Form defect3 =
      form_sub(map_apply(c.pullback, c.twist.h), dform(c.kappa_m));
  return stokes_defect(*c.twist.model, *c.m, c.pullback.image, c.pont,
                       c.kappa_m, defect3);
}

CobordCochain make_cochain(const ProductModel& pm, std::vector<Form> pont,
                           const Form& kappa_n, const CoeffCurrent& alpha) {
  if (kappa_n.model != &pm.model ||
      (!kappa_n.is_zero() && (!kappa_n.homogeneous() || kappa_n.degree() != 2)))
    throw std::invalid_argument(
        "make_cochain: comparison form must be a 2-form on the product model");
  if (!dform(kappa_n).is_zero())
    throw std::invalid_argument("make_cochain: comparison form is not closed");
  require_pont(pont, pm.model, "make_cochain");
  if (alpha.model != pm.x || alpha.ring != Ring::V)
    throw std::invalid_argument(
        "make_cochain: current correction must be a ring V current on the "
        "base model");
  return CobordCochain{&pm, std::move(pont), kappa_n, alpha};
}

CobordCochain trivial_cochain(const ProductModel& pm) {
  return CobordCochain{&pm, {}, form_zero(pm.model), cf_zero(*pm.x, Ring::V)};
}

CoeffForm cochain_transfer(const CobordCochain& c, const CoeffForm& a) {
  const ProductModel& pm = *c.pm;
  if (a.model != &pm.model)
    throw std::invalid_argument(
        "cochain_transfer: input must live on the product model");
  if (a.ring != Ring::N)
    throw std::invalid_argument(
        "cochain_transfer: input must have ring N coefficients");
  CoeffForm out = cf_zero(pm.model, Ring::N);
  for (const auto& [key, coeff] : a.terms) {
    const Mono& mu = key.second;
    Mono nu(mu.size(), 0);
    while (true) {
      Mono rep(mu.size(), 0);
      for (std::size_t i = 0; i < mu.size(); ++i) rep[i] = mu[i] - nu[i];
      Form geo = geo_form(pm.model, rep, c.kappa_n, c.pont);
      if (!geo.is_zero()) {
        Rat fac = coeff;
        for (std::size_t i = 0; i < mu.size(); ++i)
          fac *= binom(mu[i], nu[i]);
        Form w = wedge(form_basis(pm.model, key.first), geo);
        Mono kept = mono_trim(nu);
        for (std::size_t t = 0; t < w.c.size(); ++t)
          if (w.c[t] != 0) out.terms[{t, kept}] += fac * w.c[t];
      }
      std::size_t i = 0;
      for (; i < mu.size(); ++i) {
        if (nu[i] < mu[i]) {
          ++nu[i];
          break;
        }
        nu[i] = 0;
      }
      if (i == mu.size()) break;
    }
  }
  drop_zeros(out);
  return out;
}

CoeffForm fiber_integrate_coeff(const ProductModel& pm, const CoeffForm& a) {
  if (a.model != &pm.model)
    throw std::invalid_argument(
        "fiber_integrate_coeff: input must live on the product model");
  if (a.ring != Ring::N)
    throw std::invalid_argument(
        "fiber_integrate_coeff: input must have ring N coefficients");
  CoeffForm out = cf_zero(*pm.x, Ring::N);
  for (const auto& [key, coeff] : a.terms) {
    Form w = fiber_integrate(pm, form_basis(pm.model, key.first));
    for (std::size_t i = 0; i < w.c.size(); ++i)
      if (w.c[i] != 0) out.terms[{i, key.second}] += coeff * w.c[i];
  }
  drop_zeros(out);
  return out;
}

CoeffCurrent current_transfer(const CobordCochain& c, const CoeffCurrent& phi,
                              int max_coeff_degree) {
  const ProductModel& pm = *c.pm;
  if (phi.model != pm.x || phi.ring != Ring::V)
    throw std::invalid_argument(
        "current_transfer: expected a ring V current on the base model");
  int top = 0;
  for (const auto& [key, coeff] : phi.terms)
    top = std::max(top, mono_degree(key.second));
  int bound = std::min(max_coeff_degree, top + pm.model.dim);
  CoeffCurrent out = cf_zero(pm.model, Ring::V);
  for (int cd = 0; cd <= bound; cd += 2) {
    for (const Mono& mu : monos_of_degree(cd)) {
      Rat kf = factorial(mu.empty() ? 0 : mu[0]);
      for (std::size_t s = 0; s < pm.model.n(); ++s) {
        CoeffForm unit = cf_zero(pm.model, Ring::N);
        unit.terms[{s, mu}] = 1;
        Rat val =
            pair(fiber_integrate_coeff(pm, cochain_transfer(c, unit)), phi);
        if (val != 0) out.terms[{s, mu}] = val / kf;
      }
    }
  }
  return out;
}

CoeffCurrent cw_cochain(const CobordCochain& c, const Twist& base) {
  const ProductModel& pm = *c.pm;
  if (base.model != pm.x)
    throw std::invalid_argument(
        "cw_cochain: base twist does not live on the base model");
  std::vector<Form> pull;
  for (std::size_t s = 0; s < pm.x->n(); ++s)
    pull.push_back(pullback_x(pm, form_basis(*pm.x, s)));
  return cw_functional(*pm.x, pm.model, pull, c.pont, c.kappa_n);
}

Report cochain_stokes_report(const CobordCochain& c, const Twist& base) {
  Report r;
  const ProductModel& pm = *c.pm;
  if (base.model != pm.x) {
    r.fail("base twist does not live on the base of the product");
    return r;
  }
  CoeffCurrent cw = cw_cochain(c, base);
  CoeffCurrent assembled = apply_dH_chain(base, cw);
  std::vector<Form> pull;
  for (std::size_t s = 0; s < pm.x->n(); ++s)
    pull.push_back(pullback_x(pm, form_basis(*pm.x, s)));
  Form defect3 = form_sub(pullback_x(pm, base.h), dform(c.kappa_n));
  CoeffCurrent predicted =
      stokes_defect(*pm.x, pm.model, pull, c.pont, c.kappa_n, defect3);
  if (assembled == predicted)
    r.note("assembled chain differential matches the boundary-defect formula");
  else
    r.fail("assembled chain differential disagrees with the boundary-defect formula");
  if (assembled.is_zero())
    r.note("the pushforward functional is closed");
  else
    r.note("the pushforward functional has a nonzero boundary");
  if (!c.alpha.is_zero())
    r.note("current correction present; corrected functional is cw - boundary(alpha)");
  return r;
}

BuiltCycle product_cycle(const CobordCochain& c, const Twist& prod_twist,
                         const DiffCycle& base, int max_coeff_degree) {
  const ProductModel& pm = *c.pm;
  if (prod_twist.model != &pm.model)
    throw std::invalid_argument(
        "product_cycle: product twist must live on the product model");
  if (base.twist.model != pm.x)
    throw std::invalid_argument(
        "product_cycle: base cycle does not live on the base of the product");
  if (!(prod_twist.h == pullback_x(pm, base.twist.h)))
    throw std::invalid_argument(
        "product_cycle: product twist is not the pulled-back base twist");
  CoeffCurrent moved = current_transfer(c, base.phi, max_coeff_degree);
  BuiltCycle out;
  std::string name = base.name + "x" + pm.f->name;
  if (!base.m) {
    out.cycle = empty_cycle(name, prod_twist, moved);
    return out;
  }
  out.target = std::make_shared<ProductModel>(product_model(*base.m, *pm.f));
  const ProductModel& tg = *out.target;
  CdgaMap gxid;
  gxid.src = &pm.model;
  gxid.dst = &tg.model;
  for (std::size_t s = 0; s < pm.model.n(); ++s) {
    auto [i, j] = pm.factor[s];
    gxid.image.push_back(wedge(pullback_x(tg, base.pullback.image[i]),
                               inject_f(tg, form_basis(*pm.f, j))));
  }
  validate_map(gxid);
  std::size_t np = std::max(c.pont.size(), base.pont.size());
  std::vector<Form> pont;
  for (std::size_t i = 0; i < np; ++i) {
    Form a = i < c.pont.size() ? map_apply(gxid, c.pont[i]) : form_zero(tg.model);
    Form b = i < base.pont.size() ? pullback_x(tg, base.pont[i])
                                  : form_zero(tg.model);
    pont.push_back(form_add(a, b));
  }
  Form kappa = form_add(map_apply(gxid, c.kappa_n),
                        pullback_x(tg, base.kappa_m));
  out.cycle =
      make_cycle(name, prod_twist, tg.model, gxid, std::move(pont), kappa, moved);
  return out;
}

MixedCurrent mixed_product(const CoeffForm& a, const CoeffCurrent& b) {
  if (a.model != b.model)
    throw std::invalid_argument("mixed_product: operands live on different models");
  if (a.ring != Ring::N || b.ring != Ring::V)
    throw std::invalid_argument(
        "mixed_product: expected a ring N form and a ring V current");
  const CdgaModel& m = *a.model;
  MixedCurrent out = cf_zero(m, Ring::N);
  for (const auto& [ka, ca] : a.terms) {
    GradedPoly phi(Ring::N);
    phi.add_term(ka.second, 1);
    Form fa = form_basis(m, ka.first);
    for (const auto& [kb, cb] : b.terms) {
      GradedPoly v(Ring::V);
      v.add_term(kb.second, 1);
      GradedPoly coeffs = star(phi, v);
      if (coeffs.is_zero()) continue;
      Current tw = current_wedge(fa, current_dual(m, kb.first));
      for (std::size_t g = 0; g < tw.c.size(); ++g) {
        if (tw.c[g] == 0 || m.basis[g].deg != tw.deg) continue;
        for (const auto& [m2, c2] : coeffs.terms)
          out.terms[{g, m2}] += ca * cb * tw.c[g] * c2;
      }
    }
  }
  drop_zeros(out);
  return out;
}

MixedCurrent apply_DH_mixed(const Twist& t, const MixedCurrent& m) {
  if (m.model != t.model)
    throw std::invalid_argument("apply_DH_mixed: model mismatch");
  if (m.ring != Ring::N)
    throw std::invalid_argument(
        "apply_DH_mixed: mixed currents carry ring N coefficients");
  const CdgaModel& md = *t.model;
  MixedCurrent out = cf_zero(md, Ring::N);
  for (const auto& [key, c] : m.terms) {
    int i = md.basis[key.first].deg;
    // Signs forced by the Leibniz rule against the cochain differential on
    // forms and the signed chain differential on currents: (-1)^{i+1} on the
    // boundary part and (-1)^i on the twist part, i the dual slot degree.
    Rat s1 = i % 2 ? Rat(1) : Rat(-1);
    Rat s2 = i % 2 ? Rat(-1) : Rat(1);
    Current bd = boundary_current(current_dual(md, key.first));
    for (std::size_t g = 0; g < bd.c.size(); ++g) {
      if (bd.c[g] == 0 || md.basis[g].deg != bd.deg) continue;
      out.terms[{g, key.second}] += s1 * c * bd.c[g];
    }
    if (t.h.is_zero()) continue;
    GradedPoly phi(Ring::N);
    phi.add_term(key.second, 1);
    GradedPoly dz = dzeta(phi);
    if (dz.is_zero()) continue;
    Current hw = current_lmul(t.h, current_dual(md, key.first));
    for (std::size_t g = 0; g < hw.c.size(); ++g) {
      if (hw.c[g] == 0 || md.basis[g].deg != hw.deg) continue;
      for (const auto& [m2, c2] : dz.terms)
        out.terms[{g, m2}] += s2 * c * hw.c[g] * c2;
    }
  }
  drop_zeros(out);
  return out;
}

// --- pairs ---------------------------------------------------------------

struct AndersonH {
  enum class Kind { J, Table, Pushed, Anomaly } kind = Kind::J;
  // J: h(c) = <alpha, R(c)> mod 1
  CoeffForm alpha;
  // Table: values by cycle name
  std::map<std::string, Rat> values;
  // Pushed: evaluate the inner pair on the fiber product cycle
  AndersonPair inner;
  CobordCochain cochain;
  // Anomaly: eta term of the pulled-back connections minus the rho pairing
  DiffKClass cls;
  CoeffForm rho_series;
};

namespace {

bool twists_match(const Twist& a, const Twist& b) {
  return a.model == b.model && a.h == b.h;
}

// Sum of reduced eta invariants of the pulled-back diagonal connection
// entries, plus minus minus; unavailable off the circle.
HValue eta_term(const DiffKClass& cls, const DiffCycle& c) {
  if (!c.m) return HValue{true, Rat(0), ""};
  if (c.m->dim != 1)
    return HValue{false, Rat(0),
                  "eta unavailable: cycle target " + c.m->name +
                      " is not the circle"};
  Rat sum(0);
  for (int side = 0; side < 2; ++side) {
    const ModuleConn& mc = side ? cls.gen.minus : cls.gen.plus;
    Rat sg = side ? Rat(-1) : Rat(1);
    for (std::size_t i = 0; i < mc.rank; ++i) {
      for (std::size_t j = 0; j < mc.rank; ++j) {
        Form pulled = map_apply(c.pullback, mc.theta.at(i, j));
        if (i != j) {
          if (!pulled.is_zero())
            return HValue{false, Rat(0),
                          "eta unavailable: pulled-back connection is not "
                          "diagonal"};
          continue;
        }
        Rat hol = mod1(integrate(pulled));
        sum += sg * eta_reduced(make_circle_dirac(hol));
      }
    }
  }
  return HValue{true, sum, ""};
}

}  // namespace

HValue h_eval(const AndersonPair& p, const DiffCycle& c) {
  if (!p.h) throw std::logic_error("h_eval: pair has no evaluator");
  if (!twists_match(p.twist, c.twist))
    throw std::invalid_argument("h_eval: cycle twist does not match the pair");
  switch (p.h->kind) {
    case AndersonH::Kind::J:
      return HValue{true, mod1(pair(p.h->alpha, R_spinc(c))), ""};
    case AndersonH::Kind::Table: {
      auto it = p.h->values.find(c.name);
      if (it == p.h->values.end())
        return HValue{false, Rat(0),
                      "no tabulated value for cycle " + c.name};
      return HValue{true, mod1(it->second), ""};
    }
    case AndersonH::Kind::Pushed: {
      BuiltCycle built = product_cycle(p.h->cochain, p.h->inner.twist, c);
      return h_eval(p.h->inner, built.cycle);
    }
    case AndersonH::Kind::Anomaly: {
      HValue eta = eta_term(p.h->cls, c);
      if (!eta.available) return eta;
      Rat val = eta.value - pair(p.h->rho_series, cw_cycle(c)) -
                pair(p.omega, c.phi);
      return HValue{true, mod1(val), ""};
    }
  }
  throw std::logic_error("h_eval: unknown evaluator kind");
}

AndersonPair a_IOmega(const Twist& t, const CoeffForm& alpha) {
  if (alpha.model != t.model || alpha.ring != Ring::N)
    throw std::invalid_argument(
        "a_IOmega: potential must be a ring N coefficient form on the "
        "twisted model");
  auto h = std::make_shared<AndersonH>();
  h->kind = AndersonH::Kind::J;
  h->alpha = alpha;
  return AndersonPair{t, apply_DH(t, alpha), h};
}

AndersonPair tabulated_pair(const Twist& t, const CoeffForm& omega,
                            std::map<std::string, Rat> values) {
  if (omega.model != t.model || omega.ring != Ring::N)
    throw std::invalid_argument(
        "tabulated_pair: omega must be a ring N coefficient form on the "
        "twisted model");
  if (!apply_DH(t, omega).is_zero())
    throw std::invalid_argument("tabulated_pair: omega is not closed");
  auto h = std::make_shared<AndersonH>();
  h->kind = AndersonH::Kind::Table;
  h->values = std::move(values);
  return AndersonPair{t, omega, h};
}

AndersonPair anomaly_map(const DiffKClass& k, int deg2k) {
  if (deg2k <= 0 || deg2k % 2)
    throw std::invalid_argument(
        "anomaly_map: degree must be a positive even integer");
  const Twist& tk = k.gen.plus.twist;
  Twist out_t = make_twist(*tk.model, form_scale(rat(-1), tk.h));
  int trunc = std::max(deg2k, 20);
  GradedPoly lambda = poly_mul(ahat_series(trunc).value, exp_zeta(trunc));
  auto against = [&](const Form& f, int degcap) {
    CoeffForm out = cf_zero(*tk.model, Ring::N);
    for (int d = 0; d <= tk.model->dim; ++d) {
      Form part = form_part(f, d);
      if (!part.is_zero()) out = cf_add(out, cf_tensor(part, lambda));
    }
    return cf_part(out, degcap);
  };
  auto h = std::make_shared<AndersonH>();
  h->kind = AndersonH::Kind::Anomaly;
  h->cls = k;
  h->rho_series = against(k.rho, deg2k - 1);
  return AndersonPair{out_t, against(R_K(k), deg2k), h};
}

AndersonPair pushforward(const AndersonPair& p, const CobordCochain& c,
                         const Twist& base) {
  const ProductModel& pm = *c.pm;
  if (p.twist.model != &pm.model)
    throw std::invalid_argument(
        "pushforward: pair does not live on the product model");
  if (base.model != pm.x)
    throw std::invalid_argument(
        "pushforward: base twist does not live on the base model");
  if (!(p.twist.h == pullback_x(pm, base.h)))
    throw std::invalid_argument(
        "pushforward: pair twist is not the pulled-back base twist");
  auto h = std::make_shared<AndersonH>();
  h->kind = AndersonH::Kind::Pushed;
  h->inner = p;
  h->cochain = c;
  return AndersonPair{
      base, fiber_integrate_coeff(pm, cochain_transfer(c, p.omega)), h};
}

AndersonPair s1_integration(const AndersonPair& p, const ProductModel& pm,
                            const Twist& base) {
  return pushforward(p, trivial_cochain(pm), base);
}

Report verify_compatibility(const AndersonPair& p, int trials,
                            std::uint64_t seed) {
  Report r;
  Rng rng(seed);
  r.note("seed " + std::to_string(seed));
  const CdgaModel& m = *p.twist.model;
  int checked = 0;
  for (int t = 0; t < trials; ++t) {
    int deg = static_cast<int>(rng.range(0, m.dim + 4));
    CoeffCurrent phi = random_coeff_form(m, Ring::V, deg, 8, rng);
    DiffCycle c = a_spinc("random#" + std::to_string(t), p.twist, phi);
    HValue hv = h_eval(p, c);
    if (!hv.available) {
      r.fail("h unavailable on a current cycle: " + hv.why);
      continue;
    }
    Rat want = mod1(-pair(p.omega, phi));
    if (hv.value != want)
      r.fail("compatibility defect on trial " + std::to_string(t) + ": h = " +
             rat_str(hv.value) + " but -<omega, phi> = " + rat_str(want));
    else
      ++checked;
  }
  r.note(std::to_string(checked) + " current cycles checked");
  return r;
}

Report cs_descent_report(const DiffKClass& k, const MatForm& theta_plus,
                         const MatForm& theta_minus,
                         const std::vector<DiffCycle>& battery, int deg2k) {
  Report r;
  AndersonPair before = anomaly_map(k, deg2k);
  DiffKClass moved = kclass_cs_shift(k, theta_plus, theta_minus);
  AndersonPair after = anomaly_map(moved, deg2k);
  if (before.omega == after.omega)
    r.note("omega is unchanged by the connection move");
  else
    r.fail("omega moved with the connection");
  Form cs = cs_super(k.gen, moved.gen);
  for (const DiffCycle& c : battery) {
    HValue hb = h_eval(before, c);
    HValue ha = h_eval(after, c);
    if (hb.available != ha.available) {
      r.fail("availability changed on cycle " + c.name);
      continue;
    }
    if (!hb.available) {
      r.note("cycle " + c.name + ": " + hb.why);
      continue;
    }
    if (hb.value == ha.value)
      r.note("cycle " + c.name + ": h = " + rat_str(hb.value) +
             " (mod 1), unchanged");
    else
      r.fail("h moved on cycle " + c.name + ": " + rat_str(hb.value) +
             " -> " + rat_str(ha.value));
    if (c.m && c.m->dim == 1) {
      HValue eb = eta_term(k, c);
      HValue ea = eta_term(moved, c);
      Rat lhs = mod1(ea.value - eb.value);
      Rat rhs = mod1(integrate(map_apply(c.pullback, cs)));
      if (lhs == rhs)
        r.note("cycle " + c.name +
               ": eta difference matches the transgression integral, " +
               rat_str(lhs) + " (mod 1)");
      else
        r.fail("cycle " + c.name + ": eta difference " + rat_str(lhs) +
               " but transgression integral " + rat_str(rhs));
    }
    if (c.m) {
      // Exactness term of the descended comparison: on a closed target the
      // integral of an exact form vanishes identically.
      int trunc = c.m->dim + (c.m->dim % 2);
      GradedPoly ahat = ahat_series(trunc).value;
      GradedPoly ez = exp_zeta(trunc);
      GradedPoly lam = poly_mul(ahat, ez);
      Form w = form_zero(*c.m);
      for (const auto& [mu, co] : lam.terms) {
        Form geo = geo_form(*c.m, mu, c.kappa_m, c.pont);
        if (!geo.is_zero()) w = form_add(w, form_scale(co, geo));
      }
      Rat insp = integrate(dform(wedge(w, map_apply(c.pullback, k.rho))));
      r.note("cycle " + c.name + ": closed-target exactness term " +
             rat_str(insp));
    }
  }
  return r;
}

// --- text form -------------------------------------------------------------

namespace {

std::string trimmed_a(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string mono_str(const Mono& m, Ring ring) {
  GradedPoly p(ring);
  p.add_term(m, 1);
  return poly_str(p);
}

}  // namespace

std::string current_str(const CoeffCurrent& phi) {
  if (phi.terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, c] : phi.terms) {
    Rat a = c;
    if (first) {
      if (a < 0) {
        os << "-";
        a = -a;
      }
    } else {
      os << (a < 0 ? " - " : " + ");
      if (a < 0) a = -a;
    }
    first = false;
    if (a != 1) os << rat_str(a) << "*";
    os << "dual(" << phi.model->basis[key.first].name << ")";
    if (!key.second.empty()) os << "*" << mono_str(key.second, Ring::V);
  }
  return os.str();
}

CoeffCurrent current_parse(const CdgaModel& m, const std::string& text,
                           const std::string& source) {
  auto bad = [&](const std::string& why) {
    return std::invalid_argument(source + ": " + why);
  };
  CoeffCurrent out = cf_zero(m, Ring::V);
  std::string s = trimmed_a(text);
  if (s.empty() || s == "0") return out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    Rat sign(1);
    while (pos < s.size() &&
           (std::isspace(static_cast<unsigned char>(s[pos])) || s[pos] == '+' ||
            s[pos] == '-')) {
      if (s[pos] == '-') sign = -sign;
      ++pos;
    }
    if (pos >= s.size()) throw bad("dangling sign in current expression");
    std::size_t end = pos;
    int depth = 0;
    while (end < s.size()) {
      if (s[end] == '(') ++depth;
      if (s[end] == ')') --depth;
      if (depth == 0 && (s[end] == '+' || s[end] == '-')) break;
      ++end;
    }
    std::string term = trimmed_a(s.substr(pos, end - pos));
    pos = end;
    std::size_t d = term.find("dual(");
    if (d == std::string::npos)
      throw bad("term '" + term + "' has no dual(<basis>) factor");
    std::size_t close = term.find(')', d);
    if (close == std::string::npos) throw bad("unclosed dual(...)");
    std::string name = trimmed_a(term.substr(d + 5, close - d - 5));
    std::string pre = trimmed_a(term.substr(0, d));
    std::string post = trimmed_a(term.substr(close + 1));
    if (!pre.empty()) {
      if (pre.back() != '*') throw bad("malformed coefficient in '" + term + "'");
      pre = trimmed_a(pre.substr(0, pre.size() - 1));
      auto r = rat_parse(pre);
      if (!r) throw bad("bad coefficient '" + pre + "'");
      sign *= *r;
    }
    Mono mono;
    if (!post.empty()) {
      if (post.front() != '*') throw bad("malformed monomial in '" + term + "'");
      GradedPoly p = poly_parse(trimmed_a(post.substr(1)), Ring::V);
      if (p.terms.size() != 1 || p.terms.begin()->second != 1)
        throw bad("monomial factor in '" + term +
                  "' must be a plain product of ring generators");
      mono = p.terms.begin()->first;
    }
    out.terms[{m.slot(name), mono}] += sign;
  }
  drop_zeros(out);
  return out;
}

std::string cycles_str(const std::vector<DiffCycle>& cycles) {
  std::string out;
  bool first = true;
  for (const DiffCycle& c : cycles) {
    if (!first) out += "\n";
    first = false;
    out += "cycle " + c.name + " on " + c.twist.model->name + "\n";
    if (!c.m) {
      out += "m-model empty\n";
      out += "phi = " + current_str(c.phi) + "\n";
      continue;
    }
    out += "m-model " + c.m->name + "\n";
    std::string pb;
    for (std::size_t s = 1; s < c.twist.model->n(); ++s) {
      if (!pb.empty()) pb += ", ";
      pb += c.twist.model->basis[s].name + " = " + form_str(c.pullback.image[s]);
    }
    if (!pb.empty()) out += "pullback " + pb + "\n";
    for (std::size_t i = 0; i < c.pont.size(); ++i)
      out += "p" + std::to_string(i + 1) + " = " + form_str(c.pont[i]) + "\n";
    out += "kappa = " + form_str(c.kappa_m) + "\n";
    out += "phi = " + current_str(c.phi) + "\n";
  }
  return out;
}

std::vector<DiffCycle> parse_cycles(const Twist& t, const std::string& text,
                                    const std::string& source) {
  auto bad = [&](const std::string& why) {
    return std::invalid_argument(source + ": " + why);
  };
  struct Block {
    std::string name;
    std::string mname;
    bool have_m = false;
    std::map<std::string, std::string> fields;
    std::string pullback;
    bool have_pb = false;
  };
  std::vector<Block> blocks;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string::size_type hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trimmed_a(line);
    if (line.empty()) continue;
    if (line.rfind("cycle ", 0) == 0) {
      std::istringstream ls(line);
      std::string kw, name, on, mn;
      ls >> kw >> name >> on >> mn;
      if (on != "on" || name.empty() || mn.empty())
        throw bad("expected 'cycle <name> on <model>'");
      if (mn != t.model->name)
        throw bad("cycle " + name + " is declared on " + mn +
                  " but the twist lives on " + t.model->name);
      blocks.push_back(Block{name, "", false, {}, "", false});
      continue;
    }
    if (blocks.empty()) throw bad("expected a 'cycle <name> on <model>' header");
    Block& b = blocks.back();
    if (line.rfind("m-model", 0) == 0) {
      if (b.have_m) throw bad("duplicate m-model in cycle " + b.name);
      b.mname = trimmed_a(line.substr(7));
      b.have_m = true;
      continue;
    }
    if (line.rfind("pullback", 0) == 0) {
      if (b.have_pb) throw bad("duplicate pullback in cycle " + b.name);
      b.pullback = trimmed_a(line.substr(8));
      b.have_pb = true;
      continue;
    }
    std::string::size_type eq = line.find('=');
    if (eq == std::string::npos) throw bad("expected '<field> = <value>'");
    std::string key = trimmed_a(line.substr(0, eq));
    std::string val = trimmed_a(line.substr(eq + 1));
    if (!b.fields.emplace(key, val).second)
      throw bad("duplicate field " + key + " in cycle " + b.name);
  }
  std::vector<DiffCycle> out;
  for (const Block& b : blocks) {
    if (!b.have_m) throw bad("cycle " + b.name + " has no m-model line");
    std::string ctx = source + ": cycle " + b.name;
    CoeffCurrent phi = cf_zero(*t.model, Ring::V);
    std::size_t npont = 0;
    for (const auto& [key, val] : b.fields) {
      if (key == "phi" || key == "kappa") continue;
      if (key.size() >= 2 && key[0] == 'p' &&
          key.find_first_not_of("0123456789", 1) == std::string::npos) {
        npont = std::max(npont, static_cast<std::size_t>(std::stoul(key.substr(1))));
        continue;
      }
      throw bad("unknown field " + key + " in cycle " + b.name);
    }
    if (b.fields.count("phi"))
      phi = current_parse(*t.model, b.fields.at("phi"), ctx + ": phi");
    if (b.mname == "empty") {
      if (b.have_pb || npont || b.fields.count("kappa"))
        throw bad("cycle " + b.name +
                  " is empty and cannot carry pullback or target data");
      out.push_back(empty_cycle(b.name, t, phi));
      continue;
    }
    const CdgaModel& m = model_registry(b.mname);
    std::map<std::string, Form> images;
    if (b.have_pb) {
      std::istringstream ps(b.pullback);
      std::string item;
      while (std::getline(ps, item, ',')) {
        item = trimmed_a(item);
        if (item.empty()) continue;
        std::string::size_type eq = item.find('=');
        if (eq == std::string::npos)
          throw bad("pullback item '" + item + "' in cycle " + b.name +
                    " is not '<basis> = <expr>'");
        std::string gen = trimmed_a(item.substr(0, eq));
        images[gen] =
            form_parse(m, trimmed_a(item.substr(eq + 1)), ctx + ": pullback");
      }
    }
    CdgaMap pb = make_map(*t.model, m, images);
    std::vector<Form> pont;
    for (std::size_t i = 1; i <= npont; ++i) {
      std::string key = "p" + std::to_string(i);
      pont.push_back(b.fields.count(key)
                         ? form_parse(m, b.fields.at(key), ctx + ": " + key)
                         : form_zero(m));
    }
    Form kappa = b.fields.count("kappa")
                     ? form_parse(m, b.fields.at("kappa"), ctx + ": kappa")
                     : form_zero(m);
    out.push_back(make_cycle(b.name, t, m, pb, std::move(pont), kappa, phi));
  }
  return out;
}

std::vector<DiffCycle> load_cycle_file(const Twist& t,
                                       const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open cycle file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_cycles(t, buf.str(), path);
}

}  // namespace twk
