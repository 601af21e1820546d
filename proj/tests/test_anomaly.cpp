#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "twistkit/anomaly.hpp"
#include "twistkit/eta.hpp"

using namespace twk;

namespace {

bool has_line_with(const Report& rep, const std::string& needle) {
  for (const auto& l : rep.lines)
    if (l.find(needle) != std::string::npos) return true;
  return false;
}

// Torus times the contractible chart: the smallest model carrying both
// 1-forms and an exact twist, so curving absorbers exist globally.
struct Mix {
  ProductModel pm;
  Twist twist;
  Form kappa0;

  explicit Mix(long k)
      : pm(product_model(model_registry("t2"), model_registry("chart3"))) {
    Form h = form_scale(rat(k), inject_f(pm, form_gen(*pm.f, "v")));
    twist = make_twist(pm.model, h);
    kappa0 = form_scale(rat(k), inject_f(pm, form_gen(*pm.f, "y")));
  }
};

CoeffCurrent one_term(const CdgaModel& m, const std::string& name, Mono mono,
                      const Rat& c) {
  CoeffCurrent out = cf_zero(m, Ring::V);
  out.terms[{m.slot(name), mono_trim(std::move(mono))}] = c;
  return out;
}

Form random_odd_form(const CdgaModel& m, Rng& rng) {
  Form out = form_zero(m);
  for (std::size_t s = 0; s < m.n(); ++s)
    if (m.basis[s].deg % 2) out.c[s] = rng.small_rat();
  return out;
}

std::string data_path(const std::string& rel) {
  return std::string(TWISTKIT_DATA_DIR) + "/" + rel;
}

}  // namespace

TEST_CASE("cycle functionals integrate pulled-back data") {
  const CdgaModel& s1 = model_registry("s1");
  Twist t0 = make_twist(s1, form_zero(s1));
  std::vector<DiffCycle> battery =
      load_cycle_file(t0, data_path("cycles/circle_battery.cycle"));
  REQUIRE(battery.size() == 4);

  CHECK(cw_cycle(battery[0]) == one_term(s1, "dt", {}, rat(1)));
  CHECK(cw_cycle(battery[1]) == one_term(s1, "dt", {}, rat(2)));
  CHECK(cw_cycle(battery[2]) == one_term(s1, "1", {}, rat(1)));
  CHECK(cw_cycle(battery[3]).is_zero());
  CHECK(I_spinc(battery[0]) == "s1");
  CHECK(I_spinc(battery[2]) == "pt");
  CHECK(I_spinc(battery[3]) == "empty");
  CHECK(R_spinc(battery[0]) == cw_cycle(battery[0]));
  CHECK(R_spinc(battery[3]).is_zero());

  // a curved target: the evaluation against powers of the curving picks up
  // one factorial per power
  const CdgaModel& cp2 = model_registry("cp2");
  Twist c0 = make_twist(cp2, form_zero(cp2));
  CdgaMap idc = make_map(cp2, cp2, {{"y", form_gen(cp2, "y")}});
  DiffCycle curved =
      make_cycle("curved", c0, cp2, idc, {},
                 form_scale(rat(3), form_gen(cp2, "y")), cf_zero(cp2, Ring::V));
  CoeffCurrent cw = cw_cycle(curved);
  CoeffCurrent want = cf_zero(cp2, Ring::V);
  want.terms[{cp2.slot("y2"), Mono{}}] = 1;
  want.terms[{cp2.slot("y"), Mono{1}}] = 3;
  want.terms[{cp2.slot("1"), Mono{2}}] = rat(9, 2);
  CHECK(cw == want);
  CHECK(apply_dH_chain(c0, cw).is_zero());
  CHECK(cycle_stokes_defect(curved).is_zero());

  // Pontryagin data shows up in the x4 column
  DiffCycle ponted = make_cycle(
      "ponted", c0, cp2, idc, {form_scale(rat(5), form_gen(cp2, "y2"))},
      form_zero(cp2), cf_zero(cp2, Ring::V));
  CHECK(cw_cycle(ponted).terms.at({cp2.slot("1"), Mono{0, 1}}) == rat(5));

  const CdgaModel& s3 = model_registry("s3");
  Twist tv = make_twist(s3, form_gen(s3, "v"));
  CdgaMap ids3 = make_map(s3, s3, {{"v", form_gen(s3, "v")}});
  CHECK_THROWS_WITH(make_cycle("bad", tv, s3, ids3, {}, form_zero(s3),
                               cf_zero(s3, Ring::V)),
                    doctest::Contains("d kappa does not match"));
  CHECK_THROWS_WITH(make_cycle("badp", c0, cp2, idc, {form_gen(cp2, "y")},
                               form_zero(cp2), cf_zero(cp2, Ring::V)),
                    doctest::Contains("p1 must have degree 4"));
}

TEST_CASE("twisted cycles over the mixed model") {
  Mix mx(2);
  const CdgaModel& x = mx.pm.model;
  const CdgaModel& t2 = model_registry("t2");

  // collapse the chart factor; the twist dies along the way so kappa = 0
  std::map<std::string, Form> im;
  im["dx"] = form_gen(t2, "dx");
  im["dy"] = form_gen(t2, "dy");
  im["y"] = form_zero(t2);
  im["v"] = form_zero(t2);
  CdgaMap proj = make_map(x, t2, im);
  DiffCycle flat = make_cycle("torus", mx.twist, t2, proj, {}, form_zero(t2),
                              cf_zero(x, Ring::V));
  CoeffCurrent cw = cw_cycle(flat);
  CHECK(cw == one_term(x, "dxdy", {}, rat(1)));
  CHECK(apply_dH_chain(mx.twist, cw).is_zero());
  CHECK(apply_dH_chain(mx.twist, cw) == cycle_stokes_defect(flat));

  // current-only cycles: R is minus the twisted boundary of the datum
  Rng rng(311);
  for (int t = 0; t < 8; ++t) {
    CoeffCurrent phi =
        random_coeff_form(x, Ring::V, static_cast<int>(rng.range(0, 8)), 8, rng);
    DiffCycle c = a_spinc("free", mx.twist, phi);
    CHECK(R_spinc(c) ==
          cf_scale(rat(-1), apply_dH_chain(mx.twist, c.phi)));
  }
}

TEST_CASE("cochain functionals and the boundary-defect identity") {
  // trivial comparison data over a torus circle bundle model
  ProductModel flat = product_model(model_registry("t2"), model_registry("s1"));
  Twist base0 = make_twist(model_registry("t2"), form_zero(model_registry("t2")));
  Report r0 = cochain_stokes_report(trivial_cochain(flat), base0);
  CHECK(r0.ok);
  CHECK(has_line_with(r0, "matches the boundary-defect formula"));
  CHECK(has_line_with(r0, "functional is closed"));

  // a twisted base with a fiber comparison form: the functional picks up a
  // genuine boundary, and the assembled differential must equal the
  // Stokes-defect formula including the k and (-1)^{|f|} factors
  const CdgaModel& t3 = model_registry("t3");
  ProductModel pms = product_model(t3, model_registry("s2"));
  Twist baseh = make_twist(t3, form_scale(rat(3), form_gen(t3, "dxdydz")));
  Form kn = form_scale(rat(2), inject_f(pms, form_gen(*pms.f, "w")));
  CobordCochain ch = make_cochain(pms, {}, kn, cf_zero(t3, Ring::V));

  CoeffCurrent cw = cw_cochain(ch, baseh);
  CHECK(cw == one_term(t3, "dxdydz", {1}, rat(2)));
  CoeffCurrent bd = apply_dH_chain(baseh, cw);
  CHECK(bd == one_term(t3, "1", {2}, rat(6)));
  Report rh = cochain_stokes_report(ch, baseh);
  CHECK(rh.ok);
  CHECK(has_line_with(rh, "matches the boundary-defect formula"));
  CHECK(has_line_with(rh, "nonzero boundary"));

  CHECK_THROWS_WITH(
      make_cochain(pms, {}, pullback_x(pms, form_gen(t3, "dx")),
                   cf_zero(t3, Ring::V)),
      doctest::Contains("comparison form"));
}

TEST_CASE("coefficient transfer and fiber integration") {
  ProductModel pm = product_model(model_registry("t2"), model_registry("s1"));
  const CdgaModel& t2 = model_registry("t2");
  Rng rng(1201);

  // a pure base pullback integrates to zero; one fiber volume factor drops
  // to the base class it multiplies
  GradedPoly p = poly_var(Ring::N, 1);
  CoeffForm pulled = cf_tensor(pullback_x(pm, form_gen(t2, "dx")), p);
  CHECK(fiber_integrate_coeff(pm, pulled).is_zero());
  CoeffForm mixed = cf_tensor(
      wedge(pullback_x(pm, form_gen(t2, "dx")), inject_f(pm, form_gen(*pm.f, "dt"))),
      p);
  CHECK(fiber_integrate_coeff(pm, mixed) == cf_tensor(form_gen(t2, "dx"), p));

  // substitution against trivial data is the identity
  for (int t = 0; t < 6; ++t) {
    CoeffForm a = random_coeff_form(pm.model, Ring::N,
                                    static_cast<int>(rng.range(0, 6)), 8, rng);
    CHECK(cochain_transfer(trivial_cochain(pm), a) == a);
  }

  // binomial substitution: z^2 against kappa_n = 2(dxdy (x) 1)
  Form kn = form_scale(rat(2), pullback_x(pm, form_gen(t2, "dxdy")));
  CobordCochain ch = make_cochain(pm, {}, kn, cf_zero(t2, Ring::V));
  CoeffForm z2 = cf_tensor(form_unit(pm.model), poly_var(Ring::N, 0, 2));
  CoeffForm moved = cochain_transfer(ch, z2);
  CoeffForm want = z2;
  want.terms[{pm.model.slot("dxdy"), Mono{1}}] = 4;  // 2 z kappa
  // kappa^2 vanishes on the torus factor, so no constant term appears
  CHECK(moved == want);
}

TEST_CASE("fiber product cycles satisfy the projection formula") {
  const CdgaModel& t3 = model_registry("t3");
  ProductModel pms = product_model(t3, model_registry("s2"));
  Twist baseh = make_twist(t3, form_scale(rat(3), form_gen(t3, "dxdydz")));
  Twist prodh = make_twist(pms.model, pullback_x(pms, baseh.h));
  Form kn = form_scale(rat(2), inject_f(pms, form_gen(*pms.f, "w")));
  Form p1 = wedge(pullback_x(pms, form_gen(t3, "dxdy")),
                  inject_f(pms, form_gen(*pms.f, "w")));
  CobordCochain ch = make_cochain(pms, {p1}, kn, cf_zero(t3, Ring::V));
  Rng rng(7077);

  // the transfer of a current is the exact adjoint of the transfer of forms
  for (int t = 0; t < 10; ++t) {
    CoeffForm beta = random_coeff_form(pms.model, Ring::N,
                                       static_cast<int>(rng.range(0, 7)), 8, rng);
    CoeffCurrent phi = random_coeff_form(t3, Ring::V,
                                         static_cast<int>(rng.range(0, 7)), 8, rng);
    CHECK(pair(beta, current_transfer(ch, phi)) ==
          pair(fiber_integrate_coeff(pms, cochain_transfer(ch, beta)), phi));
  }

  // point cycle over the twisted base
  const CdgaModel& pt = model_registry("pt");
  std::map<std::string, Form> zim;
  for (const char* g : {"dx", "dy", "dz"}) zim[g] = form_zero(pt);
  DiffCycle point = make_cycle("point", baseh, pt, make_map(t3, pt, zim), {},
                               form_zero(pt), cf_zero(t3, Ring::V));
  Rng rng2(8088);
  CoeffCurrent phi = random_coeff_form(t3, Ring::V, 3, 8, rng2);
  DiffCycle free = a_spinc("free", baseh, phi);

  for (const DiffCycle* base : {&point, &free}) {
    BuiltCycle built = product_cycle(ch, prodh, *base);
    CHECK(built.cycle.twist.model == &pms.model);
    for (int t = 0; t < 10; ++t) {
      CoeffForm beta = random_coeff_form(pms.model, Ring::N,
                                         static_cast<int>(rng2.range(0, 7)), 8,
                                         rng2);
      CoeffForm down = fiber_integrate_coeff(pms, cochain_transfer(ch, beta));
      CHECK(pair(beta, cw_cycle(built.cycle)) == pair(down, cw_cycle(*base)));
      CHECK(pair(beta, R_spinc(built.cycle)) == pair(down, R_spinc(*base)));
    }
  }

  // an untwisted base with a full target: same formula, nonempty geometry
  const CdgaModel& t2 = model_registry("t2");
  ProductModel pmk = product_model(t2, model_registry("s3"));
  Twist b0 = make_twist(t2, form_zero(t2));
  Twist p0 = make_twist(pmk.model, form_zero(pmk.model));
  Form kn2 = pullback_x(pmk, form_gen(t2, "dxdy"));
  Form p12 = wedge(pullback_x(pmk, form_gen(t2, "dx")),
                   inject_f(pmk, form_gen(*pmk.f, "v")));
  CobordCochain ch2 = make_cochain(pmk, {p12}, kn2, cf_zero(t2, Ring::V));
  CdgaMap idt2 = make_map(t2, t2, {{"dx", form_gen(t2, "dx")},
                                   {"dy", form_gen(t2, "dy")}});
  Rng rng3(9099);
  DiffCycle torus = make_cycle("torus", b0, t2, idt2, {}, form_zero(t2),
                               random_coeff_form(t2, Ring::V, 2, 6, rng3));
  BuiltCycle built = product_cycle(ch2, p0, torus);
  CHECK(I_spinc(built.cycle) == built.cycle.m->name);
  for (int t = 0; t < 10; ++t) {
    CoeffForm beta = random_coeff_form(pmk.model, Ring::N,
                                       static_cast<int>(rng3.range(0, 7)), 8,
                                       rng3);
    CoeffForm down = fiber_integrate_coeff(pmk, cochain_transfer(ch2, beta));
    CHECK(pair(beta, cw_cycle(built.cycle)) == pair(down, cw_cycle(torus)));
    CHECK(pair(beta, R_spinc(built.cycle)) == pair(down, R_spinc(torus)));
  }

  CHECK_THROWS_WITH(product_cycle(ch2, p0, point),
                    doctest::Contains("base cycle does not live on the base"));
}

TEST_CASE("pair pushforward commutes with the twisted differential") {
  ProductModel pm = product_model(model_registry("t2"), model_registry("s1"));
  const CdgaModel& t2 = model_registry("t2");
  Twist b0 = make_twist(t2, form_zero(t2));
  Twist p0 = make_twist(pm.model, form_zero(pm.model));
  Rng rng(2323);

  for (int t = 0; t < 4; ++t) {
    CoeffForm alpha = random_coeff_form(pm.model, Ring::N,
                                        static_cast<int>(rng.range(0, 5)), 8, rng);
    AndersonPair inner = a_IOmega(p0, alpha);
    AndersonPair out = s1_integration(inner, pm, b0);
    CHECK(out.omega ==
          apply_DH(b0, fiber_integrate_coeff(pm, alpha)));
    Report rep = verify_compatibility(out, 6, 555 + t);
    CHECK(rep.ok);
  }

  // pushing through a curved cochain over a twisted base
  const CdgaModel& t3 = model_registry("t3");
  ProductModel pms = product_model(t3, model_registry("s2"));
  Twist baseh = make_twist(t3, form_scale(rat(3), form_gen(t3, "dxdydz")));
  Twist prodh = make_twist(pms.model, pullback_x(pms, baseh.h));
  Form kn = form_scale(rat(2), inject_f(pms, form_gen(*pms.f, "w")));
  CobordCochain ch = make_cochain(pms, {}, kn, cf_zero(t3, Ring::V));
  CoeffForm alpha = random_coeff_form(pms.model, Ring::N, 4, 8, rng);
  AndersonPair inner = a_IOmega(prodh, alpha);
  AndersonPair out = pushforward(inner, ch, baseh);
  CHECK(apply_DH(baseh, out.omega).is_zero());
  Report rep = verify_compatibility(out, 10, 777);
  CHECK(rep.ok);
  CHECK(has_line_with(rep, "10 current cycles checked"));

  // evaluating the pushed pair on a cycle is evaluation on the fiber product
  CdgaMap idt2 = make_map(t2, t2, {{"dx", form_gen(t2, "dx")},
                                   {"dy", form_gen(t2, "dy")}});
  DiffCycle torus = make_cycle("torus", b0, t2, idt2, {}, form_zero(t2),
                               cf_zero(t2, Ring::V));
  CoeffForm a2 = random_coeff_form(pm.model, Ring::N, 3, 8, rng);
  AndersonPair inner2 = a_IOmega(p0, a2);
  AndersonPair out2 = s1_integration(inner2, pm, b0);
  HValue hv = h_eval(out2, torus);
  BuiltCycle built = product_cycle(trivial_cochain(pm), p0, torus);
  REQUIRE(hv.available);
  CHECK(hv.value == h_eval(inner2, built.cycle).value);

  CHECK_THROWS_WITH(pushforward(inner2, ch, baseh),
                    doctest::Contains("pair does not live on the product"));
}

TEST_CASE("mixed products obey the twisted Leibniz rule") {
  const CdgaModel& s3 = model_registry("s3");

  // unit against the fundamental class
  CoeffForm unit = cf_tensor(form_unit(s3), poly_one(Ring::N));
  CoeffCurrent fund = cc_tensor(fundamental_current(s3), poly_one(Ring::V));
  MixedCurrent simple = mixed_product(unit, fund);
  MixedCurrent sw = cf_zero(s3, Ring::N);
  sw.terms[{s3.slot("v"), Mono{}}] = 1;
  CHECK(simple == sw);

  // an odd form against the fundamental class picks up the Koszul sign
  CoeffForm vz = cf_tensor(form_gen(s3, "v"), poly_var(Ring::N, 0));
  CoeffCurrent fu = cc_tensor(fundamental_current(s3), poly_var(Ring::V, 0));
  MixedCurrent signed_prod = mixed_product(vz, fu);
  MixedCurrent want = cf_zero(s3, Ring::N);
  want.terms[{s3.slot("1"), Mono{}}] = -1;
  CHECK(signed_prod == want);

  Mix mx(1);
  const CdgaModel& x = mx.pm.model;
  Form top = inject_f(mx.pm, form_gen(*mx.pm.f, "v"));
  Rng rng(616);
  int exercised = 0;
  for (int trial = 0; trial < 60; ++trial) {
    Twist h1 = make_twist(x, form_scale(rng.small_rat(), top));
    Twist h2 = make_twist(x, form_scale(rng.small_rat(), top));
    Twist ht = make_twist(x, form_add(h1.h, h2.h));
    CoeffForm alpha = random_coeff_form(x, Ring::N,
                                        static_cast<int>(rng.range(0, 9)), 6, rng);
    CoeffCurrent beta = random_coeff_form(x, Ring::V,
                                          static_cast<int>(rng.range(0, 9)), 6, rng);
    if (alpha.is_zero() || beta.is_zero()) continue;
    Rat sg = alpha.degree() % 2 ? Rat(-1) : Rat(1);
    MixedCurrent lhs = apply_DH_mixed(ht, mixed_product(alpha, beta));
    MixedCurrent rhs =
        cf_add(mixed_product(apply_DH(h1, alpha), beta),
               cf_scale(sg, mixed_product(alpha, apply_deltaH(h2, beta))));
    CHECK(lhs == rhs);
    if (!lhs.is_zero()) ++exercised;
  }
  CHECK(exercised > 20);

  CHECK_THROWS_WITH(mixed_product(unit, unit),
                    doctest::Contains("ring N form and a ring V current"));
}

TEST_CASE("anomaly pairs on the circle battery") {
  KClassFile file =
      load_kclass_file(data_path("kclasses/holonomy_quarter.kclass"));
  CHECK(file.name == "holonomy_quarter");
  AndersonPair pa = anomaly_map(file.cls, 2);
  CHECK(pa.omega.is_zero());

  const CdgaModel& s1 = model_registry("s1");
  Twist t0 = make_twist(s1, form_zero(s1));
  std::vector<DiffCycle> battery =
      load_cycle_file(t0, data_path("cycles/circle_battery.cycle"));

  HValue circle = h_eval(pa, battery[0]);
  REQUIRE(circle.available);
  CHECK(circle.value == rat(1, 4));
  HValue winding = h_eval(pa, battery[1]);
  REQUIRE(winding.available);
  CHECK(winding.value == rat(1, 2));
  HValue point = h_eval(pa, battery[2]);
  CHECK(!point.available);
  CHECK(point.why.find("is not the circle") != std::string::npos);
  HValue free = h_eval(pa, battery[3]);
  REQUIRE(free.available);
  CHECK(free.value == 0);

  Report rep = verify_compatibility(pa, 10, 4321);
  CHECK(rep.ok);

  CHECK_THROWS_WITH(anomaly_map(file.cls, 3),
                    doctest::Contains("positive even integer"));

  // tabulated pairs answer by name and refuse the rest
  AndersonPair tab = tabulated_pair(t0, cf_zero(s1, Ring::N),
                                    {{"circle", rat(1, 4)}});
  CHECK(h_eval(tab, battery[0]).value == rat(1, 4));
  CHECK(!h_eval(tab, battery[1]).available);
  const CdgaModel& c3 = model_registry("chart3");
  Twist c30 = make_twist(c3, form_zero(c3));
  CHECK_THROWS_WITH(
      tabulated_pair(c30, cf_tensor(form_gen(c3, "y"), poly_one(Ring::N)), {}),
      doctest::Contains("not closed"));
}

TEST_CASE("potential classes agree with the direct pair construction") {
  Mix mx(1);
  const CdgaModel& x = mx.pm.model;
  Twist tout = make_twist(x, form_scale(rat(-1), mx.twist.h));
  Rng rng(5150);

  GradedPoly lambda = poly_mul(ahat_series(20).value, exp_zeta(20));
  for (int deg2k : {2, 4}) {
    Form rho = random_odd_form(x, rng);
    DiffKClass ak = a_K(mx.twist, mx.kappa0, rho);
    AndersonPair pa = anomaly_map(ak, deg2k);
    CHECK(pa.twist.h == tout.h);
    CHECK(apply_DH(tout, pa.omega).is_zero());

    CoeffForm rl = cf_zero(x, Ring::N);
    for (int d = 1; d <= x.dim; d += 2) {
      Form part = form_part(rho, d);
      if (!part.is_zero()) rl = cf_add(rl, cf_tensor(part, lambda));
    }
    CoeffForm alpha = cf_scale(rat(-1), cf_part(rl, deg2k - 1));
    AndersonPair pj = a_IOmega(tout, alpha);
    CHECK(pa.omega == pj.omega);

    // s1 targets: the only place both evaluators produce eta data
    const CdgaModel& s1 = model_registry("s1");
    std::map<std::string, Form> im;
    im["dx"] = form_scale(rat(2), form_gen(s1, "dt"));
    im["dy"] = form_zero(s1);
    im["y"] = form_zero(s1);
    im["v"] = form_zero(s1);
    DiffCycle loop = make_cycle("loop", tout, s1, make_map(x, s1, im), {},
                                form_zero(s1), cf_zero(x, Ring::V));
    HValue ha = h_eval(pa, loop);
    HValue hj = h_eval(pj, loop);
    REQUIRE(ha.available);
    CHECK(ha.value == hj.value);
    for (int t = 0; t < 4; ++t) {
      CoeffCurrent phi = random_coeff_form(
          x, Ring::V, static_cast<int>(rng.range(0, 8)), 8, rng);
      DiffCycle c = a_spinc("free", tout, phi);
      CHECK(h_eval(pa, c).value == h_eval(pj, c).value);
    }
  }

  // a class with genuinely different connections still produces a closed
  // degree part and a compatible pair
  MatForm tp = random_matform1(x, 2, rng);
  SuperModuleConn gen = make_super(make_module_conn(mx.twist, tp, mx.kappa0),
                                   flat_conn(mx.twist, 2, mx.kappa0));
  DiffKClass cls = make_kclass(gen, random_odd_form(x, rng));
  for (int deg2k : {2, 4, 6}) {
    AndersonPair p = anomaly_map(cls, deg2k);
    CHECK(apply_DH(p.twist, p.omega).is_zero());
    Report rep = verify_compatibility(p, 6, 80 + deg2k);
    CHECK(rep.ok);
  }
}

TEST_CASE("connection moves descend to the pair") {
  KClassFile file =
      load_kclass_file(data_path("kclasses/holonomy_quarter.kclass"));
  const CdgaModel& s1 = model_registry("s1");
  Twist t0 = make_twist(s1, form_zero(s1));
  std::vector<DiffCycle> battery =
      load_cycle_file(t0, data_path("cycles/circle_battery.cycle"));

  MatForm tp = mat_zero(s1, 1);
  tp.at(0, 0) = form_scale(rat(7, 12), form_gen(s1, "dt"));
  MatForm tm = mat_zero(s1, 1);
  tm.at(0, 0) = form_scale(rat(1, 5), form_gen(s1, "dt"));

  Report rep = cs_descent_report(file.cls, tp, tm, battery, 2);
  CHECK(rep.ok);
  CHECK(has_line_with(rep, "omega is unchanged by the connection move"));
  CHECK(has_line_with(rep, "cycle circle: h = 1/4 (mod 1), unchanged"));
  CHECK(has_line_with(rep, "cycle winding2: h = 1/2 (mod 1), unchanged"));
  CHECK(has_line_with(rep,
                      "cycle circle: eta difference matches the transgression "
                      "integral, 2/15 (mod 1)"));
  CHECK(has_line_with(rep,
                      "cycle winding2: eta difference matches the "
                      "transgression integral, 4/15 (mod 1)"));
  CHECK(has_line_with(rep, "cycle point: eta unavailable"));
  CHECK(has_line_with(rep, "closed-target exactness term 0"));

  // the moved class evaluates identically on its own
  DiffKClass moved = kclass_cs_shift(file.cls, tp, tm);
  AndersonPair before = anomaly_map(file.cls, 2);
  AndersonPair after = anomaly_map(moved, 2);
  CHECK(h_eval(before, battery[0]).value == h_eval(after, battery[0]).value);

  // and a twisted class passes the same report with no circle targets
  Mix mx(1);
  Rng rng(417);
  DiffKClass cls = make_kclass(
      make_super(make_module_conn(mx.twist, random_matform1(mx.pm.model, 2, rng),
                                  mx.kappa0),
                 flat_conn(mx.twist, 2, mx.kappa0)),
      random_odd_form(mx.pm.model, rng));
  Twist tout = make_twist(mx.pm.model, form_scale(rat(-1), mx.twist.h));
  std::vector<DiffCycle> mixbat;
  mixbat.push_back(a_spinc("free", tout,
                           random_coeff_form(mx.pm.model, Ring::V, 3, 6, rng)));
  Report rep2 = cs_descent_report(cls, random_matform1(mx.pm.model, 2, rng),
                                  random_matform1(mx.pm.model, 2, rng), mixbat, 4);
  CHECK(rep2.ok);
  CHECK(has_line_with(rep2, "cycle free: h ="));
}

TEST_CASE("cycle files round trip") {
  const CdgaModel& s1 = model_registry("s1");
  Twist t0 = make_twist(s1, form_zero(s1));
  std::ifstream in(data_path("cycles/circle_battery.cycle"));
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  std::vector<DiffCycle> battery = parse_cycles(t0, text);
  CHECK(cycles_str(battery) == text);

  // a richer cycle keeps pont, curving and current data through the trip
  const CdgaModel& cp2 = model_registry("cp2");
  Twist c0 = make_twist(cp2, form_zero(cp2));
  CoeffCurrent phi = cf_zero(cp2, Ring::V);
  phi.terms[{cp2.slot("1"), Mono{}}] = -2;
  phi.terms[{cp2.slot("y"), Mono{1}}] = rat(1, 3);
  DiffCycle rich = make_cycle(
      "rich", c0, cp2, make_map(cp2, cp2, {{"y", form_gen(cp2, "y")}}),
      {form_scale(rat(5), form_gen(cp2, "y2"))},
      form_scale(rat(3), form_gen(cp2, "y")), phi);
  std::string ser = cycles_str({rich});
  std::vector<DiffCycle> back = parse_cycles(c0, ser);
  REQUIRE(back.size() == 1);
  CHECK(cycles_str(back) == ser);
  CHECK(cw_cycle(back[0]) == cw_cycle(rich));
  CHECK(back[0].phi == rich.phi);

  CHECK_THROWS_WITH(parse_cycles(t0, "cycle c on t2\nm-model empty\nphi = 0\n"),
                    doctest::Contains("the twist lives on s1"));
  CHECK_THROWS_WITH(
      parse_cycles(t0, "cycle c on s1\nm-model empty\nkappa = 0\n"),
      doctest::Contains("cannot carry pullback or target data"));
  CHECK_THROWS_WITH(
      parse_cycles(t0, "cycle c on s1\nm-model s1\npullback dt = dt\nfoo = 1\n"),
      doctest::Contains("unknown field foo"));
  CHECK_THROWS_WITH(
      parse_cycles(t0, "cycle c on s1\nm-model empty\nphi = u\n"),
      doctest::Contains("no dual(<basis>) factor"));
  CHECK_THROWS_WITH(
      parse_cycles(t0, "cycle c on s1\nm-model empty\nphi = dual(dt\n"),
      doctest::Contains("unclosed dual"));
}
