#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "twistkit/twisted.hpp"

using namespace twk;

namespace {

GradedPoly npoly(const std::string& s) { return poly_parse(s, Ring::N); }
GradedPoly vpoly(const std::string& s) { return poly_parse(s, Ring::V); }

Twist twist_of(const CdgaModel& m, const std::string& h) {
  return make_twist(m, form_parse(m, h));
}

// Counts monomials of total degree n with no zeta factor, i.e. the rank the
// twisted three-sphere complex should have in degree n.
int pure_p_count(int n) {
  int c = 0;
  for (const Mono& mu : monos_of_degree(n))
    if (mu.empty() || mu[0] == 0) ++c;
  return c;
}

CoeffCurrent point_current(const CdgaModel& m, const GradedPoly& v) {
  Current pt = current_dual(m, 0);
  return cc_tensor(pt, v);
}

}  // namespace

TEST_CASE("twist construction enforces degree and closedness") {
  const CdgaModel& s3 = model_registry("s3");
  CHECK_NOTHROW(make_twist(s3, form_parse(s3, "2*v")));
  CHECK_NOTHROW(make_twist(s3, form_parse(s3, "0")));
  CHECK_THROWS_AS(make_twist(s3, form_parse(s3, "1")), std::invalid_argument);

  CdgaModel leak = parse_model(
      "model leak\n"
      "dim 4\n"
      "gen a deg 3\n"
      "gen q deg 4\n"
      "d a = q\n",
      "leak");
  CHECK_THROWS_WITH_AS(make_twist(leak, form_parse(leak, "a")),
                       doctest::Contains("closed"), std::invalid_argument);
}

TEST_CASE("cochain differential on pure tensors") {
  const CdgaModel& s3 = model_registry("s3");
  Twist t = twist_of(s3, "v");

  CoeffForm a = cf_tensor(form_unit(s3), npoly("z"));
  CHECK(apply_DH(t, a) == cf_tensor(form_parse(s3, "v"), npoly("1")));

  CoeffForm a2 = cf_tensor(form_unit(s3), npoly("z^2"));
  CHECK(apply_DH(t, a2) == cf_tensor(form_parse(s3, "v"), npoly("2*z")));

  // No zeta factor: only the geometric differential acts.
  const CdgaModel& ch = model_registry("chart3");
  Twist t0 = twist_of(ch, "0");
  CoeffForm b = cf_tensor(form_parse(ch, "y"), npoly("p2"));
  CHECK(apply_DH(t0, b) == cf_tensor(form_parse(ch, "v"), npoly("p2")));

  // Twist scales linearly.
  Twist t2 = twist_of(s3, "2*v");
  CHECK(apply_DH(t2, a) == cf_tensor(form_parse(s3, "2*v"), npoly("1")));
}

TEST_CASE("chain differential sends the fundamental current to the point") {
  const CdgaModel& s3 = model_registry("s3");
  Twist t = twist_of(s3, "v");
  CoeffCurrent fund = cc_tensor(fundamental_current(s3), vpoly("1"));
  CHECK(apply_dH_chain(t, fund) == point_current(s3, vpoly("u")));

  Twist t2 = twist_of(s3, "2*v");
  CHECK(apply_dH_chain(t2, fund) ==
        cf_scale(Rat(2), point_current(s3, vpoly("u"))));

  // Total degree drops by one: fundamental x 1 sits in degree 3, image in 2.
  CHECK(fund.degree() == 3);
  CHECK(apply_dH_chain(t, fund).degree() == 2);
}

TEST_CASE("pairing normalizations") {
  const CdgaModel& s3 = model_registry("s3");
  Form v = form_parse(s3, "v");
  CoeffCurrent fund1 = cc_tensor(fundamental_current(s3), vpoly("1"));
  CHECK(pair(cf_tensor(v, npoly("1")), fund1) == 1);
  CHECK(pair(cf_tensor(form_unit(s3), npoly("z")), point_current(s3, vpoly("u"))) == 1);
  CHECK(pair(cf_tensor(v, npoly("z")),
             cc_tensor(fundamental_current(s3), vpoly("u"))) == 1);
  // zeta^k against u^k picks up k factorial.
  CHECK(pair(cf_tensor(form_unit(s3), npoly("z^3")),
             point_current(s3, vpoly("u^3"))) == 6);
  // Degree mismatch pairs to zero.
  CHECK(pair(cf_tensor(v, npoly("1")), point_current(s3, vpoly("u"))) == 0);
  CHECK_THROWS_AS(pair(cf_tensor(v, npoly("1")),
                       cf_tensor(v, npoly("1"))),
                  std::invalid_argument);
}

TEST_CASE("adjointness holds and a corrupted sign breaks it") {
  const CdgaModel& s3 = model_registry("s3");
  const CdgaModel& t3 = model_registry("t3");
  for (int k = 0; k <= 2; ++k) {
    Twist t = make_twist(s3, form_parse(s3, std::to_string(k) + "*v"));
    Report r = verify_adjoint(t, 200, 7 + k);
    CHECK(r.ok);
  }
  Report rt = verify_adjoint(twist_of(t3, "dxdydz"), 200, 11);
  CHECK(rt.ok);

  // Replacing the chain differential by the signed variant flips the twist
  // term on odd currents, so the explicit example above must now disagree.
  Twist t = twist_of(s3, "v");
  CoeffForm a = cf_tensor(form_unit(s3), npoly("z"));
  CoeffCurrent b = cc_tensor(fundamental_current(s3), vpoly("1"));
  Rat lhs = pair(apply_DH(t, a), b);
  CHECK(lhs == 1);
  CHECK(pair(a, apply_dH_chain(t, b)) == lhs);
  CHECK(pair(a, apply_deltaH(t, b)) != lhs);

  int broken = 0;
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    int n = static_cast<int>(rng.range(0, 6));
    CoeffForm x = random_coeff_form(s3, Ring::N, n, 10, rng);
    CoeffCurrent y = random_coeff_form(s3, Ring::V, n + 1, 10, rng);
    if (pair(apply_DH(t, x), y) != pair(x, apply_deltaH(t, y))) ++broken;
  }
  CHECK(broken > 0);
}

TEST_CASE("assembled complexes square to zero across models and twists") {
  std::vector<std::string> names = {"pt", "s1", "t2", "s2", "t3", "s3", "s4", "cp2"};
  for (const std::string& name : names) {
    const CdgaModel& m = model_registry(name);
    std::vector<std::string> twists = {"0"};
    if (name == "s3")
      for (int k = 1; k <= 3; ++k) twists.push_back(std::to_string(k) + "*v");
    if (name == "t3")
      for (int k = 1; k <= 3; ++k) twists.push_back(std::to_string(k) + "*dxdydz");
    for (const std::string& ht : twists) {
      Twist t = twist_of(m, ht);
      CHECK_NOTHROW(build_complex(t, ComplexKind::FormDH, 8));
      CHECK_NOTHROW(build_complex(t, ComplexKind::ChainBdH, 8));
      CHECK_NOTHROW(build_complex(t, ComplexKind::ChainDeltaH, 8));
      CHECK_NOTHROW(build_k_complex(t, 4));
    }
  }
}

TEST_CASE("twisted three-sphere ranks match the polynomial count") {
  const CdgaModel& s3 = model_registry("s3");
  for (int k = 1; k <= 3; ++k) {
    Twist t = make_twist(s3, form_parse(s3, std::to_string(k) + "*v"));
    TwistedComplex c = build_complex(t, ComplexKind::FormDH, 16);
    for (int n = 0; n <= 12; ++n) {
      DegreeHomology hn = cohomology(c, n);
      CHECK(hn.betti == pure_p_count(n));
      for (const CoeffForm& rep : hn.reps)
        CHECK(apply_DH(t, rep).is_zero());
    }
  }
  // Untwisted comparison in the same degrees: the whole coefficient ring
  // survives in degrees 0 and 3 mod nothing.
  Twist t0 = twist_of(s3, "0");
  TwistedComplex c0 = build_complex(t0, ComplexKind::FormDH, 16);
  CHECK(cohomology(c0, 4).betti == static_cast<int>(monos_of_degree(4).size()));
  CHECK(cohomology(c0, 3).betti == 1);
}

TEST_CASE("degree-four twisted class is the first Pontryagin generator") {
  const CdgaModel& s3 = model_registry("s3");
  Twist t = twist_of(s3, "v");
  TwistedComplex c = build_complex(t, ComplexKind::FormDH, 12);
  DegreeHomology h4 = cohomology(c, 4);
  REQUIRE(h4.betti == 1);
  REQUIRE(h4.reps.size() == 1);
  CoeffForm p1 = cf_tensor(form_unit(s3), npoly("p1"));
  const Rat& lead = h4.reps[0].terms.begin()->second;
  CHECK(h4.reps[0] == cf_scale(lead, p1));
}

TEST_CASE("zero twist reduces to the Kunneth baseline") {
  for (const std::string& name : {"s1", "t2", "s2", "s3", "cp2"}) {
    const CdgaModel& m = model_registry(name);
    Twist t = twist_of(m, "0");
    TwistedComplex c = build_complex(t, ComplexKind::FormDH, 12);
    for (int n = 0; n <= 12; ++n) {
      int expect = 0;
      for (int i = 0; i <= m.dim; ++i) {
        int j = n - i;
        if (j < 0 || j > 12) continue;
        expect += model_betti(m, i) * static_cast<int>(monos_of_degree(j).size());
      }
      CHECK(cohomology(c, n).betti == expect);
    }
  }
}

TEST_CASE("chain homology is perfectly paired with cohomology") {
  struct Cfg {
    std::string model, h;
  };
  for (const Cfg& cfg : std::vector<Cfg>{{"s3", "v"}, {"s3", "2*v"},
                                         {"t3", "dxdydz"}, {"s2", "0"}}) {
    const CdgaModel& m = model_registry(cfg.model);
    Twist t = twist_of(m, cfg.h);
    TwistedComplex cf = build_complex(t, ComplexKind::FormDH, 10);
    TwistedComplex cc = build_complex(t, ComplexKind::ChainBdH, 10);
    for (int n = 0; n <= 8; ++n) {
      DegreeHomology hf = cohomology(cf, n);
      DegreeHomology hc = cohomology(cc, n);
      CHECK(hf.betti == hc.betti);
      QMat gram(hf.reps.size(), hc.reps.size());
      for (std::size_t i = 0; i < hf.reps.size(); ++i)
        for (std::size_t j = 0; j < hc.reps.size(); ++j)
          gram.at(i, j) = pair(hf.reps[i], hc.reps[j]);
      CHECK(gram.rank() == hf.reps.size());
    }
  }
}

TEST_CASE("Laurent complex ranks in the stable band") {
  const CdgaModel& s3 = model_registry("s3");
  for (int k = 1; k <= 2; ++k) {
    Twist t = make_twist(s3, form_parse(s3, std::to_string(k) + "*v"));
    TwistedComplex c = build_k_complex(t, 6);
    for (int n = -2; n <= 4; ++n) CHECK(cohomology(c, n).betti == 0);
  }
  Twist t0 = twist_of(s3, "0");
  TwistedComplex c0 = build_k_complex(t0, 6);
  for (int n = -2; n <= 4; ++n) CHECK(cohomology(c0, n).betti == 1);
  for (int n = -2; n <= 3; ++n)
    CHECK(cohomology(c0, n).betti + cohomology(c0, n + 1).betti == 2);

  // Three-torus with a volume twist: the wedge with the volume class kills the
  // unit and the volume, leaving three classes per degree.
  const CdgaModel& t3 = model_registry("t3");
  TwistedComplex ck = build_k_complex(twist_of(t3, "dxdydz"), 6);
  for (int n = -2; n <= 4; ++n) CHECK(cohomology(ck, n).betti == 3);
}

TEST_CASE("pullback along a circle factor commutes with the differential") {
  const CdgaModel& s3 = model_registry("s3");
  const CdgaModel& s1 = model_registry("s1");
  ProductModel p = product_model(s3, s1);
  Twist tx = twist_of(s3, "2*v");
  Twist tp = make_twist(p.model, pullback_x(p, tx.h));

  auto lift = [&](const CoeffForm& a) {
    CoeffForm out = cf_zero(p.model, Ring::N);
    for (const auto& [key, c] : a.terms) {
      GradedPoly mono(Ring::N);
      mono.add_term(key.second, c);
      out = cf_add(out, cf_tensor(pullback_x(p, form_basis(s3, key.first)), mono));
    }
    return out;
  };

  Rng rng(19);
  for (int i = 0; i < 40; ++i) {
    int n = static_cast<int>(rng.range(0, 8));
    CoeffForm a = random_coeff_form(s3, Ring::N, n, 10, rng);
    CHECK(lift(apply_DH(tx, a)) == apply_DH(tp, lift(a)));
  }
}

TEST_CASE("untwisted model cohomology helpers") {
  const CdgaModel& t3 = model_registry("t3");
  CHECK(model_betti(t3, 0) == 1);
  CHECK(model_betti(t3, 1) == 3);
  CHECK(model_betti(t3, 2) == 3);
  CHECK(model_betti(t3, 3) == 1);
  const CdgaModel& cp2 = model_registry("cp2");
  CHECK(model_betti(cp2, 2) == 1);
  CHECK(model_betti(cp2, 3) == 0);
  const CdgaModel& ch = model_registry("chart3");
  for (int i = 1; i <= 9; ++i) CHECK(model_betti(ch, i) == 0);
  CHECK(model_betti(ch, 0) == 1);

  QVec coords = model_class_coords(t3, form_parse(t3, "dx + 2*dy"));
  REQUIRE(coords.size() == 3);
  CHECK(coords[0] == 1);
  CHECK(coords[1] == 2);
  CHECK(coords[2] == 0);
  // An exact form has no class part.
  CHECK(model_class_coords(ch, form_parse(ch, "v")).empty());
}

TEST_CASE("two-step spectral comparison") {
  const CdgaModel& s3 = model_registry("s3");
  for (int k = 1; k <= 2; ++k) {
    Twist t = make_twist(s3, form_parse(s3, std::to_string(k) + "*v"));
    for (int n = 0; n <= 8; ++n) {
      SsCheck s = ss_d3_check(t, n, 12);
      CHECK_FALSE(s.refused);
      CHECK(s.report.ok);
      CHECK(s.e4_rank == s.actual);
    }
  }
  for (int n = 0; n <= 6; ++n) {
    SsCheck s = ss_d3_check(twist_of(model_registry("t3"), "dxdydz"), n, 12);
    CHECK(s.report.ok);
    SsCheck s0 = ss_d3_check(twist_of(model_registry("s2"), "0"), n, 12);
    CHECK(s0.report.ok);
    SsCheck sc = ss_d3_check(twist_of(model_registry("chart3"), "v"), n, 12);
    CHECK(sc.report.ok);
  }
}

TEST_CASE("spectral comparison refuses when higher pages could act") {
  CdgaModel s5 = parse_model(
      "model s5\n"
      "dim 5\n"
      "gen v5 deg 5\n"
      "integral v5 = 1\n",
      "s5");
  Twist t = make_twist(s5, form_parse(s5, "0"));
  SsCheck s = ss_d3_check(t, 0, 8);
  CHECK(s.refused);
  CHECK_FALSE(s.report.ok);
  REQUIRE_FALSE(s.report.lines.empty());
  CHECK(s.report.lines[0].find("degrees 0 and 5") != std::string::npos);
}

TEST_CASE("cohomology rejects degrees outside the band") {
  const CdgaModel& s3 = model_registry("s3");
  TwistedComplex c = build_complex(twist_of(s3, "v"), ComplexKind::FormDH, 8);
  CHECK_THROWS_AS(cohomology(c, -1), std::out_of_range);
  CHECK_THROWS_AS(cohomology(c, 100), std::out_of_range);
}

TEST_CASE("coefficient form utilities") {
  const CdgaModel& s3 = model_registry("s3");
  CoeffForm a = cf_tensor(form_parse(s3, "v"), npoly("z + p1"));
  CHECK_FALSE(a.homogeneous());
  CHECK(cf_part(a, 5) == cf_tensor(form_parse(s3, "v"), npoly("z")));
  CHECK(cf_part(a, 7) == cf_tensor(form_parse(s3, "v"), npoly("p1")));
  CHECK(cf_truncate(a, 2) == cf_part(a, 5));
  CHECK(cf_sub(a, a).is_zero());
  CHECK(cf_str(cf_zero(s3, Ring::N)) == "0");
  CHECK(cf_str(cf_tensor(form_unit(s3), npoly("p1"))) == "(p1)");
  CHECK_FALSE(cf_str(a).empty());
}
