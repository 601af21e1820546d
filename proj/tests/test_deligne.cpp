#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "twistkit/deligne.hpp"

using namespace twk;

namespace {

bool has_line_with(const Report& rep, const std::string& needle) {
  for (const auto& l : rep.lines)
    if (l.find(needle) != std::string::npos) return true;
  return false;
}

bool cocycles_equal(const DeligneCocycle& a, const DeligneCocycle& b) {
  return a.eps == b.eps && a.A == b.A && a.B == b.B;
}

DeligneOneSimplex make_simplex(const CoverDiagram& cd, DeligneCocycle src,
                               DeligneCocycle tgt, bool curving_preserving = true) {
  DeligneOneSimplex s;
  s.cover = &cd;
  s.source = std::move(src);
  s.target = std::move(tgt);
  s.curving_preserving = curving_preserving;
  for (const auto& [v, f] : cd.faces) {
    if (v.size() == 2) s.g[v] = PLFunction{};
    if (v.size() == 1) s.lambda[v[0]] = form_zero(f.model);
  }
  return s;
}

// Two patches over the sphere model, with enough room in the patch algebras
// for nonzero curvings and gauge moves: each patch carries a closed 1-form
// used as the coordinate differential.
CoverDiagram two_patch_sphere() {
  CoverDiagram cd;
  cd.name = "s2pair";
  cd.patches = {1, 2};
  CoverFace f1;
  f1.verts = {1};
  f1.model = parse_model("model q1\ndim 2\ngen al deg 1\ngen w1 deg 2\n", "q1");
  cd.faces.emplace(f1.verts, std::move(f1));
  CoverFace f2;
  f2.verts = {2};
  f2.model = parse_model("model q2\ndim 2\ngen be deg 1\ngen w2 deg 2\n", "q2");
  cd.faces.emplace(f2.verts, std::move(f2));
  CoverFace f12;
  f12.verts = {1, 2};
  f12.model = parse_model("model q12\ndim 2\ngen a12 deg 1\ngen w12 deg 2\n", "q12");
  cd.faces.emplace(f12.verts, std::move(f12));

  const CdgaModel& m1 = cd.faces.at({1}).model;
  const CdgaModel& m2 = cd.faces.at({2}).model;
  const CdgaModel& m12 = cd.faces.at({1, 2}).model;
  cd.faces.at({1}).dt[2] = form_gen(m1, "al");
  cd.faces.at({1}).dt[1] = form_scale(Rat(-1), form_gen(m1, "al"));
  cd.faces.at({2}).dt[1] = form_gen(m2, "be");
  cd.faces.at({2}).dt[2] = form_scale(Rat(-1), form_gen(m2, "be"));
  cd.faces.at({1, 2}).dt[1] = form_scale(Rat(-1), form_gen(m12, "a12"));
  cd.faces.at({1, 2}).dt[2] = form_gen(m12, "a12");

  cd.rmaps.emplace(
      std::make_pair(std::vector<int>{1}, std::vector<int>{1, 2}),
      make_map(m1, m12,
               {{"al", form_gen(m12, "a12")}, {"w1", form_gen(m12, "w12")}}));
  cd.rmaps.emplace(
      std::make_pair(std::vector<int>{2}, std::vector<int>{1, 2}),
      make_map(m2, m12,
               {{"be", form_scale(Rat(-1), form_gen(m12, "a12"))},
                {"w2", form_gen(m12, "w12")}}));

  cd.global = &model_registry("s2");
  cd.global_restrict.emplace(1, make_map(*cd.global, m1, {{"w", form_gen(m1, "w1")}}));
  cd.global_restrict.emplace(2, make_map(*cd.global, m2, {{"w", form_gen(m2, "w2")}}));
  validate_cover(cd);
  return cd;
}

}  // namespace

TEST_CASE("piecewise linear scalars: arithmetic, printing, parsing") {
  PLFunction f = pl_add(pl_const(rat(3, 2)), pl_term(4, rat(-1)));
  CHECK(pl_str(f) == "3/2 - t4");
  CHECK(pl_parse("3/2 - t4") == f);
  CHECK(pl_parse("-t4 + 3/2") == f);
  CHECK(pl_str(PLFunction{}) == "0");
  CHECK(pl_parse("0") == PLFunction{});
  PLFunction g = pl_parse("2*t1 + 1/3*t2 - 5");
  CHECK(g.c0 == rat(-5));
  CHECK(g.lin.at(1) == rat(2));
  CHECK(g.lin.at(2) == rat(1, 3));
  CHECK(pl_parse(pl_str(g)) == g);
  CHECK(pl_sub(g, g) == PLFunction{});
  CHECK(pl_scale(rat(0), g) == PLFunction{});
  CHECK(pl_scale(rat(2), pl_term(1, rat(1, 2))) == pl_term(1, rat(1)));
  CHECK_THROWS_AS((void)pl_parse("t"), std::invalid_argument);
  CHECK_THROWS_AS((void)pl_parse("2 +"), std::invalid_argument);
}

TEST_CASE("five-patch sphere cover: shipped cocycles pass every layer") {
  for (long k : {1L, 2L, 3L}) {
    auto bundle = make_s3_bundle(k);
    Report rep = check_cocycle(bundle->cocycle);
    INFO(rep.str());
    CHECK(rep.ok);
    CHECK(has_line_with(rep, "delta eps integral"));
    CHECK(has_line_with(rep, "delta A = d eps"));
    CHECK(has_line_with(rep, "delta B = d A"));
  }
}

TEST_CASE("zero cocycle passes and B-only mutations fail naming the edge") {
  auto bundle = make_s3_bundle(1);
  const CoverDiagram& cd = bundle->cover;
  DeligneCocycle z = zero_cocycle(cd);
  CHECK(check_cocycle(z).ok);

  DeligneCocycle bad = z;
  bad.B[1] = form_gen(cd.face({1}).model, "b");
  Report rep = check_cocycle(bad);
  CHECK(!rep.ok);
  CHECK(has_line_with(rep, "delta B != d A on double 1 2"));
}

TEST_CASE("curvature restricts to every curving differential") {
  auto bundle = make_s3_bundle(2);
  const CdgaModel& s3 = model_registry("s3");
  Form H = curvature(bundle->cocycle);
  CHECK(H == form_scale(rat(2), form_gen(s3, "v")));
  CHECK(integrate(H) == rat(2));
  CHECK(dform(H).is_zero());

  CHECK(curvature(zero_cocycle(bundle->cover)).is_zero());

  // scaling by 1/2 lands on the valid class-1 cocycle; scaling by 1/4 does
  // not, and the integrality layer catches it while the curvature still glues
  DeligneCocycle half = scale_cocycle(rat(1, 2), bundle->cocycle);
  CHECK(curvature(half) == form_gen(s3, "v"));
  CHECK(check_cocycle(half).ok);
  DeligneCocycle quarter = scale_cocycle(rat(1, 4), bundle->cocycle);
  CHECK(curvature(quarter) == form_scale(rat(1, 2), form_gen(s3, "v")));
  Report qrep = check_cocycle(quarter);
  CHECK(!qrep.ok);
  CHECK(has_line_with(qrep, "is not an integer on quadruple"));
}

TEST_CASE("degree readout of the class-k cocycle") {
  for (long k : {0L, 1L, 2L, 3L}) {
    auto bundle = make_s3_bundle(k);
    DDClass dd = dd_class(bundle->cocycle);
    CHECK(dd.cls.torsion.empty());
    REQUIRE(dd.cls.free_part.size() == 1);
    CHECK(dd.cls.free_part[0] == Int(k));
    CHECK(dd.cls.is_zero() == (k == 0));
    // the Cech representative is supported on the apex-free quadruple
    for (const auto& [tet, val] : dd.cocycle) {
      if (tet == std::vector<int>{1, 2, 3, 4})
        CHECK(val == Int(k));
      else
        CHECK(val == Int(0));
    }
    CHECK(integrate(curvature(bundle->cocycle)) == Rat(Int(k)));
  }
}

TEST_CASE("cocycle addition: data, classes and curvatures add") {
  auto bundle = make_s3_bundle(1);
  const DeligneCocycle& c1 = bundle->cocycle;
  DeligneCocycle c2 = scale_cocycle(rat(2), c1);
  DeligneCocycle sum = add_cocycles(c1, c2);
  CHECK(check_cocycle(sum).ok);
  CHECK(dd_class(sum).cls.free_part[0] == Int(3));
  CHECK(integrate(curvature(sum)) == rat(3));
  CHECK(cocycles_equal(add_cocycles(c1, c2), add_cocycles(c2, c1)));
  CHECK(cocycles_equal(add_cocycles(add_cocycles(c1, c1), c2),
                       add_cocycles(c1, add_cocycles(c1, c2))));
  CHECK(cocycles_equal(add_cocycles(c1, zero_cocycle(bundle->cover)), c1));

  DeligneCocycle neg = scale_cocycle(rat(-1), c1);
  DeligneCocycle cancel = add_cocycles(c1, neg);
  CHECK(dd_class(cancel).cls.is_zero());
  CHECK(curvature(cancel).is_zero());
  CHECK(cocycles_equal(cancel, zero_cocycle(bundle->cover)));
}

TEST_CASE("sub-diagram restriction commutes with curvature") {
  auto bundle = make_s3_bundle(3);
  CoverDiagram sub = sub_diagram(bundle->cover, {1, 2, 3, 4});
  DeligneCocycle rc = restrict_cocycle(bundle->cocycle, sub);
  CHECK(check_cocycle(rc).ok);
  CHECK(curvature(rc) == curvature(bundle->cocycle));

  CoverDiagram small = sub_diagram(bundle->cover, {0, 1, 2});
  DeligneCocycle rs = restrict_cocycle(bundle->cocycle, small);
  CHECK(check_cocycle(rs).ok);
  CHECK(curvature(rs) == curvature(bundle->cocycle));
}

TEST_CASE("text form round trips losslessly") {
  auto bundle = make_s3_bundle(2);
  std::string text = cover_str(bundle->cover, bundle->cocycle);
  auto reparsed = parse_cover(text, "round-trip");
  CHECK(cover_str(reparsed->cover, reparsed->cocycle) == text);
  CHECK(check_cocycle(reparsed->cocycle).ok);
  CHECK(dd_class(reparsed->cocycle).cls.free_part[0] == Int(2));
  CHECK(integrate(curvature(reparsed->cocycle)) == rat(2));
}

TEST_CASE("shipped cover files match the builders") {
  for (long k : {1L, 2L, 3L}) {
    auto built = make_s3_bundle(k);
    std::string path =
        std::string(TWISTKIT_DATA_DIR) + "/covers/s3_" + std::to_string(k) + ".cover";
    auto loaded = load_cover_file(path);
    CHECK(cover_str(loaded->cover, loaded->cocycle) ==
          cover_str(built->cover, built->cocycle));
    CHECK(check_cocycle(loaded->cocycle).ok);
    CHECK(dd_class(loaded->cocycle).cls.free_part[0] == Int(k));
  }
}

TEST_CASE("cover parser rejects malformed input") {
  CHECK_THROWS_WITH_AS((void)parse_cover("cover x\nfrobnicate 1\n", "bad"),
                       doctest::Contains("unknown keyword"), std::invalid_argument);
  CHECK_THROWS_WITH_AS((void)parse_cover("cover x\nmodel m\ndim 0\n", "bad"),
                       doctest::Contains("never closed"), std::invalid_argument);
  CHECK_THROWS_WITH_AS((void)parse_cover("cover x\neps 1 2 3 = t1\n", "bad"),
                       doctest::Contains("unknown triple"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      (void)parse_cover("cover x\nrestrict 1 into 1 2 : a = 0\n", "bad"),
      doctest::Contains("unknown"), std::invalid_argument);
}

TEST_CASE("torsion cover: order-two class, doubling trivializes") {
  auto bundle = make_torsion_bundle();
  const CoverDiagram& cd = bundle->cover;
  const DeligneCocycle& c = bundle->cocycle;

  Report rep = check_cocycle(c);
  INFO(rep.str());
  CHECK(rep.ok);

  DDClass dd = dd_class(c);
  CHECK(dd.cls.free_part.empty());
  REQUIRE(dd.cls.torsion.size() == 1);
  CHECK(dd.cls.torsion[0].second == Int(2));
  CHECK(dd.cls.torsion[0].first == Int(1));
  CHECK(!dd.cls.is_zero());
  CHECK(curvature(c).is_zero());

  DeligneCocycle doubled = scale_cocycle(rat(2), c);
  CHECK(check_cocycle(doubled).ok);
  CHECK(dd_class(doubled).cls.is_zero());

  DeligneOneSimplex triv = make_simplex(cd, doubled, zero_cocycle(cd));
  Report tr = trivialization_check(triv);
  INFO(tr.str());
  CHECK(tr.ok);
  CHECK(has_line_with(tr, "descended curving vanishes"));

  // the undoubled class does not trivialize: delta g cannot reach the
  // half-integer eps data
  DeligneOneSimplex bad = make_simplex(cd, c, zero_cocycle(cd));
  Report br = trivialization_check(bad);
  CHECK(!br.ok);
  CHECK(has_line_with(br, "delta g misses"));
}

TEST_CASE("trivialization check reports a curving that fails to descend") {
  auto bundle = make_s3_bundle(1);
  const CoverDiagram& cd = bundle->cover;
  DeligneOneSimplex s =
      make_simplex(cd, bundle->cocycle, zero_cocycle(cd), /*curving_preserving=*/false);
  Report rep = trivialization_check(s);
  CHECK(!rep.ok);
  CHECK(has_line_with(rep, "descended curving"));

  DeligneOneSimplex idz = make_simplex(cd, zero_cocycle(cd), zero_cocycle(cd));
  CHECK(check_one_simplex(idz).ok);
  CHECK(kappa(idz).is_zero());
  Report zr = trivialization_check(idz);
  CHECK(zr.ok);
}

TEST_CASE("descended curving survives gauge modification") {
  CoverDiagram cd = two_patch_sphere();
  const CdgaModel& s2 = model_registry("s2");

  DeligneCocycle c = zero_cocycle(cd);
  c.B[1] = form_gen(cd.face({1}).model, "w1");
  c.B[2] = form_gen(cd.face({2}).model, "w2");
  CHECK(check_cocycle(c).ok);
  CHECK(curvature(c).is_zero());

  DeligneOneSimplex id = make_simplex(cd, c, c);
  CHECK(check_one_simplex(id).ok);
  Form k = kappa(id);
  CHECK(k == form_gen(s2, "w"));
  CHECK(kappa(id, /*include_source_curving=*/false).is_zero());

  std::map<int, PLFunction> r;
  r[1] = pl_term(2, rat(1));
  DeligneOneSimplex moved = r_modify(id, r);
  CHECK(!(moved.lambda.at(1) == id.lambda.at(1)));
  CHECK(!(moved.g.at({1, 2}) == id.g.at({1, 2})));
  Report mr = check_one_simplex(moved);
  INFO(mr.str());
  CHECK(mr.ok);
  CHECK(kappa(moved) == k);
  CHECK(kappa(moved, false).is_zero());

  // constant gauge data is also invisible to the descended curving
  std::map<int, PLFunction> rc;
  rc[1] = pl_const(rat(5, 7));
  rc[2] = pl_const(rat(-2));
  DeligneOneSimplex shifted = r_modify(id, rc);
  CHECK(check_one_simplex(shifted).ok);
  CHECK(kappa(shifted) == k);

  // a lambda mutation breaks the overlap equation and is reported
  DeligneOneSimplex brk = id;
  brk.lambda[1] = form_gen(cd.face({1}).model, "al");
  Report rep = check_one_simplex(brk);
  CHECK(!rep.ok);
  CHECK(has_line_with(rep, "double 1 2"));
}

TEST_CASE("presence bookkeeping under restriction") {
  auto bundle = make_s3_bundle(1);
  const CoverDiagram& cd = bundle->cover;
  CHECK(cd.present({1, 2, 3}) == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(cd.present({0, 1, 2, 3}) == std::vector<int>{0, 1, 2, 3});
  CHECK(cd.present({1, 2, 3, 4}) == std::vector<int>{1, 2, 3, 4});

  PLFunction f = bundle->cocycle.eps.at({1, 2, 3});  // proportional to t4
  CHECK(!f.lin.empty());
  CHECK(pl_restrict(cd, f, {0, 1, 2, 3}).lin.empty());
  CHECK(pl_restrict(cd, f, {1, 2, 3, 4}) == f);

  // constant detection uses the barycentric relation on the region
  PLFunction sum;
  for (int a : {1, 2, 3, 4}) sum = pl_add(sum, pl_term(a, rat(5)));
  auto val = pl_const_value(cd, sum, {1, 2, 3, 4});
  REQUIRE(val.has_value());
  CHECK(*val == rat(5));
  PLFunction skew = pl_add(pl_term(1, rat(5)), pl_term(2, rat(5)));
  CHECK(!pl_const_value(cd, skew, {1, 2, 3, 4}).has_value());
}
