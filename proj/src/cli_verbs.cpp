#include "twistkit/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "twistkit/anomaly.hpp"
#include "twistkit/chern.hpp"
#include "twistkit/deligne.hpp"
#include "twistkit/eta.hpp"
#include "twistkit/twisted.hpp"

namespace twk {
namespace {

// --- output -----------------------------------------------------------------

struct Sink {
  std::ostream& os;
  bool csv = false;
};

std::string csv_field(const std::string& f) {
  if (f.find_first_of(",\"\n") == std::string::npos) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void row(Sink& s, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) s.os << (s.csv ? "," : " | ");
    s.os << (s.csv ? csv_field(cells[i]) : cells[i]);
  }
  s.os << "\n";
}

// A field line reads "name = value" in table mode and "name,value" in csv.
void field(Sink& s, const std::string& name, const std::string& value) {
  if (s.csv)
    row(s, {name, value});
  else
    s.os << name << " = " << value << "\n";
}

void report_rows(Sink& s, const std::string& tag, const Report& r) {
  for (const auto& line : r.lines) {
    bool fail = line.rfind("FAIL: ", 0) == 0;
    std::string text = fail ? line.substr(6) : line;
    if (s.csv)
      row(s, {tag, fail ? "fail" : "ok", text});
    else
      s.os << "[" << tag << "] " << line << "\n";
  }
}

void merge(Report& dst, const std::string& tag, const Report& src) {
  for (const auto& line : src.lines) {
    bool fail = line.rfind("FAIL: ", 0) == 0;
    if (fail)
      dst.fail(tag + ": " + line.substr(6));
    else
      dst.note(tag + ": " + line);
  }
}

std::string modstr(const Rat& r) { return rat_str(r) + " (mod 1)"; }

// --- input plumbing ----------------------------------------------------------

std::string data_dir() {
  const char* e = std::getenv("TWISTKIT_DATA_DIR");
  return e ? std::string(e) : std::string("data");
}

// Bare names live under the data directory; anything with a path separator
// or an extension is taken verbatim.
std::string resolve_data(const std::string& name, const std::string& sub,
                         const std::string& ext) {
  if (name.find('/') != std::string::npos ||
      name.find('.') != std::string::npos)
    return name;
  return data_dir() + "/" + sub + "/" + name + ext;
}

const CdgaModel& resolve_model(const std::string& name,
                               std::unique_ptr<CdgaModel>& owned) {
  try {
    return model_registry(name);
  } catch (const std::exception&) {
  }
  std::ifstream in(name);
  if (!in.good())
    throw std::invalid_argument("unknown model '" + name +
                                "' (neither a registry name nor a file)");
  std::ostringstream buf;
  buf << in.rdbuf();
  owned = std::make_unique<CdgaModel>(parse_model(buf.str(), name));
  return *owned;
}

Rat rat_arg(const std::string& text) {
  auto r = rat_parse(text);
  if (!r) throw std::invalid_argument("bad rational '" + text + "'");
  return *r;
}

std::string trim_cli(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Signed sums of [rat *] <basis> [* <poly>]; bare polynomials sit on the
// unit slot. Basis names may themselves contain '*' (product models), so the
// longest leading token run naming a slot wins.
CoeffForm cf_parse(const CdgaModel& m, const std::string& text, Ring ring) {
  auto bad = [&](const std::string& why) {
    return std::invalid_argument("coefficient form: " + why);
  };
  CoeffForm out = cf_zero(m, ring);
  std::string s = trim_cli(text);
  if (s.empty() || s == "0") return out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    Rat sign(1);
    while (pos < s.size() &&
           (std::isspace(static_cast<unsigned char>(s[pos])) ||
            s[pos] == '+' || s[pos] == '-')) {
      if (s[pos] == '-') sign = -sign;
      ++pos;
    }
    if (pos >= s.size()) throw bad("dangling sign");
    std::size_t end = pos;
    while (end < s.size() && s[end] != '+' && s[end] != '-') ++end;
    std::string term = trim_cli(s.substr(pos, end - pos));
    pos = end;
    if (term.empty()) throw bad("empty term");

    std::vector<std::string> toks;
    std::size_t t = 0;
    while (t <= term.size()) {
      std::size_t star = term.find('*', t);
      if (star == std::string::npos) star = term.size();
      toks.push_back(trim_cli(term.substr(t, star - t)));
      t = star + 1;
    }
    std::size_t i = 0;
    if (toks.size() > 1)
      if (auto r = rat_parse(toks[0])) {
        sign *= *r;
        i = 1;
      }
    auto join = [&](std::size_t a, std::size_t b) {
      std::string j;
      for (std::size_t k = a; k < b; ++k) {
        if (k > a) j += "*";
        j += toks[k];
      }
      return j;
    };
    std::size_t slot = m.slot("1");
    std::size_t next = i;
    for (std::size_t j = toks.size(); j > i; --j) {
      auto it = m.index.find(join(i, j));
      if (it != m.index.end()) {
        slot = it->second;
        next = j;
        break;
      }
    }
    Mono mono;
    if (next < toks.size()) {
      GradedPoly p = poly_parse(join(next, toks.size()), ring);
      if (p.terms.size() != 1 || p.terms.begin()->second != 1)
        throw bad("'" + term + "' must end in a plain product of generators");
      mono = p.terms.begin()->first;
    } else if (next == i) {
      // no slot matched: the whole term must be a polynomial (or a rational)
      if (i == 1 && toks.size() == 1) {
        // bare rational already absorbed into sign
      } else {
        GradedPoly p = poly_parse(join(i, toks.size()), ring);
        if (p.terms.size() != 1 || p.terms.begin()->second != 1)
          throw bad("'" + term + "' names no basis element of " + m.name);
        mono = p.terms.begin()->first;
      }
    }
    auto key = std::make_pair(slot, mono);
    out.terms[key] += sign;
    if (out.terms[key] == 0) out.terms.erase(key);
  }
  return out;
}

// --- verify suites -----------------------------------------------------------

Report suite_coeff() {
  Report r;
  int star_checked = 0;
  for (int d = 0; d <= 12; d += 2)
    for (const Mono& mu : monos_of_degree(d)) {
      GradedPoly phi(Ring::N);
      phi.add_term(mu, 1);
      if (!(star(phi, poly_var(Ring::V, 0)).terms == dzeta(phi).terms))
        r.fail("star against u differs from the zeta derivative on " +
               poly_str(phi));
      ++star_checked;
    }
  r.note("star-derivative identity checked on " +
         std::to_string(star_checked) + " monomials");

  int adj_checked = 0;
  for (int dv = 2; dv <= 6; dv += 2)
    for (const Mono& nu : monos_of_degree(dv)) {
      GradedPoly v(Ring::V);
      v.add_term(nu, 1);
      for (int d = 0; d <= 8; d += 2)
        for (const Mono& mu : monos_of_degree(d)) {
          GradedPoly phi(Ring::N);
          phi.add_term(mu, 1);
          for (const Mono& ka : monos_of_degree(d - dv)) {
            GradedPoly w(Ring::V);
            w.add_term(ka, 1);
            if (pair_coeff(star(phi, v), w) != pair_coeff(phi, poly_mul(v, w)))
              r.fail("cap adjointness fails at " + poly_str(phi) + " against " +
                     poly_str(v));
            ++adj_checked;
          }
        }
    }
  r.note("cap adjointness checked on " + std::to_string(adj_checked) +
         " triples");

  for (int d = 0; d <= 10; d += 2) {
    std::vector<Mono> ms = monos_of_degree(d);
    QMat g(ms.size(), ms.size());
    for (std::size_t i = 0; i < ms.size(); ++i)
      for (std::size_t j = 0; j < ms.size(); ++j) {
        GradedPoly a(Ring::N), b(Ring::V);
        a.add_term(ms[i], 1);
        b.add_term(ms[j], 1);
        g.at(i, j) = pair_coeff(a, b);
      }
    if (g.rank() != ms.size())
      r.fail("pairing Gram matrix singular in degree " + std::to_string(d));
  }
  r.note("pairing Gram matrices invertible through degree 10");
  return r;
}

Report suite_complex() {
  Report r;
  int squared = 0;
  auto check_complex = [&](const TwistedComplex& c, const std::string& what) {
    for (const auto& [n, dn] : c.d) {
      auto it = c.d.find(n + c.step());
      if (it == c.d.end()) continue;
      if (dn.cols() == 0 || it->second.cols() == 0) continue;
      if (!(it->second * dn).is_zero())
        r.fail("differential fails to square to zero for " + what +
               " leaving degree " + std::to_string(n));
      ++squared;
    }
  };
  auto run_model = [&](const CdgaModel& m, const Form& h, const std::string& tag) {
    Twist t = make_twist(m, h);
    check_complex(build_complex(t, ComplexKind::FormDH, 8), tag + " forms");
    check_complex(build_complex(t, ComplexKind::ChainBdH, 8), tag + " chains");
    check_complex(build_complex(t, ComplexKind::ChainDeltaH, 8),
                  tag + " signed chains");
    check_complex(build_k_complex(t, 2), tag + " Laurent");
  };
  for (const char* name : {"s1", "t2", "s2", "s3"}) {
    const CdgaModel& m = model_registry(name);
    run_model(m, form_zero(m), std::string(name) + " untwisted");
  }
  for (long k : {1L, 2L}) {
    const CdgaModel& s3 = model_registry("s3");
    run_model(s3, form_scale(rat(k), form_gen(s3, "v")),
              "s3 twist " + std::to_string(k));
    const CdgaModel& t3 = model_registry("t3");
    run_model(t3, form_scale(rat(k), form_gen(t3, "dxdydz")),
              "t3 twist " + std::to_string(k));
  }
  r.note("differentials square to zero in " + std::to_string(squared) +
         " degree windows");
  return r;
}

Report suite_duality(std::uint64_t seed) {
  Report r;
  const CdgaModel& s3 = model_registry("s3");
  for (long k : {0L, 1L, 2L}) {
    Twist t = make_twist(s3, form_scale(rat(k), form_gen(s3, "v")));
    merge(r, "s3 twist " + std::to_string(k),
          verify_adjoint(t, 25, seed + static_cast<std::uint64_t>(k)));
  }
  return r;
}

Report suite_twisted(int maxcd) {
  Report r;
  int cap = std::min(maxcd, 12);
  const CdgaModel& s3 = model_registry("s3");
  for (long k : {1L, 2L}) {
    Twist t = make_twist(s3, form_scale(rat(k), form_gen(s3, "v")));
    TwistedComplex c = build_complex(t, ComplexKind::FormDH, cap);
    bool match = true;
    for (int n = 0; n <= 8; ++n) {
      int expect = 0;
      for (const Mono& mu : monos_of_degree(n))
        if (mu.empty() || mu[0] == 0) ++expect;
      if (cohomology(c, n).betti != expect) {
        r.fail("twisted cohomology of s3 (twist " + std::to_string(k) +
               ") deviates from the Pontryagin-line count in degree " +
               std::to_string(n));
        match = false;
      }
    }
    if (match)
      r.note("s3 twist " + std::to_string(k) +
             ": twisted ranks match the Pontryagin-line count through degree 8");
    for (int n = 0; n <= 8; n += 2) {
      SsCheck ss = ss_d3_check(t, n, cap);
      if (ss.refused || ss.e4_rank != ss.actual || !ss.report.ok)
        merge(r, "spectral comparison n=" + std::to_string(n), ss.report);
    }
    r.note("s3 twist " + std::to_string(k) +
           ": spectral comparison agrees in even degrees through 8");
  }
  return r;
}

Report suite_deligne() {
  Report r;
  for (long k : {1L, 2L, 3L}) {
    std::string name = "s3_" + std::to_string(k);
    auto bundle = load_cover_file(resolve_data(name, "covers", ".cover"));
    merge(r, name, check_cocycle(bundle->cocycle));
    DDClass dd = dd_class(bundle->cocycle);
    if (dd.cls.torsion.empty() && dd.cls.free_part.size() == 1 &&
        dd.cls.free_part[0] == Int(k))
      r.note(name + ": degree class = " + std::to_string(k));
    else
      r.fail(name + ": degree class is not " + std::to_string(k));
    if (integrate(curvature(bundle->cocycle)) == rat(k))
      r.note(name + ": curvature integral = " + std::to_string(k));
    else
      r.fail(name + ": curvature integral is not " + std::to_string(k));
  }
  auto torsion = make_torsion_bundle();
  merge(r, "torsion", check_cocycle(torsion->cocycle));
  DDClass dd = dd_class(torsion->cocycle);
  if (dd.cls.free_part.empty() && dd.cls.torsion.size() == 1 &&
      dd.cls.torsion[0].second == Int(2) && !curvature(torsion->cocycle).is_zero() == false)
    r.note("torsion bundle: class of order 2 with zero curvature");
  else
    r.fail("torsion bundle: expected an order-2 class with zero curvature");
  return r;
}

const ProductModel& chart_product() {
  static ProductModel pm =
      product_model(model_registry("t2"), model_registry("chart3"));
  return pm;
}

Report suite_chern(std::uint64_t seed) {
  Report r;
  const ProductModel& pm = chart_product();
  Form h = form_scale(rat(2), inject_f(pm, form_gen(*pm.f, "v")));
  Twist t = make_twist(pm.model, h);
  Form kappa0 = form_scale(rat(2), inject_f(pm, form_gen(*pm.f, "y")));
  Rng rng(seed);
  for (int trial = 0; trial < 3; ++trial) {
    ModuleConn c0 = make_module_conn(t, random_matform1(pm.model, 2, rng), kappa0);
    ModuleConn c1 = make_module_conn(t, random_matform1(pm.model, 2, rng), kappa0);
    if (!bianchi_residual(c0).is_zero())
      r.fail("Bianchi residual nonzero on trial " + std::to_string(trial));
    if (!twisted_d(t, ch_twisted(c0)).is_zero())
      r.fail("character fails to close on trial " + std::to_string(trial));
    Form lhs = twisted_d(t, cs_transgression(c0, c1));
    Form rhs = form_add(ch_twisted(c1), form_scale(rat(-1), ch_twisted(c0)));
    if (!(lhs == rhs))
      r.fail("transgression residual nonzero on trial " + std::to_string(trial));
  }
  r.note("Bianchi, closedness and transgression residuals vanish on 3 seeded "
         "trials (rank 2, twisted product model)");

  KClassFile file =
      load_kclass_file(resolve_data("holonomy_quarter", "kclasses", ".kclass"));
  if (!bianchi_residual(file.cls.gen.plus).is_zero() ||
      !bianchi_residual(file.cls.gen.minus).is_zero())
    r.fail("holonomy_quarter: Bianchi residual nonzero");
  if (!R_K(file.cls).is_zero())
    r.fail("holonomy_quarter: curvature difference is nonzero");
  else
    r.note("holonomy_quarter: flat difference class, R = 0");
  return r;
}

Report suite_anomaly(std::uint64_t seed) {
  Report r;
  KClassFile file =
      load_kclass_file(resolve_data("holonomy_quarter", "kclasses", ".kclass"));
  AndersonPair pa = anomaly_map(file.cls, 2);
  if (!pa.omega.is_zero()) r.fail("holonomy_quarter: omega is not zero");
  const CdgaModel& s1 = model_registry("s1");
  Twist t0 = make_twist(s1, form_zero(s1));
  std::vector<DiffCycle> battery = load_cycle_file(
      t0, resolve_data("circle_battery", "cycles", ".cycle"));
  struct Want {
    const char* name;
    Rat value;
  } wants[] = {{"circle", rat(1, 4)}, {"winding2", rat(1, 2)},
               {"free_current", rat(0)}};
  for (const DiffCycle& c : battery) {
    HValue hv = h_eval(pa, c);
    bool known = false;
    for (const Want& w : wants)
      if (c.name == w.name) {
        known = true;
        if (!hv.available)
          r.fail("h unavailable on cycle " + c.name);
        else if (hv.value != w.value)
          r.fail("h on cycle " + c.name + " is " + rat_str(hv.value));
        else
          r.note("cycle " + c.name + ": h = " + modstr(hv.value));
      }
    if (!known && hv.available)
      r.fail("h unexpectedly available on cycle " + c.name);
  }
  merge(r, "compatibility", verify_compatibility(pa, 8, seed));

  MatForm tp = mat_zero(s1, 1);
  tp.at(0, 0) = form_scale(rat(7, 12), form_gen(s1, "dt"));
  MatForm tm = mat_zero(s1, 1);
  tm.at(0, 0) = form_scale(rat(1, 5), form_gen(s1, "dt"));
  merge(r, "descent", cs_descent_report(file.cls, tp, tm, battery, 2));
  return r;
}

Report suite_eta() {
  Report r;
  for (long i = 1; i < 12; ++i) {
    Rat a = rat(i, 12);
    Rat sum = eta_reduced(make_circle_dirac(a)) +
              eta_reduced(make_circle_dirac(mod1(rat(-i, 12))));
    if (mod1(sum) != 0)
      r.fail("reflection identity fails at holonomy " + rat_str(a));
  }
  r.note("reflection identity holds at twelfths");
  double worst = 0;
  for (long i = 1; i < 8; ++i) {
    Rat closed = eta_reduced(make_circle_dirac(rat(i, 8)));
    double diff =
        std::abs(eta_reduced_series(static_cast<double>(i) / 8.0) -
                 closed.get_d());
    worst = std::max(worst, diff);
  }
  if (worst < 1e-9)
    r.note("zeta-regularized series matches the closed form at eighths");
  else
    r.fail("zeta-regularized series strays from the closed form");
  if (eta_difference(rat(1, 4), rat(5, 8)) != rat(5, 8))
    r.fail("eta difference at (1/4, 5/8) is wrong");
  return r;
}

Report suite_pushforward(std::uint64_t seed) {
  Report r;
  Rng rng(seed);
  int intertwined = 0;
  auto run = [&](const CdgaModel& base, const char* fiber, const Form& hb,
                 const std::string& volname) {
    ProductModel pm = product_model(base, model_registry(fiber));
    Twist bt = make_twist(base, hb);
    Twist pt = make_twist(pm.model, pullback_x(pm, hb));
    for (int trial = 0; trial < 4; ++trial) {
      CoeffForm a = random_coeff_form(pm.model, Ring::N,
                                      static_cast<int>(rng.range(0, 6)), 6, rng);
      if (!(fiber_integrate_coeff(pm, apply_DH(pt, a)) ==
            apply_DH(bt, fiber_integrate_coeff(pm, a))))
        r.fail("fiber integration fails to intertwine the differentials over " +
               base.name + " x " + fiber);
      else
        ++intertwined;
    }
    Form vol = inject_f(pm, form_gen(*pm.f, volname));
    for (std::size_t s = 0; s < base.n(); ++s) {
      CoeffForm pulled =
          cf_tensor(pullback_x(pm, form_basis(base, s)), poly_one(Ring::N));
      if (!fiber_integrate_coeff(pm, pulled).is_zero())
        r.fail("pullback of " + base.basis[s].name +
               " has a nonzero fiber integral");
      CoeffForm wedged = cf_tensor(
          wedge(pullback_x(pm, form_basis(base, s)), vol), poly_one(Ring::N));
      if (!(fiber_integrate_coeff(pm, wedged) ==
            cf_tensor(form_basis(base, s), poly_one(Ring::N))))
        r.fail("volume-wedged pullback of " + base.basis[s].name +
               " does not integrate back to itself");
    }
  };
  const CdgaModel& t2 = model_registry("t2");
  run(t2, "s1", form_zero(t2), "dt");
  run(t2, "s3", form_zero(t2), "v");
  const CdgaModel& t3 = model_registry("t3");
  run(t3, "s1", form_scale(rat(2), form_gen(t3, "dxdydz")), "dt");
  r.note("fiber integration intertwines the twisted differentials on " +
         std::to_string(intertwined) + " seeded trials");
  r.note("pure pullbacks integrate to zero; volume-wedged pullbacks return");
  return r;
}

// --- verbs -------------------------------------------------------------------

int cmd_cohomology(Sink& sink, const std::string& model,
                   const std::string& twist, const std::string& coeff,
                   const std::string& range, int maxcd) {
  std::unique_ptr<CdgaModel> owned;
  const CdgaModel& m = resolve_model(model, owned);
  Twist t = make_twist(m, form_parse(m, twist, "--twist"));
  ComplexKind kind = coeff == "V" ? ComplexKind::ChainBdH : ComplexKind::FormDH;
  int lo = 0, hi = m.dim;
  if (!range.empty()) {
    std::size_t dots = range.find("..");
    if (dots == std::string::npos)
      throw std::invalid_argument("range must look like 0..8");
    lo = std::stoi(range.substr(0, dots));
    hi = std::stoi(range.substr(dots + 2));
  }
  TwistedComplex c = build_complex(t, kind, maxcd);
  row(sink, {"n", "rank Z", "rank B", "betti"});
  for (int n = lo; n <= hi; ++n) {
    DegreeHomology h = cohomology(c, n);
    row(sink, {std::to_string(n), std::to_string(h.rank_z),
               std::to_string(h.rank_b), std::to_string(h.betti)});
  }
  return 0;
}

int cmd_verify(Sink& sink, const std::string& suite, std::uint64_t seed,
               int maxcd) {
  std::vector<std::pair<std::string, Report>> runs;
  auto want = [&](const char* name) {
    return suite == "all" || suite == name;
  };
  if (want("coeff")) runs.emplace_back("coeff", suite_coeff());
  if (want("complex")) runs.emplace_back("complex", suite_complex());
  if (want("duality")) runs.emplace_back("duality", suite_duality(seed));
  if (want("twisted")) runs.emplace_back("twisted", suite_twisted(maxcd));
  if (want("deligne")) runs.emplace_back("deligne", suite_deligne());
  if (want("chern")) runs.emplace_back("chern", suite_chern(seed));
  if (want("anomaly")) runs.emplace_back("anomaly", suite_anomaly(seed));
  if (want("eta")) runs.emplace_back("eta", suite_eta());
  if (want("pushforward"))
    runs.emplace_back("pushforward", suite_pushforward(seed));
  bool ok = true;
  for (const auto& [name, rep] : runs) {
    report_rows(sink, name, rep);
    ok = ok && rep.ok;
  }
  if (sink.csv)
    row(sink, {"verify", ok ? "ok" : "fail",
               std::to_string(runs.size()) + " suites"});
  else
    sink.os << "verify: " << (ok ? "ok" : "FAIL") << " ("
            << runs.size() << " suites)\n";
  return ok ? 0 : 1;
}

std::string dd_str(const DDClass& dd) {
  std::vector<std::string> parts;
  for (const Int& f : dd.cls.free_part) parts.push_back(f.get_str());
  for (const auto& [a, n] : dd.cls.torsion)
    parts.push_back(a.get_str() + " mod " + n.get_str());
  if (parts.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += " + ";
    out += parts[i];
  }
  return out;
}

int cmd_deligne(Sink& sink, const std::string& cover, bool dd, bool curv,
                bool check) {
  if (!dd && !curv && !check) dd = curv = check = true;
  auto bundle = load_cover_file(resolve_data(cover, "covers", ".cover"));
  int rc = 0;
  if (check) {
    Report rep = check_cocycle(bundle->cocycle);
    report_rows(sink, "check", rep);
    if (!rep.ok) rc = 1;
  }
  if (dd) field(sink, "DD", dd_str(dd_class(bundle->cocycle)));
  if (curv)
    field(sink, "curvature integral",
          rat_str(integrate(curvature(bundle->cocycle))));
  return rc;
}

int cmd_chern(Sink& sink, const std::string& kclass) {
  KClassFile file = load_kclass_file(resolve_data(kclass, "kclasses", ".kclass"));
  const DiffKClass& k = file.cls;
  field(sink, "kclass", file.name);
  field(sink, "model", k.gen.plus.twist.model->name);
  field(sink, "rank", std::to_string(k.gen.plus.rank));
  bool bianchi = bianchi_residual(k.gen.plus).is_zero() &&
                 bianchi_residual(k.gen.minus).is_zero();
  field(sink, "bianchi residual zero", bianchi ? "yes" : "no");
  Form ch = ch_super(k.gen);
  bool closed = twisted_d(k.gen.plus.twist, ch).is_zero();
  field(sink, "character closed", closed ? "yes" : "no");
  field(sink, "ch", form_str(ch));
  field(sink, "R", form_str(R_K(k)));
  return bianchi && closed ? 0 : 1;
}

// The eta column of the anomaly table: available on empty cycles and on
// diagonal pullbacks to the circle, "-" otherwise.
std::string eta_cell(const DiffKClass& k, const DiffCycle& c) {
  if (!c.m) return modstr(rat(0));
  if (c.m->dim != 1) return "-";
  Rat sum(0);
  for (int side = 0; side < 2; ++side) {
    const ModuleConn& mc = side ? k.gen.minus : k.gen.plus;
    Rat sg = side ? Rat(-1) : Rat(1);
    for (std::size_t i = 0; i < mc.rank; ++i)
      for (std::size_t j = 0; j < mc.rank; ++j) {
        Form pulled = map_apply(c.pullback, mc.theta.at(i, j));
        if (i != j) {
          if (!pulled.is_zero()) return "-";
          continue;
        }
        sum += sg * eta_reduced(make_circle_dirac(mod1(integrate(pulled))));
      }
  }
  return modstr(mod1(sum));
}

int cmd_anomaly(Sink& sink, const std::string& kclass,
                const std::string& cycles, int deg) {
  KClassFile file = load_kclass_file(resolve_data(kclass, "kclasses", ".kclass"));
  AndersonPair pa = anomaly_map(file.cls, deg);
  std::vector<DiffCycle> battery =
      load_cycle_file(pa.twist, resolve_data(cycles, "cycles", ".cycle"));
  row(sink, {"cycle", "omega-pairing", "eta-term", "h"});
  for (const DiffCycle& c : battery) {
    Rat op = mod1(-pair(pa.omega, c.phi));
    HValue hv = h_eval(pa, c);
    row(sink, {c.name, modstr(op), eta_cell(file.cls, c),
               hv.available ? modstr(hv.value) : "unavailable"});
  }
  return 0;
}

int cmd_pair(Sink& sink, const std::string& model, const std::string& form,
             const std::string& current) {
  std::unique_ptr<CdgaModel> owned;
  const CdgaModel& m = resolve_model(model, owned);
  CoeffForm a = cf_parse(m, form, Ring::N);
  CoeffCurrent b = current_parse(m, current, "--current");
  field(sink, "pairing", rat_str(pair(a, b)));
  return 0;
}

int cmd_pushforward(Sink& sink, const std::string& base,
                    const std::string& fiber, const std::string& twist,
                    const std::string& form, std::uint64_t seed, int maxcd) {
  std::unique_ptr<CdgaModel> owned;
  const CdgaModel& bm = resolve_model(base, owned);
  ProductModel pm = product_model(bm, model_registry(fiber));
  Twist bt = make_twist(bm, form_parse(bm, twist, "--twist"));
  Twist pt = make_twist(pm.model, pullback_x(pm, bt.h));
  if (!form.empty()) {
    CoeffForm a = cf_parse(pm.model, form, Ring::N);
    CoeffForm down = fiber_integrate_coeff(pm, a);
    field(sink, "integrated", cf_str(down));
    bool inter = fiber_integrate_coeff(pm, apply_DH(pt, a)) ==
                 apply_DH(bt, down);
    field(sink, "intertwines", inter ? "yes" : "no");
    return inter ? 0 : 1;
  }
  Report r;
  Rng rng(seed);
  for (int trial = 0; trial < 5; ++trial) {
    CoeffForm a = random_coeff_form(pm.model, Ring::N,
                                    static_cast<int>(rng.range(0, 6)),
                                    std::min(maxcd, 8), rng);
    if (!(fiber_integrate_coeff(pm, apply_DH(pt, a)) ==
          apply_DH(bt, fiber_integrate_coeff(pm, a))))
      r.fail("intertwining fails on trial " + std::to_string(trial));
  }
  r.note("fiber integration intertwines the differentials on 5 seeded trials");
  CoeffForm alpha = random_coeff_form(pm.model, Ring::N, 3,
                                      std::min(maxcd, 8), rng);
  AndersonPair out =
      pushforward(a_IOmega(pt, alpha), trivial_cochain(pm), bt);
  merge(r, "pushed pair", verify_compatibility(out, 5, seed));
  report_rows(sink, "pushforward", r);
  return r.ok ? 0 : 1;
}

int cmd_eta(Sink& sink, const std::string& holonomy,
            const std::vector<std::string>& difference, bool series) {
  if (!difference.empty()) {
    Rat d = eta_difference(rat_arg(difference[0]), rat_arg(difference[1]));
    field(sink, "eta difference", modstr(d));
    return 0;
  }
  if (holonomy.empty())
    throw std::invalid_argument("eta needs --holonomy or --difference");
  Rat a = rat_arg(holonomy);
  Rat r = eta_reduced(make_circle_dirac(a));
  field(sink, "eta", modstr(r));
  if (series) {
    double diff = std::abs(eta_reduced_series(a.get_d()) - r.get_d());
    bool ok = diff < 1e-9;
    field(sink, "series check", ok ? "ok" : "off");
    return ok ? 0 : 1;
  }
  return 0;
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"exact computation kit for twisted differential cohomology"};
  app.name("twistkit");
  std::uint64_t seed = 7;
  std::string format = "table";
  int maxcd = kMaxCoeffDegreeDefault;
  app.add_option("--seed", seed, "seed for randomized checks")
      ->envname("TWISTKIT_SEED");
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"table", "csv"}))
      ->envname("TWISTKIT_FORMAT");
  app.add_option("--max-coeff-degree", maxcd,
                 "truncation degree for coefficient monomials")
      ->envname("TWISTKIT_MAX_COEFF_DEGREE");

  auto* co = app.add_subcommand("cohomology", "twisted cohomology table")->fallthrough();
  std::string co_model, co_twist = "0", co_coeff = "N", co_range;
  co->add_option("--model", co_model)->required();
  co->add_option("--twist", co_twist);
  co->add_option("--coeff", co_coeff)->check(CLI::IsMember({"N", "V"}));
  co->add_option("--range", co_range);

  auto* ve = app.add_subcommand("verify", "invariant batteries")->fallthrough();
  std::string ve_suite = "all";
  ve->add_option("--suite", ve_suite)
      ->check(CLI::IsMember({"all", "coeff", "complex", "duality", "twisted",
                             "deligne", "chern", "anomaly", "eta",
                             "pushforward"}));

  auto* de = app.add_subcommand("deligne", "cocycle reports")->fallthrough();
  std::string de_cover;
  bool de_dd = false, de_curv = false, de_check = false;
  de->add_option("--cover", de_cover)->required();
  de->add_flag("--dd", de_dd);
  de->add_flag("--curvature", de_curv);
  de->add_flag("--check", de_check);

  auto* chv = app.add_subcommand("chern", "character report for a difference class")->fallthrough();
  std::string ch_kclass;
  chv->add_option("--kclass", ch_kclass)->required();

  auto* an = app.add_subcommand("anomaly", "anomaly table over a cycle battery")->fallthrough();
  std::string an_kclass, an_cycles;
  int an_deg = 2;
  an->add_option("--kclass", an_kclass)->required();
  an->add_option("--cycles", an_cycles)->required();
  an->add_option("--deg", an_deg);

  auto* pr = app.add_subcommand("pair", "pair a coefficient form with a current")->fallthrough();
  std::string pr_model, pr_form, pr_current;
  pr->add_option("--model", pr_model)->required();
  pr->add_option("--form", pr_form)->required();
  pr->add_option("--current", pr_current)->required();

  auto* pf = app.add_subcommand("pushforward", "fiber integration checks")->fallthrough();
  std::string pf_base, pf_fiber, pf_twist = "0", pf_form;
  pf->add_option("--base", pf_base)->required();
  pf->add_option("--fiber", pf_fiber)->required();
  pf->add_option("--twist", pf_twist);
  pf->add_option("--form", pf_form);

  auto* et = app.add_subcommand("eta", "reduced eta invariants on the circle")->fallthrough();
  std::string et_hol;
  std::vector<std::string> et_diff;
  bool et_series = false;
  et->add_option("--holonomy", et_hol);
  et->add_option("--difference", et_diff)->expected(2);
  et->add_flag("--series", et_series);

  app.require_subcommand(1);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream dummy;
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  Sink sink{out, format == "csv"};
  try {
    if (co->parsed())
      return cmd_cohomology(sink, co_model, co_twist, co_coeff, co_range, maxcd);
    if (ve->parsed()) return cmd_verify(sink, ve_suite, seed, maxcd);
    if (de->parsed()) return cmd_deligne(sink, de_cover, de_dd, de_curv, de_check);
    if (chv->parsed()) return cmd_chern(sink, ch_kclass);
    if (an->parsed()) return cmd_anomaly(sink, an_kclass, an_cycles, an_deg);
    if (pr->parsed()) return cmd_pair(sink, pr_model, pr_form, pr_current);
    if (pf->parsed())
      return cmd_pushforward(sink, pf_base, pf_fiber, pf_twist, pf_form, seed,
                             maxcd);
    if (et->parsed()) return cmd_eta(sink, et_hol, et_diff, et_series);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace twk
