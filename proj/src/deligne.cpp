#include "twistkit/deligne.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "twistkit/qmat.hpp"

namespace twk {

namespace {

std::string face_str(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<int> face_union(const std::vector<int>& a, int extra) {
  std::vector<int> u = a;
  u.push_back(extra);
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

// a with the vertex at position drop removed
std::vector<int> face_minus(const std::vector<int>& a, std::size_t drop) {
  std::vector<int> u;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (i != drop) u.push_back(a[i]);
  return u;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

PLFunction pl_const(const Rat& c) {
  PLFunction f;
  f.c0 = c;
  return f;
}

PLFunction pl_term(int label, const Rat& coeff) {
  PLFunction f;
  if (coeff != 0) f.lin[label] = coeff;
  return f;
}

PLFunction pl_add(const PLFunction& a, const PLFunction& b) {
  PLFunction out = a;
  out.c0 += b.c0;
  for (const auto& [l, c] : b.lin) {
    Rat& slot = out.lin[l];
    slot += c;
    if (slot == 0) out.lin.erase(l);
  }
  return out;
}

PLFunction pl_scale(const Rat& c, const PLFunction& a) {
  PLFunction out;
  if (c == 0) return out;
  out.c0 = c * a.c0;
  for (const auto& [l, k] : a.lin)
    if (k != 0) out.lin[l] = c * k;
  return out;
}

PLFunction pl_sub(const PLFunction& a, const PLFunction& b) {
  return pl_add(a, pl_scale(Rat(-1), b));
}

std::string pl_str(const PLFunction& a) {
  std::ostringstream out;
  bool first = true;
  auto emit = [&](Rat c, const std::string& var) {
    if (first) {
      if (c < 0) {
        out << "-";
        c = -c;
      }
    } else {
      out << (c < 0 ? " - " : " + ");
      if (c < 0) c = -c;
    }
    if (var.empty())
      out << rat_str(c);
    else if (c == 1)
      out << var;
    else
      out << rat_str(c) << "*" << var;
    first = false;
  };
  if (a.c0 != 0) emit(a.c0, "");
  for (const auto& [l, c] : a.lin)
    if (c != 0) emit(c, "t" + std::to_string(l));
  if (first) out << "0";
  return out.str();
}

PLFunction pl_parse(const std::string& text, const std::string& source) {
  PLFunction f;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument(source + ": " + msg + " in '" + text + "'");
  };
  skip();
  if (i == text.size()) fail("empty expression");
  while (i < text.size()) {
    int sign = 1;
    while (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      if (text[i] == '-') sign = -sign;
      ++i;
      skip();
    }
    if (i >= text.size()) fail("dangling sign");
    Rat coeff = 1;
    bool bare_const = false;
    if (std::isdigit(static_cast<unsigned char>(text[i]))) {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '/'))
        ++j;
      auto r = rat_parse(text.substr(i, j - i));
      if (!r) fail("bad rational literal");
      coeff = *r;
      i = j;
      skip();
      if (i < text.size() && text[i] == '*') {
        ++i;
        skip();
      } else {
        bare_const = true;
      }
    }
    if (bare_const) {
      f.c0 += Rat(sign) * coeff;
      skip();
      continue;
    }
    if (i >= text.size() || text[i] != 't') fail("expected coordinate t<k>");
    ++i;
    std::size_t j = i;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i) fail("expected vertex label after t");
    int label = std::stoi(text.substr(i, j - i));
    i = j;
    Rat& slot = f.lin[label];
    slot += Rat(sign) * coeff;
    if (slot == 0) f.lin.erase(label);
    skip();
  }
  return f;
}

bool CoverDiagram::has_face(const std::vector<int>& verts) const {
  return faces.count(verts) > 0;
}

const CoverFace& CoverDiagram::face(const std::vector<int>& verts) const {
  auto it = faces.find(verts);
  if (it == faces.end())
    throw std::invalid_argument("no face " + face_str(verts) + " on cover '" + name + "'");
  return it->second;
}

const CdgaMap& CoverDiagram::rmap(const std::vector<int>& sub,
                                  const std::vector<int>& sup) const {
  auto it = rmaps.find({sub, sup});
  if (it == rmaps.end())
    throw std::invalid_argument("no restriction " + face_str(sub) + " -> " +
                                face_str(sup) + " on cover '" + name + "'");
  return it->second;
}

std::vector<int> CoverDiagram::present(const std::vector<int>& verts) const {
  std::vector<int> out;
  for (int p : patches)
    if (faces.count(face_union(verts, p))) out.push_back(p);
  return out;
}

PLFunction pl_restrict(const CoverDiagram& cd, const PLFunction& f,
                       const std::vector<int>& face) {
  auto pres = cd.present(face);
  PLFunction out;
  out.c0 = f.c0;
  for (const auto& [l, c] : f.lin)
    if (c != 0 && std::binary_search(pres.begin(), pres.end(), l)) out.lin[l] = c;
  return out;
}

Form pl_d(const CoverDiagram& cd, const std::vector<int>& face, const PLFunction& f) {
  const CoverFace& cf = cd.face(face);
  PLFunction g = pl_restrict(cd, f, face);
  Form out = form_zero(cf.model);
  for (const auto& [l, c] : g.lin) {
    if (c == 0) continue;
    auto it = cf.dt.find(l);
    if (it == cf.dt.end())
      throw std::invalid_argument("no designated dt" + std::to_string(l) + " on face " +
                                  face_str(face));
    out = form_add(out, form_scale(c, it->second));
  }
  return out;
}

std::optional<Rat> pl_const_value(const CoverDiagram& cd, const PLFunction& f,
                                  const std::vector<int>& face) {
  PLFunction g = pl_restrict(cd, f, face);
  if (g.lin.empty()) return g.c0;
  auto pres = cd.present(face);
  // the coordinates of the labels present on the region sum to one, so f is
  // constant exactly when every present label carries the same coefficient
  Rat common;
  bool have = false;
  for (int p : pres) {
    auto it = g.lin.find(p);
    Rat c = it == g.lin.end() ? Rat(0) : it->second;
    if (!have) {
      common = c;
      have = true;
    } else if (c != common) {
      return std::nullopt;
    }
  }
  return g.c0 + common;
}

void validate_cover(const CoverDiagram& cd) {
  if (cd.patches.empty()) throw std::invalid_argument("cover has no patches");
  if (!std::is_sorted(cd.patches.begin(), cd.patches.end()) ||
      std::adjacent_find(cd.patches.begin(), cd.patches.end()) != cd.patches.end())
    throw std::invalid_argument("patch list must be sorted and duplicate-free");
  for (int p : cd.patches)
    if (!cd.faces.count({p}))
      throw std::invalid_argument("patch " + std::to_string(p) + " has no face entry");
  for (const auto& [v, f] : cd.faces) {
    if (v != f.verts) throw std::logic_error("face key disagrees with stored vertices");
    if (v.empty() || v.size() > 4)
      throw std::invalid_argument("face " + face_str(v) + " has unsupported depth");
    if (!std::is_sorted(v.begin(), v.end()) ||
        std::adjacent_find(v.begin(), v.end()) != v.end())
      throw std::invalid_argument("face " + face_str(v) + " is not sorted");
    for (int p : v)
      if (!std::binary_search(cd.patches.begin(), cd.patches.end(), p))
        throw std::invalid_argument("face " + face_str(v) + " uses an unknown patch");
    for (std::size_t r = 0; r < v.size(); ++r) {
      if (v.size() >= 2 && !cd.faces.count(face_minus(v, r)))
        throw std::invalid_argument("overlap table is not subset-closed at " + face_str(v));
    }
  }
  for (const auto& [key, m] : cd.rmaps) {
    const auto& [s, t] = key;
    if (!cd.faces.count(s) || !cd.faces.count(t) || t.size() != s.size() + 1 ||
        !std::includes(t.begin(), t.end(), s.begin(), s.end()))
      throw std::invalid_argument("restriction " + face_str(s) + " -> " + face_str(t) +
                                  " does not follow a one-step inclusion");
    if (m.src != &cd.face(s).model || m.dst != &cd.face(t).model)
      throw std::logic_error("restriction map bound to foreign models at " + face_str(t));
    validate_map(m);
  }
  for (const auto& [v, f] : cd.faces) {
    if (v.size() < 2) continue;
    for (std::size_t r = 0; r < v.size(); ++r)
      if (!cd.rmaps.count({face_minus(v, r), v}))
        throw std::invalid_argument("missing restriction " + face_str(face_minus(v, r)) +
                                    " -> " + face_str(v));
  }
  // composites along any two-step inclusion agree
  for (const auto& [v, f] : cd.faces) {
    if (v.size() < 3) continue;
    for (std::size_t r1 = 0; r1 < v.size(); ++r1)
      for (std::size_t r2 = r1 + 1; r2 < v.size(); ++r2) {
        std::vector<int> mid1 = face_minus(v, r1), mid2 = face_minus(v, r2);
        std::vector<int> sub;
        for (std::size_t i = 0; i < v.size(); ++i)
          if (i != r1 && i != r2) sub.push_back(v[i]);
        CdgaMap via1 = compose_maps(cd.rmap(sub, mid1), cd.rmap(mid1, v));
        CdgaMap via2 = compose_maps(cd.rmap(sub, mid2), cd.rmap(mid2, v));
        if (!maps_equal(via1, via2))
          throw std::invalid_argument("restrictions do not commute from " + face_str(sub) +
                                      " into " + face_str(v));
      }
  }
  if (cd.global) {
    for (int p : cd.patches) {
      auto it = cd.global_restrict.find(p);
      if (it == cd.global_restrict.end())
        throw std::invalid_argument("no global restriction onto patch " + std::to_string(p));
      if (it->second.src != cd.global || it->second.dst != &cd.face({p}).model)
        throw std::logic_error("global restriction bound to foreign models");
      validate_map(it->second);
    }
    for (const auto& [v, f] : cd.faces) {
      if (v.size() != 2) continue;
      CdgaMap via_i = compose_maps(cd.global_restrict.at(v[0]), cd.rmap({v[0]}, v));
      CdgaMap via_j = compose_maps(cd.global_restrict.at(v[1]), cd.rmap({v[1]}, v));
      if (!maps_equal(via_i, via_j))
        throw std::invalid_argument("global restrictions disagree on double " + face_str(v));
    }
  } else if (!cd.global_restrict.empty()) {
    throw std::invalid_argument("global restrictions given without a global model");
  }
  for (const auto& [v, f] : cd.faces) {
    auto pres = cd.present(v);
    bool complete = true;
    Form sum = form_zero(f.model);
    for (int p : pres)
      if (!f.dt.count(p)) complete = false;
    for (const auto& [l, d] : f.dt) {
      if (!std::binary_search(pres.begin(), pres.end(), l))
        throw std::invalid_argument("dt" + std::to_string(l) +
                                    " designated for a vanishing coordinate on face " +
                                    face_str(v));
      if (d.model != &f.model)
        throw std::logic_error("dt form bound to a foreign model on face " + face_str(v));
      if (!d.is_zero() && !(form_part(d, 1) == d))
        throw std::invalid_argument("dt" + std::to_string(l) + " is not a 1-form on face " +
                                    face_str(v));
      if (!dform(d).is_zero())
        throw std::invalid_argument("dt" + std::to_string(l) + " is not closed on face " +
                                    face_str(v));
      sum = form_add(sum, d);
    }
    if (complete && !f.dt.empty() && !sum.is_zero())
      throw std::invalid_argument("designated dt forms do not sum to zero on face " +
                                  face_str(v));
    for (const auto& [key, m] : cd.rmaps) {
      if (key.first != v) continue;
      const CoverFace& tf = cd.face(key.second);
      auto tpres = cd.present(key.second);
      for (const auto& [l, d] : f.dt) {
        Form img = map_apply(m, d);
        if (!std::binary_search(tpres.begin(), tpres.end(), l)) {
          if (!img.is_zero())
            throw std::invalid_argument("dt" + std::to_string(l) +
                                        " does not vanish under restriction onto " +
                                        face_str(key.second));
        } else {
          auto it = tf.dt.find(l);
          if (it != tf.dt.end() && !(img == it->second))
            throw std::invalid_argument("dt" + std::to_string(l) +
                                        " restricts inconsistently onto " +
                                        face_str(key.second));
        }
      }
    }
  }
}

DeligneCocycle zero_cocycle(const CoverDiagram& cd) {
  DeligneCocycle c;
  c.cover = &cd;
  for (const auto& [v, f] : cd.faces) {
    if (v.size() == 1)
      c.B[v[0]] = form_zero(f.model);
    else if (v.size() == 2)
      c.A[v] = form_zero(f.model);
    else if (v.size() == 3)
      c.eps[v] = PLFunction{};
  }
  return c;
}

namespace {

// Alternating sum of the eps data of the codimension-one subfaces, restricted
// onto the given face.
PLFunction cech_pl(const CoverDiagram& cd,
                   const std::map<std::vector<int>, PLFunction>& data,
                   const std::vector<int>& v) {
  PLFunction out;
  for (std::size_t r = 0; r < v.size(); ++r) {
    auto it = data.find(face_minus(v, r));
    if (it == data.end())
      throw std::invalid_argument("missing data on " + face_str(face_minus(v, r)));
    Rat sgn(r % 2 ? -1 : 1);
    out = pl_add(out, pl_scale(sgn, pl_restrict(cd, it->second, v)));
  }
  return out;
}

// Alternating sum of form data from the codimension-one subfaces.
Form cech_form(const CoverDiagram& cd, const std::map<std::vector<int>, Form>& data,
               const std::vector<int>& v) {
  Form out = form_zero(cd.face(v).model);
  for (std::size_t r = 0; r < v.size(); ++r) {
    std::vector<int> sub = face_minus(v, r);
    auto it = data.find(sub);
    if (it == data.end())
      throw std::invalid_argument("missing data on " + face_str(sub));
    Form img = map_apply(cd.rmap(sub, v), it->second);
    out = r % 2 ? form_sub(out, img) : form_add(out, img);
  }
  return out;
}

}  // namespace

Report check_cocycle(const DeligneCocycle& c) {
  Report rep;
  const CoverDiagram& cd = *c.cover;
  bool aligned = true;
  for (const auto& [v, f] : cd.faces) {
    if (v.size() == 1 && !c.B.count(v[0])) {
      rep.fail("missing B on patch " + face_str(v));
      aligned = false;
    }
    if (v.size() == 2 && !c.A.count(v)) {
      rep.fail("missing A on double " + face_str(v));
      aligned = false;
    }
    if (v.size() == 3 && !c.eps.count(v)) {
      rep.fail("missing eps on triple " + face_str(v));
      aligned = false;
    }
  }
  for (const auto& [p, b] : c.B) {
    if (!cd.has_face({p})) {
      rep.fail("B given on unknown patch " + std::to_string(p));
      aligned = false;
    } else if (b.model != &cd.face({p}).model) {
      rep.fail("B on patch " + std::to_string(p) + " lives on the wrong model");
      aligned = false;
    } else if (!b.is_zero() && !(form_part(b, 2) == b)) {
      rep.fail("B on patch " + std::to_string(p) + " is not a 2-form");
      aligned = false;
    }
  }
  for (const auto& [v, a] : c.A) {
    if (!cd.has_face(v) || v.size() != 2) {
      rep.fail("A given on unknown double " + face_str(v));
      aligned = false;
    } else if (a.model != &cd.face(v).model) {
      rep.fail("A on double " + face_str(v) + " lives on the wrong model");
      aligned = false;
    } else if (!a.is_zero() && !(form_part(a, 1) == a)) {
      rep.fail("A on double " + face_str(v) + " is not a 1-form");
      aligned = false;
    }
  }
  for (const auto& [v, e] : c.eps) {
    if (!cd.has_face(v) || v.size() != 3) {
      rep.fail("eps given on unknown triple " + face_str(v));
      aligned = false;
    }
  }
  if (!aligned) return rep;

  bool quad_ok = true, tri_ok = true, edge_ok = true;
  for (const auto& [v, f] : cd.faces) {
    if (v.size() == 4) {
      PLFunction df = cech_pl(cd, c.eps, v);
      auto val = pl_const_value(cd, df, v);
      if (!val) {
        rep.fail("delta eps is not locally constant on quadruple " + face_str(v));
        quad_ok = false;
      } else if (!is_integer(*val)) {
        rep.fail("delta eps = " + rat_str(*val) + " is not an integer on quadruple " +
                 face_str(v));
        quad_ok = false;
      }
    } else if (v.size() == 3) {
      Form dA = cech_form(cd, c.A, v);
      Form df;
      try {
        df = pl_d(cd, v, c.eps.at(v));
      } catch (const std::exception& e) {
        rep.fail(std::string(e.what()));
        tri_ok = false;
        continue;
      }
      if (!(dA == df)) {
        rep.fail("delta A != d eps on triple " + face_str(v));
        tri_ok = false;
      }
    } else if (v.size() == 2) {
      std::map<std::vector<int>, Form> bdata;
      for (int p : v) bdata[{p}] = c.B.at(p);
      Form dB = cech_form(cd, bdata, v);
      if (!(dB == dform(c.A.at(v)))) {
        rep.fail("delta B != d A on double " + face_str(v));
        edge_ok = false;
      }
    }
  }
  if (quad_ok) rep.note("delta eps integral on all quadruple overlaps");
  if (tri_ok) rep.note("delta A = d eps on all triple overlaps");
  if (edge_ok) rep.note("delta B = d A on all double overlaps");
  return rep;
}

namespace {

// Solve r_p(X) = local_p over global forms of the given degree, adding one
// patch at a time so an inconsistency is reported against the patch that
// introduced it.
Form glue_global(const CoverDiagram& cd, int deg, const std::map<int, Form>& local,
                 const std::string& what) {
  if (!cd.global)
    throw std::invalid_argument("cover '" + cd.name + "' designates no global model");
  const CdgaModel& G = *cd.global;
  auto slots = G.degree_slots(deg);
  std::vector<QVec> rows;
  QVec rhs;
  std::optional<QVec> sol = QVec(slots.size(), Rat(0));
  auto resolve = [&]() -> std::optional<QVec> {
    QMat M(rows.size(), slots.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < slots.size(); ++j) M.at(i, j) = rows[i][j];
    return M.solve(rhs);
  };
  for (int p : cd.patches) {
    const CdgaMap& g = cd.global_restrict.at(p);
    const Form& tgt = local.at(p);
    for (std::size_t t = 0; t < g.dst->n(); ++t) {
      QVec row(slots.size(), Rat(0));
      for (std::size_t s = 0; s < slots.size(); ++s) row[s] = g.image[slots[s]].c[t];
      rows.push_back(std::move(row));
      rhs.push_back(tgt.c[t]);
    }
    sol = resolve();
    if (!sol)
      throw std::invalid_argument(what + " does not come from the global model at patch " +
                                  std::to_string(p));
  }
  QMat M(rows.size(), slots.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < slots.size(); ++j) M.at(i, j) = rows[i][j];
  if (M.rank() != slots.size())
    throw std::logic_error(what + " is underdetermined on the global model");
  Form out = form_zero(G);
  for (std::size_t s = 0; s < slots.size(); ++s) out.c[slots[s]] = (*sol)[s];
  return out;
}

}  // namespace

Form curvature(const DeligneCocycle& c) {
  const CoverDiagram& cd = *c.cover;
  std::map<int, Form> dB;
  for (int p : cd.patches) dB[p] = dform(c.B.at(p));
  Form H = glue_global(cd, 3, dB, "curvature");
  if (!dform(H).is_zero()) throw std::logic_error("glued curvature is not closed");
  return H;
}

DDClass dd_class(const DeligneCocycle& c) {
  const CoverDiagram& cd = *c.cover;
  std::vector<std::vector<int>> tris, tets;
  for (const auto& [v, f] : cd.faces) {
    if (v.size() == 3) tris.push_back(v);
    if (v.size() == 4) tets.push_back(v);
  }
  std::map<std::vector<int>, std::size_t> tri_ix;
  for (std::size_t i = 0; i < tris.size(); ++i) tri_ix[tris[i]] = i;
  IntMat A(tets.size(), tris.size());
  std::vector<Int> b(tets.size(), Int(0));
  for (std::size_t ti = 0; ti < tets.size(); ++ti) {
    for (std::size_t r = 0; r < 4; ++r) A.at(ti, tri_ix.at(face_minus(tets[ti], r))) += (r % 2) ? -1 : 1;
    PLFunction df = cech_pl(cd, c.eps, tets[ti]);
    auto val = pl_const_value(cd, df, tets[ti]);
    if (!val || !is_integer(*val))
      throw std::invalid_argument("eps data is not integral on quadruple " +
                                  face_str(tets[ti]) + "; run check_cocycle");
    b[ti] = val->get_num();
  }
  DDClass out;
  out.cls = coker_class(A, b);
  for (std::size_t ti = 0; ti < tets.size(); ++ti) out.cocycle.push_back({tets[ti], b[ti]});
  return out;
}

Report check_one_simplex(const DeligneOneSimplex& s) {
  Report rep;
  const CoverDiagram& cd = *s.cover;
  if (s.source.cover != &cd || s.target.cover != &cd) {
    rep.fail("source or target lives on a different cover");
    return rep;
  }
  bool aligned = true;
  for (const auto& [v, f] : cd.faces) {
    if (v.size() == 2 && !s.g.count(v)) {
      rep.fail("missing g on double " + face_str(v));
      aligned = false;
    }
    if (v.size() == 1 && !s.lambda.count(v[0])) {
      rep.fail("missing lambda on patch " + face_str(v));
      aligned = false;
    }
  }
  if (!aligned) return rep;
  bool tri_ok = true, edge_ok = true, patch_ok = true;
  for (const auto& [v, f] : cd.faces) {
    if (v.size() == 3) {
      PLFunction dg = cech_pl(cd, s.g, v);
      PLFunction want = pl_sub(s.target.eps.at(v), s.source.eps.at(v));
      auto val = pl_const_value(cd, pl_sub(want, dg), v);
      if (!val || !is_integer(*val)) {
        rep.fail("delta g misses eps' - eps (mod Z) on triple " + face_str(v));
        tri_ok = false;
      }
    } else if (v.size() == 2) {
      std::map<std::vector<int>, Form> ldata;
      for (int p : v) ldata[{p}] = s.lambda.at(p);
      Form dl = cech_form(cd, ldata, v);
      Form rhs;
      try {
        rhs = form_sub(form_sub(s.target.A.at(v), s.source.A.at(v)),
                       pl_d(cd, v, s.g.at(v)));
      } catch (const std::exception& e) {
        rep.fail(std::string(e.what()));
        edge_ok = false;
        continue;
      }
      if (!(dl == rhs)) {
        rep.fail("delta lambda misses A' - A - dg on double " + face_str(v));
        edge_ok = false;
      }
    }
  }
  if (s.curving_preserving) {
    for (int p : cd.patches) {
      Form want = form_sub(s.target.B.at(p), s.source.B.at(p));
      if (!(dform(s.lambda.at(p)) == want)) {
        rep.fail("d lambda misses B' - B on patch " + std::to_string(p));
        patch_ok = false;
      }
    }
  }
  if (tri_ok) rep.note("delta g = eps' - eps (mod Z) on all triple overlaps");
  if (edge_ok) rep.note("delta lambda = A' - A - dg on all double overlaps");
  if (s.curving_preserving && patch_ok) rep.note("d lambda = B' - B on all patches");
  return rep;
}

Form kappa(const DeligneOneSimplex& s, bool include_source_curving) {
  const CoverDiagram& cd = *s.cover;
  std::map<int, Form> kl;
  for (int p : cd.patches) {
    Form k = dform(s.lambda.at(p));
    if (include_source_curving) k = form_add(k, s.source.B.at(p));
    kl[p] = k;
  }
  for (const auto& [v, f] : cd.faces) {
    if (v.size() != 2) continue;
    Form ri = map_apply(cd.rmap({v[0]}, v), kl.at(v[0]));
    Form rj = map_apply(cd.rmap({v[1]}, v), kl.at(v[1]));
    if (!(ri == rj))
      throw std::invalid_argument("descended curving disagrees on double " + face_str(v));
  }
  Form K = glue_global(cd, 2, kl, "descended curving");
  Form expect = include_source_curving ? curvature(s.source) : form_zero(*cd.global);
  if (!(dform(K) == expect))
    throw std::logic_error("descended curving does not satisfy d kappa = source curvature");
  return K;
}

DeligneCocycle add_cocycles(const DeligneCocycle& a, const DeligneCocycle& b) {
  if (a.cover != b.cover)
    throw std::invalid_argument("cocycles live on different covers");
  DeligneCocycle out = zero_cocycle(*a.cover);
  for (auto& [v, e] : out.eps) e = pl_add(a.eps.at(v), b.eps.at(v));
  for (auto& [v, f] : out.A) f = form_add(a.A.at(v), b.A.at(v));
  for (auto& [p, f] : out.B) f = form_add(a.B.at(p), b.B.at(p));
  return out;
}

DeligneCocycle scale_cocycle(const Rat& c, const DeligneCocycle& a) {
  DeligneCocycle out = zero_cocycle(*a.cover);
  for (auto& [v, e] : out.eps) e = pl_scale(c, a.eps.at(v));
  for (auto& [v, f] : out.A) f = form_scale(c, a.A.at(v));
  for (auto& [p, f] : out.B) f = form_scale(c, a.B.at(p));
  return out;
}

Report trivialization_check(const DeligneOneSimplex& s) {
  const CoverDiagram& cd = *s.cover;
  for (const auto& [v, e] : s.target.eps)
    if (!(e == PLFunction{}))
      throw std::invalid_argument("trivialization target must be the zero cocycle");
  for (const auto& [v, f] : s.target.A)
    if (!f.is_zero())
      throw std::invalid_argument("trivialization target must be the zero cocycle");
  for (const auto& [p, f] : s.target.B)
    if (!f.is_zero())
      throw std::invalid_argument("trivialization target must be the zero cocycle");
  Report rep = check_one_simplex(s);
  try {
    Form k = kappa(s, true);
    if (k.is_zero())
      rep.note("descended curving vanishes");
    else
      rep.fail("descended curving is nonzero: " + form_str(k));
  } catch (const std::exception& e) {
    rep.fail(std::string("descended curving: ") + e.what());
  }
  (void)cd;
  return rep;
}

DeligneOneSimplex r_modify(const DeligneOneSimplex& s,
                           const std::map<int, PLFunction>& r) {
  const CoverDiagram& cd = *s.cover;
  DeligneOneSimplex out = s;
  auto rget = [&](int p) -> PLFunction {
    auto it = r.find(p);
    return it == r.end() ? PLFunction{} : it->second;
  };
  for (const auto& [v, f] : cd.faces) {
    if (v.size() != 2) continue;
    PLFunction dr =
        pl_sub(pl_restrict(cd, rget(v[1]), v), pl_restrict(cd, rget(v[0]), v));
    auto it = out.g.find(v);
    out.g[v] = it == out.g.end() ? dr : pl_add(it->second, dr);
  }
  for (int p : cd.patches)
    out.lambda[p] = form_sub(out.lambda.at(p), pl_d(cd, {p}, rget(p)));
  return out;
}

CoverDiagram sub_diagram(const CoverDiagram& cd, const std::vector<int>& keep) {
  std::vector<int> ks = keep;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  for (int p : ks)
    if (!std::binary_search(cd.patches.begin(), cd.patches.end(), p))
      throw std::invalid_argument("sub-diagram keeps unknown patch " + std::to_string(p));
  CoverDiagram out;
  out.name = cd.name + "-sub";
  out.patches = ks;
  for (const auto& [v, f] : cd.faces) {
    if (!std::includes(ks.begin(), ks.end(), v.begin(), v.end())) continue;
    CoverFace nf;
    nf.verts = v;
    nf.model = f.model;
    out.faces.emplace(v, std::move(nf));
  }
  for (const auto& [v, f] : cd.faces) {
    auto it = out.faces.find(v);
    if (it == out.faces.end()) continue;
    auto pres = out.present(v);
    for (const auto& [l, d] : f.dt)
      if (std::binary_search(pres.begin(), pres.end(), l))
        it->second.dt.emplace(l, Form{&it->second.model, d.c});
  }
  for (const auto& [key, m] : cd.rmaps) {
    if (!out.faces.count(key.first) || !out.faces.count(key.second)) continue;
    CdgaMap nm;
    nm.src = &out.faces.at(key.first).model;
    nm.dst = &out.faces.at(key.second).model;
    for (const Form& f : m.image) nm.image.push_back(Form{nm.dst, f.c});
    out.rmaps.emplace(key, std::move(nm));
  }
  if (cd.global) {
    out.global = cd.global;
    for (int p : ks) {
      const CdgaMap& m = cd.global_restrict.at(p);
      CdgaMap nm;
      nm.src = cd.global;
      nm.dst = &out.faces.at({p}).model;
      for (const Form& f : m.image) nm.image.push_back(Form{nm.dst, f.c});
      out.global_restrict.emplace(p, std::move(nm));
    }
  }
  validate_cover(out);
  return out;
}

DeligneCocycle restrict_cocycle(const DeligneCocycle& c, const CoverDiagram& sub) {
  DeligneCocycle out;
  out.cover = &sub;
  for (const auto& [v, f] : sub.faces) {
    if (v.size() == 1)
      out.B[v[0]] = Form{&f.model, c.B.at(v[0]).c};
    else if (v.size() == 2)
      out.A[v] = Form{&f.model, c.A.at(v).c};
    else if (v.size() == 3)
      out.eps[v] = c.eps.at(v);
  }
  return out;
}

namespace {

std::string model_block_name(const std::vector<int>& v) {
  std::string s = "m";
  for (int x : v) s += std::to_string(x);
  return s;
}

std::string model_block(const CdgaModel& m, const std::string& name) {
  std::ostringstream out;
  out << "model " << name << "\n";
  out << "dim " << m.dim << "\n";
  for (std::size_t i = 1; i < m.n(); ++i)
    out << "gen " << m.basis[i].name << " deg " << m.basis[i].deg << "\n";
  for (std::size_t i = 1; i < m.n(); ++i) {
    Form d{&m, m.diff[i]};
    if (!d.is_zero()) out << "d " << m.basis[i].name << " = " << form_str(d) << "\n";
  }
  for (std::size_t i = 1; i < m.n(); ++i)
    for (std::size_t j = i; j < m.n(); ++j) {
      Form p{&m, m.mult[i][j]};
      if (!p.is_zero())
        out << "mul " << m.basis[i].name << "*" << m.basis[j].name << " = "
            << form_str(p) << "\n";
    }
  for (std::size_t i = 0; i < m.n(); ++i)
    if (m.integral[i] != 0)
      out << "integral " << m.basis[i].name << " = " << rat_str(m.integral[i]) << "\n";
  out << "endmodel\n";
  return out.str();
}

}  // namespace

std::string cover_str(const CoverDiagram& cd, const DeligneCocycle& c) {
  std::ostringstream out;
  out << "cover " << cd.name << "\n";
  if (cd.global) out << "global " << cd.global->name << "\n";
  out << "\n";
  for (const auto& [v, f] : cd.faces) out << model_block(f.model, model_block_name(v)) << "\n";
  for (const auto& [v, f] : cd.faces) {
    if (v.size() == 1)
      out << "patch " << v[0] << " model " << model_block_name(v) << "\n";
    else
      out << "overlap " << face_str(v) << " model " << model_block_name(v) << "\n";
  }
  out << "\n";
  if (cd.global) {
    for (const auto& [p, m] : cd.global_restrict) {
      out << "restrict global into " << p << " :";
      for (std::size_t i = 1; i < m.src->n(); ++i)
        out << (i > 1 ? " ;" : "") << " " << m.src->basis[i].name << " = "
            << form_str(m.image[i]);
      out << "\n";
    }
  }
  for (const auto& [key, m] : cd.rmaps) {
    out << "restrict " << face_str(key.first) << " into " << face_str(key.second) << " :";
    for (std::size_t i = 1; i < m.src->n(); ++i)
      out << (i > 1 ? " ;" : "") << " " << m.src->basis[i].name << " = "
          << form_str(m.image[i]);
    out << "\n";
  }
  for (const auto& [v, f] : cd.faces)
    for (const auto& [l, d] : f.dt)
      out << "dt " << l << " on " << face_str(v) << " = " << form_str(d) << "\n";
  out << "\n";
  for (const auto& [v, e] : c.eps) out << "eps " << face_str(v) << " = " << pl_str(e) << "\n";
  for (const auto& [v, a] : c.A) out << "A " << face_str(v) << " = " << form_str(a) << "\n";
  for (const auto& [p, b] : c.B) out << "B " << p << " = " << form_str(b) << "\n";
  return out.str();
}

std::unique_ptr<CoverBundle> parse_cover(const std::string& text, const std::string& source) {
  auto bundle = std::make_unique<CoverBundle>();
  CoverDiagram& cd = bundle->cover;
  DeligneCocycle& cy = bundle->cocycle;
  cy.cover = &cd;
  std::map<std::string, CdgaModel> local;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument(source + ":" + std::to_string(lineno) + ": " + msg);
  };
  auto get_model = [&](const std::string& nm) -> const CdgaModel& {
    auto it = local.find(nm);
    if (it != local.end()) return it->second;
    return model_registry(nm);
  };
  auto read_ints_until = [&](std::istringstream& ls, const std::string& stop,
                             std::vector<int>& out) -> bool {
    std::string tok;
    while (ls >> tok) {
      if (tok == stop) return true;
      try {
        out.push_back(std::stoi(tok));
      } catch (...) {
        fail("expected an integer, got '" + tok + "'");
      }
    }
    return false;
  };
  while (std::getline(in, raw)) {
    ++lineno;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    std::string line = trim(raw);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "cover") {
      ls >> cd.name;
    } else if (kw == "global") {
      std::string nm;
      ls >> nm;
      cd.global = &model_registry(nm);
    } else if (kw == "model") {
      std::string nm;
      ls >> nm;
      if (nm.empty()) fail("model block needs a name");
      std::string block = "model " + nm + "\n";
      bool closed = false;
      while (std::getline(in, raw)) {
        ++lineno;
        if (trim(raw) == "endmodel") {
          closed = true;
          break;
        }
        block += raw + "\n";
      }
      if (!closed) fail("model block '" + nm + "' is never closed");
      local.emplace(nm, parse_model(block, source + " model " + nm));
    } else if (kw == "patch" || kw == "overlap") {
      std::vector<int> v;
      if (!read_ints_until(ls, "model", v)) fail("expected 'model <name>'");
      std::string nm;
      ls >> nm;
      if (nm.empty()) fail("missing model name");
      if (kw == "patch" && v.size() != 1) fail("patch lines take a single index");
      if (kw == "overlap" && v.size() < 2) fail("overlap lines take at least two indices");
      std::sort(v.begin(), v.end());
      if (kw == "patch") cd.patches.push_back(v[0]);
      CoverFace f;
      f.verts = v;
      f.model = get_model(nm);
      if (!cd.faces.emplace(v, std::move(f)).second)
        fail("duplicate face " + face_str(v));
    } else if (kw == "restrict") {
      auto colon = line.find(':');
      if (colon == std::string::npos) fail("restrict lines need ':'");
      std::istringstream hs(line.substr(kw.size(), colon - kw.size()));
      std::string first;
      hs >> first;
      std::vector<int> src, dst;
      bool from_global = (first == "global");
      if (!from_global) {
        try {
          src.push_back(std::stoi(first));
        } catch (...) {
          fail("expected 'global' or vertex indices");
        }
        if (!read_ints_until(hs, "into", src)) fail("expected 'into'");
      } else {
        std::string into;
        hs >> into;
        if (into != "into") fail("expected 'into'");
      }
      int x;
      while (hs >> x) dst.push_back(x);
      if (dst.empty()) fail("missing destination face");
      const CdgaModel* dm = nullptr;
      if (!cd.faces.count(dst)) fail("destination face " + face_str(dst) + " unknown");
      dm = &cd.faces.at(dst).model;
      std::map<std::string, Form> imgs;
      std::string rest = line.substr(colon + 1);
      std::istringstream as(rest);
      std::string clause;
      while (std::getline(as, clause, ';')) {
        clause = trim(clause);
        if (clause.empty()) continue;
        auto eq = clause.find('=');
        if (eq == std::string::npos) fail("restrict image needs '='");
        std::string gen = trim(clause.substr(0, eq));
        std::string expr = trim(clause.substr(eq + 1));
        imgs.emplace(gen, form_parse(*dm, expr, source + ":" + std::to_string(lineno)));
      }
      if (from_global) {
        if (!cd.global) fail("global restriction before a global line");
        if (dst.size() != 1) fail("global restrictions land on single patches");
        cd.global_restrict.emplace(dst[0], make_map(*cd.global, *dm, imgs));
      } else {
        if (!cd.faces.count(src)) fail("source face " + face_str(src) + " unknown");
        cd.rmaps.emplace(std::make_pair(src, dst),
                         make_map(cd.faces.at(src).model, *dm, imgs));
      }
    } else if (kw == "dt") {
      auto eq = line.find('=');
      if (eq == std::string::npos) fail("dt lines need '='");
      std::istringstream hs(line.substr(kw.size(), eq - kw.size()));
      int label;
      std::string onkw;
      if (!(hs >> label >> onkw) || onkw != "on") fail("expected: dt <label> on <face> = <form>");
      std::vector<int> v;
      int x;
      while (hs >> x) v.push_back(x);
      if (!cd.faces.count(v)) fail("dt on unknown face " + face_str(v));
      CoverFace& f = cd.faces.at(v);
      f.dt[label] =
          form_parse(f.model, trim(line.substr(eq + 1)), source + ":" + std::to_string(lineno));
    } else if (kw == "eps" || kw == "A" || kw == "B") {
      auto eq = line.find('=');
      if (eq == std::string::npos) fail(kw + " lines need '='");
      std::istringstream hs(line.substr(kw.size(), eq - kw.size()));
      std::vector<int> v;
      int x;
      while (hs >> x) v.push_back(x);
      std::string expr = trim(line.substr(eq + 1));
      std::string where = source + ":" + std::to_string(lineno);
      if (kw == "eps") {
        if (v.size() != 3) fail("eps lines take three indices");
        if (!cd.faces.count(v)) fail("eps on unknown triple " + face_str(v));
        cy.eps[v] = pl_parse(expr, where);
      } else if (kw == "A") {
        if (v.size() != 2) fail("A lines take two indices");
        if (!cd.faces.count(v)) fail("A on unknown double " + face_str(v));
        cy.A[v] = form_parse(cd.faces.at(v).model, expr, where);
      } else {
        if (v.size() != 1) fail("B lines take one index");
        if (!cd.faces.count(v)) fail("B on unknown patch " + face_str(v));
        cy.B[v[0]] = form_parse(cd.faces.at(v).model, expr, where);
      }
    } else {
      fail("unknown keyword '" + kw + "'");
    }
  }
  std::sort(cd.patches.begin(), cd.patches.end());
  validate_cover(cd);
  return bundle;
}

std::unique_ptr<CoverBundle> load_cover_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open cover file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_cover(buf.str(), path);
}

}  // namespace twk
