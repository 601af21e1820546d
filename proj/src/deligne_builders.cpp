#include <set>
#include <sstream>
#include <stdexcept>

#include "twistkit/deligne.hpp"
#include "twistkit/intmat.hpp"

namespace twk {

namespace {

std::vector<int> face_minus(const std::vector<int>& a, std::size_t drop) {
  std::vector<int> u;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (i != drop) u.push_back(a[i]);
  return u;
}

std::string mname(const std::vector<int>& v) {
  std::string s = "m";
  for (int x : v) s += std::to_string(x);
  return s;
}

// vertex of {1,2,3,4} missing from a 3-subset
int missing4(const std::vector<int>& v) {
  int s = 0;
  for (int x : v) s += x;
  return 10 - s;
}

// Orientation of the eps data; chosen so the degree readout of the shipped
// class-k cocycle is +k.
int sgn_missing(int m) { return m % 2 == 0 ? -1 : 1; }

std::string num(int x) { return std::to_string(x); }

}  // namespace

std::unique_ptr<CoverBundle> make_s3_bundle(long k) {
  auto bundle = std::make_unique<CoverBundle>();
  CoverDiagram& cd = bundle->cover;
  DeligneCocycle& cy = bundle->cocycle;
  cy.cover = &cd;
  cd.name = "s3_" + std::to_string(k);
  cd.patches = {0, 1, 2, 3, 4};
  cd.global = &model_registry("s3");

  // nerve: every proper nonempty subset of the five patch labels
  std::vector<std::vector<int>> all;
  for (int mask = 1; mask < 31; ++mask) {
    std::vector<int> v;
    for (int b = 0; b < 5; ++b)
      if (mask & (1 << b)) v.push_back(b);
    all.push_back(v);
  }

  for (const auto& v : all) {
    bool has0 = v[0] == 0;
    std::ostringstream t;
    t << "model " << mname(v) << "\ndim 3\n";
    if (!has0) {
      if (v.size() == 1) {
        t << "gen b deg 2\ngen h deg 3\nd b = h\n";
      } else if (v.size() == 2) {
        t << "gen a deg 1\n";
        for (int x : v) t << "gen b" << x << " deg 2\n";
        t << "gen h deg 3\n";
        t << "d a = b" << v[1] << " - b" << v[0] << "\n";
        for (int x : v) t << "d b" << x << " = h\n";
      } else if (v.size() == 3) {
        t << "gen tau deg 1\n";
        t << "gen a" << v[0] << v[1] << " deg 1\n";
        t << "gen a" << v[0] << v[2] << " deg 1\n";
        for (int x : v) t << "gen b" << x << " deg 2\n";
        t << "gen h deg 3\n";
        t << "d a" << v[0] << v[1] << " = b" << v[1] << " - b" << v[0] << "\n";
        t << "d a" << v[0] << v[2] << " = b" << v[2] << " - b" << v[0] << "\n";
        for (int x : v) t << "d b" << x << " = h\n";
      } else {
        t << "gen tau1 deg 1\ngen tau2 deg 1\ngen tau3 deg 1\n";
        t << "gen a12 deg 1\ngen a13 deg 1\ngen a14 deg 1\n";
        for (int x : v) t << "gen b" << x << " deg 2\n";
        t << "gen h deg 3\n";
        for (int j : {2, 3, 4}) t << "d a1" << j << " = b" << j << " - b1\n";
        for (int x : v) t << "d b" << x << " = h\n";
      }
    }
    CoverFace f;
    f.verts = v;
    f.model = parse_model(t.str(), "s3 cover " + mname(v));
    cd.faces.emplace(v, std::move(f));
  }

  // barycentric coordinate differentials where the eps data need them
  for (const auto& v : all) {
    if (v.size() == 3 && v[0] != 0) {
      CoverFace& f = cd.faces.at(v);
      f.dt[missing4(v)] = form_gen(f.model, "tau");
    }
  }
  {
    CoverFace& tet = cd.faces.at({1, 2, 3, 4});
    Form t1 = form_gen(tet.model, "tau1");
    Form t2 = form_gen(tet.model, "tau2");
    Form t3 = form_gen(tet.model, "tau3");
    tet.dt[1] = t1;
    tet.dt[2] = t2;
    tet.dt[3] = t3;
    tet.dt[4] = form_scale(Rat(-1), form_add(form_add(t1, t2), t3));
  }

  auto add_map = [&](const std::vector<int>& s, const std::vector<int>& t,
                     std::map<std::string, Form> imgs) {
    cd.rmaps.emplace(std::make_pair(s, t),
                     make_map(cd.faces.at(s).model, cd.faces.at(t).model, imgs));
  };
  auto zero_imgs = [&](const std::vector<int>& s, const std::vector<int>& t) {
    const CdgaModel& sm = cd.faces.at(s).model;
    const CdgaModel& tm = cd.faces.at(t).model;
    std::map<std::string, Form> imgs;
    for (std::size_t i = 1; i < sm.n(); ++i) imgs[sm.basis[i].name] = form_zero(tm);
    return imgs;
  };

  for (const auto& t : all) {
    if (t.size() < 2) continue;
    bool t_has0 = t[0] == 0;
    for (std::size_t r = 0; r < t.size(); ++r) {
      std::vector<int> s = face_minus(t, r);
      if (t_has0) {
        add_map(s, t, zero_imgs(s, t));
        continue;
      }
      const CdgaModel& tm = cd.faces.at(t).model;
      std::map<std::string, Form> imgs;
      if (t.size() == 2) {
        imgs["b"] = form_gen(tm, "b" + num(s[0]));
        imgs["h"] = form_gen(tm, "h");
      } else if (t.size() == 3) {
        int i = t[0], j = t[1], l = t[2];
        if (s[0] == i) {
          imgs["a"] = form_gen(tm, "a" + num(s[0]) + num(s[1]));
        } else {
          // the edge skipping the least vertex: a_jl = a_il - a_ij +/- tau
          int m = missing4(t);
          imgs["a"] = form_add(
              form_sub(form_gen(tm, "a" + num(i) + num(l)),
                       form_gen(tm, "a" + num(i) + num(j))),
              form_scale(Rat(sgn_missing(m)), form_gen(tm, "tau")));
        }
        for (int z : s) imgs["b" + num(z)] = form_gen(tm, "b" + num(z));
        imgs["h"] = form_gen(tm, "h");
      } else {
        auto tdt = [&](int m) -> Form {
          if (m <= 3) return form_gen(tm, "tau" + num(m));
          return form_scale(Rat(-1),
                            form_add(form_add(form_gen(tm, "tau1"), form_gen(tm, "tau2")),
                                     form_gen(tm, "tau3")));
        };
        auto aimg = [&](int x, int y) -> Form {
          if (x == 1) return form_gen(tm, "a1" + num(y));
          int mp = 9 - x - y;
          return form_add(
              form_sub(form_gen(tm, "a1" + num(y)), form_gen(tm, "a1" + num(x))),
              form_scale(Rat(sgn_missing(mp)), tdt(mp)));
        };
        int m = missing4(s);
        imgs["tau"] = tdt(m);
        imgs["a" + num(s[0]) + num(s[1])] = aimg(s[0], s[1]);
        imgs["a" + num(s[0]) + num(s[2])] = aimg(s[0], s[2]);
        for (int z : s) imgs["b" + num(z)] = form_gen(tm, "b" + num(z));
        imgs["h"] = form_gen(tm, "h");
      }
      add_map(s, t, std::move(imgs));
    }
  }

  for (int p : cd.patches) {
    const CdgaModel& pm = cd.faces.at({p}).model;
    std::map<std::string, Form> imgs;
    imgs["v"] = (p == 0) ? form_zero(pm) : form_gen(pm, "h");
    cd.global_restrict.emplace(p, make_map(*cd.global, pm, imgs));
  }

  Rat kk(k);
  for (const auto& v : all) {
    const CoverFace& f = cd.faces.at(v);
    if (v.size() == 1) {
      cy.B[v[0]] =
          (v[0] == 0) ? form_zero(f.model) : form_scale(kk, form_gen(f.model, "b"));
    } else if (v.size() == 2) {
      cy.A[v] =
          (v[0] == 0) ? form_zero(f.model) : form_scale(kk, form_gen(f.model, "a"));
    } else if (v.size() == 3) {
      if (v[0] == 0) {
        cy.eps[v] = PLFunction{};
      } else {
        int m = missing4(v);
        cy.eps[v] = pl_term(m, Rat(sgn_missing(m)) * kk);
      }
    }
  }

  validate_cover(cd);
  return bundle;
}

std::unique_ptr<CoverBundle> make_torsion_bundle() {
  // six-vertex projective plane; each edge lies in exactly two of these
  static const int kRp2Faces[10][3] = {{1, 2, 3}, {1, 3, 4}, {1, 4, 5}, {1, 5, 6},
                                       {1, 2, 6}, {2, 3, 5}, {3, 4, 6}, {2, 4, 5},
                                       {3, 5, 6}, {2, 4, 6}};
  auto bundle = std::make_unique<CoverBundle>();
  CoverDiagram& cd = bundle->cover;
  DeligneCocycle& cy = bundle->cocycle;
  cy.cover = &cd;
  cd.name = "rp2sus";
  cd.patches = {1, 2, 3, 4, 5, 6, 7, 8};
  cd.global = &model_registry("pt");

  // suspend with apexes 7 and 8 and close under subsets
  std::set<std::vector<int>> faceset;
  for (const auto& tri : kRp2Faces)
    for (int apex : {7, 8}) {
      std::vector<int> tet = {tri[0], tri[1], tri[2], apex};
      for (int mask = 1; mask < 16; ++mask) {
        std::vector<int> v;
        for (int b = 0; b < 4; ++b)
          if (mask & (1 << b)) v.push_back(tet[b]);
        faceset.insert(v);
      }
    }
  CdgaModel triv = parse_model("model triv\ndim 3\n", "suspension cover");
  for (const auto& v : faceset) {
    CoverFace f;
    f.verts = v;
    f.model = triv;
    cd.faces.emplace(v, std::move(f));
  }
  for (const auto& v : faceset) {
    if (v.size() < 2) continue;
    for (std::size_t r = 0; r < v.size(); ++r) {
      std::vector<int> s = face_minus(v, r);
      cd.rmaps.emplace(std::make_pair(s, v),
                       make_map(cd.faces.at(s).model, cd.faces.at(v).model, {}));
    }
  }
  for (int p : cd.patches)
    cd.global_restrict.emplace(p, make_map(*cd.global, cd.faces.at({p}).model, {}));

  // find the order-two three-cocycle c and a primitive of its double
  std::vector<std::vector<int>> tris, tets;
  for (const auto& v : faceset) {
    if (v.size() == 3) tris.push_back(v);
    if (v.size() == 4) tets.push_back(v);
  }
  std::map<std::vector<int>, std::size_t> tri_ix;
  for (std::size_t i = 0; i < tris.size(); ++i) tri_ix[tris[i]] = i;
  IntMat d2(tets.size(), tris.size());
  for (std::size_t ti = 0; ti < tets.size(); ++ti)
    for (std::size_t r = 0; r < 4; ++r)
      d2.at(ti, tri_ix.at(face_minus(tets[ti], r))) += (r % 2) ? -1 : 1;
  Smith sm = smith_normal_form(d2);
  std::size_t slot = tets.size();
  for (std::size_t i = 0; i < sm.diag.size(); ++i)
    if (sm.diag[i] == 2) slot = i;
  if (slot == tets.size() || sm.diag.size() != tets.size())
    throw std::logic_error("suspension cover lost its order-two class");
  std::vector<Int> e(tets.size(), Int(0));
  e[slot] = 1;
  std::vector<Int> c;
  if (!solve_integer(sm.U, e, c))
    throw std::logic_error("Smith transform is not invertible");
  std::vector<Int> twoc = c;
  for (Int& x : twoc) x *= 2;
  std::vector<Int> w;
  if (!solve_integer(d2, twoc, w))
    throw std::logic_error("doubled torsion class did not bound");

  for (std::size_t i = 0; i < tris.size(); ++i) cy.eps[tris[i]] = pl_const(Rat(w[i]) / 2);
  for (const auto& v : faceset) {
    if (v.size() == 1) cy.B[v[0]] = form_zero(cd.faces.at(v).model);
    if (v.size() == 2) cy.A[v] = form_zero(cd.faces.at(v).model);
  }

  validate_cover(cd);
  return bundle;
}

}  // namespace twk
