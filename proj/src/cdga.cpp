#include "twistkit/cdga.hpp"

#include <sstream>
#include <stdexcept>

namespace twk {

std::size_t CdgaModel::slot(const std::string& nm) const {
  auto it = index.find(nm);
  if (it == index.end())
    throw std::invalid_argument("model " + name + ": unknown basis element '" + nm + "'");
  return it->second;
}

std::vector<std::size_t> CdgaModel::degree_slots(int deg) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis[i].deg == deg) out.push_back(i);
  return out;
}

namespace {

[[noreturn]] void mfail(const CdgaModel& m, const std::string& what) {
  throw std::invalid_argument("model " + m.name + ": " + what);
}

std::vector<Rat> lin_mul(const CdgaModel& m, const std::vector<Rat>& a,
                         const std::vector<Rat>& b) {
  std::vector<Rat> out(m.n(), Rat(0));
  for (std::size_t i = 0; i < m.n(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < m.n(); ++j) {
      if (b[j] == 0) continue;
      const auto& prod = m.mult[i][j];
      Rat k = a[i] * b[j];
      for (std::size_t t = 0; t < m.n(); ++t)
        if (prod[t] != 0) out[t] += k * prod[t];
    }
  }
  return out;
}

std::vector<Rat> lin_d(const CdgaModel& m, const std::vector<Rat>& a) {
  std::vector<Rat> out(m.n(), Rat(0));
  for (std::size_t i = 0; i < m.n(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t t = 0; t < m.n(); ++t)
      if (m.diff[i][t] != 0) out[t] += a[i] * m.diff[i][t];
  }
  return out;
}

bool vec_zero(const std::vector<Rat>& v) {
  for (const Rat& x : v)
    if (x != 0) return false;
  return true;
}

void check_graded(const CdgaModel& m, const std::vector<Rat>& v, int deg,
                  const std::string& ctx) {
  for (std::size_t t = 0; t < m.n(); ++t)
    if (v[t] != 0 && m.basis[t].deg != deg)
      mfail(m, ctx + " has a component of degree " + std::to_string(m.basis[t].deg) +
                   " where degree " + std::to_string(deg) + " was required");
}

}  // namespace

void validate_model(const CdgaModel& m) {
  std::size_t n = m.n();
  if (n == 0 || m.basis[0].name != "1" || m.basis[0].deg != 0)
    mfail(m, "slot 0 must be the unit '1' in degree 0");
  if (m.diff.size() != n || m.mult.size() != n || m.integral.size() != n)
    mfail(m, "table sizes disagree with the basis");
  for (std::size_t i = 0; i < n; ++i) {
    if (m.basis[i].deg < 0 || m.basis[i].deg > m.dim)
      mfail(m, "basis element " + m.basis[i].name + " has degree outside [0, dim]");
    if (m.mult[i].size() != n || m.diff[i].size() != n)
      mfail(m, "table sizes disagree with the basis");
    auto it = m.index.find(m.basis[i].name);
    if (it == m.index.end() || it->second != i) mfail(m, "basis index map is stale");
  }

  for (std::size_t i = 0; i < n; ++i) {
    check_graded(m, m.diff[i], m.basis[i].deg + 1, "d(" + m.basis[i].name + ")");
    if (!vec_zero(lin_d(m, m.diff[i]))) mfail(m, "d*d != 0 on " + m.basis[i].name);
    if (m.integral[i] != 0 && m.basis[i].deg != m.dim)
      mfail(m, "integral supported below the top degree on " + m.basis[i].name);
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      int di = m.basis[i].deg, dj = m.basis[j].deg;
      const auto& ab = m.mult[i][j];
      check_graded(m, ab, di + dj, m.basis[i].name + "*" + m.basis[j].name);
      if (i == 0 || j == 0) {
        std::size_t other = i == 0 ? j : i;
        for (std::size_t t = 0; t < n; ++t)
          if (ab[t] != Rat(t == other ? 1 : 0))
            mfail(m, "unit law fails on " + m.basis[other].name);
      }
      // graded commutativity
      int sign = (di % 2 && dj % 2) ? -1 : 1;
      for (std::size_t t = 0; t < n; ++t)
        if (m.mult[j][i][t] != Rat(sign) * ab[t])
          mfail(m, "graded commutativity fails on " + m.basis[i].name + ", " +
                       m.basis[j].name);
      // Leibniz
      std::vector<Rat> lhs = lin_d(m, ab);
      std::vector<Rat> ei(n, Rat(0)), ej(n, Rat(0));
      ei[i] = 1;
      ej[j] = 1;
      std::vector<Rat> t1 = lin_mul(m, m.diff[i], ej);
      std::vector<Rat> t2 = lin_mul(m, ei, m.diff[j]);
      for (std::size_t t = 0; t < n; ++t)
        if (lhs[t] != t1[t] + Rat(di % 2 ? -1 : 1) * t2[t])
          mfail(m, "Leibniz fails on " + m.basis[i].name + ", " + m.basis[j].name);
    }
  }

  // associativity on basis triples
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        std::vector<Rat> ek(n, Rat(0)), ei(n, Rat(0));
        ek[k] = 1;
        ei[i] = 1;
        std::vector<Rat> l = lin_mul(m, m.mult[i][j], ek);
        std::vector<Rat> r = lin_mul(m, ei, m.mult[j][k]);
        for (std::size_t t = 0; t < n; ++t)
          if (l[t] != r[t])
            mfail(m, "associativity fails on " + m.basis[i].name + ", " +
                         m.basis[j].name + ", " + m.basis[k].name);
      }

  // Stokes on the closed model
  for (std::size_t i = 0; i < n; ++i) {
    if (m.basis[i].deg != m.dim - 1) continue;
    Rat total(0);
    for (std::size_t t = 0; t < n; ++t) total += m.diff[i][t] * m.integral[t];
    if (total != 0) mfail(m, "Stokes fails: integral(d " + m.basis[i].name + ") != 0");
  }
}

// --- forms -------------------------------------------------------------------

bool Form::is_zero() const { return vec_zero(c); }

int Form::degree() const {
  int d = -1;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] != 0) d = std::max(d, model->basis[i].deg);
  return d;
}

bool Form::homogeneous() const {
  int d = -1;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0) continue;
    if (d >= 0 && model->basis[i].deg != d) return false;
    d = model->basis[i].deg;
  }
  return true;
}

bool Form::operator==(const Form& o) const { return model == o.model && c == o.c; }

namespace {

void require_model(const Form& a, const Form& b) {
  if (a.model != b.model)
    throw std::invalid_argument("forms live on different models");
}

}  // namespace

Form form_zero(const CdgaModel& m) { return Form{&m, std::vector<Rat>(m.n(), Rat(0))}; }

Form form_unit(const CdgaModel& m) {
  Form f = form_zero(m);
  f.c[0] = 1;
  return f;
}

Form form_basis(const CdgaModel& m, std::size_t slot) {
  Form f = form_zero(m);
  f.c.at(slot) = 1;
  return f;
}

Form form_gen(const CdgaModel& m, const std::string& name) {
  return form_basis(m, m.slot(name));
}

Form form_add(const Form& a, const Form& b) {
  require_model(a, b);
  Form out = a;
  for (std::size_t i = 0; i < b.c.size(); ++i) out.c[i] += b.c[i];
  return out;
}

Form form_sub(const Form& a, const Form& b) {
  require_model(a, b);
  Form out = a;
  for (std::size_t i = 0; i < b.c.size(); ++i) out.c[i] -= b.c[i];
  return out;
}

Form form_scale(const Rat& k, const Form& a) {
  Form out = a;
  for (Rat& x : out.c) x *= k;
  return out;
}

Form form_part(const Form& a, int deg) {
  Form out = a;
  for (std::size_t i = 0; i < out.c.size(); ++i)
    if (a.model->basis[i].deg != deg) out.c[i] = 0;
  return out;
}

Form wedge(const Form& a, const Form& b) {
  require_model(a, b);
  return Form{a.model, lin_mul(*a.model, a.c, b.c)};
}

Form dform(const Form& a) { return Form{a.model, lin_d(*a.model, a.c)}; }

Rat integrate(const Form& a) {
  Rat out(0);
  for (std::size_t i = 0; i < a.c.size(); ++i) out += a.c[i] * a.model->integral[i];
  return out;
}

std::string form_str(const Form& a) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    Rat k = a.c[i];
    if (k == 0) continue;
    if (first) {
      if (k < 0) {
        os << "-";
        k = -k;
      }
    } else {
      os << (k < 0 ? " - " : " + ");
      if (k < 0) k = -k;
    }
    first = false;
    bool unit = i == 0;
    if (k != 1 || unit) {
      os << rat_str(k);
      if (!unit) os << "*";
    }
    if (!unit) os << a.model->basis[i].name;
  }
  if (first) return "0";
  return os.str();
}

// --- currents ----------------------------------------------------------------

bool Current::is_zero() const { return vec_zero(c); }

Current current_zero(const CdgaModel& m, int deg) {
  return Current{&m, deg, std::vector<Rat>(m.n(), Rat(0))};
}

Current current_dual(const CdgaModel& m, std::size_t slot) {
  Current t = current_zero(m, m.basis.at(slot).deg);
  t.c[slot] = 1;
  return t;
}

Current fundamental_current(const CdgaModel& m) {
  Current t = current_zero(m, m.dim);
  for (std::size_t i = 0; i < m.n(); ++i) t.c[i] = m.integral[i];
  return t;
}

Current current_add(const Current& a, const Current& b) {
  if (a.model != b.model || a.deg != b.deg)
    throw std::invalid_argument("current mismatch in addition");
  Current out = a;
  for (std::size_t i = 0; i < b.c.size(); ++i) out.c[i] += b.c[i];
  return out;
}

Current current_scale(const Rat& k, const Current& a) {
  Current out = a;
  for (Rat& x : out.c) x *= k;
  return out;
}

Rat current_eval(const Current& t, const Form& a) {
  if (t.model != a.model) throw std::invalid_argument("current/form model mismatch");
  Rat out(0);
  for (std::size_t i = 0; i < t.c.size(); ++i)
    if (t.model->basis[i].deg == t.deg) out += t.c[i] * a.c[i];
  return out;
}

Current boundary_current(const Current& t) {
  const CdgaModel& m = *t.model;
  Current out = current_zero(m, t.deg - 1);
  for (std::size_t f = 0; f < m.n(); ++f) {
    if (m.basis[f].deg != t.deg - 1) continue;
    Rat acc(0);
    for (std::size_t e = 0; e < m.n(); ++e)
      if (m.basis[e].deg == t.deg) acc += t.c[e] * m.diff[f][e];
    out.c[f] = acc;
  }
  return out;
}

Current current_wedge(const Form& a, const Current& t) {
  if (a.model != t.model) throw std::invalid_argument("current/form model mismatch");
  if (!a.homogeneous())
    throw std::invalid_argument("current_wedge needs a homogeneous form");
  const CdgaModel& m = *t.model;
  int da = a.is_zero() ? 0 : a.degree();
  Current out = current_zero(m, t.deg - da);
  int sign = (da % 2 && t.deg % 2) ? -1 : 1;
  for (std::size_t e = 0; e < m.n(); ++e) {
    if (m.basis[e].deg != out.deg) continue;
    out.c[e] = Rat(sign) * current_eval(t, wedge(a, form_basis(m, e)));
  }
  return out;
}

Current current_lmul(const Form& a, const Current& t) {
  if (a.model != t.model) throw std::invalid_argument("current/form model mismatch");
  if (!a.homogeneous())
    throw std::invalid_argument("current_lmul needs a homogeneous form");
  const CdgaModel& m = *t.model;
  int da = a.is_zero() ? 0 : a.degree();
  Current out = current_zero(m, t.deg - da);
  for (std::size_t e = 0; e < m.n(); ++e) {
    if (m.basis[e].deg != out.deg) continue;
    out.c[e] = current_eval(t, wedge(a, form_basis(m, e)));
  }
  return out;
}

// --- matrix forms --------------------------------------------------------------

bool MatForm::is_zero() const {
  for (const Form& f : e)
    if (!f.is_zero()) return false;
  return true;
}

MatForm mat_zero(const CdgaModel& m, std::size_t r) {
  MatForm out;
  out.model = &m;
  out.r = r;
  out.e.assign(r * r, form_zero(m));
  return out;
}

MatForm mat_identity(const CdgaModel& m, std::size_t r) {
  MatForm out = mat_zero(m, r);
  for (std::size_t i = 0; i < r; ++i) out.at(i, i) = form_unit(m);
  return out;
}

namespace {
void require_mat(const MatForm& a, const MatForm& b) {
  if (a.model != b.model || a.r != b.r)
    throw std::invalid_argument("matrix form mismatch");
}
}  // namespace

MatForm mat_add(const MatForm& a, const MatForm& b) {
  require_mat(a, b);
  MatForm out = a;
  for (std::size_t i = 0; i < out.e.size(); ++i) out.e[i] = form_add(out.e[i], b.e[i]);
  return out;
}

MatForm mat_sub(const MatForm& a, const MatForm& b) {
  require_mat(a, b);
  MatForm out = a;
  for (std::size_t i = 0; i < out.e.size(); ++i) out.e[i] = form_sub(out.e[i], b.e[i]);
  return out;
}

MatForm mat_scale(const Rat& k, const MatForm& a) {
  MatForm out = a;
  for (Form& f : out.e) f = form_scale(k, f);
  return out;
}

MatForm mat_wedge(const MatForm& a, const MatForm& b) {
  require_mat(a, b);
  MatForm out = mat_zero(*a.model, a.r);
  for (std::size_t i = 0; i < a.r; ++i)
    for (std::size_t k = 0; k < a.r; ++k) {
      if (a.at(i, k).is_zero()) continue;
      for (std::size_t j = 0; j < a.r; ++j)
        out.at(i, j) = form_add(out.at(i, j), wedge(a.at(i, k), b.at(k, j)));
    }
  return out;
}

MatForm mat_d(const MatForm& a) {
  MatForm out = a;
  for (Form& f : out.e) f = dform(f);
  return out;
}

Form mat_trace(const MatForm& a) {
  Form out = form_zero(*a.model);
  for (std::size_t i = 0; i < a.r; ++i) out = form_add(out, a.at(i, i));
  return out;
}

MatForm mat_exp_nilpotent(const MatForm& a) {
  for (const Form& f : a.e)
    for (std::size_t i = 0; i < f.c.size(); ++i)
      if (f.c[i] != 0 && a.model->basis[i].deg < 2)
        throw std::invalid_argument(
            "mat_exp_nilpotent requires entries of degree >= 2 "
            "(series would not terminate)");
  MatForm out = mat_identity(*a.model, a.r);
  MatForm power = mat_identity(*a.model, a.r);
  Rat fact(1);
  for (int k = 1; 2 * k <= a.model->dim; ++k) {
    power = mat_wedge(power, a);
    if (power.is_zero()) break;
    fact *= k;
    out = mat_add(out, mat_scale(1 / fact, power));
  }
  return out;
}

// --- products -----------------------------------------------------------------

ProductModel product_model(const CdgaModel& X, const CdgaModel& F) {
  ProductModel p;
  p.x = &X;
  p.f = &F;
  CdgaModel& m = p.model;
  m.name = X.name + "x" + F.name;
  m.dim = X.dim + F.dim;
  // Fiber-side names are suffixed when they collide with base-side names
  // (e.g. s1 x s1 has two generators called dt).
  auto fiber_name = [&](std::size_t j) {
    std::string nm = F.basis[j].name;
    if (X.index.count(nm)) nm += "_f";
    return nm;
  };
  auto pair_name = [&](std::size_t i, std::size_t j) {
    if (i == 0 && j == 0) return std::string("1");
    if (j == 0) return X.basis[i].name;
    if (i == 0) return fiber_name(j);
    return X.basis[i].name + "*" + fiber_name(j);
  };
  for (std::size_t i = 0; i < X.n(); ++i)
    for (std::size_t j = 0; j < F.n(); ++j) {
      std::string nm = pair_name(i, j);
      while (m.index.count(nm)) nm += "_";
      m.basis.push_back({nm, X.basis[i].deg + F.basis[j].deg});
      p.factor.emplace_back(i, j);
      m.index[nm] = m.basis.size() - 1;
    }
  std::size_t n = m.n();
  auto slot_of = [&](std::size_t i, std::size_t j) { return i * F.n() + j; };
  m.diff.assign(n, std::vector<Rat>(n, Rat(0)));
  m.integral.assign(n, Rat(0));
  m.mult.assign(n, std::vector<std::vector<Rat>>(n, std::vector<Rat>(n, Rat(0))));
  for (std::size_t s = 0; s < n; ++s) {
    auto [i, j] = p.factor[s];
    // d(a⊗b) = da⊗b + (-1)^{|a|} a⊗db
    for (std::size_t t = 0; t < X.n(); ++t)
      if (X.diff[i][t] != 0) m.diff[s][slot_of(t, j)] += X.diff[i][t];
    Rat sgn(X.basis[i].deg % 2 ? -1 : 1);
    for (std::size_t t = 0; t < F.n(); ++t)
      if (F.diff[j][t] != 0) m.diff[s][slot_of(i, t)] += sgn * F.diff[j][t];
    m.integral[s] = X.integral[i] * F.integral[j];
  }
  for (std::size_t s1 = 0; s1 < n; ++s1) {
    auto [a, b] = p.factor[s1];
    for (std::size_t s2 = 0; s2 < n; ++s2) {
      auto [c, d] = p.factor[s2];
      // (a⊗b)(c⊗d) = (-1)^{|b||c|} ac ⊗ bd
      Rat sgn((F.basis[b].deg % 2 && X.basis[c].deg % 2) ? -1 : 1);
      const auto& xm = X.mult[a][c];
      const auto& fm = F.mult[b][d];
      for (std::size_t t1 = 0; t1 < X.n(); ++t1) {
        if (xm[t1] == 0) continue;
        for (std::size_t t2 = 0; t2 < F.n(); ++t2)
          if (fm[t2] != 0) m.mult[s1][s2][slot_of(t1, t2)] += sgn * xm[t1] * fm[t2];
      }
    }
  }
  validate_model(m);
  return p;
}

Form pullback_x(const ProductModel& p, const Form& w) {
  if (w.model != p.x) throw std::invalid_argument("pullback_x: form not on the base");
  Form out = form_zero(p.model);
  for (std::size_t s = 0; s < p.factor.size(); ++s) {
    auto [i, j] = p.factor[s];
    if (j == 0) out.c[s] = w.c[i];
  }
  return out;
}

Form inject_f(const ProductModel& p, const Form& b) {
  if (b.model != p.f) throw std::invalid_argument("inject_f: form not on the fiber");
  Form out = form_zero(p.model);
  for (std::size_t s = 0; s < p.factor.size(); ++s) {
    auto [i, j] = p.factor[s];
    if (i == 0) out.c[s] = b.c[j];
  }
  return out;
}

Form fiber_integrate(const ProductModel& p, const Form& a) {
  if (a.model != &p.model)
    throw std::invalid_argument("fiber_integrate: form not on the product model");
  Form out = form_zero(*p.x);
  for (std::size_t s = 0; s < p.factor.size(); ++s) {
    if (a.c[s] == 0) continue;
    auto [i, j] = p.factor[s];
    out.c[i] += a.c[s] * p.f->integral[j];
  }
  return out;
}

// --- morphisms ------------------------------------------------------------------

CdgaMap make_map(const CdgaModel& src, const CdgaModel& dst,
                 const std::map<std::string, Form>& gen_images) {
  CdgaMap m;
  m.src = &src;
  m.dst = &dst;
  std::vector<std::optional<Form>> img(src.n());
  img[0] = form_unit(dst);
  for (const auto& [nm, f] : gen_images) {
    if (f.model != &dst)
      throw std::invalid_argument("map image of '" + nm + "' lives on the wrong model");
    img[src.slot(nm)] = f;
  }
  // derive remaining basis images through products of known ones
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t i = 0; i < src.n(); ++i) {
      if (!img[i]) continue;
      for (std::size_t j = 0; j < src.n(); ++j) {
        if (!img[j]) continue;
        const auto& prod = src.mult[i][j];
        std::size_t nz = src.n();
        for (std::size_t t = 0; t < src.n(); ++t) {
          if (prod[t] == 0) continue;
          if (nz != src.n()) {
            nz = src.n();
            break;  // more than one component: not a plain basis rescale
          }
          nz = t;
        }
        if (nz == src.n() || img[nz]) continue;
        img[nz] = form_scale(1 / prod[nz], wedge(*img[i], *img[j]));
        progress = true;
      }
    }
  }
  for (std::size_t i = 0; i < src.n(); ++i) {
    if (!img[i])
      throw std::invalid_argument("map image of basis element '" + src.basis[i].name +
                                  "' is neither given nor derivable");
    m.image.push_back(*img[i]);
  }
  validate_map(m);
  return m;
}

void validate_map(const CdgaMap& m) {
  const CdgaModel& s = *m.src;
  if (m.image.size() != s.n()) throw std::invalid_argument("map image table incomplete");
  if (!(m.image[0] == form_unit(*m.dst)))
    throw std::invalid_argument("map does not preserve the unit");
  for (std::size_t i = 0; i < s.n(); ++i) {
    for (std::size_t t = 0; t < m.dst->n(); ++t)
      if (m.image[i].c[t] != 0 && m.dst->basis[t].deg != s.basis[i].deg)
        throw std::invalid_argument("map does not preserve the degree of " +
                                    s.basis[i].name);
  }
  for (std::size_t i = 0; i < s.n(); ++i) {
    if (!(map_apply(m, Form{&s, s.diff[i]}) == dform(m.image[i])))
      throw std::invalid_argument("map does not commute with d on " + s.basis[i].name);
    for (std::size_t j = 0; j < s.n(); ++j) {
      Form lhs = map_apply(m, Form{&s, s.mult[i][j]});
      Form rhs = wedge(m.image[i], m.image[j]);
      if (!(lhs == rhs))
        throw std::invalid_argument("map is not multiplicative on " + s.basis[i].name +
                                    ", " + s.basis[j].name);
    }
  }
}

Form map_apply(const CdgaMap& m, const Form& a) {
  if (a.model != m.src) throw std::invalid_argument("map applied to a foreign form");
  Form out = form_zero(*m.dst);
  for (std::size_t i = 0; i < a.c.size(); ++i)
    if (a.c[i] != 0) out = form_add(out, form_scale(a.c[i], m.image[i]));
  return out;
}

CdgaMap compose_maps(const CdgaMap& first, const CdgaMap& then) {
  if (first.dst != then.src)
    throw std::invalid_argument("composed maps do not share the middle model");
  CdgaMap out;
  out.src = first.src;
  out.dst = then.dst;
  for (const Form& f : first.image) out.image.push_back(map_apply(then, f));
  return out;
}

bool maps_equal(const CdgaMap& a, const CdgaMap& b) {
  if (a.src != b.src || a.dst != b.dst) return false;
  for (std::size_t i = 0; i < a.image.size(); ++i)
    if (!(a.image[i] == b.image[i])) return false;
  return true;
}

}  // namespace twk
