#include "twistkit/chern.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace twk {

namespace {

MatForm mat_diag_scalar(const CdgaModel& m, std::size_t r, const Form& a) {
  MatForm out = mat_zero(m, r);
  for (std::size_t i = 0; i < r; ++i) out.at(i, i) = a;
  return out;
}

void require_entry_degree(const MatForm& theta, int deg, const char* who) {
  for (const Form& e : theta.e) {
    if (e.is_zero()) continue;
    if (!e.homogeneous() || e.degree() != deg)
      throw std::invalid_argument(std::string(who) + ": matrix entry " +
                                  form_str(e) + " is not a " +
                                  std::to_string(deg) + "-form");
  }
}

bool same_twist(const Twist& a, const Twist& b) {
  return a.model == b.model && a.h == b.h;
}

void require_compatible(const ModuleConn& a, const ModuleConn& b,
                        const char* who) {
  if (!same_twist(a.twist, b.twist))
    throw std::invalid_argument(std::string(who) + ": twist mismatch");
  if (a.rank != b.rank)
    throw std::invalid_argument(std::string(who) + ": rank mismatch");
  if (!(a.kappa0 == b.kappa0))
    throw std::invalid_argument(std::string(who) +
                                ": curving absorbers differ");
}

// Matrices of forms with polynomial dependence on the path parameter; the
// index is the power of t.
using PolyMat = std::vector<MatForm>;

PolyMat pm_mul(const CdgaModel& m, std::size_t r, const PolyMat& a,
               const PolyMat& b) {
  PolyMat out(a.size() + b.size() - 1, mat_zero(m, r));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      out[i + j] = mat_add(out[i + j], mat_wedge(a[i], b[j]));
  return out;
}

bool pm_zero(const PolyMat& a) {
  for (const MatForm& m : a)
    if (!m.is_zero()) return false;
  return true;
}

}  // namespace

ModuleConn make_module_conn(const Twist& t, const MatForm& theta,
                            const Form& kappa0) {
  if (theta.model != t.model || kappa0.model != t.model)
    throw std::invalid_argument("make_module_conn: model mismatch");
  if (theta.e.size() != theta.r * theta.r || theta.r == 0)
    throw std::invalid_argument("make_module_conn: connection matrix must be "
                                "square of positive rank");
  require_entry_degree(theta, 1, "make_module_conn");
  if (!kappa0.is_zero() && (!kappa0.homogeneous() || kappa0.degree() != 2))
    throw std::invalid_argument("make_module_conn: curving absorber must be a "
                                "2-form");
  if (!(dform(kappa0) == t.h))
    throw std::invalid_argument(
        "make_module_conn: curving absorber does not integrate the twist "
        "(d kappa0 != H)");
  return ModuleConn{t, theta.r, theta, kappa0};
}

ModuleConn flat_conn(const Twist& t, std::size_t rank, const Form& kappa0) {
  return make_module_conn(t, mat_zero(*t.model, rank), kappa0);
}

MatForm curvature_descended(const ModuleConn& m) {
  MatForm f = mat_add(mat_d(m.theta), mat_wedge(m.theta, m.theta));
  return mat_add(f, mat_diag_scalar(*m.twist.model, m.rank, m.kappa0));
}

MatForm bianchi_residual(const ModuleConn& m) {
  MatForm f = curvature_descended(m);
  MatForm bracket =
      mat_sub(mat_wedge(f, m.theta), mat_wedge(m.theta, f));
  MatForm res = mat_sub(mat_d(f), bracket);
  return mat_sub(res, mat_diag_scalar(*m.twist.model, m.rank, m.twist.h));
}

Form twisted_d(const Twist& t, const Form& a) {
  return form_sub(dform(a), wedge(t.h, a));
}

Form ch_twisted(const ModuleConn& m) {
  return mat_trace(mat_exp_nilpotent(curvature_descended(m)));
}

SuperModuleConn make_super(const ModuleConn& plus, const ModuleConn& minus) {
  require_compatible(plus, minus, "make_super");
  return SuperModuleConn{plus, minus};
}

Form ch_super(const SuperModuleConn& s) {
  return form_sub(ch_twisted(s.plus), ch_twisted(s.minus));
}

Form cs_transgression(const ModuleConn& m0, const ModuleConn& m1) {
  require_compatible(m0, m1, "cs_transgression");
  const CdgaModel& model = *m0.twist.model;
  const std::size_t r = m0.rank;
  MatForm eta = mat_sub(m1.theta, m0.theta);

  // F_t = F(theta_0) + t (d eta + theta_0 eta + eta theta_0) + t^2 eta^2
  PolyMat f(3, mat_zero(model, r));
  f[0] = curvature_descended(m0);
  f[1] = mat_add(mat_d(eta), mat_add(mat_wedge(m0.theta, eta),
                                     mat_wedge(eta, m0.theta)));
  f[2] = mat_wedge(eta, eta);

  PolyMat expf{mat_identity(model, r)};
  PolyMat term{mat_identity(model, r)};
  for (long k = 1; !pm_zero(term); ++k) {
    term = pm_mul(model, r, term, f);
    Rat inv = rat(1, k);
    for (MatForm& mf : term) mf = mat_scale(inv, mf);
    if (expf.size() < term.size()) expf.resize(term.size(), mat_zero(model, r));
    for (std::size_t i = 0; i < term.size(); ++i)
      expf[i] = mat_add(expf[i], term[i]);
  }

  // integral over [0,1] of tr(eta exp F_t) dt, term by term in t
  Form cs = form_zero(model);
  for (std::size_t i = 0; i < expf.size(); ++i) {
    Form tr = mat_trace(mat_wedge(eta, expf[i]));
    cs = form_add(cs, form_scale(rat(1, long(i) + 1), tr));
  }
  return cs;
}

Form cs_super(const SuperModuleConn& s0, const SuperModuleConn& s1) {
  return form_sub(cs_transgression(s0.plus, s1.plus),
                  cs_transgression(s0.minus, s1.minus));
}

DiffKClass make_kclass(const SuperModuleConn& gen, const Form& rho) {
  if (rho.model != gen.plus.twist.model)
    throw std::invalid_argument("make_kclass: rho lives on the wrong model");
  for (std::size_t s = 0; s < rho.c.size(); ++s)
    if (rho.c[s] != 0 && rho.model->basis[s].deg % 2 == 0)
      throw std::invalid_argument("make_kclass: rho has an even-degree part");
  return DiffKClass{gen, rho};
}

DiffKClass kclass_zero(const Twist& t, const Form& kappa0, std::size_t rank) {
  ModuleConn flat = flat_conn(t, rank, kappa0);
  return DiffKClass{SuperModuleConn{flat, flat}, form_zero(*t.model)};
}

DiffKClass a_K(const Twist& t, const Form& kappa0, const Form& rho) {
  ModuleConn flat = flat_conn(t, 1, kappa0);
  return make_kclass(SuperModuleConn{flat, flat}, rho);
}

namespace {

MatForm mat_block(const CdgaModel& m, const MatForm& a, const MatForm& b) {
  MatForm out = mat_zero(m, a.r + b.r);
  for (std::size_t i = 0; i < a.r; ++i)
    for (std::size_t j = 0; j < a.r; ++j) out.at(i, j) = a.at(i, j);
  for (std::size_t i = 0; i < b.r; ++i)
    for (std::size_t j = 0; j < b.r; ++j) out.at(a.r + i, a.r + j) = b.at(i, j);
  return out;
}

}  // namespace

DiffKClass kclass_add(const DiffKClass& a, const DiffKClass& b) {
  const ModuleConn& ap = a.gen.plus;
  const ModuleConn& bp = b.gen.plus;
  if (!same_twist(ap.twist, bp.twist))
    throw std::invalid_argument("kclass_add: twist mismatch");
  if (!(ap.kappa0 == bp.kappa0))
    throw std::invalid_argument("kclass_add: curving absorbers differ");
  const CdgaModel& m = *ap.twist.model;
  ModuleConn plus = make_module_conn(
      ap.twist, mat_block(m, ap.theta, bp.theta), ap.kappa0);
  ModuleConn minus = make_module_conn(
      ap.twist, mat_block(m, a.gen.minus.theta, b.gen.minus.theta), ap.kappa0);
  return DiffKClass{SuperModuleConn{plus, minus}, form_add(a.rho, b.rho)};
}

DiffKClass kclass_negate(const DiffKClass& k) {
  return DiffKClass{SuperModuleConn{k.gen.minus, k.gen.plus},
                    form_scale(rat(-1), k.rho)};
}

DiffKClass kclass_cs_shift(const DiffKClass& k, const MatForm& theta_plus,
                           const MatForm& theta_minus) {
  const Twist& t = k.gen.plus.twist;
  ModuleConn plus = make_module_conn(t, theta_plus, k.gen.plus.kappa0);
  ModuleConn minus = make_module_conn(t, theta_minus, k.gen.minus.kappa0);
  SuperModuleConn moved = make_super(plus, minus);
  Form rho = form_add(k.rho, cs_super(k.gen, moved));
  return DiffKClass{moved, rho};
}

Form R_K(const DiffKClass& k) {
  return form_sub(ch_super(k.gen), twisted_d(k.gen.plus.twist, k.rho));
}

long I_K(const DiffKClass& k) {
  return long(k.gen.plus.rank) - long(k.gen.minus.rank);
}

GerbeModuleGeom make_gerbe_geom(const ModuleConn& spinor,
                                std::vector<Form> pont) {
  for (std::size_t i = 0; i < pont.size(); ++i) {
    const Form& p = pont[i];
    if (p.model != spinor.twist.model)
      throw std::invalid_argument("make_gerbe_geom: pontryagin form on the "
                                  "wrong model");
    if (!p.is_zero() && (!p.homogeneous() || p.degree() != 4 * int(i + 1)))
      throw std::invalid_argument("make_gerbe_geom: p" + std::to_string(i + 1) +
                                  " must have degree " +
                                  std::to_string(4 * (i + 1)));
    if (!dform(p).is_zero())
      throw std::invalid_argument("make_gerbe_geom: p" + std::to_string(i + 1) +
                                  " is not closed");
  }
  return GerbeModuleGeom{spinor, std::move(pont)};
}

Form kappa_prime(const GerbeModuleGeom& g) {
  Form tr = mat_trace(curvature_descended(g.spinor));
  return form_scale(rat(1, long(g.spinor.rank)), tr);
}

MatForm random_matform1(const CdgaModel& m, std::size_t rank, Rng& rng) {
  MatForm out = mat_zero(m, rank);
  std::vector<std::size_t> ones = m.degree_slots(1);
  for (Form& e : out.e)
    for (std::size_t s : ones) {
      Form b = form_scale(rng.small_rat(), form_basis(m, s));
      e = form_add(e, b);
    }
  return out;
}

namespace {

std::string mat_str(const MatForm& a) {
  std::string out = "[";
  for (std::size_t i = 0; i < a.r; ++i) {
    out += i ? ",[" : "[";
    for (std::size_t j = 0; j < a.r; ++j) {
      if (j) out += ",";
      out += form_str(a.at(i, j));
    }
    out += "]";
  }
  return out + "]";
}

MatForm mat_parse(const CdgaModel& m, const std::string& text,
                  const std::string& source) {
  auto bad = [&](const std::string& why) {
    return std::invalid_argument(source + ": " + why);
  };
  std::vector<std::vector<std::string>> rows;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
  };
  skip();
  if (i >= text.size() || text[i] != '[') throw bad("expected '['");
  ++i;
  while (true) {
    skip();
    if (i >= text.size() || text[i] != '[') throw bad("expected a matrix row");
    ++i;
    std::vector<std::string> row;
    std::string cell;
    for (; i < text.size() && text[i] != ']'; ++i) {
      if (text[i] == ',') {
        row.push_back(cell);
        cell.clear();
      } else {
        cell += text[i];
      }
    }
    if (i >= text.size()) throw bad("unterminated matrix row");
    row.push_back(cell);
    rows.push_back(row);
    ++i;  // past ']'
    skip();
    if (i < text.size() && text[i] == ',') {
      ++i;
      continue;
    }
    break;
  }
  if (i >= text.size() || text[i] != ']') throw bad("expected final ']'");
  std::size_t r = rows.size();
  MatForm out = mat_zero(m, r);
  for (std::size_t a = 0; a < r; ++a) {
    if (rows[a].size() != r)
      throw bad("matrix is not square: row " + std::to_string(a) + " has " +
                std::to_string(rows[a].size()) + " of " + std::to_string(r) +
                " entries");
    for (std::size_t b = 0; b < r; ++b)
      out.at(a, b) = form_parse(m, rows[a][b], source);
  }
  return out;
}

std::string trimmed(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::string kclass_str(const std::string& name, const DiffKClass& k) {
  const Twist& t = k.gen.plus.twist;
  std::string out = "kclass " + name + " on " + t.model->name + " twist " +
                    form_str(t.h) + "\n";
  out += "kappa0 = " + form_str(k.gen.plus.kappa0) + "\n";
  out += "theta+ = " + mat_str(k.gen.plus.theta) + "\n";
  out += "theta- = " + mat_str(k.gen.minus.theta) + "\n";
  out += "rho = " + form_str(k.rho) + "\n";
  return out;
}

KClassFile parse_kclass(const std::string& text, const std::string& source) {
  auto bad = [&](const std::string& why) {
    return std::invalid_argument(source + ": " + why);
  };
  std::istringstream in(text);
  std::string line;
  std::string name;
  const CdgaModel* model = nullptr;
  Form h;
  bool header = false;
  std::map<std::string, std::string> fields;
  while (std::getline(in, line)) {
    std::string::size_type hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trimmed(line);
    if (line.empty()) continue;
    if (!header) {
      std::istringstream ls(line);
      std::string kw, on, twist_kw, model_name;
      ls >> kw >> name >> on >> model_name >> twist_kw;
      if (kw != "kclass" || on != "on" || twist_kw != "twist" || name.empty())
        throw bad("expected 'kclass <name> on <model> twist <expr>'");
      model = &model_registry(model_name);
      std::string rest;
      std::getline(ls, rest);
      h = form_parse(*model, rest, source + ": twist");
      header = true;
      continue;
    }
    std::string::size_type eq = line.find('=');
    if (eq == std::string::npos) throw bad("expected '<field> = <value>'");
    std::string key = trimmed(line.substr(0, eq));
    std::string val = trimmed(line.substr(eq + 1));
    if (!fields.emplace(key, val).second) throw bad("duplicate field " + key);
  }
  if (!header) throw bad("missing kclass header line");
  for (const auto& [key, val] : fields) {
    (void)val;
    if (key != "kappa0" && key != "theta+" && key != "theta-" && key != "rho")
      throw bad("unknown field " + key);
  }
  if (!fields.count("theta+") || !fields.count("theta-"))
    throw bad("both connection matrices are required");

  Twist t = make_twist(*model, h);
  Form kappa0 = fields.count("kappa0")
                    ? form_parse(*model, fields["kappa0"], source + ": kappa0")
                    : form_zero(*model);
  MatForm tp = mat_parse(*model, fields["theta+"], source + ": theta+");
  MatForm tm = mat_parse(*model, fields["theta-"], source + ": theta-");
  Form rho = fields.count("rho")
                 ? form_parse(*model, fields["rho"], source + ": rho")
                 : form_zero(*model);
  SuperModuleConn gen = make_super(make_module_conn(t, tp, kappa0),
                                   make_module_conn(t, tm, kappa0));
  return KClassFile{name, make_kclass(gen, rho)};
}

KClassFile load_kclass_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open kclass file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_kclass(buf.str(), path);
}

}  // namespace twk
