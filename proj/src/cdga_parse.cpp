#include "twistkit/cdga.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace twk {

namespace {

[[noreturn]] void pfail(const std::string& source, int line, const std::string& what) {
  throw std::invalid_argument(source + ":" + std::to_string(line) + ": " + what);
}

struct ExprLexer {
  const std::string& s;
  std::size_t i = 0;
  const std::string& source;
  int line;

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return i < s.size() ? s[i] : '\0';
  }
  [[noreturn]] void fail(const std::string& what) {
    pfail(source, line, what + " (near '" + s.substr(i, 12) + "')");
  }
  unsigned long number() {
    skip_ws();
    std::size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == start) fail("expected digits");
    return std::stoul(s.substr(start, i - start));
  }
  std::string ident() {
    skip_ws();
    std::size_t start = i;
    while (i < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
      ++i;
    if (i == start) fail("expected an identifier");
    return s.substr(start, i - start);
  }
};

// Shared evaluator for form expressions.  With allow_products=false the
// grammar is restricted to sums of <rational>*<symbol> terms, which is what
// `d` and `mul` right-hand sides may use (their values feed the very tables
// a general product would need).
Form eval_expr(const CdgaModel& m, const std::string& text, const std::string& source,
               int line, bool allow_products) {
  ExprLexer lx{text, 0, source, line};
  Form out = form_zero(m);
  bool any = false;
  while (true) {
    bool neg = false, signed_term = false;
    if (lx.eat('-')) {
      neg = true;
      signed_term = true;
    } else if (lx.peek() != '\0') {
      signed_term = lx.eat('+');
    }
    if (lx.peek() == '\0') {
      if (!any) lx.fail("empty expression");
      if (signed_term) lx.fail("dangling sign");
      break;
    }
    any = true;
    Rat coef(1);
    Form val = form_unit(m);
    bool symbol_seen = false;
    while (true) {
      char c = lx.peek();
      if (std::isdigit(static_cast<unsigned char>(c))) {
        unsigned long num = lx.number();
        Rat r(static_cast<long>(num));
        if (lx.eat('/')) {
          unsigned long den = lx.number();
          if (den == 0) lx.fail("zero denominator");
          r /= static_cast<long>(den);
        }
        coef *= r;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string nm = lx.ident();
        auto it = m.index.find(nm);
        if (it == m.index.end()) lx.fail("unknown basis element '" + nm + "'");
        if (symbol_seen && !allow_products)
          lx.fail("products are not allowed on this right-hand side");
        unsigned long pw = 1;
        if (lx.eat('^')) {
          if (!allow_products) lx.fail("powers are not allowed on this right-hand side");
          pw = lx.number();
        }
        for (unsigned long k = 0; k < pw; ++k) val = wedge(val, form_basis(m, it->second));
        symbol_seen = true;
      } else {
        lx.fail("expected a number or basis element");
      }
      if (!lx.eat('*')) break;
    }
    out = form_add(out, form_scale(neg ? -coef : coef, val));
    char nxt = lx.peek();
    if (nxt == '\0') break;
    if (nxt != '+' && nxt != '-') lx.fail("expected '+' or '-' between terms");
  }
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Form form_parse(const CdgaModel& m, const std::string& text, const std::string& source) {
  return eval_expr(m, text, source, 0, true);
}

CdgaModel parse_model(const std::string& text, const std::string& source) {
  CdgaModel m;
  m.basis.push_back({"1", 0});
  m.index["1"] = 0;
  bool saw_model = false, saw_dim = false;

  struct Pending {
    int line;
    std::string a, b, rhs;  // mul: a*b; d: a; integral: rhs holds the value
  };
  std::vector<Pending> muls, ds, integrals;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "model") {
      if (saw_model) pfail(source, lineno, "duplicate model line");
      ls >> m.name;
      if (m.name.empty()) pfail(source, lineno, "model line needs a name");
      saw_model = true;
    } else if (kw == "dim") {
      if (saw_dim) pfail(source, lineno, "duplicate dim line");
      if (!(ls >> m.dim) || m.dim < 0) pfail(source, lineno, "dim needs an integer >= 0");
      saw_dim = true;
    } else if (kw == "gen") {
      std::string nm, degkw;
      int d;
      if (!(ls >> nm >> degkw >> d) || degkw != "deg")
        pfail(source, lineno, "expected: gen <name> deg <n>");
      if (m.index.count(nm)) pfail(source, lineno, "duplicate basis element '" + nm + "'");
      if (nm == "1" || !std::isalpha(static_cast<unsigned char>(nm[0])))
        pfail(source, lineno, "generator names must start with a letter");
      m.basis.push_back({nm, d});
      m.index[nm] = m.basis.size() - 1;
    } else if (kw == "d" || kw == "mul" || kw == "integral") {
      std::string rest;
      std::getline(ls, rest);
      auto eq = rest.find('=');
      if (eq == std::string::npos) pfail(source, lineno, "expected '='");
      std::string lhs = trim(rest.substr(0, eq));
      std::string rhs = trim(rest.substr(eq + 1));
      if (rhs.empty()) pfail(source, lineno, "missing right-hand side");
      if (kw == "d") {
        ds.push_back({lineno, lhs, "", rhs});
      } else if (kw == "mul") {
        auto star = lhs.find('*');
        if (star == std::string::npos) pfail(source, lineno, "expected: mul <a>*<b> = ...");
        muls.push_back({lineno, trim(lhs.substr(0, star)), trim(lhs.substr(star + 1)), rhs});
      } else {
        integrals.push_back({lineno, lhs, "", rhs});
      }
    } else {
      pfail(source, lineno, "unknown keyword '" + kw + "'");
    }
  }
  if (!saw_model) pfail(source, lineno, "missing model line");
  if (!saw_dim) pfail(source, lineno, "missing dim line");

  std::size_t n = m.n();
  m.diff.assign(n, std::vector<Rat>(n, Rat(0)));
  m.integral.assign(n, Rat(0));
  m.mult.assign(n, std::vector<std::vector<Rat>>(n, std::vector<Rat>(n, Rat(0))));
  for (std::size_t i = 0; i < n; ++i) {
    m.mult[0][i][i] = 1;
    if (i != 0) m.mult[i][0][i] = 1;
  }

  std::vector<std::vector<bool>> mul_explicit(n, std::vector<bool>(n, false));
  for (const Pending& p : muls) {
    if (!m.index.count(p.a) || !m.index.count(p.b))
      pfail(source, p.line, "mul references an unknown basis element");
    std::size_t i = m.slot(p.a), j = m.slot(p.b);
    if (i == 0 || j == 0) pfail(source, p.line, "products with the unit are implicit");
    if (mul_explicit[i][j]) pfail(source, p.line, "duplicate mul line for this pair");
    Form val = eval_expr(m, p.rhs, source, p.line, false);
    m.mult[i][j] = val.c;
    mul_explicit[i][j] = true;
    if (!mul_explicit[j][i]) {
      int sign = (m.basis[i].deg % 2 && m.basis[j].deg % 2) ? -1 : 1;
      for (std::size_t t = 0; t < n; ++t) m.mult[j][i][t] = Rat(sign) * val.c[t];
    }
  }

  std::vector<bool> d_explicit(n, false);
  for (const Pending& p : ds) {
    if (!m.index.count(p.a)) pfail(source, p.line, "d references an unknown basis element");
    std::size_t i = m.slot(p.a);
    if (d_explicit[i]) pfail(source, p.line, "duplicate d line for '" + p.a + "'");
    d_explicit[i] = true;
    m.diff[i] = eval_expr(m, p.rhs, source, p.line, false).c;
  }

  for (const Pending& p : integrals) {
    Form lhs = eval_expr(m, p.a, source, p.line, true);
    auto val = rat_parse(p.rhs);
    if (!val) pfail(source, p.line, "integral value must be a rational literal");
    std::size_t nz = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (lhs.c[t] == 0) continue;
      if (nz != n) pfail(source, p.line, "integral lines must target a single basis element");
      nz = t;
    }
    if (nz == n) pfail(source, p.line, "integral of the zero form");
    if (m.basis[nz].deg != m.dim)
      pfail(source, p.line, "integral target is not of top degree");
    m.integral[nz] = *val / lhs.c[nz];
  }

  try {
    validate_model(m);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(source + ": " + e.what());
  }
  return m;
}

}  // namespace twk
