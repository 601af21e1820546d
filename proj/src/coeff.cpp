#include "twistkit/coeff.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace twk {

Mono mono_trim(Mono m) {
  while (!m.empty() && m.back() == 0) m.pop_back();
  return m;
}

Mono mono_mul(const Mono& a, const Mono& b) {
  Mono out(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return mono_trim(out);
}

int mono_degree(const Mono& m) {
  int d = 0;
  for (size_t i = 0; i < m.size(); ++i)
    d += static_cast<int>(m[i]) * (i == 0 ? 2 : 4 * static_cast<int>(i));
  return d;
}

void GradedPoly::add_term(const Mono& m, const Rat& c) {
  if (c == 0) return;
  Mono key = mono_trim(m);
  auto it = terms.find(key);
  if (it == terms.end()) {
    terms.emplace(std::move(key), c);
  } else {
    it->second += c;
    if (it->second == 0) terms.erase(it);
  }
}

Rat GradedPoly::coeff(const Mono& m) const {
  auto it = terms.find(mono_trim(m));
  return it == terms.end() ? Rat(0) : it->second;
}

int GradedPoly::degree() const {
  int d = -1;
  for (const auto& [m, c] : terms) d = std::max(d, mono_degree(m));
  return d;
}

bool GradedPoly::homogeneous() const {
  int d = -1;
  for (const auto& [m, c] : terms) {
    int md = mono_degree(m);
    if (d >= 0 && md != d) return false;
    d = md;
  }
  return true;
}

GradedPoly GradedPoly::graded_part(int deg) const {
  GradedPoly out(ring);
  for (const auto& [m, c] : terms)
    if (mono_degree(m) == deg) out.terms.emplace(m, c);
  return out;
}

GradedPoly GradedPoly::truncated(int maxdeg) const {
  GradedPoly out(ring);
  for (const auto& [m, c] : terms)
    if (mono_degree(m) <= maxdeg) out.terms.emplace(m, c);
  return out;
}

GradedPoly poly_zero(Ring r) { return GradedPoly(r); }

GradedPoly poly_one(Ring r) {
  GradedPoly p(r);
  p.add_term({}, Rat(1));
  return p;
}

GradedPoly poly_var(Ring r, int slot, unsigned power) {
  if (slot < 0) throw std::invalid_argument("negative generator slot");
  GradedPoly p(r);
  if (power == 0) return poly_one(r);
  Mono m(slot + 1, 0);
  m[slot] = power;
  p.add_term(m, Rat(1));
  return p;
}

static void require_same_ring(const GradedPoly& a, const GradedPoly& b) {
  if (a.ring != b.ring)
    throw std::invalid_argument("coefficient ring mismatch (V vs N)");
}

GradedPoly poly_add(const GradedPoly& a, const GradedPoly& b) {
  require_same_ring(a, b);
  GradedPoly out = a;
  for (const auto& [m, c] : b.terms) out.add_term(m, c);
  return out;
}

GradedPoly poly_sub(const GradedPoly& a, const GradedPoly& b) {
  require_same_ring(a, b);
  GradedPoly out = a;
  for (const auto& [m, c] : b.terms) out.add_term(m, -c);
  return out;
}

GradedPoly poly_scale(const Rat& c, const GradedPoly& a) {
  GradedPoly out(a.ring);
  if (c == 0) return out;
  for (const auto& [m, k] : a.terms) out.terms.emplace(m, c * k);
  return out;
}

GradedPoly poly_mul(const GradedPoly& a, const GradedPoly& b) {
  require_same_ring(a, b);
  GradedPoly out(a.ring);
  for (const auto& [ma, ca] : a.terms)
    for (const auto& [mb, cb] : b.terms) out.add_term(mono_mul(ma, mb), ca * cb);
  return out;
}

GradedPoly dzeta(const GradedPoly& phi) {
  if (phi.ring != Ring::N)
    throw std::invalid_argument("dzeta expects an N-side polynomial");
  GradedPoly out(Ring::N);
  for (const auto& [m, c] : phi.terms) {
    if (m.empty() || m[0] == 0) continue;
    Mono n = m;
    n[0] -= 1;
    out.add_term(n, c * static_cast<long>(m[0]));
  }
  return out;
}

// phi * (u^j x_J): divide by p_J monomial-wise, then apply (d/dz)^j.
static GradedPoly star_mono(const GradedPoly& phi, const Mono& v) {
  GradedPoly out(Ring::N);
  unsigned j = v.empty() ? 0 : v[0];
  for (const auto& [m, c] : phi.terms) {
    Mono n(std::max({m.size(), v.size(), size_t{1}}), 0);
    for (size_t i = 0; i < m.size(); ++i) n[i] = m[i];
    bool divisible = true;
    for (size_t i = 1; i < v.size() && divisible; ++i) {
      if (n[i] < v[i])
        divisible = false;
      else
        n[i] -= v[i];
    }
    if (!divisible || n[0] < j) continue;
    Rat fall(1);  // falling factorial k (k-1) ... (k-j+1)
    for (unsigned s = 0; s < j; ++s) fall *= static_cast<long>(n[0] - s);
    n[0] -= j;
    out.add_term(n, c * fall);
  }
  return out;
}

GradedPoly star(const GradedPoly& phi, const GradedPoly& v) {
  if (phi.ring != Ring::N || v.ring != Ring::V)
    throw std::invalid_argument("star expects (N, V) arguments");
  GradedPoly out(Ring::N);
  for (const auto& [mv, cv] : v.terms)
    out = poly_add(out, poly_scale(cv, star_mono(phi, mv)));
  return out;
}

Rat pair_coeff(const GradedPoly& phi, const GradedPoly& v) {
  if (phi.ring != Ring::N || v.ring != Ring::V)
    throw std::invalid_argument("pair_coeff expects (N, V) arguments");
  if (!phi.homogeneous() || !v.homogeneous())
    throw std::invalid_argument("pair_coeff needs homogeneous arguments");
  if (!phi.is_zero() && !v.is_zero() && phi.degree() != v.degree())
    throw std::invalid_argument("pair_coeff degree mismatch");
  return star(phi, v).coeff({});
}

// --- truncated univariate power series over Q (index = exponent) -----------

using Series = std::vector<Rat>;

static Series series_mul(const Series& a, const Series& b, size_t n) {
  Series out(n, Rat(0));
  for (size_t i = 0; i < a.size() && i < n; ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size() && i + j < n; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

// 1/a for a with a[0] != 0.
static Series series_inv(const Series& a, size_t n) {
  Series out(n, Rat(0));
  out[0] = 1 / a[0];
  for (size_t k = 1; k < n; ++k) {
    Rat acc(0);
    for (size_t i = 1; i <= k && i < a.size(); ++i) acc += a[i] * out[k - i];
    out[k] = -acc / a[0];
  }
  return out;
}

// log a for a with a[0] == 1, via (log a)' = a'/a.
static Series series_log(const Series& a, size_t n) {
  Series da(n, Rat(0));
  for (size_t k = 1; k < n && k < a.size(); ++k)
    da[k - 1] = a[k] * static_cast<long>(k);
  Series quot = series_mul(da, series_inv(a, n), n);
  Series out(n, Rat(0));
  for (size_t k = 1; k < n; ++k) out[k] = quot[k - 1] / static_cast<long>(k);
  return out;
}

// The one-variable A-hat factor f(q) with q = y^2:
//   (y/2)/sinh(y/2) = sum_k f_k q^k,  f_0 = 1, f_1 = -1/24, f_2 = 7/5760, ...
static Series ahat_factor(size_t n) {
  Series sh(n, Rat(0));  // sinh(x)/x as a series in x^2
  Rat fact(1);
  for (size_t k = 0; k < n; ++k) {
    if (k > 0) fact *= static_cast<long>(2 * k) * static_cast<long>(2 * k + 1);
    sh[k] = 1 / fact;
  }
  Series f = series_inv(sh, n);
  Rat pow4(1);  // x = y/2 turns x^{2k} into q^k / 4^k
  for (size_t k = 0; k < n; ++k) {
    f[k] /= pow4;
    pow4 *= 4;
  }
  return f;
}

// --- symmetric expansion in auxiliary Chern roots ---------------------------
//
// Multivariate polynomials in q_1..q_m, exponent vectors of fixed length m.

using QExp = std::vector<unsigned>;
using QPoly = std::map<QExp, Rat>;

static QPoly qpoly_mul(const QPoly& a, const QPoly& b, unsigned maxtot) {
  QPoly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      QExp e(ea.size());
      unsigned tot = 0;
      for (size_t i = 0; i < e.size(); ++i) {
        e[i] = ea[i] + eb[i];
        tot += e[i];
      }
      if (tot > maxtot) continue;
      Rat& slot = out[e];
      slot += ca * cb;
      if (slot == 0) out.erase(e);
    }
  return out;
}

// Elementary symmetric polynomial e_i(q_1..q_m).
static QPoly elementary(unsigned i, unsigned m) {
  QPoly out;
  std::vector<unsigned> idx(i);
  // iterate over all size-i subsets of {0..m-1}
  for (unsigned v = 0; v < i; ++v) idx[v] = v;
  if (i == 0) {
    out[QExp(m, 0)] = 1;
    return out;
  }
  if (i > m) return out;
  while (true) {
    QExp e(m, 0);
    for (unsigned v : idx) e[v] = 1;
    out[e] = 1;
    int pos = static_cast<int>(i) - 1;
    while (pos >= 0 && idx[pos] == m - i + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (unsigned v = pos + 1; v < i; ++v) idx[v] = idx[v - 1] + 1;
  }
  return out;
}

// Rewrite a symmetric polynomial (degree <= m in total) in the elementary
// symmetric generators; emits an N-side polynomial in p_1..p_m where p_i
// stands for e_i.  Leading-term elimination in lex order.
static GradedPoly symmetric_to_elementary(QPoly s, unsigned m, unsigned maxtot) {
  std::vector<QPoly> elem(m + 1);
  for (unsigned i = 0; i <= m; ++i) elem[i] = elementary(i, m);
  GradedPoly out(Ring::N);
  while (!s.empty()) {
    // lex-leading exponent (largest under reverse map order)
    auto lead = std::prev(s.end());
    QExp lam = lead->first;
    Rat c = lead->second;
    // for a symmetric polynomial the leading exponent is weakly decreasing
    for (size_t i = 0; i + 1 < lam.size(); ++i)
      if (lam[i] < lam[i + 1])
        throw std::logic_error("non-symmetric input in elementary reduction");
    QPoly prod;
    prod[QExp(m, 0)] = 1;
    Mono pmono(m + 1, 0);
    for (size_t i = 0; i < lam.size(); ++i) {
      unsigned times = lam[i] - (i + 1 < lam.size() ? lam[i + 1] : 0);
      for (unsigned t = 0; t < times; ++t)
        prod = qpoly_mul(prod, elem[i + 1], maxtot);
      pmono[i + 1] += times;
    }
    out.add_term(pmono, c);
    for (const auto& [e, pc] : prod) {
      Rat& slot = s[e];
      slot -= c * pc;
      if (slot == 0) s.erase(e);
    }
  }
  return out;
}

CharSeries ahat_series(int trunc) {
  if (trunc < 0 || trunc % 2 != 0)
    throw std::invalid_argument("ahat_series needs an even truncation >= 0");
  unsigned t = static_cast<unsigned>(trunc / 4);  // top total degree in the q_i
  CharSeries cs;
  cs.trunc = trunc;
  if (t == 0) {
    cs.value = poly_one(Ring::N);
    return cs;
  }
  unsigned m = t;  // t roots suffice for total degree <= t
  Series f = ahat_factor(t + 1);
  QPoly prod;
  prod[QExp(m, 0)] = 1;
  for (unsigned j = 0; j < m; ++j) {
    QPoly factor;
    for (unsigned k = 0; k <= t; ++k) {
      if (f[k] == 0) continue;
      QExp e(m, 0);
      e[j] = k;
      factor[e] = f[k];
    }
    prod = qpoly_mul(prod, factor, t);
  }
  cs.value = symmetric_to_elementary(std::move(prod), m, t);
  return cs;
}

GradedPoly exp_zeta(int trunc) {
  if (trunc < 0 || trunc % 2 != 0)
    throw std::invalid_argument("exp_zeta needs an even truncation >= 0");
  GradedPoly out(Ring::N);
  Rat fact(1);
  for (int k = 0; 2 * k <= trunc; ++k) {
    if (k > 0) fact *= k;
    out.add_term(Mono{static_cast<unsigned>(k)}, 1 / fact);
  }
  return out;
}

static void monos_rec(int remaining, std::size_t slot, Mono& cur,
                      std::vector<Mono>& out) {
  if (remaining == 0) {
    out.push_back(mono_trim(cur));
    return;
  }
  int w = slot == 0 ? 2 : 4 * static_cast<int>(slot);
  if (w > remaining) return;
  for (int e = 0; e * w <= remaining; ++e) {
    if (cur.size() <= slot) cur.resize(slot + 1, 0);
    cur[slot] = static_cast<unsigned>(e);
    monos_rec(remaining - e * w, slot + 1, cur, out);
  }
  cur[slot] = 0;
}

std::vector<Mono> monos_of_degree(int degree) {
  std::vector<Mono> out;
  if (degree < 0 || degree % 2 != 0) return out;
  Mono cur;
  monos_rec(degree, 0, cur, out);
  std::sort(out.begin(), out.end());
  return out;
}

// --- text form ---------------------------------------------------------------

static std::string var_name(Ring r, size_t slot) {
  std::ostringstream os;
  if (slot == 0)
    os << (r == Ring::N ? "z" : "u");
  else if (r == Ring::N)
    os << "p" << slot;
  else
    os << "x" << 4 * slot;
  return os.str();
}

std::string poly_str(const GradedPoly& p) {
  if (p.terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : p.terms) {
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
    bool wrote = false;
    if (a != 1 || m.empty()) {
      os << rat_str(a);
      wrote = true;
    }
    for (size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (wrote) os << "*";
      os << var_name(p.ring, i);
      if (m[i] > 1) os << "^" << m[i];
      wrote = true;
    }
  }
  return os.str();
}

namespace {

struct PolyLexer {
  const std::string& s;
  size_t i = 0;

  explicit PolyLexer(const std::string& text) : s(text) {}
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
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("polynomial parse error at position " +
                                std::to_string(i) + ": " + what);
  }
  unsigned long number() {
    skip_ws();
    size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == start) fail("expected digits");
    return std::stoul(s.substr(start, i - start));
  }
};

}  // namespace

GradedPoly poly_parse(const std::string& text, Ring ring) {
  PolyLexer lx(text);
  GradedPoly out(ring);
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
    Mono mono;
    bool saw_factor = false;
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
      } else if (std::isalpha(static_cast<unsigned char>(c))) {
        ++lx.i;
        size_t slot;
        if (c == 'z' || c == 'u') {
          if ((ring == Ring::N) != (c == 'z')) lx.fail("generator from the wrong ring");
          slot = 0;
        } else if (c == 'p' || c == 'x') {
          if ((ring == Ring::N) != (c == 'p')) lx.fail("generator from the wrong ring");
          unsigned long idx = lx.number();
          if (c == 'x') {
            if (idx % 4 != 0 || idx == 0) lx.fail("x generators are x4, x8, ...");
            idx /= 4;
          }
          if (idx == 0) lx.fail("generator index must be positive");
          slot = idx;
        } else {
          lx.fail(std::string("unknown generator '") + c + "'");
        }
        unsigned long pow = 1;
        if (lx.eat('^')) pow = lx.number();
        if (mono.size() <= slot) mono.resize(slot + 1, 0);
        mono[slot] += static_cast<unsigned>(pow);
      } else {
        lx.fail("expected a number or generator");
      }
      saw_factor = true;
      if (!lx.eat('*')) break;
    }
    if (!saw_factor) lx.fail("empty term");
    out.add_term(mono, neg ? -coef : coef);
    char nxt = lx.peek();
    if (nxt == '\0') break;
    if (nxt != '+' && nxt != '-') lx.fail("expected '+' or '-' between terms");
  }
  return out;
}

}  // namespace twk
