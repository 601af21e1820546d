#include "twistkit/rational.hpp"

namespace twk {

Rat mod1(const Rat& r) {
  Int num = r.get_num();
  Int den = r.get_den();
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  Rat out = r - Rat(q);
  out.canonicalize();
  return out;
}

std::string rat_str(const Rat& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::optional<Rat> rat_parse(const std::string& s) {
  if (s.empty()) return std::nullopt;
  // mpq accepts "a/b" directly but also tolerates whitespace and leading '+';
  // keep the accepted grammar tight: optional '-', digits, optional "/digits".
  std::size_t i = 0;
  if (s[i] == '-') ++i;
  if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
  bool slash = false;
  for (; i < s.size(); ++i) {
    if (s[i] == '/') {
      if (slash || i + 1 >= s.size()) return std::nullopt;
      slash = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
  }
  Rat r;
  if (r.set_str(s, 10) != 0) return std::nullopt;
  if (r.get_den() == 0) return std::nullopt;
  r.canonicalize();
  return r;
}

std::uint64_t Rng::next() {
  std::uint64_t x = state_;
  x ^= x << 13;
  x ^= x >> 7;
  x ^= x << 17;
  state_ = x;
  return x;
}

long Rng::range(long lo, long hi) {
  std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<long>(next() % span);
}

Rat Rng::small_rat() {
  long num = range(-9, 9);
  long den = range(1, 3);
  return rat(num, den);
}

}  // namespace twk
