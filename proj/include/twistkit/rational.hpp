#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace twk {

// Exact rational scalar used everywhere. No floating point leaks out of this
// type; the only float in the project is the eta-series cross-check.
using Rat = mpq_class;
using Int = mpz_class;

inline Rat rat(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline bool is_integer(const Rat& r) { return r.get_den() == 1; }

// Reduce into [0,1). Used for mod-1 (circle-valued) quantities.
Rat mod1(const Rat& r);

// Canonical text form: "p" or "p/q" with q > 1, no spaces, minus sign leading.
std::string rat_str(const Rat& r);

// Parse "p", "-p/q", etc. Returns nullopt on malformed input.
std::optional<Rat> rat_parse(const std::string& s);

// Deterministic xorshift generator for seeded property tests. Coefficients are
// kept small so exact arithmetic stays readable in failure reports.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
  std::uint64_t next();
  // Uniform integer in [lo, hi].
  long range(long lo, long hi);
  // Rational with numerator in [-9,9] and denominator in {1,2,3}.
  Rat small_rat();

 private:
  std::uint64_t state_;
};

}  // namespace twk
