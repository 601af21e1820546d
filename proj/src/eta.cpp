#include "twistkit/eta.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace twk {

CircleDirac make_circle_dirac(const Rat& holonomy) {
  if (holonomy < 0 || holonomy >= 1)
    throw std::invalid_argument("circle holonomy must lie in [0,1)");
  return CircleDirac{holonomy};
}

Rat eta_reduced(const CircleDirac& d) {
  return mod1(d.holonomy + rat(1, 2));
}

Rat eta_difference(const Rat& a, const Rat& b) {
  return mod1(eta_reduced(make_circle_dirac(a)) -
              eta_reduced(make_circle_dirac(b)));
}

namespace {

// Hurwitz zeta via Euler-Maclaurin: N plain terms, trapezoid correction, and
// six Bernoulli tail terms.  Accurate to full double precision for the small
// positive s used below.
double hurwitz_zeta(double s, double q) {
  constexpr int kTerms = 24;
  double sum = 0;
  for (int n = 0; n < kTerms; ++n) sum += std::pow(n + q, -s);
  const double nq = kTerms + q;
  sum += std::pow(nq, 1 - s) / (s - 1);
  sum += 0.5 * std::pow(nq, -s);
  static constexpr std::array<double, 6> bern = {
      1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730};
  double rising = s;           // s (s+1) ... (s+2k-2)
  double factorial = 2;        // (2k)!
  double power = std::pow(nq, -s - 1);
  for (std::size_t k = 1; k <= bern.size(); ++k) {
    sum += bern[k - 1] / factorial * rising * power;
    rising *= (s + 2 * double(k) - 1) * (s + 2 * double(k));
    factorial *= (2 * double(k) + 1) * (2 * double(k) + 2);
    power /= nq * nq;
  }
  return sum;
}

}  // namespace

double eta_zero_series(double a) {
  if (a == 0) return 0;  // symmetric spectrum
  // eta(s) = zeta_H(s, 1-a) - zeta_H(s, a) is entire; evaluate on a geometric
  // ladder of small s and extrapolate to 0 with Neville's scheme.
  constexpr int kNodes = 6;
  std::array<double, kNodes> s{};
  std::array<double, kNodes> val{};
  for (int i = 0; i < kNodes; ++i) {
    s[i] = std::ldexp(1.0, -(6 + i));  // 1/64 ... 1/2048
    val[i] = hurwitz_zeta(s[i], 1 - a) - hurwitz_zeta(s[i], a);
  }
  for (int level = 1; level < kNodes; ++level)
    for (int i = kNodes - 1; i >= level; --i)
      val[i] = (s[i - level] * val[i] - s[i] * val[i - 1]) /
               (s[i - level] - s[i]);
  return val[kNodes - 1];
}

double eta_reduced_series(double a) {
  const double kernel = a == 0 ? 1 : 0;
  double r = (eta_zero_series(a) + kernel) / 2;
  r -= std::floor(r);
  return r;
}

}  // namespace twk
