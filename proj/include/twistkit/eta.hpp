#pragma once

#include "twistkit/rational.hpp"

namespace twk {

// Dirac operator on the circle twisted by a flat line bundle; the holonomy
// parameter a shifts the spectrum to {n - a : n in Z}.
struct CircleDirac {
  Rat holonomy;  // in [0,1)
};

CircleDirac make_circle_dirac(const Rat& holonomy);

// (eta(0) + dim ker)/2 mod 1.  The closed form is a + 1/2 mod 1: for
// a in (0,1) the spectrum has no kernel and eta(0) = 2a - 1; at a = 0 the
// spectrum is symmetric with a one-dimensional kernel.
Rat eta_reduced(const CircleDirac& d);

// eta_reduced(a) - eta_reduced(b) mod 1, i.e. a - b mod 1; equals the circle
// Chern-Simons integral for the linear path between the flat connections.
Rat eta_difference(const Rat& a, const Rat& b);

// Zeta-regularized oracle for eta(0): Hurwitz zeta partial sums with
// Euler-Maclaurin tail corrections, extrapolated to s = 0.  This is the only
// floating-point computation in the project and is used solely to cross-check
// the closed form.
double eta_zero_series(double a);
// (eta(0) + dim ker)/2 from the series, folded into [0,1).
double eta_reduced_series(double a);

}  // namespace twk
