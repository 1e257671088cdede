#pragma once

namespace geodex {

// Value and first three derivatives of a scalar profile.
struct BumpJet {
    double f = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
};

// C-infinity monotone transition built from h(u) = exp(-1/u):
// S(u) = h(u) / (h(u) + h(1-u)),  S == 0 for u <= 0,  S == 1 for u >= 1.
BumpJet smooth_step(double u);

// Plateau profile on the normalized radius r >= 0:
//   f(r) = 1 for r <= 1/2,  f(r) = 0 for r >= 1,  smooth monotone between.
// Derivatives are with respect to r.
BumpJet plateau_profile(double r);

} // namespace geodex
