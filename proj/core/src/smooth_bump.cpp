#include "geodex/smooth_bump.hpp"

#include <cmath>

namespace geodex {

namespace {

// h(u) = exp(-1/u) and derivatives up to third order, u > 0.
struct HJet {
    double h, h1, h2, h3;
};

HJet h_jet(double u) {
    const double h = std::exp(-1.0 / u);
    const double iu = 1.0 / u;
    const double iu2 = iu * iu;
    const double iu3 = iu2 * iu;
    const double iu4 = iu2 * iu2;
    const double iu5 = iu4 * iu;
    const double iu6 = iu3 * iu3;
    return {h, h * iu2, h * (iu4 - 2.0 * iu3), h * (iu6 - 6.0 * iu5 + 6.0 * iu4)};
}

// Below this distance from either end the transition is numerically flat.
constexpr double kEdge = 2e-3;

} // namespace

BumpJet smooth_step(double u) {
    if (u <= kEdge) return {0.0, 0.0, 0.0, 0.0};
    if (u >= 1.0 - kEdge) return {1.0, 0.0, 0.0, 0.0};

    const HJet P = h_jet(u);
    const HJet Q = h_jet(1.0 - u);
    const double p = P.h, p1 = P.h1, p2 = P.h2, p3 = P.h3;
    const double q = Q.h, q1 = -Q.h1, q2 = Q.h2, q3 = -Q.h3;

    const double w = p + q;
    const double w1 = p1 + q1;
    const double w2 = p2 + q2;

    const double A = p1 * q - p * q1;
    const double A1 = p2 * q - p * q2;
    const double A2 = p3 * q + p2 * q1 - p1 * q2 - p * q3;

    const double w_2 = w * w;
    const double w_3 = w_2 * w;
    const double w_4 = w_2 * w_2;

    BumpJet out;
    out.f = p / w;
    out.d1 = A / w_2;
    out.d2 = (A1 * w - 2.0 * A * w1) / w_3;
    out.d3 = (A2 * w_2 - 4.0 * A1 * w1 * w - 2.0 * A * w2 * w + 6.0 * A * w1 * w1) / w_4;
    return out;
}

BumpJet plateau_profile(double r) {
    if (r <= 0.5) return {1.0, 0.0, 0.0, 0.0};
    if (r >= 1.0) return {0.0, 0.0, 0.0, 0.0};
    // f(r) = S(2(1-r))
    const BumpJet s = smooth_step(2.0 * (1.0 - r));
    BumpJet out;
    out.f = s.f;
    out.d1 = -2.0 * s.d1;
    out.d2 = 4.0 * s.d2;
    out.d3 = -8.0 * s.d3;
    return out;
}

} // namespace geodex
