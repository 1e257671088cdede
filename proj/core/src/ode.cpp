#include "geodex/ode.hpp"
#include "geodex/errors.hpp"

#include <algorithm>
#include <cmath>

namespace geodex {

namespace {

// Dormand-Prince RK5(4)7M coefficients.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

} // namespace

void integrate_dopri5(const std::function<Vec(double, const Vec&)>& rhs,
                      double t0, double t_end, const Vec& z0,
                      const OdeOptions& opts, const OdeObserver& observe) {
    const double span = t_end - t0;
    if (!(span > 0)) throw ValidationError("integration span must be positive");

    const double h_cap = opts.h_max > 0 ? std::min(opts.h_max, span) : span;
    double h = opts.h_init > 0 ? std::min(opts.h_init, h_cap) : std::min(h_cap, span / 100.0);
    const double h_floor = 1e-14 * span;

    double t = t0;
    Vec z = z0;
    Vec k1 = rhs(t, z);
    observe(t, z, k1);

    Vec k2, k3, k4, k5, k6, k7, znew, zerr;
    long steps = 0;
    while (t < t_end) {
        if (++steps > opts.max_steps) throw StiffnessError("step budget exhausted");
        h = std::min(h, t_end - t);
        if (h < h_floor) throw StiffnessError("step size underflow");

        k2 = rhs(t + a21 * h, z + h * (a21 * k1));
        k3 = rhs(t + 0.3 * h, z + h * (a31 * k1 + a32 * k2));
        k4 = rhs(t + 0.8 * h, z + h * (a41 * k1 + a42 * k2 + a43 * k3));
        k5 = rhs(t + 8.0 / 9.0 * h, z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = rhs(t + h, z + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        znew = z + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = rhs(t + h, znew);

        zerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double err = 0.0;
        for (int i = 0; i < z.size(); ++i) {
            const double sc = opts.abs_tol +
                              opts.rel_tol * std::max(std::abs(z[i]), std::abs(znew[i]));
            const double q = zerr[i] / sc;
            err += q * q;
        }
        err = std::sqrt(err / z.size());

        if (err <= 1.0) {
            t += h;
            z = znew;
            k1 = k7; // FSAL
            observe(t, z, k1);
        }
        const double factor = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
        h = std::min(h, h_cap);
    }
}

namespace {
struct QuinticWeights {
    double h0, h1, h2, h3, h4, h5;
};

QuinticWeights position_weights(double tau) {
    const double t2 = tau * tau, t3 = t2 * tau, t4 = t3 * tau, t5 = t4 * tau;
    return {1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
            tau - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
            0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5,
            10.0 * t3 - 15.0 * t4 + 6.0 * t5,
            -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
            0.5 * t3 - t4 + 0.5 * t5};
}

QuinticWeights velocity_weights(double tau) {
    const double t2 = tau * tau, t3 = t2 * tau, t4 = t3 * tau;
    return {-30.0 * t2 + 60.0 * t3 - 30.0 * t4,
            1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
            tau - 4.5 * t2 + 6.0 * t3 - 2.5 * t4,
            30.0 * t2 - 60.0 * t3 + 30.0 * t4,
            -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
            1.5 * t2 - 4.0 * t3 + 2.5 * t4};
}

QuinticWeights acceleration_weights(double tau) {
    const double t2 = tau * tau, t3 = t2 * tau;
    return {-60.0 * tau + 180.0 * t2 - 120.0 * t3,
            -36.0 * tau + 96.0 * t2 - 60.0 * t3,
            1.0 - 9.0 * tau + 18.0 * t2 - 10.0 * t3,
            60.0 * tau - 180.0 * t2 + 120.0 * t3,
            -24.0 * tau + 84.0 * t2 - 60.0 * t3,
            3.0 * tau - 12.0 * t2 + 10.0 * t3};
}
} // namespace

Vec HermiteQuintic::position(const Vec& y0, const Vec& v0, const Vec& a0,
                             const Vec& y1, const Vec& v1, const Vec& a1,
                             double h, double tau) {
    const QuinticWeights w = position_weights(tau);
    return w.h0 * y0 + (w.h1 * h) * v0 + (w.h2 * h * h) * a0 +
           w.h3 * y1 + (w.h4 * h) * v1 + (w.h5 * h * h) * a1;
}

Vec HermiteQuintic::velocity(const Vec& y0, const Vec& v0, const Vec& a0,
                             const Vec& y1, const Vec& v1, const Vec& a1,
                             double h, double tau) {
    const QuinticWeights w = velocity_weights(tau);
    return (w.h0 / h) * y0 + w.h1 * v0 + (w.h2 * h) * a0 +
           (w.h3 / h) * y1 + w.h4 * v1 + (w.h5 * h) * a1;
}

Vec HermiteQuintic::acceleration(const Vec& y0, const Vec& v0, const Vec& a0,
                                 const Vec& y1, const Vec& v1, const Vec& a1,
                                 double h, double tau) {
    const QuinticWeights w = acceleration_weights(tau);
    return (w.h0 / (h * h)) * y0 + (w.h1 / h) * v0 + w.h2 * a0 +
           (w.h3 / (h * h)) * y1 + (w.h4 / h) * v1 + w.h5 * a1;
}

} // namespace geodex
