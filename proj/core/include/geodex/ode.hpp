#pragma once

#include "geodex/chart.hpp"

#include <functional>

namespace geodex {

struct OdeOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double h_max = 0.0;      // 0: no cap beyond the span
    double h_init = 0.0;     // 0: h_max or span/100
    long max_steps = 2000000;
};

// Called at every accepted node, t0 and t_end included.
// dz is the derivative at (t, z).
using OdeObserver = std::function<void(double t, const Vec& z, const Vec& dz)>;

// Adaptive Dormand-Prince 5(4) with FSAL.  Throws StiffnessError on step-size
// underflow.  Integrates from t0 to t_end (t_end > t0).
void integrate_dopri5(const std::function<Vec(double, const Vec&)>& rhs,
                      double t0, double t_end, const Vec& z0,
                      const OdeOptions& opts, const OdeObserver& observe);

// Quintic Hermite interpolation on [0, h] from endpoint jets
// (value, first, second derivative).  tau in [0, 1].
struct HermiteQuintic {
    static Vec position(const Vec& y0, const Vec& v0, const Vec& a0,
                        const Vec& y1, const Vec& v1, const Vec& a1,
                        double h, double tau);
    static Vec velocity(const Vec& y0, const Vec& v0, const Vec& a0,
                        const Vec& y1, const Vec& v1, const Vec& a1,
                        double h, double tau);
    static Vec acceleration(const Vec& y0, const Vec& v0, const Vec& a0,
                            const Vec& y1, const Vec& v1, const Vec& a1,
                            double h, double tau);
};

} // namespace geodex
