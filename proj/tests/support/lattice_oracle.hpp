#pragma once

// Exact enumeration of geodesic segments on a flat torus: segments from p to
// q are straight lines to the lattice translates q + Z^n (scaled by the
// periods).  Geometric distinctness uses the same canonical image key as the
// solver, so both sides count the same equivalence classes.

#include <geodex/bvp.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

namespace geodex::testing {

struct LatticeSolution {
    double length;
    std::string key;
    Vec displacement; // q + z - p in the universal cover
};

inline std::vector<LatticeSolution> lattice_solutions(const ChartDomain& torus, const Vec& diag,
                                                      const Vec& p, const Vec& q, double cap) {
    const int n = torus.dimension();
    const Vec& per = torus.periods();

    std::vector<int> radius(n);
    for (int i = 0; i < n; ++i)
        radius[i] = static_cast<int>(std::ceil(cap / (per[i] * std::sqrt(diag[i])))) + 1;

    const bool loop = (p - q).norm() == 0.0;

    std::vector<LatticeSolution> out;
    std::set<std::string> seen;

    std::vector<int> z(n, 0);
    const std::function<void(int)> recurse = [&](int axis) {
        if (axis == n) {
            Vec disp = q - p;
            for (int i = 0; i < n; ++i) disp[i] += z[i] * per[i];
            double len2 = 0.0;
            for (int i = 0; i < n; ++i) len2 += diag[i] * disp[i] * disp[i];
            const double len = std::sqrt(len2);
            if (len < 1e-12 && loop) return; // constant curve is not a loop
            if (len > cap + 1e-9) return;

            std::vector<Vec> pts;
            pts.reserve(64);
            for (int k = 0; k < 64; ++k) pts.push_back(p + (k / 63.0) * disp);
            std::string key = equivalence_key_of_points(torus, pts);
            if (seen.insert(key).second) out.push_back({len, std::move(key), disp});
            return;
        }
        for (int v = -radius[axis]; v <= radius[axis]; ++v) {
            z[axis] = v;
            recurse(axis + 1);
        }
    };
    recurse(0);

    std::sort(out.begin(), out.end(), [](const LatticeSolution& a, const LatticeSolution& b) {
        if (a.length != b.length) return a.length < b.length;
        return a.key < b.key;
    });
    return out;
}

inline int lattice_count(const ChartDomain& torus, const Vec& diag, const Vec& p, const Vec& q,
                         double cap) {
    return static_cast<int>(lattice_solutions(torus, diag, p, q, cap).size());
}

} // namespace geodex::testing
