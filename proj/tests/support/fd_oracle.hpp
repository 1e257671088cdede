#pragma once

// Finite-difference oracles built from metric components only; used to check
// the closed-form derivative and curvature paths independently.

#include <geodex/metric.hpp>

#include <vector>

namespace geodex::testing {

inline Mat fd_d_components(const MetricField& m, const Vec& x, int k, double h = 1e-5) {
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    return (m.components(xp) - m.components(xm)) / (2.0 * h);
}

inline std::vector<Mat> fd_christoffel(const MetricField& m, const Vec& x, double h = 1e-5) {
    const int n = m.dimension();
    const Mat ginv = inverse_components(m.components(x), x);
    std::vector<Mat> dg(n);
    for (int k = 0; k < n; ++k) dg[k] = fd_d_components(m, x, k, h);
    std::vector<Mat> gamma(n, Mat::Zero(n, n));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                gamma[k](i, j) = 0.5 * s;
            }
    return gamma;
}

// R(Y,v)v assembled from finite differences of the (FD) Christoffels.
inline Vec fd_curvature_term(const MetricField& m, const Vec& x, const Vec& Y, const Vec& v,
                             double h = 1e-4) {
    const int n = m.dimension();
    std::vector<std::vector<Mat>> dgamma(n);
    for (int a = 0; a < n; ++a) {
        Vec xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        const auto gp = fd_christoffel(m, xp);
        const auto gm = fd_christoffel(m, xm);
        dgamma[a].resize(n);
        for (int k = 0; k < n; ++k) dgamma[a][k] = (gp[k] - gm[k]) / (2.0 * h);
    }
    const auto gamma = fd_christoffel(m, x);
    Vec out = Vec::Zero(n);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double c = dgamma[i][l](j, k) - dgamma[j][l](i, k);
                    for (int mm = 0; mm < n; ++mm)
                        c += gamma[mm](j, k) * gamma[l](i, mm) - gamma[mm](i, k) * gamma[l](j, mm);
                    out[l] += c * Y[i] * v[j] * v[k];
                }
    return out;
}

} // namespace geodex::testing
