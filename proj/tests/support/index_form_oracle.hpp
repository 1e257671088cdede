#pragma once

// Discretized second variation of the energy along a solved geodesic: a
// second-difference quadratic form with the boundary terms of the P-Jacobi
// condition.  Its numerical null space is an implementation-independent
// reference for kernel dimensions (the fundamental-solution path never
// enters; only the metric primitives do).

#include <geodex/bvp.hpp>

#include <Eigen/Eigenvalues>

namespace geodex::testing {

struct IndexFormSpectrum {
    Vec eigenvalues;   // of the generalized problem Q v = lambda M v, ascending
    int kernel = 0;    // |lambda| below the null band
    int negatives = 0; // lambda below the band
};

// The quadratic form is normalized by the L2 mass matrix (trapezoid nodal
// weights), so eigenvalues approximate the continuum Jacobi operator and
// zero modes sit at O(h^2) while the rest are order one.
inline IndexFormSpectrum index_form_spectrum(const GeodesicPath& path,
                                             const BoundaryCondition& cond, int nodes = 200,
                                             double null_band = 0.1) {
    const MetricField& m = path.metric();
    const int n = m.dimension();
    const int mseg = nodes;
    const double t0 = path.t_begin();
    const double h = (path.t_end() - t0) / mseg;
    const double L = path.speed();

    const bool point_pair = cond.kind() == ConditionKind::PointPair;

    // Degrees of freedom: interior nodes carry full vectors; for orthogonal
    // conditions the endpoints carry tangent-frame coefficients.
    const int interior = (mseg - 1) * n;
    const int end_dof = point_pair ? 0 : (n - 1);
    const int dof = interior + 2 * end_dof;

    // Basis of nodal vector fields: column -> values at nodes 0..mseg.
    std::vector<std::vector<Vec>> basis(dof, std::vector<Vec>(mseg + 1, Vec::Zero(n)));
    for (int i = 1; i < mseg; ++i)
        for (int k = 0; k < n; ++k) basis[(i - 1) * n + k][i] = Vec::Unit(n, k);

    Mat W0, W1;
    double sigma0 = 1.0, sigma1 = 1.0;
    std::vector<Vec> frame0, frame1;
    if (!point_pair) {
        const LevelSet& ls = cond.constraint(n);
        const Vec x0 = path.start_point();
        const Vec x1 = path.end_point();
        const Vec nu0 = outward_unit_normal(m, ls, x0);
        const Vec nu1 = outward_unit_normal(m, ls, x1);
        sigma0 = inner(m, x0, path.start_velocity(), nu0) >= 0 ? 1.0 : -1.0;
        sigma1 = inner(m, x1, path.end_velocity(), nu1) >= 0 ? 1.0 : -1.0;
        W0 = weingarten(m, ls, x0);
        W1 = weingarten(m, ls, x1);
        frame0 = frame_complement(m, x0, nu0, ls.gradient(x0));
        frame1 = frame_complement(m, x1, nu1, ls.gradient(x1));
        for (int a = 0; a < n - 1; ++a) {
            basis[interior + a][0] = frame0[a];
            basis[interior + end_dof + a][mseg] = frame1[a];
        }
    }

    // Midpoint data per segment.
    std::vector<Vec> xm(mseg), vm(mseg);
    std::vector<Mat> gm(mseg), Km(mseg);
    std::vector<std::vector<Mat>> gammam(mseg);
    for (int i = 0; i < mseg; ++i) {
        const double tm = t0 + h * (i + 0.5);
        xm[i] = path.position(tm);
        vm[i] = path.velocity(tm);
        const MetricJet jet = metric_jet(m, xm[i]);
        gm[i] = jet.g;
        gammam[i] = jet.gamma;
        Km[i] = curvature_operator(m, xm[i], vm[i], jet);
    }

    // Q(Y, Z) assembled column by column: covariant midpoint differences.
    const auto covariant_diff = [&](const std::vector<Vec>& Y, int i) {
        Vec d = (Y[i + 1] - Y[i]) / h;
        const Vec Ybar = 0.5 * (Y[i] + Y[i + 1]);
        for (int k = 0; k < n; ++k) d[k] += vm[i].dot(gammam[i][k] * Ybar);
        return d;
    };

    Mat Q = Mat::Zero(dof, dof);
    Mat M = Mat::Zero(dof, dof);
    std::vector<std::vector<Vec>> diffs(dof), bars(dof);
    for (int c = 0; c < dof; ++c) {
        diffs[c].resize(mseg);
        bars[c].resize(mseg);
        for (int i = 0; i < mseg; ++i) {
            diffs[c][i] = covariant_diff(basis[c], i);
            bars[c][i] = 0.5 * (basis[c][i] + basis[c][i + 1]);
        }
    }
    // trapezoid nodal mass (positive definite)
    std::vector<Mat> gnode(mseg + 1);
    for (int i = 0; i <= mseg; ++i) gnode[i] = m.components(path.position(t0 + h * i));

    for (int a = 0; a < dof; ++a)
        for (int b = a; b < dof; ++b) {
            double q = 0.0, mm = 0.0;
            for (int i = 0; i < mseg; ++i) {
                q += h * diffs[a][i].dot(gm[i] * diffs[b][i]);
                q -= h * bars[a][i].dot(gm[i] * (Km[i] * bars[b][i]));
            }
            for (int i = 0; i <= mseg; ++i) {
                const double w = (i == 0 || i == mseg) ? 0.5 * h : h;
                mm += w * basis[a][i].dot(gnode[i] * basis[b][i]);
            }
            if (!point_pair) {
                // boundary terms: + L sigma0 g(W0 Y(0), Z(0)) - L sigma1 g(W1 Y(1), Z(1))
                q += L * sigma0 * basis[a][0].dot(m.components(path.start_point()) *
                                                  (W0 * basis[b][0]));
                q -= L * sigma1 * basis[a][mseg].dot(m.components(path.end_point()) *
                                                     (W1 * basis[b][mseg]));
            }
            Q(a, b) = Q(b, a) = q;
            M(a, b) = M(b, a) = mm;
        }

    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(Q, M);
    IndexFormSpectrum out;
    out.eigenvalues = es.eigenvalues();
    for (int i = 0; i < out.eigenvalues.size(); ++i) {
        const double lam = out.eigenvalues[i];
        if (std::abs(lam) < null_band) ++out.kernel;
        else if (lam < 0) ++out.negatives;
    }
    return out;
}

inline int index_form_kernel_dimension(const GeodesicPath& path, const BoundaryCondition& cond,
                                       int nodes = 200) {
    return index_form_spectrum(path, cond, nodes).kernel;
}

} // namespace geodex::testing
