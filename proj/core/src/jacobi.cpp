#include "geodex/jacobi.hpp"
#include "geodex/errors.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace geodex {

namespace {

// (Gamma v)_{kj} = Gamma^k_{ij} v^i
Mat gamma_contract(const std::vector<Mat>& gamma, const Vec& v) {
    const int n = static_cast<int>(gamma.size());
    Mat c(n, n);
    for (int k = 0; k < n; ++k) c.row(k) = (gamma[k] * v).transpose();
    return c;
}

// System matrix of the first-order Jacobi system in coordinates:
// [Y; U]' = [[-Gv, I], [-K, -Gv]] [Y; U]
Mat jacobi_system_matrix(const MetricField& m, const Vec& x, const Vec& v) {
    const int n = m.dimension();
    const MetricJet jet = metric_jet(m, x);
    const Mat gv = gamma_contract(jet.gamma, v);
    const Mat K = curvature_operator(m, x, v, jet);
    Mat A(2 * n, 2 * n);
    A.topLeftCorner(n, n) = -gv;
    A.topRightCorner(n, n) = Mat::Identity(n, n);
    A.bottomLeftCorner(n, n) = -K;
    A.bottomRightCorner(n, n) = -gv;
    return A;
}

Mat integrate_block(const GeodesicPath& path, double t0, double t1, const Mat& M0,
                    double tolerance) {
    const MetricField& m = path.metric();
    const int d = static_cast<int>(M0.rows());

    const auto rhs = [&](double t, const Vec& z) {
        const Mat A = jacobi_system_matrix(m, path.position(t), path.velocity(t));
        Eigen::Map<const Mat> M(z.data(), d, d);
        Vec dz(d * d);
        Eigen::Map<Mat>(dz.data(), d, d) = A * M;
        return dz;
    };

    Vec z0(d * d);
    Eigen::Map<Mat>(z0.data(), d, d) = M0;

    OdeOptions opts;
    opts.abs_tol = tolerance;
    opts.rel_tol = tolerance;
    opts.h_max = t1 - t0;
    opts.h_init = t1 - t0; // spans are short; let rejection shrink if needed

    Vec zend = z0;
    if (t1 > t0)
        integrate_dopri5(rhs, t0, t1, z0, opts,
                         [&](double, const Vec& z, const Vec&) { zend = z; });
    Mat out(d, d);
    out = Eigen::Map<const Mat>(zend.data(), d, d);
    return out;
}

} // namespace

namespace {

Mat constant_metric_block(int n, double dt) {
    Mat blk = Mat::Identity(2 * n, 2 * n);
    blk.topRightCorner(n, n) = dt * Mat::Identity(n, n);
    return blk;
}

} // namespace

JacobiReport jacobi_propagate(const GeodesicPath& path, double tolerance) {
    const MetricField& m = path.metric();
    const int n = m.dimension();
    const int d = 2 * n;

    if (m.is_constant()) {
        JacobiReport report;
        for (const auto& s : path.samples()) {
            report.times.push_back(s.t);
            report.blocks.push_back(constant_metric_block(n, s.t - path.t_begin()));
        }
        return report;
    }

    const auto rhs = [&](double t, const Vec& z) {
        const Mat A = jacobi_system_matrix(m, path.position(t), path.velocity(t));
        Eigen::Map<const Mat> M(z.data(), d, d);
        Vec dz(d * d);
        Eigen::Map<Mat>(dz.data(), d, d) = A * M;
        return dz;
    };

    Vec z0(d * d);
    Eigen::Map<Mat>(z0.data(), d, d) = Mat::Identity(d, d);

    OdeOptions opts;
    opts.abs_tol = tolerance;
    opts.rel_tol = tolerance;
    opts.h_max = (path.t_end() - path.t_begin()) / 64.0;

    JacobiReport report;
    const auto& samples = path.samples();

    // Record blocks at all path sample times by integrating between them.
    report.times.reserve(samples.size());
    report.blocks.reserve(samples.size());

    Vec z = z0;
    report.times.push_back(samples[0].t);
    report.blocks.push_back(Mat::Identity(d, d));
    for (size_t next = 1; next < samples.size(); ++next) {
        const double t0 = samples[next - 1].t;
        const double t1 = samples[next].t;
        Vec zend = z;
        if (t1 > t0) {
            opts.h_max = t1 - t0;
            opts.h_init = t1 - t0;
            integrate_dopri5(rhs, t0, t1, z, opts,
                             [&](double, const Vec& zz, const Vec&) { zend = zz; });
        }
        z = zend;
        report.times.push_back(t1);
        Mat blk(d, d);
        blk = Eigen::Map<const Mat>(z.data(), d, d);
        report.blocks.push_back(std::move(blk));
    }
    return report;
}

Mat jacobi_final_block(const GeodesicPath& path, double tolerance) {
    const MetricField& m = path.metric();
    if (m.is_constant())
        return constant_metric_block(m.dimension(), path.t_end() - path.t_begin());
    const int d = 2 * m.dimension();

    const auto rhs = [&](double t, const Vec& z) {
        const Mat A = jacobi_system_matrix(m, path.position(t), path.velocity(t));
        Eigen::Map<const Mat> M(z.data(), d, d);
        Vec dz(d * d);
        Eigen::Map<Mat>(dz.data(), d, d) = A * M;
        return dz;
    };

    Vec z0(d * d);
    Eigen::Map<Mat>(z0.data(), d, d) = Mat::Identity(d, d);

    OdeOptions opts;
    opts.abs_tol = tolerance;
    opts.rel_tol = tolerance;
    const double span = path.t_end() - path.t_begin();
    opts.h_max = span / 48.0;
    opts.h_init = opts.h_max;

    Vec zend = z0;
    integrate_dopri5(rhs, path.t_begin(), path.t_end(), z0, opts,
                     [&](double, const Vec& z, const Vec&) { zend = z; });
    Mat out(d, d);
    out = Eigen::Map<const Mat>(zend.data(), d, d);
    return out;
}

Mat jacobi_block_at(const GeodesicPath& path, const JacobiReport& report, double t) {
    if (path.metric().is_constant())
        return constant_metric_block(path.metric().dimension(), t - path.t_begin());
    const auto it = std::upper_bound(report.times.begin(), report.times.end(), t);
    int i = static_cast<int>(it - report.times.begin()) - 1;
    i = std::clamp(i, 0, static_cast<int>(report.times.size()) - 1);
    if (std::abs(report.times[i] - t) < 1e-15) return report.blocks[i];
    return integrate_block(path, report.times[i], t, report.blocks[i], 1e-11);
}

namespace {

// Transverse frames along the path, continuous in t: the frame at the
// checkpoint below t re-orthonormalized against the velocity at t.
class TransverseFrames {
public:
    TransverseFrames(const GeodesicPath& path) : path_(path), m_(path.metric()) {
        const auto& samples = path.samples();
        const Vec& v0 = samples.front().v;
        frames_.push_back(frame_complement(m_, samples.front().x, v0, v0));
        times_.push_back(samples.front().t);
        for (size_t i = 1; i < samples.size(); ++i) {
            frames_.push_back(reorthonormalize(frames_.back(), samples[i].x, samples[i].v));
            times_.push_back(samples[i].t);
        }
    }

    std::vector<Vec> at(double t) const {
        const auto it = std::upper_bound(times_.begin(), times_.end(), t);
        int i = static_cast<int>(it - times_.begin()) - 1;
        i = std::clamp(i, 0, static_cast<int>(times_.size()) - 1);
        if (std::abs(times_[i] - t) < 1e-15) return frames_[i];
        return reorthonormalize(frames_[i], path_.position(t), path_.velocity(t));
    }

    const std::vector<Vec>& at_node(size_t i) const { return frames_[i]; }

private:
    std::vector<Vec> reorthonormalize(const std::vector<Vec>& prev, const Vec& x,
                                      const Vec& v) const {
        const Mat g = m_.components(x);
        const auto gdot = [&](const Vec& a, const Vec& b) { return a.dot(g * b); };
        const Vec vhat = v / std::sqrt(gdot(v, v));
        std::vector<Vec> out;
        out.reserve(prev.size());
        for (const Vec& f : prev) {
            Vec w = f - gdot(f, vhat) * vhat;
            for (const Vec& t : out) w -= gdot(w, t) * t;
            const double len = std::sqrt(gdot(w, w));
            if (len < 1e-8) throw NumericError("transverse frame became degenerate");
            out.push_back(w / len);
        }
        return out;
    }

    const GeodesicPath& path_;
    const MetricField& m_;
    std::vector<std::vector<Vec>> frames_;
    std::vector<double> times_;
};

} // namespace

std::vector<ConjugatePoint> conjugate_points(const GeodesicPath& path,
                                             const JacobiReport& report) {
    const MetricField& m = path.metric();
    const int n = m.dimension();
    const Vec& v0 = path.start_velocity();
    const auto F0 = frame_complement(m, path.start_point(), v0, v0);
    Mat init = Mat::Zero(2 * n, n - 1);
    for (int b = 0; b < n - 1; ++b) init.col(b).tail(n) = F0[b];
    auto out = zeros_of_transverse_family(path, report, init, true, 1e-12);
    for (const auto& cp : out)
        if (cp.t < path.t_begin() + 1e-8)
            throw NumericError("conjugate point at the start of the geodesic (degenerate start)");
    return out;
}

std::vector<ConjugatePoint> zeros_of_transverse_family(const GeodesicPath& path,
                                                       const JacobiReport& report,
                                                       const Mat& initial_data,
                                                       bool include_endpoint,
                                                       double skip_start) {
    const MetricField& m = path.metric();
    const int n = m.dimension();

    TransverseFrames frames(path);

    // A(t)_{ab} = g(Y_b(t), G_a(t)) for the propagated family.
    const auto transverse_matrix = [&](double t, const Mat& block) {
        const Mat Y = (block * initial_data).topRows(n);
        const Mat g = m.components(path.position(t));
        const std::vector<Vec> G = frames.at(t);
        Mat A(n - 1, n - 1);
        for (int a = 0; a < n - 1; ++a)
            for (int b = 0; b < n - 1; ++b) A(a, b) = G[a].dot(g * Y.col(b));
        return A;
    };

    const size_t N = report.times.size();
    std::vector<double> dets(N), smin(N), smax(N);
    for (size_t i = 0; i < N; ++i) {
        const Mat A = transverse_matrix(report.times[i], report.blocks[i]);
        dets[i] = A.determinant();
        Eigen::JacobiSVD<Mat> svd(A);
        smin[i] = svd.singularValues().minCoeff();
        smax[i] = svd.singularValues().maxCoeff();
    }
    double sigma_ref = 0.0;
    for (size_t i = 0; i < N; ++i) sigma_ref = std::max(sigma_ref, smax[i]);
    if (sigma_ref <= 0.0) throw NumericError("transverse Jacobi family vanished identically");
    const double null_tol = 1e-6 * sigma_ref;

    const auto det_at = [&](double t) {
        return transverse_matrix(t, jacobi_block_at(path, report, t)).determinant();
    };
    const auto smin_at = [&](double t) {
        Eigen::JacobiSVD<Mat> svd(transverse_matrix(t, jacobi_block_at(path, report, t)));
        return svd.singularValues().minCoeff();
    };

    std::vector<double> roots;

    // Sign-change brackets (odd multiplicity).  Skip the start where the
    // block vanishes by construction.
    for (size_t i = 1; i + 1 < N; ++i) {
        if (dets[i] == 0.0) { roots.push_back(report.times[i]); continue; }
        if (dets[i] * dets[i + 1] < 0.0) {
            double lo = report.times[i], hi = report.times[i + 1];
            double flo = dets[i];
            while (hi - lo > 1e-9) {
                const double mid = 0.5 * (lo + hi);
                const double fm = det_at(mid);
                if (fm == 0.0) { lo = hi = mid; break; }
                if (flo * fm < 0.0) hi = mid;
                else { lo = mid; flo = fm; }
            }
            roots.push_back(0.5 * (lo + hi));
        }
    }

    // Even multiplicity: minima of the smallest singular value dipping to 0.
    // The trigger is generous (sampling only resolves the dip to O(step));
    // the refined minimum is then tested against the real null threshold.
    for (size_t i = 1; i + 1 < N; ++i) {
        if (smin[i] <= smin[i - 1] && smin[i] <= smin[i + 1] && smin[i] < 5e-2 * sigma_ref) {
            double lo = report.times[i - 1], hi = report.times[i + 1];
            for (int it = 0; it < 100 && hi - lo > 1e-9; ++it) {
                const double m1 = lo + (hi - lo) / 3.0;
                const double m2 = hi - (hi - lo) / 3.0;
                if (smin_at(m1) < smin_at(m2)) hi = m2;
                else lo = m1;
            }
            const double t_star = 0.5 * (lo + hi);
            if (smin_at(t_star) < null_tol) roots.push_back(t_star);
        }
    }

    // Endpoint singularity counts as a zero at t_end.
    if (include_endpoint && smin.back() < null_tol) roots.push_back(report.times.back());

    std::sort(roots.begin(), roots.end());
    std::vector<ConjugatePoint> out;
    for (double r : roots) {
        if (r < path.t_begin() + skip_start) continue;
        if (!out.empty() && std::abs(out.back().t - r) < 1e-7) continue;
        Eigen::JacobiSVD<Mat> svd(transverse_matrix(r, jacobi_block_at(path, report, r)));
        int mult = 0;
        for (int k = 0; k < svd.singularValues().size(); ++k)
            if (svd.singularValues()[k] < null_tol) ++mult;
        mult = std::clamp(mult, 1, n - 1);
        out.push_back({r, mult});
    }
    return out;
}

EndpointSensitivity endpoint_sensitivity(const GeodesicPath& path, const Mat& block_at_t,
                                         double t) {
    const MetricField& m = path.metric();
    const int n = m.dimension();

    const Vec x0 = path.start_point();
    const Vec v0 = path.start_velocity();
    const Vec xt = path.position(t);
    const Vec vt = path.velocity(t);

    const Mat Cin = gamma_contract(christoffel(m, x0), v0);
    const Mat Cout = gamma_contract(christoffel(m, xt), vt);

    Mat Tin = Mat::Identity(2 * n, 2 * n);
    Tin.bottomLeftCorner(n, n) = Cin;
    Mat Tout = Mat::Identity(2 * n, 2 * n);
    Tout.bottomLeftCorner(n, n) = -Cout;

    const Mat S = Tout * block_at_t * Tin;
    EndpointSensitivity es;
    es.dx_dx0 = S.topLeftCorner(n, n);
    es.dx_dv0 = S.topRightCorner(n, n);
    es.dv_dx0 = S.bottomLeftCorner(n, n);
    es.dv_dv0 = S.bottomRightCorner(n, n);
    return es;
}

} // namespace geodex
