#include "geodex/geodesic.hpp"
#include "geodex/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace geodex {

namespace {

Vec geodesic_acceleration(const MetricField& m, const Vec& x, const Vec& v) {
    const int n = m.dimension();
    if (m.is_constant()) return Vec::Zero(n);
    const std::vector<Mat> gamma = christoffel(m, x);
    Vec a(n);
    for (int k = 0; k < n; ++k) a[k] = -v.dot(gamma[k] * v);
    return a;
}

} // namespace

GeodesicPath::GeodesicPath(MetricPtr metric, std::vector<PathSample> samples,
                           std::optional<BoundaryExit> exit_event)
    : metric_(std::move(metric)), samples_(std::move(samples)), exit_(std::move(exit_event)) {
    if (samples_.size() < 2) throw ValidationError("geodesic path needs at least two samples");
    speed_ = norm(*metric_, samples_.front().x, samples_.front().v);
}

int GeodesicPath::interval_of(double t) const {
    const auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                                     [](double tt, const PathSample& s) { return tt < s.t; });
    int i = static_cast<int>(it - samples_.begin()) - 1;
    i = std::clamp(i, 0, static_cast<int>(samples_.size()) - 2);
    return i;
}

Vec GeodesicPath::position(double t) const {
    const int i = interval_of(t);
    const PathSample& s0 = samples_[i];
    const PathSample& s1 = samples_[i + 1];
    const double h = s1.t - s0.t;
    return HermiteQuintic::position(s0.x, s0.v, s0.a, s1.x, s1.v, s1.a, h, (t - s0.t) / h);
}

Vec GeodesicPath::velocity(double t) const {
    const int i = interval_of(t);
    const PathSample& s0 = samples_[i];
    const PathSample& s1 = samples_[i + 1];
    const double h = s1.t - s0.t;
    return HermiteQuintic::velocity(s0.x, s0.v, s0.a, s1.x, s1.v, s1.a, h, (t - s0.t) / h);
}

Vec GeodesicPath::acceleration(double t) const {
    const int i = interval_of(t);
    const PathSample& s0 = samples_[i];
    const PathSample& s1 = samples_[i + 1];
    const double h = s1.t - s0.t;
    return HermiteQuintic::acceleration(s0.x, s0.v, s0.a, s1.x, s1.v, s1.a, h, (t - s0.t) / h);
}

GeodesicPath::Validity GeodesicPath::validate() const {
    const double g0 = inner(*metric_, samples_.front().x, samples_.front().v, samples_.front().v);
    double max_res = 0.0, max_drift = 0.0;
    for (size_t i = 0; i + 1 < samples_.size(); ++i) {
        const double tm = 0.5 * (samples_[i].t + samples_[i + 1].t);
        const Vec x = position(tm);
        const Vec v = velocity(tm);
        const Vec a = acceleration(tm);
        max_res = std::max(max_res, (a - geodesic_acceleration(*metric_, x, v)).norm());
    }
    for (const PathSample& s : samples_) {
        const double g = inner(*metric_, s.x, s.v, s.v);
        max_drift = std::max(max_drift, std::abs(g - g0) / std::max(g0, 1e-300));
    }
    return {max_res, max_drift};
}

std::string GeodesicPath::to_csv() const {
    const int n = metric_->dimension();
    std::ostringstream os;
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",x_" << i;
    for (int i = 1; i <= n; ++i) os << ",v_" << i;
    os << "\n";
    char buf[32];
    for (const PathSample& s : samples_) {
        std::snprintf(buf, sizeof(buf), "%.17g", s.t);
        os << buf;
        for (int i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", s.x[i]);
            os << "," << buf;
        }
        for (int i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", s.v[i]);
            os << "," << buf;
        }
        os << "\n";
    }
    return os.str();
}

GeodesicPath shoot(MetricPtr metric, const Vec& p, const Vec& v, double t_end,
                   const ShootOptions& opts) {
    if (!(opts.tolerance >= 1e-12 && opts.tolerance <= 1e-4))
        throw ValidationError("shoot tolerance must lie in [1e-12, 1e-4]");
    if (!(t_end > 0)) throw ValidationError("shoot needs t_end > 0");
    const ChartDomain& dom = metric->domain();
    if (!dom.contains(p, 1e-12)) throw ValidationError("shoot start point outside the chart");

    const int n = metric->dimension();
    const MetricField& m = *metric;

    const auto rhs = [&m, n](double, const Vec& z) {
        const Vec x = z.head(n);
        const Vec v_ = z.tail(n);
        Vec dz(2 * n);
        dz.head(n) = v_;
        dz.tail(n) = geodesic_acceleration(m, x, v_);
        return dz;
    };

    OdeOptions oopts;
    // Integrate below the requested tolerance: the quintic between samples
    // reconstructs the path to ~(integration error)/h^2 where steps are
    // accuracy-bound, so headroom keeps interpolated residuals near tolerance.
    oopts.abs_tol = std::max(1e-13, opts.tolerance / 64.0);
    oopts.rel_tol = oopts.abs_tol;
    oopts.h_max = t_end / opts.min_samples;

    const double stop_excess = opts.boundary == BoundaryMode::Stop ? 0.0 : opts.continue_margin;

    // Constant metric: geodesics are straight chart lines; sample directly.
    if (metric->is_constant()) {
        std::vector<PathSample> samples;
        std::optional<BoundaryExit> exit_event;
        const Vec zero_acc = Vec::Zero(n);
        const int steps = opts.min_samples;
        samples.push_back({0.0, p, v, zero_acc});
        for (int i = 1; i <= steps; ++i) {
            const double t = t_end * i / steps;
            Vec x = p + t * v;
            if (dom.kind() != DomainKind::Torus && dom.boundary_excess(x) > stop_excess) {
                double lo = samples.back().t, hi = t;
                for (int it = 0; it < 90 && hi - lo > 1e-15 * t_end; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (dom.boundary_excess(p + mid * v) > stop_excess ? hi : lo) = mid;
                }
                const double tc = hi;
                if (tc > samples.back().t + 1e-15)
                    samples.push_back({tc, p + tc * v, v, zero_acc});
                exit_event = BoundaryExit{tc, p + tc * v};
                break;
            }
            samples.push_back({t, std::move(x), v, zero_acc});
        }
        if (samples.size() < 2) {
            PathSample s1 = samples.front();
            s1.t = std::max(exit_event ? exit_event->t : t_end, 1e-12);
            s1.x = p + s1.t * v;
            samples.push_back(std::move(s1));
            if (!exit_event) exit_event = BoundaryExit{0.0, p};
        }
        return GeodesicPath(std::move(metric), std::move(samples), std::move(exit_event));
    }

    std::vector<PathSample> samples;
    std::optional<BoundaryExit> exit_event;
    bool stopped = false;

    Vec z0(2 * n);
    z0.head(n) = p;
    z0.tail(n) = v;

    struct StopIntegration {};
    const auto observer = [&](double t, const Vec& z, const Vec& dz) {
        if (stopped) return;
        PathSample s{t, z.head(n), z.tail(n), dz.tail(n)};
        if (dom.kind() != DomainKind::Torus && t > 0.0 &&
            dom.boundary_excess(s.x) > stop_excess) {
            // Refine the crossing parameter by bisection on the quintic
            // between the previous sample and this one.
            const PathSample& prev = samples.back();
            const double h = s.t - prev.t;
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                const Vec xm = HermiteQuintic::position(prev.x, prev.v, prev.a,
                                                        s.x, s.v, s.a, h, mid);
                (dom.boundary_excess(xm) > stop_excess ? hi : lo) = mid;
                if ((hi - lo) * h < 1e-13) break;
            }
            const double tc = prev.t + hi * h;
            PathSample cut;
            cut.t = tc;
            cut.x = HermiteQuintic::position(prev.x, prev.v, prev.a, s.x, s.v, s.a, h, hi);
            cut.v = HermiteQuintic::velocity(prev.x, prev.v, prev.a, s.x, s.v, s.a, h, hi);
            cut.a = geodesic_acceleration(m, cut.x, cut.v);
            if (cut.t > prev.t + 1e-15) samples.push_back(cut);
            exit_event = BoundaryExit{tc, cut.x};
            stopped = true;
            throw StopIntegration{};
        }
        samples.push_back(std::move(s));
    };

    try {
        integrate_dopri5(rhs, 0.0, t_end, z0, oopts, observer);
    } catch (const StopIntegration&) {
        // boundary exit; partial path below
    }

    if (samples.size() < 2) {
        // Exited within the very first step; keep a minimal two-sample stub so
        // the path object stays usable (degenerate, flagged by the exit event).
        PathSample s0{0.0, p, v, geodesic_acceleration(m, p, v)};
        PathSample s1 = s0;
        s1.t = exit_event ? std::max(exit_event->t, 1e-12) : t_end;
        s1.x = p + s1.t * v;
        samples = {s0, s1};
        if (!exit_event) exit_event = BoundaryExit{0.0, p};
    }

    return GeodesicPath(std::move(metric), std::move(samples), std::move(exit_event));
}

Mat parallel_transport(const GeodesicPath& path, const Mat& E0, double t) {
    const MetricField& m = path.metric();
    if (m.is_constant()) return E0;
    const int n = m.dimension();
    const int k = static_cast<int>(E0.cols());

    const auto rhs = [&](double tt, const Vec& z) {
        const Vec x = path.position(tt);
        const Vec v = path.velocity(tt);
        const std::vector<Mat> gamma = christoffel(m, x);
        Vec dz(n * k);
        for (int c = 0; c < k; ++c) {
            const Vec e = z.segment(c * n, n);
            for (int a = 0; a < n; ++a) dz[c * n + a] = -v.dot(gamma[a] * e);
        }
        return dz;
    };

    if (t <= path.t_begin()) return E0;

    Vec z0(n * k);
    for (int c = 0; c < k; ++c) z0.segment(c * n, n) = E0.col(c);

    OdeOptions opts;
    opts.abs_tol = 1e-11;
    opts.rel_tol = 1e-11;
    opts.h_max = (path.t_end() - path.t_begin()) / 64.0;

    Vec zend = z0;
    integrate_dopri5(rhs, path.t_begin(), t, z0, opts,
                     [&](double, const Vec& z, const Vec&) { zend = z; });

    Mat E(n, k);
    for (int c = 0; c < k; ++c) E.col(c) = zend.segment(c * n, n);
    return E;
}

BallIntervals event_ball_entry(const GeodesicPath& path, const Vec& center, double radius) {
    if (!(radius > 0)) throw ValidationError("ball radius must be positive");
    const MetricField& m = path.metric();
    const Mat gc = m.components(center);
    const ChartDomain& dom = m.domain();

    const auto dist = [&](double t) {
        const Vec d = dom.difference(path.position(t), center);
        return std::sqrt(d.dot(gc * d));
    };

    const auto& samples = path.samples();
    std::vector<double> ts;
    ts.reserve(samples.size());
    for (const auto& s : samples) ts.push_back(s.t);

    // refine a crossing of dist == radius in [lo, hi]
    const auto refine = [&](double lo, double hi, bool entering) {
        for (int it = 0; it < 100 && hi - lo > 1e-8; ++it) {
            const double mid = 0.5 * (lo + hi);
            const bool inside = dist(mid) < radius;
            if (inside == entering) hi = mid;
            else lo = mid;
        }
        return 0.5 * (lo + hi);
    };

    BallIntervals out;
    bool inside = dist(ts.front()) < radius;
    double open_t = inside ? ts.front() : 0.0;
    for (size_t i = 0; i + 1 < ts.size(); ++i) {
        // subdivide each sample interval to not miss short dips
        const int sub = 4;
        for (int s = 0; s < sub; ++s) {
            const double ta = ts[i] + (ts[i + 1] - ts[i]) * s / sub;
            const double tb = ts[i] + (ts[i + 1] - ts[i]) * (s + 1) / sub;
            const bool inside_b = dist(tb) < radius;
            if (inside_b != inside) {
                const double tc = refine(ta, tb, !inside);
                if (inside) {
                    out.intervals.emplace_back(open_t, tc);
                } else {
                    open_t = tc;
                }
                inside = inside_b;
            }
        }
    }
    if (inside) out.intervals.emplace_back(open_t, ts.back());

    // near-tangency: local minima of the distance grazing the radius
    for (size_t i = 1; i + 1 < ts.size(); ++i) {
        const double d0 = dist(ts[i - 1]), d1 = dist(ts[i]), d2 = dist(ts[i + 1]);
        if (d1 <= d0 && d1 <= d2 && std::abs(d1 - radius) < 1e-6 * std::max(1.0, radius))
            out.tangent_suspected = true;
    }
    for (const auto& iv : out.intervals)
        if (iv.second - iv.first <= 1e-6) out.tangent_suspected = true;

    return out;
}

} // namespace geodex
