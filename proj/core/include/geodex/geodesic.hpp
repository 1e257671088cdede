#pragma once

#include "geodex/metric.hpp"
#include "geodex/ode.hpp"

#include <optional>
#include <string>

namespace geodex {

struct PathSample {
    double t;
    Vec x;
    Vec v;
    Vec a; // -Gamma(x)(v,v), stored for quintic interpolation
};

struct BoundaryExit {
    double t;
    Vec x;
};

// How shooting treats the chart boundary.
//   Stop:     truncate at the first boundary crossing (exit event).
//   Continue: integrate past the boundary while the family's formulas allow
//             it (used by BVP residuals so Newton stays smooth); a hard
//             margin still applies.
enum class BoundaryMode { Stop, Continue };

struct ShootOptions {
    double tolerance = 1e-10;            // in [1e-12, 1e-4]
    BoundaryMode boundary = BoundaryMode::Stop;
    double continue_margin = 0.5;        // hard stop past the boundary in Continue mode
    int min_samples = 256;               // cap on sample spacing: span / min_samples
};

// One numerically integrated geodesic on the affine parameter interval
// [0, t_end]; speed (the g-norm of the velocity) is constant, so
// length = speed * t_end and energy = speed^2 * t_end / 2.  With t_end = 1
// these are the unit-interval normalizations.
class GeodesicPath {
public:
    GeodesicPath(MetricPtr metric, std::vector<PathSample> samples,
                 std::optional<BoundaryExit> exit_event);

    const MetricField& metric() const { return *metric_; }
    MetricPtr metric_ptr() const { return metric_; }

    double t_begin() const { return samples_.front().t; }
    double t_end() const { return samples_.back().t; }

    const std::vector<PathSample>& samples() const { return samples_; }

    double speed() const { return speed_; }
    double length() const { return speed_ * (t_end() - t_begin()); }
    double energy() const { return 0.5 * speed_ * speed_ * (t_end() - t_begin()); }

    const std::optional<BoundaryExit>& exit_event() const { return exit_; }

    Vec position(double t) const;
    Vec velocity(double t) const;
    Vec acceleration(double t) const;

    const Vec& start_point() const { return samples_.front().x; }
    const Vec& start_velocity() const { return samples_.front().v; }
    const Vec& end_point() const { return samples_.back().x; }
    const Vec& end_velocity() const { return samples_.back().v; }

    // Max geodesic-equation residual |x'' + Gamma(x)(x',x')| at interval
    // midpoints, and max relative speed drift over samples.
    struct Validity {
        double max_residual;
        double max_speed_drift;
    };
    Validity validate() const;

    // CSV with columns t, x_1..x_n, v_1..v_n at 17 significant digits.
    std::string to_csv() const;

private:
    int interval_of(double t) const;

    MetricPtr metric_;
    std::vector<PathSample> samples_;
    std::optional<BoundaryExit> exit_;
    double speed_;
};

// Integrate x'' = -Gamma(x)(x', x') from p with initial velocity v up to
// t_end.  Throws ValidationError for bad inputs, StiffnessError on step-size
// underflow.
GeodesicPath shoot(MetricPtr metric, const Vec& p, const Vec& v, double t_end,
                   const ShootOptions& opts = {});

// Parallel transport of the columns of E0 along the path: E' = -Gamma(x)(x', E).
// Returns the transported columns at parameter t.
Mat parallel_transport(const GeodesicPath& path, const Mat& E0, double t);

struct BallIntervals {
    std::vector<std::pair<double, double>> intervals; // parameter ranges inside
    bool tangent_suspected = false;
};

// Parameter intervals where the path is inside the g-ball around `center` of
// radius `radius`.  Distance uses the small-radius chart surrogate
// sqrt((x-c)^T g(c) (x-c)); interval endpoints refined to 1e-8.
BallIntervals event_ball_entry(const GeodesicPath& path, const Vec& center, double radius);

} // namespace geodex
