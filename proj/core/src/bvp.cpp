#include "geodex/bvp.hpp"
#include "geodex/errors.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace geodex {

// --- BoundaryCondition -------------------------------------------------------

BoundaryCondition BoundaryCondition::point_pair(Vec p, Vec q) {
    BoundaryCondition c;
    c.kind_ = ConditionKind::PointPair;
    c.p_ = std::move(p);
    c.q_ = std::move(q);
    return c;
}

BoundaryCondition BoundaryCondition::boundary_orthogonal() {
    BoundaryCondition c;
    c.kind_ = ConditionKind::BoundaryOrthogonal;
    return c;
}

BoundaryCondition BoundaryCondition::hypersurface_orthogonal(std::shared_ptr<const LevelSet> N) {
    if (!N) throw ValidationError("hypersurface condition needs a level set");
    BoundaryCondition c;
    c.kind_ = ConditionKind::HypersurfaceOrthogonal;
    c.level_set_ = std::move(N);
    return c;
}

bool BoundaryCondition::is_loop() const {
    return kind_ == ConditionKind::PointPair && p_.size() == q_.size() && (p_ - q_).norm() == 0.0;
}

const LevelSet& BoundaryCondition::constraint(int dimension) const {
    if (kind_ == ConditionKind::HypersurfaceOrthogonal) return *level_set_;
    if (kind_ == ConditionKind::BoundaryOrthogonal) {
        if (!disc_boundary_)
            disc_boundary_ = std::make_shared<SphereLevelSet>(Vec::Zero(dimension), 1.0);
        return *disc_boundary_;
    }
    throw ValidationError("point-pair condition has no constraint hypersurface");
}

void BoundaryCondition::validate(const MetricField& metric) const {
    const ChartDomain& dom = metric.domain();
    switch (kind_) {
        case ConditionKind::PointPair:
            if (p_.size() != dom.dimension() || q_.size() != dom.dimension())
                throw ValidationError("endpoint dimension does not match the chart");
            if (!dom.contains(p_, 1e-12) || !dom.contains(q_, 1e-12))
                throw ValidationError("endpoints must lie in the chart domain");
            break;
        case ConditionKind::BoundaryOrthogonal:
            if (dom.kind() != DomainKind::UnitDisc)
                throw ValidationError("boundary-orthogonal condition requires a unit-disc chart");
            break;
        case ConditionKind::HypersurfaceOrthogonal: {
            // gradient must not vanish on sampled constraint points
            std::mt19937 rng(123u);
            std::normal_distribution<double> gauss;
            for (int s = 0; s < 32; ++s) {
                Vec y(dom.dimension());
                for (int i = 0; i < y.size(); ++i) y[i] = gauss(rng);
                const Vec x = level_set_->project(0.3 * y + 0.5 * Vec::Ones(y.size()));
                if (level_set_->gradient(x).norm() < 1e-10)
                    throw ValidationError("level-set gradient vanishes on the constraint");
            }
            break;
        }
    }
}

std::string BoundaryCondition::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case ConditionKind::PointPair:
            os << (is_loop() ? "loop at [" : "point-pair [") << p_.transpose() << "]";
            if (!is_loop()) os << " -> [" << q_.transpose() << "]";
            break;
        case ConditionKind::BoundaryOrthogonal:
            os << "boundary-orthogonal";
            break;
        case ConditionKind::HypersurfaceOrthogonal:
            os << "hypersurface-orthogonal(" << level_set_->tag() << ")";
            break;
    }
    return os.str();
}

// --- Low-discrepancy sampling -------------------------------------------------

namespace {

double halton(long index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

// Deterministic low-discrepancy point in [0,1)^dim for a given start index;
// the seed offsets the sequence.
Vec halton_point(long index, int dim, unsigned seed) {
    Vec u(dim);
    const long shifted = index + 1 + 409 * static_cast<long>(seed % 1000003u);
    for (int d = 0; d < dim; ++d) u[d] = halton(shifted, kPrimes[d % 10]);
    return u;
}

// Unit vector from n-1 spherical angles over an orthonormal frame.
Vec spherical_direction(const std::vector<Vec>& frame, const Vec& angles) {
    const int n = static_cast<int>(frame.size());
    Vec d = Vec::Zero(frame[0].size());
    double sin_prod = 1.0;
    for (int i = 0; i < n; ++i) {
        const double c = (i < n - 1) ? std::cos(angles[i]) : 1.0;
        d += sin_prod * c * frame[i];
        if (i < n - 1) sin_prod *= std::sin(angles[i]);
    }
    return d;
}

struct InitialState {
    Vec x0;
    Vec v0;
};

// Unknown layouts:
//   PointPair: (n-1 angles, L)
//   orthogonal kinds: (n-1 tangent offsets around the anchor, L)
class Parametrization {
public:
    Parametrization(MetricPtr metric, const BoundaryCondition& cond, Vec anchor, double normal_sign)
        : metric_(std::move(metric)), cond_(cond), anchor_(std::move(anchor)),
          normal_sign_(normal_sign) {
        const int n = metric_->dimension();
        if (cond_.kind() == ConditionKind::PointPair) {
            frame_ = orthonormal_frame(*metric_, cond_.p());
        } else {
            const LevelSet& ls = cond_.constraint(n);
            anchor_ = ls.project(anchor_);
            const Vec nu = outward_unit_normal(*metric_, ls, anchor_);
            tangent_frame_ = frame_complement(*metric_, anchor_, nu, ls.gradient(anchor_));
        }
    }

    int unknown_count() const { return metric_->dimension(); }

    InitialState initial_state(const Vec& u) const {
        const int n = metric_->dimension();
        const double L = u[n - 1];
        InitialState s;
        if (cond_.kind() == ConditionKind::PointPair) {
            s.x0 = cond_.p();
            s.v0 = L * spherical_direction(frame_, u.head(n - 1));
        } else {
            const LevelSet& ls = cond_.constraint(n);
            Vec y = anchor_;
            for (int a = 0; a < n - 1; ++a) y += u[a] * tangent_frame_[a];
            s.x0 = ls.project(y);
            const Vec nu = outward_unit_normal(*metric_, ls, s.x0);
            s.v0 = -normal_sign_ * L * nu;
        }
        return s;
    }

    // d(x0, v0)/du by central differences (cheap algebra, no ODE).
    Mat initial_state_jacobian(const Vec& u) const {
        const int n = metric_->dimension();
        Mat B(2 * n, n);
        const double h = 1e-7;
        for (int k = 0; k < n; ++k) {
            Vec up = u, um = u;
            up[k] += h;
            um[k] -= h;
            const InitialState sp = initial_state(up);
            const InitialState sm = initial_state(um);
            B.col(k).head(n) = (sp.x0 - sm.x0) / (2 * h);
            B.col(k).tail(n) = (sp.v0 - sm.v0) / (2 * h);
        }
        return B;
    }

private:
    MetricPtr metric_;
    const BoundaryCondition& cond_;
    Vec anchor_;
    double normal_sign_;
    std::vector<Vec> frame_;         // PointPair
    std::vector<Vec> tangent_frame_; // orthogonal kinds
};

// Endpoint residual map r(x1, v1); dimension n.
Vec endpoint_residual(const MetricField& m, const BoundaryCondition& cond, const Vec& x1,
                      const Vec& v1) {
    const int n = m.dimension();
    if (cond.kind() == ConditionKind::PointPair) {
        return m.domain().difference(x1, cond.q());
    }
    const LevelSet& ls = cond.constraint(n);
    Vec r(n);
    r[0] = ls.value(x1);
    const Vec nu = outward_unit_normal(m, ls, x1);
    const auto frame = frame_complement(m, x1, nu, ls.gradient(x1));
    const double speed = std::max(norm(m, x1, v1), 1e-12);
    for (int a = 0; a < n - 1; ++a) r[a + 1] = inner(m, x1, v1, frame[a]) / speed;
    return r;
}

Mat endpoint_residual_jacobian(const MetricField& m, const BoundaryCondition& cond, const Vec& x1,
                               const Vec& v1) {
    const int n = m.dimension();
    Mat E(n, 2 * n);
    const double h = 1e-7 * std::max(1.0, m.domain().scale());
    for (int k = 0; k < n; ++k) {
        Vec xp = x1, xm = x1;
        xp[k] += h;
        xm[k] -= h;
        E.col(k) = (endpoint_residual(m, cond, xp, v1) - endpoint_residual(m, cond, xm, v1)) /
                   (2 * h);
        Vec vp = v1, vm = v1;
        vp[k] += h;
        vm[k] -= h;
        E.col(n + k) = (endpoint_residual(m, cond, x1, vp) - endpoint_residual(m, cond, x1, vm)) /
                       (2 * h);
    }
    return E;
}

struct ShotEval {
    Vec r;
    bool exited = false;
    std::optional<GeodesicPath> path;
    double norm() const { return exited ? std::numeric_limits<double>::infinity() : r.norm(); }
};

ShotEval evaluate_shot(MetricPtr metric, const BoundaryCondition& cond, const Parametrization& par,
                       const Vec& u, const ShootOptions& sopts) {
    ShotEval ev;
    const InitialState s = par.initial_state(u);
    GeodesicPath path = shoot(metric, s.x0, s.v0, 1.0, sopts);
    if (path.exit_event().has_value()) {
        ev.exited = true;
        ev.r = Vec::Constant(metric->dimension(), std::numeric_limits<double>::infinity());
        ev.path = std::move(path);
        return ev;
    }
    ev.r = endpoint_residual(*metric, cond, path.end_point(), path.end_velocity());
    ev.path = std::move(path);
    return ev;
}

struct NewtonResult {
    bool converged = false;
    Vec u;
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool ever_exited = false;
};

NewtonResult newton_solve(MetricPtr metric, const BoundaryCondition& cond,
                          const Parametrization& par, Vec u, double cap,
                          const SolveOptions& opts) {
    const int n = metric->dimension();
    ShootOptions sopts;
    sopts.tolerance = opts.shoot_tolerance;
    sopts.boundary = BoundaryMode::Continue;
    sopts.min_samples = opts.newton_min_samples;

    const double L_min = 1e-6 * metric->domain().scale();
    const double L_max = 1.5 * cap;

    NewtonResult res;
    ShotEval ev = evaluate_shot(metric, cond, par, u, sopts);
    if (ev.exited) {
        res.ever_exited = true;
        return res;
    }

    for (int iter = 0; iter < opts.max_newton_iterations; ++iter) {
        ++res.iterations;
        if (ev.r.norm() <= opts.residual_tol) {
            res.converged = true;
            res.u = u;
            res.residual = ev.r.norm();
            return res;
        }

        const GeodesicPath& path = *ev.path;
        const Mat block = jacobi_final_block(path, 1e-8);
        const EndpointSensitivity sens = endpoint_sensitivity(path, block, path.t_end());
        Mat S(2 * n, 2 * n);
        S.topLeftCorner(n, n) = sens.dx_dx0;
        S.topRightCorner(n, n) = sens.dx_dv0;
        S.bottomLeftCorner(n, n) = sens.dv_dx0;
        S.bottomRightCorner(n, n) = sens.dv_dv0;

        const Mat E = endpoint_residual_jacobian(*metric, cond, path.end_point(),
                                                 path.end_velocity());
        const Mat B = par.initial_state_jacobian(u);
        const Mat J = E * S * B;

        const Vec delta = Eigen::CompleteOrthogonalDecomposition<Mat>(J).solve(-ev.r);
        if (!delta.allFinite() || delta.norm() < 1e-15) break;

        bool accepted = false;
        double alpha = 1.0;
        for (int bt = 0; bt < 14; ++bt, alpha *= 0.5) {
            Vec trial = u + alpha * delta;
            trial[n - 1] = std::clamp(trial[n - 1], L_min, L_max);
            ShotEval trial_ev = evaluate_shot(metric, cond, par, trial, sopts);
            if (trial_ev.exited) {
                res.ever_exited = true;
                continue;
            }
            if (trial_ev.r.norm() <= (1.0 - 1e-4 * alpha) * ev.r.norm()) {
                u = trial;
                ev = std::move(trial_ev);
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    if (ev.r.norm() <= opts.residual_tol) {
        res.converged = true;
        res.u = u;
        res.residual = ev.r.norm();
    }
    return res;
}

// Lowest metric eigenvalue over probes, with a small safety margin.
double chart_min_eigenvalue(const MetricField& m) {
    return 0.99 * min_metric_eigenvalue(m, 2000, 424242u);
}

double default_admissibility_floor(const MetricField& m, const BoundaryCondition& cond) {
    switch (cond.kind()) {
        case ConditionKind::PointPair: {
            if (cond.is_loop()) return 0.5 * m.inj_lower_bound();
            const double dchart = m.domain().difference(cond.p(), cond.q()).norm();
            return 0.5 * std::sqrt(chart_min_eigenvalue(m)) * dchart;
        }
        case ConditionKind::BoundaryOrthogonal:
        case ConditionKind::HypersurfaceOrthogonal:
            // conservative stand-in for twice the normal injectivity radius
            return 0.05 * m.domain().scale() * std::sqrt(chart_min_eigenvalue(m));
    }
    return 0.0;
}

bool path_stays_in_domain(const GeodesicPath& path, double slack = 1e-8) {
    const ChartDomain& dom = path.metric().domain();
    if (dom.kind() == DomainKind::Torus) return true;
    for (const auto& s : path.samples())
        if (dom.boundary_excess(s.x) > slack) return false;
    return true;
}

} // namespace

// --- Equivalence keys ---------------------------------------------------------

namespace {

uint64_t fnv1a(const int64_t* data, size_t count) {
    uint64_t h = 1469598103934665603ull;
    const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data);
    for (size_t i = 0; i < count * sizeof(int64_t); ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
    return h;
}

int64_t round_coord(const ChartDomain& dom, double x, int axis) {
    if (dom.kind() == DomainKind::Torus) {
        const double period = dom.periods()[axis];
        double w = std::fmod(x, period);
        if (w < 0) w += period;
        const int64_t scale = std::llround(period * 1e5);
        int64_t q = std::llround(w * 1e5);
        if (scale > 0) q %= scale;
        return q;
    }
    return std::llround(x * 1e5);
}

} // namespace

std::string equivalence_key_of_points(const ChartDomain& domain, const std::vector<Vec>& points) {
    const int n = domain.dimension();
    const size_t count = points.size();
    std::vector<int64_t> fwd(count * n), rev(count * n);
    for (size_t i = 0; i < count; ++i)
        for (int k = 0; k < n; ++k) {
            const int64_t q = round_coord(domain, points[i][k], k);
            fwd[i * n + k] = q;
            rev[(count - 1 - i) * n + k] = q;
        }
    const std::vector<int64_t>& canon = std::lexicographical_compare(
                                            rev.begin(), rev.end(), fwd.begin(), fwd.end())
                                            ? rev
                                            : fwd;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(canon.data(), canon.size())));
    return buf;
}

std::string equivalence_key(const GeodesicPath& path) {
    constexpr int kPoints = 64;
    std::vector<Vec> pts;
    pts.reserve(kPoints);
    // constant speed: arc-length-uniform == parameter-uniform
    for (int i = 0; i < kPoints; ++i) {
        const double t = path.t_begin() +
                         (path.t_end() - path.t_begin()) * i / double(kPoints - 1);
        pts.push_back(path.position(t));
    }
    return equivalence_key_of_points(path.metric().domain(), pts);
}

// --- Residual (public surface) --------------------------------------------------

ResidualEval bvp_residual(MetricPtr metric, const BoundaryCondition& condition, const Vec& unknowns,
                          const Vec& anchor, double normal_sign) {
    condition.validate(*metric);
    Vec anch = anchor;
    if (anch.size() == 0 && condition.kind() != ConditionKind::PointPair) {
        anch = Vec::Zero(metric->dimension());
        anch[0] = 1.0;
    }
    const Parametrization par(metric, condition, anch, normal_sign);
    ShootOptions sopts;
    sopts.boundary = BoundaryMode::Continue;
    const ShotEval ev = evaluate_shot(metric, condition, par, unknowns, sopts);
    return {ev.r, ev.exited, ev.path};
}

// --- Kernel dimension and classification ---------------------------------------

namespace {

int null_dimension(const Mat& A, double rel_tol = 1e-6) {
    Eigen::JacobiSVD<Mat> svd(A);
    const auto& s = svd.singularValues();
    const double ref = s.size() ? s.maxCoeff() : 0.0;
    if (ref <= 0.0) return static_cast<int>(std::min(A.rows(), A.cols()));
    int dim = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s[i] < rel_tol * ref) ++dim;
    return dim;
}

// Rows of the P-Jacobi boundary map for both orthogonal endpoint conditions:
// tangency of Y(l) and the tangential part of DY(l) - L sigma_l W_l Y(l).
Mat orthogonal_kernel_matrix(const BvpSolution& sol, const BoundaryCondition& cond,
                             const JacobiReport& report) {
    const GeodesicPath& path = sol.path;
    const MetricField& m = path.metric();
    const int n = m.dimension();
    const LevelSet& ls = cond.constraint(n);
    const double L = path.speed();

    Mat rows(2 * n, 2 * n);
    int row = 0;

    for (int l = 0; l < 2; ++l) {
        const double t = l == 0 ? path.t_begin() : path.t_end();
        const Vec x = l == 0 ? path.start_point() : path.end_point();
        const Vec v = l == 0 ? path.start_velocity() : path.end_velocity();
        const Mat g = m.components(x);
        const Vec nu = outward_unit_normal(m, ls, x);
        const double sigma = inner(m, x, v, nu) >= 0 ? 1.0 : -1.0;
        const Mat W = weingarten(m, ls, x);
        const auto frame = frame_complement(m, x, nu, ls.gradient(x));

        const Mat block = l == 0 ? Mat::Identity(2 * n, 2 * n) : report.final_block();
        const Mat Ymap = block.topRows(n);    // (Y(0),U(0)) -> Y(t)
        const Mat Umap = block.bottomRows(n); // (Y(0),U(0)) -> U(t)

        // tangency: g(Y(t), nu) = 0
        rows.row(row++) = (g * nu).transpose() * Ymap;
        // tangential part of U(t) - L sigma W Y(t)
        for (int a = 0; a < n - 1; ++a)
            rows.row(row++) = (g * frame[a]).transpose() * (Umap - L * sigma * W * Ymap);
        (void)t;
    }

    // scale-balance the rows before the SVD null test
    for (int r = 0; r < rows.rows(); ++r) {
        const double s = rows.row(r).norm();
        if (s > 0) rows.row(r) /= s;
    }
    return rows;
}

} // namespace

int kernel_dimension(const BvpSolution& solution, const BoundaryCondition& condition) {
    const GeodesicPath& path = solution.path;
    const int n = path.metric().dimension();
    const JacobiReport report = jacobi_propagate(path);

    if (condition.kind() == ConditionKind::PointPair) {
        // Y(0) = 0, Y(1) = 0: null space of the upper-right block.
        const Mat D = report.final_block().topRightCorner(n, n);
        return null_dimension(D);
    }
    return null_dimension(orthogonal_kernel_matrix(solution, condition, report));
}

namespace {

// Morse-style index: conjugate times for point pairs, focal times for the
// orthogonal conditions, counted with multiplicity strictly inside (0,1).
// The continuous counting rule for orthogonal conditions is a heuristic; the
// discretized index form is the authority for kernel dimensions.
int index_estimate(const BvpSolution& sol, const BoundaryCondition& cond,
                   const JacobiReport& report, const std::vector<ConjugatePoint>& conj) {
    const GeodesicPath& path = sol.path;
    const MetricField& m = path.metric();
    const int n = m.dimension();

    if (cond.kind() == ConditionKind::PointPair) {
        int idx = 0;
        for (const auto& cp : conj)
            if (cp.t < path.t_end() - 1e-9) idx += cp.multiplicity;
        return idx;
    }

    const LevelSet& ls = cond.constraint(n);
    const Vec x0 = path.start_point();
    const Vec v0 = path.start_velocity();
    const double L = path.speed();
    const Vec nu = outward_unit_normal(m, ls, x0);
    const double sigma = inner(m, x0, v0, nu) >= 0 ? 1.0 : -1.0;
    const Mat W = weingarten(m, ls, x0);
    const auto frame = frame_complement(m, x0, nu, ls.gradient(x0));

    Mat init(2 * n, n - 1);
    for (int a = 0; a < n - 1; ++a) {
        const Vec Ta = frame[a];
        Vec U = L * sigma * (W * Ta);
        U -= inner(m, x0, U, nu) * nu; // tangential part only
        init.col(a).head(n) = Ta;
        init.col(a).tail(n) = U;
    }
    int idx = 0;
    for (const auto& cp : zeros_of_transverse_family(path, report, init, false, 1e-6))
        if (cp.t < path.t_end() - 1e-9) idx += cp.multiplicity;
    return idx;
}

void classify_solution(BvpSolution& sol, const BoundaryCondition& cond) {
    const JacobiReport report = jacobi_propagate(sol.path);
    const int n = sol.path.metric().dimension();

    if (cond.kind() == ConditionKind::PointPair) {
        const Mat D = report.final_block().topRightCorner(n, n);
        sol.kernel_dimension = null_dimension(D);
    } else {
        sol.kernel_dimension = null_dimension(orthogonal_kernel_matrix(sol, cond, report));
    }
    sol.classification =
        sol.kernel_dimension == 0 ? SolutionClass::Nondegenerate : SolutionClass::Degenerate;
    sol.conjugate_times = conjugate_points(sol.path, report);
    sol.index = index_estimate(sol, cond, report, sol.conjugate_times);
    sol.equivalence_key = equivalence_key(sol.path);
}

} // namespace

BvpSolution make_solution(const BoundaryCondition& condition, GeodesicPath path) {
    BvpSolution sol{std::move(path)};
    const MetricField& m = sol.path.metric();
    condition.validate(m);
    sol.residual_norm = endpoint_residual(m, condition, sol.path.end_point(),
                                          sol.path.end_velocity())
                            .norm();
    classify_solution(sol, condition);
    return sol;
}

// --- solve_family ---------------------------------------------------------------

SolutionFamily solve_family(MetricPtr metric, const BoundaryCondition& condition, double L,
                            const SolveOptions& opts) {
    if (!(L > 0)) throw ValidationError("length cap must be positive");
    if (opts.multistart < 1) throw ValidationError("multistart count must be >= 1");
    condition.validate(*metric);

    const int n = metric->dimension();
    const double floor_a = opts.admissibility_floor >= 0
                               ? opts.admissibility_floor
                               : default_admissibility_floor(*metric, condition);

    struct Candidate {
        bool ok = false;
        Vec u;
        Vec anchor;
        double normal_sign = 1.0;
        double residual = 0.0;
        int iterations = 0;
        bool exited = false;
    };

    std::vector<Candidate> slots(opts.multistart);

    const auto run_start = [&](int i) {
        Candidate& c = slots[i];
        const Vec h = halton_point(i, 2 * n, opts.seed);
        Vec u(n);
        double normal_sign = 1.0;
        Vec anchor;
        if (condition.kind() == ConditionKind::PointPair) {
            for (int a = 0; a < n - 2; ++a) u[a] = h[a] * std::numbers::pi;
            u[n - 2] = h[n - 2] * 2.0 * std::numbers::pi;
        } else {
            // anchor from low-discrepancy Gaussian-ish directions, offsets 0
            anchor = Vec(n);
            for (int a = 0; a < n; ++a) anchor[a] = h[n + a] - 0.5;
            if (anchor.norm() < 1e-6) anchor[0] = 1.0;
            anchor = condition.constraint(n).project(anchor);
            u.head(n - 1).setZero();
            if (condition.kind() == ConditionKind::HypersurfaceOrthogonal)
                normal_sign = (i % 2 == 0) ? 1.0 : -1.0;
        }
        u[n - 1] = floor_a + h[n - 1] * (1.05 * L - floor_a);

        try {
            const Parametrization par(metric, condition, anchor, normal_sign);
            const NewtonResult res = newton_solve(metric, condition, par, u, L, opts);
            c.iterations = res.iterations;
            c.exited = res.ever_exited;
            if (res.converged) {
                c.ok = true;
                c.u = res.u;
                c.anchor = anchor;
                c.normal_sign = normal_sign;
                c.residual = res.residual;
            }
        } catch (const NumericError&) {
            // rejected start
        }
    };

    if (opts.workers <= 1) {
        for (int i = 0; i < opts.multistart; ++i) run_start(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int w = 0; w < opts.workers; ++w)
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < opts.multistart; i = next.fetch_add(1))
                    run_start(i);
            });
        for (auto& t : pool) t.join();
    }

    SolutionFamily family{condition, L, floor_a, {}, {}};
    family.log.starts = opts.multistart;

    std::map<std::string, size_t> seen;
    for (int i = 0; i < opts.multistart; ++i) {
        const Candidate& c = slots[i];
        family.log.newton_iterations += c.iterations;
        if (c.exited) ++family.log.rejected_exit;
        if (!c.ok) continue;
        ++family.log.converged;

        // full-quality re-shoot of the converged unknowns
        const Parametrization par(metric, condition, c.anchor, c.normal_sign);
        const InitialState s0 = par.initial_state(c.u);
        ShootOptions fine;
        fine.tolerance = 1e-10;
        fine.boundary = BoundaryMode::Continue;
        GeodesicPath path = shoot(metric, s0.x0, s0.v0, 1.0, fine);
        if (path.exit_event().has_value()) {
            ++family.log.rejected_exit;
            continue;
        }
        const double res_norm =
            endpoint_residual(*metric, condition, path.end_point(), path.end_velocity()).norm();
        if (!(res_norm <= opts.residual_tol)) {
            ++family.log.rejected_residual;
            continue;
        }
        const double len = path.length();
        if (len < floor_a || len > L * (1 + 1e-9)) {
            ++family.log.rejected_floor;
            continue;
        }
        if (!path_stays_in_domain(path)) {
            ++family.log.rejected_invalid;
            continue;
        }

        const std::string key = equivalence_key(path);
        const auto it = seen.find(key);
        if (it != seen.end()) {
            ++family.log.duplicates;
            if (res_norm < family.solutions[it->second].residual_norm) {
                BvpSolution sol{std::move(path)};
                sol.residual_norm = res_norm;
                classify_solution(sol, condition);
                family.solutions[it->second] = std::move(sol);
            }
            continue;
        }
        BvpSolution sol{std::move(path)};
        sol.residual_norm = res_norm;
        classify_solution(sol, condition);
        seen.emplace(key, family.solutions.size());
        family.solutions.push_back(std::move(sol));
    }

    std::sort(family.solutions.begin(), family.solutions.end(),
              [](const BvpSolution& a, const BvpSolution& b) {
                  if (a.length() != b.length()) return a.length() < b.length();
                  return a.equivalence_key < b.equivalence_key;
              });
    return family;
}

// --- Orthogonal-tangent chords ---------------------------------------------------

std::vector<OrthogonalTangentChord> find_orthogonal_tangent_chords(MetricPtr metric, double L,
                                                                   int multistart, unsigned seed) {
    if (metric->domain().kind() != DomainKind::UnitDisc)
        throw ValidationError("orthogonal-tangent chords require a unit-disc chart");
    const int n = metric->dimension();
    const SphereLevelSet sphere(Vec::Zero(n), 1.0);
    const BoundaryCondition probe_cond = BoundaryCondition::boundary_orthogonal();

    // unknowns: n-1 tangent offsets for the start point, n-2 direction angles
    // in the boundary tangent space, length
    const int dim_u = 2 * n - 2;

    const auto eval = [&](const Vec& anchor, const Vec& u) -> ShotEval {
        ShotEval ev;
        Vec y = anchor;
        const Vec nu_anchor = outward_unit_normal(*metric, sphere, anchor);
        const auto tau = frame_complement(*metric, anchor, nu_anchor, sphere.gradient(anchor));
        for (int a = 0; a < n - 1; ++a) y += u[a] * tau[a];
        const Vec b = sphere.project(y);
        const Vec nu = outward_unit_normal(*metric, sphere, b);
        const auto frame = frame_complement(*metric, b, nu, sphere.gradient(b));
        Vec angles(std::max(n - 2, 0));
        for (int a = 0; a < n - 2; ++a) angles[a] = u[n - 1 + a];
        const Vec d = spherical_direction(frame, angles);
        const double len = u[dim_u - 1];

        GeodesicPath path = shoot(metric, b, (len * d).eval(), 1.0, {});
        if (path.exit_event().has_value()) {
            ev.exited = true;
            ev.r = Vec::Constant(n, std::numeric_limits<double>::infinity());
            ev.path = std::move(path);
            return ev;
        }
        ev.r = endpoint_residual(*metric, probe_cond, path.end_point(), path.end_velocity());
        ev.path = std::move(path);
        return ev;
    };

    std::vector<OrthogonalTangentChord> found;
    for (int i = 0; i < multistart; ++i) {
        const Vec h = halton_point(i, dim_u + n, seed);
        Vec anchor(n);
        for (int a = 0; a < n; ++a) anchor[a] = h[dim_u + a] - 0.5;
        if (anchor.norm() < 1e-6) anchor[0] = 1.0;
        anchor = sphere.project(anchor);

        Vec u = Vec::Zero(dim_u);
        for (int a = 0; a < n - 2; ++a) u[n - 1 + a] = h[n - 1 + a] * 2.0 * std::numbers::pi;
        u[dim_u - 1] = 0.05 + h[dim_u - 1] * L;

        ShotEval ev = eval(anchor, u);
        if (ev.exited) continue;
        bool failed = false;
        for (int iter = 0; iter < 50 && !failed; ++iter) {
            if (ev.r.norm() <= 1e-9) break;
            // least-squares Gauss-Newton with finite-difference Jacobian in u
            Mat J(n, dim_u);
            const double hh = 1e-6;
            for (int k = 0; k < dim_u; ++k) {
                Vec up = u, um = u;
                up[k] += hh;
                um[k] -= hh;
                const ShotEval evp = eval(anchor, up);
                const ShotEval evm = eval(anchor, um);
                if (evp.exited || evm.exited) {
                    failed = true;
                    break;
                }
                J.col(k) = (evp.r - evm.r) / (2 * hh);
            }
            if (failed) break;
            const Vec delta = Eigen::CompleteOrthogonalDecomposition<Mat>(J).solve(-ev.r);
            bool accepted = false;
            double alpha = 1.0;
            for (int bt = 0; bt < 12; ++bt, alpha *= 0.5) {
                Vec trial = u + alpha * delta;
                trial[dim_u - 1] = std::clamp(trial[dim_u - 1], 1e-3, 1.5 * L);
                ShotEval tev = eval(anchor, trial);
                if (!tev.exited && tev.r.norm() <= (1.0 - 1e-4 * alpha) * ev.r.norm()) {
                    u = trial;
                    ev = std::move(tev);
                    accepted = true;
                    break;
                }
            }
            if (!accepted) break;
        }
        if (!failed && !ev.exited && ev.r.norm() <= 1e-9 && ev.path &&
            ev.path->length() >= 0.02 && ev.path->length() <= L * (1 + 1e-9) &&
            path_stays_in_domain(*ev.path)) {
            found.push_back({*ev.path, ev.r.norm()});
        }
    }
    return found;
}

// --- Counting --------------------------------------------------------------------

std::vector<std::pair<double, int>> count_growth(MetricPtr metric, const Vec& p, const Vec& q,
                                                 const std::vector<double>& t_grid,
                                                 const SolveOptions& opts) {
    if (metric->domain().kind() != DomainKind::Torus)
        throw ValidationError("count_growth requires a torus chart");
    if (t_grid.empty()) return {};

    std::vector<double> caps = t_grid;
    std::sort(caps.begin(), caps.end());
    const double t_max = caps.back();

    const auto family = solve_family(metric, BoundaryCondition::point_pair(p, q), t_max, opts);

    std::vector<std::pair<double, int>> out;
    for (double cap : t_grid) {
        int count = 0;
        for (const auto& sol : family.solutions)
            if (sol.length() <= cap + 1e-9) ++count;
        out.emplace_back(cap, count);
    }
    return out;
}

} // namespace geodex
