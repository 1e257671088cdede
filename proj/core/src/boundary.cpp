#include "geodex/boundary.hpp"
#include "geodex/errors.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <sstream>

namespace geodex {

SphereLevelSet::SphereLevelSet(Vec center, double radius)
    : center_(std::move(center)), radius_(radius) {
    if (!(radius_ > 0)) throw ValidationError("sphere level set needs positive radius");
}

double SphereLevelSet::value(const Vec& x) const {
    return 0.5 * ((x - center_).squaredNorm() - radius_ * radius_);
}

Vec SphereLevelSet::gradient(const Vec& x) const { return x - center_; }

Mat SphereLevelSet::hessian(const Vec& x) const {
    return Mat::Identity(x.size(), x.size());
}

std::string SphereLevelSet::tag() const {
    std::ostringstream os;
    os << "sphere(r=" << radius_ << ")";
    return os.str();
}

EllipsoidLevelSet::EllipsoidLevelSet(Vec center, Vec radii)
    : center_(std::move(center)), radii_(std::move(radii)) {
    for (int i = 0; i < radii_.size(); ++i)
        if (!(radii_[i] > 0)) throw ValidationError("ellipsoid radii must be positive");
}

double EllipsoidLevelSet::value(const Vec& x) const {
    double s = 0.0;
    for (int i = 0; i < x.size(); ++i) {
        const double t = (x[i] - center_[i]) / radii_[i];
        s += t * t;
    }
    return 0.5 * (s - 1.0);
}

Vec EllipsoidLevelSet::gradient(const Vec& x) const {
    Vec g(x.size());
    for (int i = 0; i < x.size(); ++i) g[i] = (x[i] - center_[i]) / (radii_[i] * radii_[i]);
    return g;
}

Mat EllipsoidLevelSet::hessian(const Vec& x) const {
    Vec d(x.size());
    for (int i = 0; i < x.size(); ++i) d[i] = 1.0 / (radii_[i] * radii_[i]);
    return d.asDiagonal();
}

std::string EllipsoidLevelSet::tag() const { return "ellipsoid"; }

Vec LevelSet::project(const Vec& y) const {
    Vec x = y;
    for (int it = 0; it < 50; ++it) {
        const double f = value(x);
        if (std::abs(f) < 1e-14) break;
        const Vec g = gradient(x);
        const double g2 = g.squaredNorm();
        if (g2 < 1e-20) throw ValidationError("level-set projection hit a critical point");
        x -= (f / g2) * g;
    }
    return x;
}

Vec SphereLevelSet::project(const Vec& y) const {
    const Vec d = y - center_;
    const double len = d.norm();
    if (len < 1e-12) throw ValidationError("cannot project the sphere center");
    return center_ + (radius_ / len) * d;
}

Vec EllipsoidLevelSet::project(const Vec& y) const {
    Vec d = y - center_;
    double s = 0.0;
    for (int i = 0; i < d.size(); ++i) {
        const double t = d[i] / radii_[i];
        s += t * t;
    }
    if (s < 1e-20) throw ValidationError("cannot project the ellipsoid center");
    return center_ + d / std::sqrt(s);
}

Vec outward_unit_normal(const MetricField& m, const LevelSet& ls, const Vec& x) {
    const Mat ginv = inverse_components(m.components(x), x);
    const Vec grad = ls.gradient(x);
    if (grad.norm() < 1e-12) throw ValidationError("level-set gradient vanishes");
    const Vec w = ginv * grad;
    return w / norm(m, x, w);
}

Mat weingarten(const MetricField& m, const LevelSet& ls, const Vec& x) {
    const int n = m.dimension();
    const Mat g = m.components(x);
    const Mat ginv = inverse_components(g, x);
    const Vec grad = ls.gradient(x);
    if (grad.norm() < 1e-12) throw ValidationError("level-set gradient vanishes");
    const Mat hess = ls.hessian(x);

    const Vec w = ginv * grad;
    const double s = std::sqrt(w.dot(g * w));
    const Vec nu = w / s;

    // d_k w = -ginv (d_k g) w + ginv Hess(:,k)
    // d_k |w|_g = [2 (d_k w)^T g w + w^T (d_k g) w] / (2 |w|_g)
    Mat dnu(n, n);
    for (int k = 0; k < n; ++k) {
        const Mat dgk = m.d_components(x, k);
        const Vec dwk = -ginv * (dgk * w) + ginv * hess.col(k);
        const double dsk = (2.0 * dwk.dot(g * w) + w.dot(dgk * w)) / (2.0 * s);
        dnu.col(k) = dwk / s - (dsk / (s * s)) * w;
    }

    const std::vector<Mat> gamma = christoffel(m, x);
    Mat W(n, n);
    for (int k = 0; k < n; ++k) {
        Vec cov = dnu.col(k);
        for (int a = 0; a < n; ++a) cov[a] += gamma[a].row(k).dot(nu);
        W.col(k) = cov;
    }
    return W;
}

BoundaryGeometry boundary_geometry(const MetricField& m, const Vec& x) {
    if (m.domain().kind() != DomainKind::UnitDisc)
        throw ValidationError("boundary geometry requires a unit-disc chart");
    if (std::abs(x.norm() - 1.0) > 1e-10)
        throw ValidationError("point is not on the unit-disc boundary");

    const int n = m.dimension();
    const SphereLevelSet sphere(Vec::Zero(n), 1.0);

    BoundaryGeometry bg;
    bg.point = x;
    bg.inward_normal = -outward_unit_normal(m, sphere, x);
    bg.tangent_frame = frame_complement(m, x, bg.inward_normal, x);

    // Convex-positive convention: S(v) = +grad_v(outward unit normal field),
    // i.e. -grad_v(inward field).
    const Mat W = weingarten(m, sphere, x);
    const Mat g = m.components(x);
    Mat S(n - 1, n - 1);
    for (int a = 0; a < n - 1; ++a)
        for (int b = 0; b < n - 1; ++b)
            S(a, b) = bg.tangent_frame[b].dot(g * (W * bg.tangent_frame[a]));
    S = 0.5 * (S + S.transpose()).eval();
    bg.shape_operator = S;

    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    bg.principal_curvatures = es.eigenvalues();
    return bg;
}

ConvexityReport is_strictly_convex(const MetricField& m, int samples, unsigned seed) {
    if (m.domain().kind() != DomainKind::UnitDisc)
        throw ValidationError("convexity check requires a unit-disc chart");
    if (samples < 1) throw ValidationError("need at least one boundary sample");

    const int n = m.dimension();
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    ConvexityReport rep;
    rep.min_kappa = std::numeric_limits<double>::max();
    for (int s = 0; s < samples; ++s) {
        Vec x(n);
        do {
            for (int i = 0; i < n; ++i) x[i] = gauss(rng);
        } while (x.norm() < 1e-8);
        x /= x.norm();
        const BoundaryGeometry bg = boundary_geometry(m, x);
        const double k1 = bg.principal_curvatures.minCoeff();
        if (k1 < rep.min_kappa) {
            rep.min_kappa = k1;
            rep.argmin_point = x;
        }
    }
    rep.strictly_convex = rep.min_kappa > 0.0;
    return rep;
}

} // namespace geodex
