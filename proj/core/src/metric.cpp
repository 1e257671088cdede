#include "geodex/metric.hpp"
#include "geodex/errors.hpp"
#include "geodex/smooth_bump.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace geodex {

namespace {

double default_inj(const ChartDomain& domain, const Vec& diag) {
    if (domain.kind() == DomainKind::Torus) {
        double best = std::numeric_limits<double>::max();
        for (int i = 0; i < domain.dimension(); ++i)
            best = std::min(best, domain.periods()[i] * std::sqrt(diag[i]));
        return 0.5 * best;
    }
    // Simply connected chart, flat connection: exponential map injective;
    // a unit-order bound is all downstream users need.
    return 1.0;
}

} // namespace

ConstantDiagonalMetric::ConstantDiagonalMetric(ChartDomain domain, Vec diag)
    : ConstantDiagonalMetric(domain, diag, default_inj(domain, diag)) {}

ConstantDiagonalMetric::ConstantDiagonalMetric(ChartDomain domain, Vec diag,
                                               double inj_lower_bound)
    : MetricField(std::move(domain), inj_lower_bound), diag_(std::move(diag)) {
    if (diag_.size() != dimension())
        throw ValidationError("constant-diagonal entries do not match chart dimension");
    for (int i = 0; i < diag_.size(); ++i)
        if (!(diag_[i] > 0)) throw ValidationError("constant-diagonal entries must be positive");
    g_ = diag_.asDiagonal();
}

std::string ConstantDiagonalMetric::family_tag() const {
    std::ostringstream os;
    os << "constant-diagonal(";
    for (int i = 0; i < diag_.size(); ++i) os << (i ? "," : "") << diag_[i];
    os << ")";
    return os.str();
}

MetricPtr make_flat(ChartDomain domain) {
    const int n = domain.dimension();
    return std::make_shared<ConstantDiagonalMetric>(std::move(domain), Vec::Ones(n));
}

// --- Conformal profiles -----------------------------------------------------

double SphereCapProfile::phi(const Vec& x) const {
    return std::log(2.0) - std::log1p(kappa_ * x.squaredNorm());
}

Vec SphereCapProfile::grad(const Vec& x) const {
    const double u = 1.0 + kappa_ * x.squaredNorm();
    return (-2.0 * kappa_ / u) * x;
}

Mat SphereCapProfile::hess(const Vec& x) const {
    const int n = static_cast<int>(x.size());
    const double u = 1.0 + kappa_ * x.squaredNorm();
    return (-2.0 * kappa_ / (u * u)) * (u * Mat::Identity(n, n) - 2.0 * kappa_ * x * x.transpose());
}

std::string SphereCapProfile::tag() const {
    std::ostringstream os;
    os << "sphere-cap(kappa=" << kappa_ << ")";
    return os.str();
}

RadialBumpProfile::RadialBumpProfile(const ChartDomain& domain, Vec center, double radius,
                                     double amplitude)
    : domain_(domain), center_(std::move(center)), radius_(radius), amplitude_(amplitude) {
    if (!(radius_ > 0)) throw ValidationError("radial bump radius must be positive");
    if (domain_.is_periodic() && radius_ >= 0.5 * domain_.periods().minCoeff())
        throw ValidationError("radial bump support must fit inside half the torus cell");
}

double RadialBumpProfile::phi(const Vec& x) const {
    const Vec d = domain_.difference(x, center_);
    return amplitude_ * plateau_profile(d.norm() / radius_).f;
}

Vec RadialBumpProfile::grad(const Vec& x) const {
    const Vec d = domain_.difference(x, center_);
    const double r = d.norm();
    const BumpJet j = plateau_profile(r / radius_);
    if (j.d1 == 0.0) return Vec::Zero(x.size());
    return (amplitude_ * j.d1 / (radius_ * r)) * d;
}

Mat RadialBumpProfile::hess(const Vec& x) const {
    const int n = static_cast<int>(x.size());
    const Vec d = domain_.difference(x, center_);
    const double r = d.norm();
    const BumpJet j = plateau_profile(r / radius_);
    if (j.d1 == 0.0 && j.d2 == 0.0) return Mat::Zero(n, n);
    const Mat uu = (d * d.transpose()) / (r * r);
    return amplitude_ * (j.d2 / (radius_ * radius_) * uu +
                         j.d1 / (radius_ * r) * (Mat::Identity(n, n) - uu));
}

std::string RadialBumpProfile::tag() const {
    std::ostringstream os;
    os << "radial-bump(A=" << amplitude_ << ",R=" << radius_ << ")";
    return os.str();
}

bool RadialBumpProfile::rotationally_symmetric() const {
    // Symmetric about its own center; rotationally symmetric as a disc
    // metric only when centered at the origin.
    return center_.norm() == 0.0;
}

PeriodicBumpProfile::PeriodicBumpProfile(const ChartDomain& torus, std::vector<int> wave,
                                         double amplitude)
    : periods_(torus.periods()), wave_(std::move(wave)), amplitude_(amplitude) {
    if (torus.kind() != DomainKind::Torus)
        throw ValidationError("periodic bump profile requires a torus chart");
    if (static_cast<int>(wave_.size()) != torus.dimension())
        throw ValidationError("wave vector does not match chart dimension");
}

double PeriodicBumpProfile::phi(const Vec& x) const {
    double v = amplitude_;
    for (int i = 0; i < x.size(); ++i)
        if (wave_[i] != 0) v *= std::cos(2.0 * std::numbers::pi * wave_[i] * x[i] / periods_[i]);
    return v;
}

Vec PeriodicBumpProfile::grad(const Vec& x) const {
    const int n = static_cast<int>(x.size());
    Vec g(n);
    for (int k = 0; k < n; ++k) {
        if (wave_[k] == 0) { g[k] = 0.0; continue; }
        double v = amplitude_;
        for (int i = 0; i < n; ++i) {
            if (wave_[i] == 0) continue;
            const double a = 2.0 * std::numbers::pi * wave_[i] / periods_[i];
            v *= (i == k) ? -a * std::sin(a * x[i]) : std::cos(a * x[i]);
        }
        g[k] = v;
    }
    return g;
}

Mat PeriodicBumpProfile::hess(const Vec& x) const {
    const int n = static_cast<int>(x.size());
    Mat h(n, n);
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l <= k; ++l) {
            if (wave_[k] == 0 || wave_[l] == 0) { h(k, l) = h(l, k) = 0.0; continue; }
            double v = amplitude_;
            for (int i = 0; i < n; ++i) {
                if (wave_[i] == 0) continue;
                const double a = 2.0 * std::numbers::pi * wave_[i] / periods_[i];
                if (i == k && i == l) v *= -a * a * std::cos(a * x[i]);
                else if (i == k || i == l) v *= -a * std::sin(a * x[i]);
                else v *= std::cos(a * x[i]);
            }
            h(k, l) = h(l, k) = v;
        }
    }
    return h;
}

std::string PeriodicBumpProfile::tag() const {
    std::ostringstream os;
    os << "periodic-bump(A=" << amplitude_ << ",k=";
    for (size_t i = 0; i < wave_.size(); ++i) os << (i ? "," : "") << wave_[i];
    os << ")";
    return os.str();
}

// --- Conformal metric -------------------------------------------------------

ConformalMetric::ConformalMetric(ChartDomain domain, std::shared_ptr<const ConformalProfile> profile,
                                 double inj_lower_bound)
    : MetricField(std::move(domain), inj_lower_bound), profile_(std::move(profile)) {}

Mat ConformalMetric::components(const Vec& x) const {
    const int n = dimension();
    return std::exp(2.0 * profile_->phi(x)) * Mat::Identity(n, n);
}

Mat ConformalMetric::d_components(const Vec& x, int k) const {
    const int n = dimension();
    const double e2p = std::exp(2.0 * profile_->phi(x));
    return (2.0 * profile_->grad(x)[k] * e2p) * Mat::Identity(n, n);
}

Mat ConformalMetric::dd_components(const Vec& x, int k, int l) const {
    const int n = dimension();
    const double e2p = std::exp(2.0 * profile_->phi(x));
    const Vec gr = profile_->grad(x);
    const Mat he = profile_->hess(x);
    return ((2.0 * he(k, l) + 4.0 * gr[k] * gr[l]) * e2p) * Mat::Identity(n, n);
}

std::string ConformalMetric::family_tag() const {
    return "conformal(" + profile_->tag() + ")";
}

MetricPtr make_sphere_cap(ChartDomain domain, double kappa) {
    const double inj = kappa > 0 ? std::numbers::pi / std::sqrt(kappa) : 1.0;
    return std::make_shared<ConformalMetric>(std::move(domain),
                                             std::make_shared<SphereCapProfile>(kappa), inj);
}

// --- Pointwise quantities ---------------------------------------------------

Mat inverse_components(const Mat& g, const Vec& x_for_message) {
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success) {
        std::ostringstream os;
        os << "metric is not positive definite at x = [" << x_for_message.transpose() << "]";
        throw NonPositiveDefiniteError(os.str());
    }
    return llt.solve(Mat::Identity(g.rows(), g.cols()));
}

MetricJet metric_jet(const MetricField& m, const Vec& x) {
    const int n = m.dimension();
    MetricJet jet;
    jet.g = m.components(x);
    jet.ginv = inverse_components(jet.g, x);
    jet.dg.resize(n);
    for (int k = 0; k < n; ++k) jet.dg[k] = m.d_components(x, k);
    jet.gamma.assign(n, Mat::Zero(n, n));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += jet.ginv(k, l) * (jet.dg[i](j, l) + jet.dg[j](i, l) - jet.dg[l](i, j));
                jet.gamma[k](i, j) = jet.gamma[k](j, i) = 0.5 * s;
            }
    return jet;
}

std::vector<Mat> christoffel(const MetricField& m, const Vec& x) {
    return metric_jet(m, x).gamma;
}

Mat curvature_operator(const MetricField& m, const Vec& x, const Vec& v) {
    return curvature_operator(m, x, v, metric_jet(m, x));
}

Mat curvature_operator(const MetricField& m, const Vec& x, const Vec& v, const MetricJet& jet) {
    const int n = m.dimension();
    const Mat& ginv = jet.ginv;
    const std::vector<Mat>& dg = jet.dg;
    const std::vector<Mat>& gamma = jet.gamma;

    // dgamma[a][k](i,j) = d_a Gamma^k_ij
    std::vector<std::vector<Mat>> dgamma(n, std::vector<Mat>(n, Mat::Zero(n, n)));
    for (int a = 0; a < n; ++a) {
        const Mat dginv = -ginv * dg[a] * ginv;
        std::vector<Mat> ddg(n);
        for (int k = 0; k < n; ++k) ddg[k] = m.dd_components(x, a, k);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j <= i; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l) {
                        s += dginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                        s += ginv(k, l) * (ddg[i](j, l) + ddg[j](i, l) - ddg[l](i, j));
                    }
                    dgamma[a][k](i, j) = dgamma[a][k](j, i) = 0.5 * s;
                }
    }

    // (R(Y,v)v)^l = [d_i Gamma^l_jk - d_j Gamma^l_ik
    //               + Gamma^m_jk Gamma^l_im - Gamma^m_ik Gamma^l_jm] Y^i v^j v^k
    Mat K = Mat::Zero(n, n);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double c = dgamma[i][l](j, k) - dgamma[j][l](i, k);
                    for (int mm = 0; mm < n; ++mm)
                        c += gamma[mm](j, k) * gamma[l](i, mm) - gamma[mm](i, k) * gamma[l](j, mm);
                    s += c * v[j] * v[k];
                }
            K(l, i) = s;
        }
    return K;
}

Vec curvature_term(const MetricField& m, const Vec& x, const Vec& Y, const Vec& v) {
    return curvature_operator(m, x, v) * Y;
}

double inner(const MetricField& m, const Vec& x, const Vec& u, const Vec& w) {
    return u.dot(m.components(x) * w);
}

double norm(const MetricField& m, const Vec& x, const Vec& u) {
    return std::sqrt(std::max(0.0, inner(m, x, u, u)));
}

std::vector<Vec> frame_complement(const MetricField& m, const Vec& x,
                                  const Vec& anchor, const Vec& drop_selector) {
    const int n = m.dimension();
    const Mat g = m.components(x);
    int drop = 0;
    drop_selector.cwiseAbs().maxCoeff(&drop);

    const auto gdot = [&](const Vec& a, const Vec& b) { return a.dot(g * b); };

    Vec a0 = anchor / std::sqrt(gdot(anchor, anchor));
    std::vector<Vec> frame;
    frame.reserve(n - 1);
    for (int j = 0; j < n && static_cast<int>(frame.size()) < n - 1; ++j) {
        if (j == drop) continue;
        Vec w = Vec::Unit(n, j);
        w -= gdot(w, a0) * a0;
        for (const Vec& t : frame) w -= gdot(w, t) * t;
        const double len = std::sqrt(gdot(w, w));
        if (len < 1e-10) throw NumericError("degenerate frame construction");
        frame.push_back(w / len);
    }
    return frame;
}

std::vector<Vec> orthonormal_frame(const MetricField& m, const Vec& x) {
    const int n = m.dimension();
    const Mat g = m.components(x);
    const auto gdot = [&](const Vec& a, const Vec& b) { return a.dot(g * b); };
    std::vector<Vec> frame;
    frame.reserve(n);
    for (int j = 0; j < n; ++j) {
        Vec w = Vec::Unit(n, j);
        for (const Vec& t : frame) w -= gdot(w, t) * t;
        const double len = std::sqrt(gdot(w, w));
        if (len < 1e-12) throw NumericError("degenerate orthonormal frame");
        frame.push_back(w / len);
    }
    return frame;
}

std::vector<Vec> probe_points(const ChartDomain& domain, int count, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int n = domain.dimension();
    std::vector<Vec> pts;
    pts.reserve(count);
    for (int c = 0; c < count; ++c) {
        Vec x(n);
        switch (domain.kind()) {
            case DomainKind::Box:
                for (int i = 0; i < n; ++i)
                    x[i] = domain.box_lo()[i] + uni(rng) * (domain.box_hi()[i] - domain.box_lo()[i]);
                break;
            case DomainKind::UnitDisc: {
                for (int i = 0; i < n; ++i) x[i] = gauss(rng);
                const double r = std::pow(uni(rng), 1.0 / n);
                x *= r / x.norm();
                break;
            }
            case DomainKind::Torus:
                for (int i = 0; i < n; ++i) x[i] = uni(rng) * domain.periods()[i];
                break;
        }
        pts.push_back(std::move(x));
    }
    return pts;
}

double min_metric_eigenvalue(const MetricField& m, int probes, unsigned seed) {
    double worst = std::numeric_limits<double>::max();
    for (const Vec& x : probe_points(m.domain(), probes, seed)) {
        Eigen::SelfAdjointEigenSolver<Mat> es(m.components(x));
        worst = std::min(worst, es.eigenvalues().minCoeff());
    }
    return worst;
}

double derivative_consistency(const MetricField& m, int probes, unsigned seed) {
    const int n = m.dimension();
    const double h = 1e-5 * m.domain().scale();
    double worst = 0.0;
    for (const Vec& x : probe_points(m.domain(), probes, seed)) {
        if (m.domain().kind() != DomainKind::Torus && !m.domain().contains(x, -2 * h)) continue;
        for (int k = 0; k < n; ++k) {
            Vec xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            const Mat fd = (m.components(xp) - m.components(xm)) / (2.0 * h);
            const Mat an = m.d_components(x, k);
            const double scale = std::max(1.0, m.components(x).cwiseAbs().maxCoeff());
            worst = std::max(worst, (fd - an).cwiseAbs().maxCoeff() / scale);
        }
    }
    return worst;
}

} // namespace geodex
