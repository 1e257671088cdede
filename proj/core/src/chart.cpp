#include "geodex/chart.hpp"
#include "geodex/errors.hpp"

#include <cmath>
#include <limits>

namespace geodex {

ChartDomain ChartDomain::box(const Vec& lo, const Vec& hi) {
    if (lo.size() != hi.size()) throw ValidationError("box bounds dimension mismatch");
    if (lo.size() < 2) throw ValidationError("chart dimension must be >= 2");
    for (int i = 0; i < lo.size(); ++i)
        if (!(lo[i] < hi[i])) throw ValidationError("box bounds must be strictly ordered");
    ChartDomain d;
    d.kind_ = DomainKind::Box;
    d.dim_ = static_cast<int>(lo.size());
    d.lo_ = lo;
    d.hi_ = hi;
    return d;
}

ChartDomain ChartDomain::unit_disc(int dimension) {
    if (dimension < 2) throw ValidationError("chart dimension must be >= 2");
    ChartDomain d;
    d.kind_ = DomainKind::UnitDisc;
    d.dim_ = dimension;
    return d;
}

ChartDomain ChartDomain::torus(const Vec& periods) {
    if (periods.size() < 2) throw ValidationError("chart dimension must be >= 2");
    for (int i = 0; i < periods.size(); ++i)
        if (!(periods[i] > 0)) throw ValidationError("torus periods must be positive");
    ChartDomain d;
    d.kind_ = DomainKind::Torus;
    d.dim_ = static_cast<int>(periods.size());
    d.periods_ = periods;
    return d;
}

bool ChartDomain::contains(const Vec& x, double slack) const {
    switch (kind_) {
        case DomainKind::Box:
            for (int i = 0; i < dim_; ++i)
                if (x[i] < lo_[i] - slack || x[i] > hi_[i] + slack) return false;
            return true;
        case DomainKind::UnitDisc:
            return x.norm() <= 1.0 + slack;
        case DomainKind::Torus:
            return true;
    }
    return false;
}

double ChartDomain::boundary_excess(const Vec& x) const {
    switch (kind_) {
        case DomainKind::Box: {
            double worst = std::numeric_limits<double>::lowest();
            for (int i = 0; i < dim_; ++i) {
                worst = std::max(worst, lo_[i] - x[i]);
                worst = std::max(worst, x[i] - hi_[i]);
            }
            return worst;
        }
        case DomainKind::UnitDisc:
            return x.norm() - 1.0;
        case DomainKind::Torus:
            return std::numeric_limits<double>::lowest();
    }
    return 0.0;
}

Vec ChartDomain::wrap(const Vec& x) const {
    if (kind_ != DomainKind::Torus) return x;
    Vec y = x;
    for (int i = 0; i < dim_; ++i) {
        y[i] = std::fmod(y[i], periods_[i]);
        if (y[i] < 0) y[i] += periods_[i];
    }
    return y;
}

Vec ChartDomain::difference(const Vec& a, const Vec& b) const {
    Vec d = a - b;
    if (kind_ != DomainKind::Torus) return d;
    for (int i = 0; i < dim_; ++i) {
        d[i] = std::remainder(d[i], periods_[i]);
    }
    return d;
}

double ChartDomain::scale() const {
    switch (kind_) {
        case DomainKind::Box: return (hi_ - lo_).maxCoeff();
        case DomainKind::UnitDisc: return 2.0;
        case DomainKind::Torus: return periods_.maxCoeff();
    }
    return 1.0;
}

bool ChartDomain::operator==(const ChartDomain& other) const {
    if (kind_ != other.kind_ || dim_ != other.dim_) return false;
    switch (kind_) {
        case DomainKind::Box: return lo_ == other.lo_ && hi_ == other.hi_;
        case DomainKind::UnitDisc: return true;
        case DomainKind::Torus: return periods_ == other.periods_;
    }
    return false;
}

} // namespace geodex
