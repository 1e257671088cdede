#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace geodex {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class DomainKind { Box, UnitDisc, Torus };

// A single coordinate chart: an axis-aligned box, the closed unit disc
// (boundary = Euclidean unit sphere of the chart coordinates), or a flat
// torus with periodic identification.
class ChartDomain {
public:
    static ChartDomain box(const Vec& lo, const Vec& hi);
    static ChartDomain unit_disc(int dimension);
    static ChartDomain torus(const Vec& periods);

    DomainKind kind() const { return kind_; }
    int dimension() const { return dim_; }

    const Vec& box_lo() const { return lo_; }
    const Vec& box_hi() const { return hi_; }
    const Vec& periods() const { return periods_; }

    bool is_periodic() const { return kind_ == DomainKind::Torus; }

    // Interior test with tolerance slack (negative slack shrinks the domain).
    bool contains(const Vec& x, double slack = 0.0) const;

    // Signed boundary clearance: negative inside, positive outside.
    // Torus has no boundary; returns -inf semantics via lowest().
    double boundary_excess(const Vec& x) const;

    // Torus: wrap a point into the fundamental cell [0, P_i).
    Vec wrap(const Vec& x) const;

    // Torus: shortest representative of the difference a - b.  Identity on
    // non-periodic charts.
    Vec difference(const Vec& a, const Vec& b) const;

    // Chart-scale used for finite-difference steps and tolerances.
    double scale() const;

    bool operator==(const ChartDomain& other) const;

private:
    ChartDomain() = default;
    DomainKind kind_ = DomainKind::Box;
    int dim_ = 0;
    Vec lo_, hi_;     // Box
    Vec periods_;     // Torus
};

} // namespace geodex
