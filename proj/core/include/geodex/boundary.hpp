#pragma once

#include "geodex/metric.hpp"

namespace geodex {

// Smooth level set F(x) = 0 describing a compact codimension-1 submanifold
// of the chart.  The chart-coordinate gradient must not vanish on the zero
// set.
class LevelSet {
public:
    virtual ~LevelSet() = default;
    virtual double value(const Vec& x) const = 0;
    virtual Vec gradient(const Vec& x) const = 0;
    virtual Mat hessian(const Vec& x) const = 0;
    virtual std::string tag() const = 0;

    // Nearest-point style projection onto the zero set; default is Newton
    // along the gradient.
    virtual Vec project(const Vec& y) const;
};

// F = (|x - c|^2 - r^2) / 2
class SphereLevelSet final : public LevelSet {
public:
    SphereLevelSet(Vec center, double radius);
    double value(const Vec& x) const override;
    Vec gradient(const Vec& x) const override;
    Mat hessian(const Vec& x) const override;
    std::string tag() const override;
    Vec project(const Vec& y) const override;
    const Vec& center() const { return center_; }
    double radius() const { return radius_; }

private:
    Vec center_;
    double radius_;
};

// F = (sum ((x_i - c_i)/r_i)^2 - 1) / 2
class EllipsoidLevelSet final : public LevelSet {
public:
    EllipsoidLevelSet(Vec center, Vec radii);
    double value(const Vec& x) const override;
    Vec gradient(const Vec& x) const override;
    Mat hessian(const Vec& x) const override;
    std::string tag() const override;
    Vec project(const Vec& y) const override;

private:
    Vec center_;
    Vec radii_;
};

// g-unit normal field along increasing F, evaluated off the zero set as
// well (the formula extends smoothly wherever grad F != 0).
Vec outward_unit_normal(const MetricField& m, const LevelSet& ls, const Vec& x);

// Weingarten matrix W with W * v = covariant derivative of the outward unit
// normal field along v (chart components).  Restricted to tangent vectors
// this is the shape operator w.r.t. the outward normal.
Mat weingarten(const MetricField& m, const LevelSet& ls, const Vec& x);

// Everything the solvers need about one boundary point of the unit disc.
// The shape operator is taken w.r.t. the inward normal with the sign fixed
// so the flat disc has principal curvatures +1 (convex = positive).
struct BoundaryGeometry {
    Vec point;
    Vec inward_normal;              // g-unit
    std::vector<Vec> tangent_frame; // g-orthonormal basis of the tangent space
    Mat shape_operator;             // (n-1)x(n-1) in the tangent frame
    Vec principal_curvatures;       // ascending
};

// Requires a UnitDisc domain and |x| = 1 to 1e-10.
BoundaryGeometry boundary_geometry(const MetricField& m, const Vec& x);

struct ConvexityReport {
    bool strictly_convex = false;
    double min_kappa = 0.0;
    Vec argmin_point;
};

// Samples deterministic boundary points and reports the minimum principal
// curvature found.
ConvexityReport is_strictly_convex(const MetricField& m, int samples, unsigned seed = 20240901u);

} // namespace geodex
