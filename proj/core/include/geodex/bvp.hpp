#pragma once

#include "geodex/boundary.hpp"
#include "geodex/jacobi.hpp"

#include <map>
#include <optional>

namespace geodex {

enum class ConditionKind { PointPair, BoundaryOrthogonal, HypersurfaceOrthogonal };

// Product boundary condition the solver targets: fixed endpoint pair (a loop
// when p = q), both endpoints orthogonal on the unit-disc boundary, or both
// endpoints orthogonal on a level-set hypersurface.
class BoundaryCondition {
public:
    static BoundaryCondition point_pair(Vec p, Vec q);
    static BoundaryCondition boundary_orthogonal();
    static BoundaryCondition hypersurface_orthogonal(std::shared_ptr<const LevelSet> N);

    ConditionKind kind() const { return kind_; }
    const Vec& p() const { return p_; }
    const Vec& q() const { return q_; }
    bool is_loop() const;

    // The constraint hypersurface for the orthogonal kinds (the unit sphere
    // for BoundaryOrthogonal).
    const LevelSet& constraint(int dimension) const;

    void validate(const MetricField& metric) const;
    std::string describe() const;

private:
    BoundaryCondition() = default;
    ConditionKind kind_ = ConditionKind::PointPair;
    Vec p_, q_;
    std::shared_ptr<const LevelSet> level_set_;
    mutable std::shared_ptr<const LevelSet> disc_boundary_;
};

enum class SolutionClass { Nondegenerate, Degenerate };

struct BvpSolution {
    GeodesicPath path;
    double residual_norm = 0.0;
    int kernel_dimension = 0;
    int index = 0;
    SolutionClass classification = SolutionClass::Nondegenerate;
    std::string equivalence_key;
    std::vector<ConjugatePoint> conjugate_times;

    double length() const { return path.length(); }
    double energy() const { return path.energy(); }
};

struct SearchLog {
    int starts = 0;
    int converged = 0;
    int rejected_exit = 0;
    int rejected_floor = 0;
    int rejected_residual = 0;
    int rejected_invalid = 0;
    int duplicates = 0;
    long newton_iterations = 0;
};

struct SolutionFamily {
    BoundaryCondition condition;
    double length_cap = 0.0;
    double admissibility_floor = 0.0;
    std::vector<BvpSolution> solutions; // deduplicated, sorted by (length, key)
    SearchLog log;
};

struct SolveOptions {
    int multistart = 100;
    unsigned seed = 1;
    double residual_tol = 1e-9;
    int max_newton_iterations = 50;
    double admissibility_floor = -1.0; // < 0: default per condition kind
    int workers = 1;
    double shoot_tolerance = 1e-10;
    int newton_min_samples = 64; // coarser sampling inside Newton iterations
};

// Shooting residual for explicit unknowns.  PointPair: (n-1 direction angles
// in a fixed g-orthonormal frame at p, length).  Orthogonal kinds: (n-1
// local coordinates of the start point around a reference anchor on the
// constraint, length); the start direction is the inward/selected g-unit
// normal.  Residual dimension is n.
struct ResidualEval {
    Vec r;
    bool exited = false;           // shoot left the workable chart region
    std::optional<GeodesicPath> path;
};

ResidualEval bvp_residual(MetricPtr metric, const BoundaryCondition& condition, const Vec& unknowns,
                          const Vec& anchor = Vec(), double normal_sign = 1.0);

// Multistart damped-Newton search for geometrically distinct solutions with
// length in [admissibility floor, L].  Deterministic for a fixed seed and
// any worker count.
SolutionFamily solve_family(MetricPtr metric, const BoundaryCondition& condition, double L,
                            const SolveOptions& opts = {});

// Null-space dimension of the boundary-condition map on Jacobi initial data
// (singular values below 1e-6 of the largest).
int kernel_dimension(const BvpSolution& solution, const BoundaryCondition& condition);

// Wrap an existing geodesic as a solution of `condition` (validates the
// boundary conditions, classifies the kernel).  Used when the solution is
// constructed rather than searched for.
BvpSolution make_solution(const BoundaryCondition& condition, GeodesicPath path);

// Canonical signature of the image: 64 arc-length-uniform points, orientation
// normalized against the reversed sequence, coordinates rounded to 1e-5,
// endpoints sorted; equal keys = geometrically equivalent.
std::string equivalence_key(const GeodesicPath& path);
std::string equivalence_key_of_points(const ChartDomain& domain, const std::vector<Vec>& points);

// Chords tangent to the unit-disc boundary at the start and orthogonal at
// the end; converged solutions are returned (expected empty for strictly
// convex and rotationally symmetric metrics).
struct OrthogonalTangentChord {
    GeodesicPath path;
    double residual_norm;
};
std::vector<OrthogonalTangentChord> find_orthogonal_tangent_chords(MetricPtr metric, double L,
                                                                   int multistart, unsigned seed);

// N_g(p, q; t) for each cap in t_grid: one solve at the largest cap, counts
// by length threshold (monotone by construction).
std::vector<std::pair<double, int>> count_growth(MetricPtr metric, const Vec& p, const Vec& q,
                                                 const std::vector<double>& t_grid,
                                                 const SolveOptions& opts = {});

} // namespace geodex
