#pragma once

#include "geodex/geodesic.hpp"

namespace geodex {

struct ConjugatePoint {
    double t;
    int multiplicity;
};

// Fundamental solution of the Jacobi equation along a geodesic: block[i]
// propagates covariant initial data (Y(0), DY(0)) to (Y(t_i), DY(t_i)),
// where DY is the covariant derivative along the path.  Columns solve
// Y'' + R(Y, c')c' = 0.
struct JacobiReport {
    std::vector<double> times;  // path sample times
    std::vector<Mat> blocks;    // 2n x 2n at each time

    const Mat& final_block() const { return blocks.back(); }
};

JacobiReport jacobi_propagate(const GeodesicPath& path, double tolerance = 1e-10);

// Only the propagator at t_end, integrated in one pass with a coarser step
// cap; what Newton solvers need per iteration.
Mat jacobi_final_block(const GeodesicPath& path, double tolerance = 1e-8);

// Propagator at an arbitrary parameter: re-integrates from the nearest
// stored checkpoint at or below t.
Mat jacobi_block_at(const GeodesicPath& path, const JacobiReport& report, double t);

// Zeros of the transverse position block restricted to the (n-1)-dim
// complement of the velocity, located to 1e-8 in t.  Multiplicity is the
// numerical null-space dimension (singular values below 1e-6 times the
// largest encountered along the path).
std::vector<ConjugatePoint> conjugate_points(const GeodesicPath& path,
                                             const JacobiReport& report);

// Same machinery for an arbitrary (n-1)-column family of Jacobi initial data
// (2n x (n-1)); used for focal-point counting of orthogonal conditions.
// Zeros within `skip_start` of the begin parameter are ignored (the family
// is prescribed there).
std::vector<ConjugatePoint> zeros_of_transverse_family(const GeodesicPath& path,
                                                       const JacobiReport& report,
                                                       const Mat& initial_data,
                                                       bool include_endpoint,
                                                       double skip_start = 1e-8);

// Ordinary-coordinate endpoint sensitivities at parameter t:
//   [dx(t); dv(t)] = S * [dx(0); dv(0)].
struct EndpointSensitivity {
    Mat dx_dx0, dx_dv0, dv_dx0, dv_dv0;
};

EndpointSensitivity endpoint_sensitivity(const GeodesicPath& path, const Mat& block_at_t,
                                         double t);

} // namespace geodex
