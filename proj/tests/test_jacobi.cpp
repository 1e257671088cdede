#include <doctest.h>

#include <geodex/jacobi.hpp>

#include <cmath>
#include <numbers>

using namespace geodex;

namespace {

Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

ChartDomain box3(double half = 6.0) {
    return ChartDomain::box(v3(-half, -half, -half), v3(half, half, half));
}

// Sphere-cap path with total g-length arc, started away from the origin so
// the chart image stays bounded.
GeodesicPath sphere_path(MetricPtr sphere, double arc) {
    const Vec p = v3(0.3, 0, 0);
    Vec dir = v3(0, 1, 0);
    dir /= norm(*sphere, p, dir);
    return shoot(sphere, p, arc * dir, 1.0);
}

} // namespace

TEST_CASE("jacobi blocks: flat metric gives the linear propagator") {
    const auto flat = make_flat(box3());
    const auto path = shoot(flat, v3(0, 0, 0), v3(0.7, 0.2, 0), 1.0);
    const auto report = jacobi_propagate(path);

    CHECK((report.blocks.front() - Mat::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
    for (size_t i = 0; i < report.times.size(); ++i) {
        const double t = report.times[i];
        Mat expected = Mat::Identity(6, 6);
        expected.topRightCorner(3, 3) = t * Mat::Identity(3, 3);
        CHECK((report.blocks[i] - expected).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("jacobi blocks: sphere transverse pattern in a parallel frame") {
    const auto sphere = make_sphere_cap(box3(), 1.0);
    const double s = 0.66; // arc = pi * s
    const double arc = std::numbers::pi * s;
    const auto path = sphere_path(sphere, arc);
    const auto report = jacobi_propagate(path);

    // transverse parallel-transported unit vector at t = 0
    const Vec p = path.start_point();
    const Vec v0 = path.start_velocity();
    const auto frame0 = frame_complement(path.metric(), p, v0, v0);

    for (const Vec& E0 : frame0) {
        for (double t : {0.3, 0.6, 1.0}) {
            const Mat Et = parallel_transport(path, E0, t);
            const Mat blk = jacobi_block_at(path, report, t);

            // Y(0) = E0, DY(0) = 0  ->  cos(arc t) E(t)
            Vec init(6);
            init.head(3) = E0;
            init.tail(3) = Vec::Zero(3);
            Vec out = blk * init;
            const Vec xt = path.position(t);
            const double c_coef = inner(path.metric(), xt, out.head(3), Et.col(0));
            CHECK(c_coef == doctest::Approx(std::cos(arc * t)).epsilon(1e-6));

            // Y(0) = 0, DY(0) = E0  ->  sin(arc t)/arc E(t)
            init.head(3) = Vec::Zero(3);
            init.tail(3) = E0;
            out = blk * init;
            const double s_coef = inner(path.metric(), xt, out.head(3), Et.col(0));
            CHECK(s_coef == doctest::Approx(std::sin(arc * t) / arc).epsilon(1e-6));
        }
    }
}

TEST_CASE("jacobi vs finite differences: variation of the exponential map") {
    std::vector<MetricPtr> metrics = {make_flat(box3()), make_sphere_cap(box3(), 1.0)};
    for (const auto& m : metrics) {
        const Vec p = v3(0.2, -0.1, 0.15);
        const Vec v = v3(0.9, 0.4, -0.3);
        const auto path = shoot(m, p, v, 1.0);
        const auto report = jacobi_propagate(path);
        const auto sens = endpoint_sensitivity(path, report.final_block(), 1.0);

        const double delta = 1e-6;
        for (int k = 0; k < 3; ++k) {
            Vec vp = v, vm = v;
            vp[k] += delta;
            vm[k] -= delta;
            const Vec fd = (shoot(m, p, vp, 1.0).end_point() -
                            shoot(m, p, vm, 1.0).end_point()) / (2 * delta);
            const Vec an = sens.dx_dv0.col(k);
            CHECK((fd - an).norm() <= 1e-4 * std::max(1.0, an.norm()));
        }
    }
}

TEST_CASE("conjugate points: flat has none, sphere arcs bracket pi") {
    const auto flat = make_flat(box3());
    const auto fpath = shoot(flat, v3(0, 0, 0), v3(2.5, 0.3, 0), 1.0);
    CHECK(conjugate_points(fpath, jacobi_propagate(fpath)).empty());

    const auto sphere = make_sphere_cap(box3(), 1.0);

    const auto short_path = sphere_path(sphere, 0.9 * std::numbers::pi);
    CHECK(conjugate_points(short_path, jacobi_propagate(short_path)).empty());

    const auto long_path = sphere_path(sphere, 1.1 * std::numbers::pi);
    const auto cps = conjugate_points(long_path, jacobi_propagate(long_path));
    REQUIRE(cps.size() == 1);
    CHECK(std::abs(cps[0].t - 1.0 / 1.1) <= 1e-6);
    CHECK(cps[0].multiplicity == 2);
}

TEST_CASE("jacobi report: block determinant at t = 0 is exactly one") {
    const auto sphere = make_sphere_cap(box3(), 1.0);
    const auto path = sphere_path(sphere, 1.0);
    const auto report = jacobi_propagate(path);
    CHECK(report.blocks.front().determinant() == 1.0);
}
