#include <doctest.h>

#include <geodex/boundary.hpp>
#include <geodex/errors.hpp>

#include <cmath>

using namespace geodex;

namespace {

Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

// Second-fundamental-form oracle: covariant acceleration of a boundary curve
// through x with initial velocity v, paired with the inward normal.
double second_form_oracle(const MetricField& m, const Vec& x, const Vec& v, const Vec& nu_in) {
    const double h = 1e-4;
    const auto curve = [&](double s) {
        const Vec y = x + s * v;
        return (y / y.norm()).eval();
    };
    const Vec acc_chart = (curve(h) - 2.0 * curve(0.0) + curve(-h)) / (h * h);
    const auto gamma = christoffel(m, x);
    Vec acc_cov = acc_chart;
    for (int k = 0; k < m.dimension(); ++k) acc_cov[k] += v.dot(gamma[k] * v);
    return inner(m, x, acc_cov, nu_in);
}

} // namespace

TEST_CASE("boundary geometry: flat disc") {
    const auto flat = make_flat(ChartDomain::unit_disc(3));

    const auto bg = boundary_geometry(*flat, v3(1, 0, 0));
    CHECK((bg.inward_normal - v3(-1, 0, 0)).norm() < 1e-12);
    REQUIRE(bg.principal_curvatures.size() == 2);
    CHECK(bg.principal_curvatures[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(bg.principal_curvatures[1] == doctest::Approx(1.0).epsilon(1e-10));

    // same by rotational symmetry
    const auto bg2 = boundary_geometry(*flat, v3(0, 0, 1));
    CHECK(bg2.principal_curvatures[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(bg2.principal_curvatures[1] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("boundary geometry: invariants of normal and frame") {
    const auto m = std::make_shared<ConstantDiagonalMetric>(ChartDomain::unit_disc(3), v3(1, 2, 4));
    for (const Vec& x :
         {v3(1, 0, 0), v3(0, 1, 0), v3(0, 0, 1),
          v3(1 / std::sqrt(3.0), 1 / std::sqrt(3.0), -1 / std::sqrt(3.0))}) {
        const auto bg = boundary_geometry(*m, x);
        CHECK(inner(*m, x, bg.inward_normal, bg.inward_normal) == doctest::Approx(1.0).epsilon(1e-10));
        for (const Vec& t : bg.tangent_frame) {
            CHECK(std::abs(inner(*m, x, bg.inward_normal, t)) < 1e-10);
            CHECK(std::abs(t.dot(x)) < 1e-10); // frame lies in the geometric tangent space
        }
        CHECK((bg.shape_operator - bg.shape_operator.transpose()).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("boundary geometry: constant diagonal against the curve-acceleration oracle") {
    const auto m = std::make_shared<ConstantDiagonalMetric>(ChartDomain::unit_disc(3), v3(1, 2, 4));
    const Vec x = v3(1, 0, 0);
    const auto bg = boundary_geometry(*m, x);
    CHECK((bg.inward_normal - v3(-1, 0, 0)).norm() < 1e-12); // already g-unit since a_1 = 1
    CHECK(bg.principal_curvatures.minCoeff() > 0.0);

    // closed-form eigenvalues for diag(1,2,4) at (1,0,0)
    CHECK(bg.principal_curvatures[0] == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(bg.principal_curvatures[1] == doctest::Approx(0.5).epsilon(1e-8));

    // quadratic form agreement with the oracle on frame vectors and a mix
    for (int a = 0; a < 2; ++a) {
        const Vec t = bg.tangent_frame[a];
        const double form = t.dot(m->components(x) * (bg.shape_operator(a, a) * t));
        (void)form;
        const double s_aa = bg.shape_operator(a, a);
        CHECK(s_aa == doctest::Approx(second_form_oracle(*m, x, t, bg.inward_normal)).epsilon(1e-5));
    }
    const Vec mix = (bg.tangent_frame[0] + bg.tangent_frame[1]).eval();
    const double s_mix = bg.shape_operator(0, 0) + 2 * bg.shape_operator(0, 1) +
                         bg.shape_operator(1, 1);
    CHECK(s_mix == doctest::Approx(second_form_oracle(*m, x, mix, bg.inward_normal)).epsilon(1e-5));
}

TEST_CASE("boundary geometry: sphere caps of different curvature") {
    // conformal factor 2/(1+k r^2): boundary curvature (1-k)/2 in the cap metric
    for (double k : {0.0, 0.5, 1.0}) {
        const auto cap = make_sphere_cap(ChartDomain::unit_disc(3), k);
        const auto bg = boundary_geometry(*cap, v3(0, 1, 0));
        const double expected = 0.5 * (1.0 - k);
        CHECK(bg.principal_curvatures[0] == doctest::Approx(expected).epsilon(1e-7));
        CHECK(bg.principal_curvatures[1] == doctest::Approx(expected).epsilon(1e-7));
        const Vec t = bg.tangent_frame[0];
        CHECK(bg.shape_operator(0, 0) ==
              doctest::Approx(second_form_oracle(*cap, bg.point, t, bg.inward_normal)).epsilon(1e-4));
    }
}

TEST_CASE("is_strictly_convex: flat disc and constant diagonal") {
    const auto flat = make_flat(ChartDomain::unit_disc(3));
    const auto rep = is_strictly_convex(*flat, 100);
    CHECK(rep.strictly_convex);
    CHECK(rep.min_kappa == doctest::Approx(1.0).epsilon(1e-6));

    const auto m = std::make_shared<ConstantDiagonalMetric>(ChartDomain::unit_disc(3), v3(1, 2, 4));
    CHECK(is_strictly_convex(*m, 200).strictly_convex);
}

TEST_CASE("is_strictly_convex: inward dimple flips a curvature sign") {
    // Conformal factor dropping steeply toward the boundary patch around
    // (1,0,0); the boundary becomes concave there.
    const auto domain = ChartDomain::unit_disc(3);
    const auto dimple = std::make_shared<ConformalMetric>(
        domain, std::make_shared<RadialBumpProfile>(domain, v3(0.75, 0, 0), 0.4, 0.5), 0.2);
    const auto rep = is_strictly_convex(*dimple, 2000);
    CHECK_FALSE(rep.strictly_convex);
    CHECK(rep.min_kappa < 0.0);
}

TEST_CASE("boundary geometry: off-boundary point is a domain error") {
    const auto flat = make_flat(ChartDomain::unit_disc(3));
    CHECK_THROWS_AS(boundary_geometry(*flat, v3(0.5, 0, 0)), ValidationError);
}
