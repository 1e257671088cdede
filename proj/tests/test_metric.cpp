#include <doctest.h>

#include <geodex/errors.hpp>
#include <geodex/metric.hpp>
#include <geodex/smooth_bump.hpp>

#include "support/fd_oracle.hpp"

#include <cmath>

using namespace geodex;

namespace {

Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

ChartDomain box3() { return ChartDomain::box(v3(-5, -5, -5), v3(5, 5, 5)); }

std::vector<MetricPtr> builtin_families() {
    std::vector<MetricPtr> fams;
    fams.push_back(make_flat(box3()));
    fams.push_back(std::make_shared<ConstantDiagonalMetric>(ChartDomain::unit_disc(3), v3(1, 2, 4)));
    fams.push_back(make_sphere_cap(box3(), 1.0));
    fams.push_back(std::make_shared<ConformalMetric>(
        ChartDomain::unit_disc(3),
        std::make_shared<RadialBumpProfile>(ChartDomain::unit_disc(3), v3(0, 0, 0), 0.8, 0.3), 0.5));
    const auto torus = ChartDomain::torus(v3(1, 1, 1));
    fams.push_back(std::make_shared<ConformalMetric>(
        torus, std::make_shared<PeriodicBumpProfile>(torus, std::vector<int>{1, 2, 0}, 0.1), 0.3));
    return fams;
}

} // namespace

TEST_CASE("smooth bump profile: plateau structure and derivative jets") {
    CHECK(plateau_profile(0.0).f == 1.0);
    CHECK(plateau_profile(0.5).f == 1.0);
    CHECK(plateau_profile(1.0).f == 0.0);
    CHECK(plateau_profile(2.0).f == 0.0);
    CHECK(plateau_profile(0.3).d1 == 0.0);

    // derivative jets against central differences
    const double h = 1e-6;
    for (double r : {0.55, 0.6, 0.7, 0.75, 0.82, 0.9, 0.97}) {
        const BumpJet j = plateau_profile(r);
        const BumpJet jp = plateau_profile(r + h);
        const BumpJet jm = plateau_profile(r - h);
        CHECK(j.d1 == doctest::Approx((jp.f - jm.f) / (2 * h)).epsilon(1e-5));
        CHECK(j.d2 == doctest::Approx((jp.d1 - jm.d1) / (2 * h)).epsilon(1e-5));
        CHECK(j.d3 == doctest::Approx((jp.d2 - jm.d2) / (2 * h)).epsilon(1e-4));
    }
    // monotone decreasing across the transition
    double prev = 1.0;
    for (double r = 0.5; r <= 1.0; r += 0.01) {
        const double f = plateau_profile(r).f;
        CHECK(f <= prev + 1e-15);
        prev = f;
    }
}

TEST_CASE("christoffel: vanishes for constant metrics") {
    const auto flat = make_flat(box3());
    const auto diag = std::make_shared<ConstantDiagonalMetric>(box3(), v3(2, 3, 5));
    for (const Vec& x : {v3(0, 0, 0), v3(0.1, 0.2, 0.3)}) {
        for (const auto& g : christoffel(*flat, x)) CHECK(g.cwiseAbs().maxCoeff() == 0.0);
        for (const auto& g : christoffel(*diag, x)) CHECK(g.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("christoffel: stereographic sphere closed form and FD agreement") {
    const auto sphere = make_sphere_cap(box3(), 1.0);
    const Vec x = v3(0.5, 0, 0);
    const auto gamma = christoffel(*sphere, x);
    // conformal factor phi = log(2/(1+|x|^2)): Gamma^1_11 = d_1 phi = -0.8
    CHECK(gamma[0](0, 0) == doctest::Approx(-0.8).epsilon(1e-12));

    const auto gamma_fd = testing::fd_christoffel(*sphere, x);
    for (int k = 0; k < 3; ++k)
        CHECK((gamma[k] - gamma_fd[k]).cwiseAbs().maxCoeff() < 1e-5);

    // symmetry in the lower indices is structural
    for (int k = 0; k < 3; ++k)
        CHECK((gamma[k] - gamma[k].transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("curvature term: flat zero, sphere identity, antisymmetry slot") {
    const auto flat = make_flat(box3());
    const Vec x = v3(0.2, -0.1, 0.4);
    CHECK(curvature_term(*flat, x, v3(1, 2, 3), v3(0.5, -1, 2)).norm() == 0.0);

    const auto sphere = make_sphere_cap(box3(), 1.0);
    // g-orthonormal pair at x: coordinate directions scaled by e^{-phi}
    const double scale = 1.0 / std::sqrt(sphere->components(x)(0, 0));
    const Vec v = scale * v3(0, 0, 1);
    const Vec Y = scale * v3(0, 1, 0);
    CHECK((curvature_term(*sphere, x, Y, v) - Y).norm() < 1e-6);

    // R(v,v)v = 0
    for (const auto& m : builtin_families()) {
        const Vec p = m->domain().kind() == DomainKind::UnitDisc ? v3(0.2, 0.1, -0.3) : x;
        const Vec w = v3(0.7, -0.2, 0.5);
        CHECK(curvature_term(*m, p, w, w).norm() < 1e-8);
    }
}

TEST_CASE("curvature term: finite-difference oracle across families") {
    const Vec Y = v3(0.3, -1.1, 0.7);
    const Vec v = v3(1.0, 0.4, -0.6);
    for (const auto& m : builtin_families()) {
        const Vec x = m->domain().kind() == DomainKind::UnitDisc ? v3(0.25, -0.15, 0.3)
                                                                 : v3(0.4, 0.3, 0.6);
        const Vec analytic = curvature_term(*m, x, Y, v);
        const Vec fd = testing::fd_curvature_term(*m, x, Y, v);
        CHECK((analytic - fd).norm() < 1e-5 * std::max(1.0, analytic.norm()));
    }
}

TEST_CASE("positive definiteness at 1e4 probes for every built-in family") {
    unsigned seed = 7u;
    for (const auto& m : builtin_families()) {
        CHECK(min_metric_eigenvalue(*m, 10000, seed++) > 0.0);
    }
}

TEST_CASE("derivative consistency: analytic first derivatives vs central differences") {
    unsigned seed = 11u;
    for (const auto& m : builtin_families()) {
        CHECK(derivative_consistency(*m, 200, seed++) < 1e-5);
    }
}

TEST_CASE("second derivatives consistent with differences of first derivatives") {
    unsigned seed = 13u;
    for (const auto& m : builtin_families()) {
        const double h = 1e-5 * m->domain().scale();
        double worst = 0.0;
        for (const Vec& x : probe_points(m->domain(), 50, seed++)) {
            if (m->domain().kind() != DomainKind::Torus && !m->domain().contains(x, -2 * h))
                continue;
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    Vec xp = x, xm = x;
                    xp[l] += h;
                    xm[l] -= h;
                    const Mat fd = (m->d_components(xp, k) - m->d_components(xm, k)) / (2 * h);
                    const Mat an = m->dd_components(x, k, l);
                    worst = std::max(worst, (fd - an).cwiseAbs().maxCoeff());
                }
        }
        CHECK(worst < 2e-4); // second-derivative FD noise floor is larger
    }
}

TEST_CASE("torus: pointwise quantities invariant under adding one period") {
    const auto torus = ChartDomain::torus(v3(1, 1, 1));
    const auto m = std::make_shared<ConformalMetric>(
        torus, std::make_shared<PeriodicBumpProfile>(torus, std::vector<int>{1, 2, 1}, 0.15), 0.3);
    const auto bump = std::make_shared<ConformalMetric>(
        torus, std::make_shared<RadialBumpProfile>(torus, v3(0.5, 0.5, 0.5), 0.3, 0.2), 0.3);

    for (const auto& metric : {m, bump}) {
        for (const Vec& x : probe_points(torus, 100, 17u)) {
            for (int axis = 0; axis < 3; ++axis) {
                Vec y = x;
                y[axis] += torus.periods()[axis];
                CHECK((metric->components(x) - metric->components(y)).cwiseAbs().maxCoeff() < 1e-12);
                for (int k = 0; k < 3; ++k)
                    CHECK((metric->d_components(x, k) - metric->d_components(y, k))
                              .cwiseAbs()
                              .maxCoeff() < 1e-12);
            }
        }
    }
}

TEST_CASE("frame complement: g-orthonormal and orthogonal to the anchor") {
    const auto m = std::make_shared<ConstantDiagonalMetric>(box3(), v3(1, 2, 4));
    const Vec x = v3(0.3, -0.2, 0.1);
    const Vec anchor = v3(1, 1, 0);
    const auto frame = frame_complement(*m, x, anchor, anchor);
    REQUIRE(frame.size() == 2);
    for (size_t a = 0; a < frame.size(); ++a) {
        CHECK(inner(*m, x, frame[a], anchor) == doctest::Approx(0.0).epsilon(1e-12));
        for (size_t b = 0; b < frame.size(); ++b)
            CHECK(inner(*m, x, frame[a], frame[b]) ==
                  doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12));
    }
}

TEST_CASE("validation errors: non-positive-definite metric and bad domains") {
    CHECK_THROWS_AS(ChartDomain::box(v3(1, 0, 0), v3(0, 1, 1)), ValidationError);
    CHECK_THROWS_AS(ChartDomain::torus(v3(1, -1, 1)), ValidationError);
    CHECK_THROWS_AS(ConstantDiagonalMetric(box3(), v3(1, -2, 4)), ValidationError);
}
