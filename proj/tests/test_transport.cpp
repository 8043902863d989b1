#include <cmath>
#include <numbers>

#include "support.hpp"

#include "gaugelab/transport.hpp"

using namespace gaugelab;
using std::numbers::pi;

namespace {
Vec v3(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
}
PathCurve latitude(double polar) {
    return PathCurve::from_function(
        [polar](double t) {
            return Point(v3(std::sin(polar) * std::cos(2 * pi * t), std::sin(polar) * std::sin(2 * pi * t),
                            std::cos(polar)));
        },
        2 * pi * std::sin(polar));
}
TransportConfig magnus() {
    TransportConfig cfg;
    cfg.order = Integrator::Magnus4;
    cfg.step = 0.01;
    return cfg;
}
}  // namespace

TEST_CASE("equator holonomy of the monopole is (-1)^k") {
    for (int k = -3; k <= 3; ++k) {
        const CMat h = holonomy(make_monopole(k), latitude(pi / 2), magnus()).matrix;
        CHECK(std::abs(h(0, 0) - cplx(k % 2 == 0 ? 1.0 : -1.0, 0)) < 1e-8);
    }
}

TEST_CASE("latitude holonomy encloses flux k/2 times the cap area") {
    const double polar = 0.7;
    const double cap = 2 * pi * (1 - std::cos(polar));
    const CMat h = holonomy(make_monopole(1), latitude(polar), magnus()).matrix;
    CHECK(std::abs(std::abs(std::arg(h(0, 0))) - cap / 2) < 1e-7);
}

TEST_CASE("flat circle holonomy is exp(-i theta)") {
    for (double theta : {0.0, 1.0, pi / 2, 3.0}) {
        const BundleAtlas b = make_flat_circle(2.0, theta);
        Point a(1), e(1);
        a << 0.0;
        e << 2.0;
        const CMat h = holonomy(b, PathCurve::line(a, e), magnus()).matrix;
        CHECK(std::abs(h(0, 0) - std::exp(cplx(0, -theta))) < 1e-10);
    }
}

TEST_CASE("reversed transport is the inverse") {
    const BundleAtlas b = perturb(make_trivial(Manifold::sphere(), 2), 5, 0.3);
    const PathCurve p = geodesic(b.base(), v3(1, 0, 0), v3(0, 0.6, 0.8));
    const HolonomyResult fwd = parallel_transport(b, p, magnus());
    const HolonomyResult back = parallel_transport(b, p.reversed(), magnus(), fwd.end_chart);
    CHECK((back.matrix * fwd.matrix - CMat::Identity(2, 2)).norm() < 1e-8);
    CHECK(unitarity_defect(fwd.matrix) < 1e-10);
}

TEST_CASE("abelian holonomy matches the enclosed flux") {
    const BundleAtlas b = perturb(make_monopole(1), 9, 0.3);
    const Manifold& s = b.base();
    const Point c = v3(0, 0, 1);
    const DiscHomotopy d = DiscHomotopy::lasso(s, s.exp(c, v3(0.6, 0.2, 0)), c, 32);
    const CMat flux = abelian_flux_holonomy(b, d, 24);
    const CMat h = holonomy(b, d.loop(), magnus()).matrix;
    CHECK(std::abs(h(0, 0) - flux(0, 0)) < 1e-6);
}

TEST_CASE("holonomy is bounded by area times curvature") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const BundleAtlas b = perturb(make_trivial(Manifold::sphere(), 2), seed, 0.4);
        const Point c = v3(0, 0, 1);
        const DiscHomotopy d = DiscHomotopy::lasso(b.base(), b.base().exp(c, v3(0.8, 0, 0)), c, 24);
        const AreaCheckReport r = holonomy_area_check(b, d, magnus());
        CHECK(r.pass);
        CHECK(r.holonomy_defect <= r.bound + r.slack);
    }
}

TEST_CASE("abelian sine identity is sharp for constant curvature") {
    const BundleAtlas b = make_constant_field_ball(2.0, 0.5);
    Point base(2), c(2);
    base << 1.0, 0.0;
    c << 0.0, 0.0;
    const DiscHomotopy d = DiscHomotopy::lasso(b.base(), base, c, 32);
    const SineCheckReport r = abelian_sine_check(b, d, magnus());
    CHECK(r.pass);
    CHECK(r.max_ratio == doctest::Approx(1.0).epsilon(1e-4));
}
