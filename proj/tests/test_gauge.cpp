#include <cmath>
#include <numbers>

#include "support.hpp"

#include "gaugelab/gauge.hpp"

using namespace gaugelab;
using std::numbers::pi;

namespace {
Vec v3(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
}
Vec v2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}
}  // namespace

TEST_CASE("gauge constants") {
    CHECK(exponential_gauge_constant(Manifold::ball(2, 3.0), 1.0) == doctest::Approx(0.5));
    CHECK(exponential_gauge_constant(Manifold::sphere(), 1.0) == doctest::Approx(std::tan(0.5)));
    CHECK(exponential_gauge_constant(Manifold::sphere(2.0), 1.0) == doctest::Approx(2 * std::tan(0.25)));
}

TEST_CASE("cutoff ramp is monotone with bounded slope") {
    const CutoffRamp c(1.0, 2.0, 0.05);
    CHECK(c(0.5) == 0.0);
    CHECK(c(1.0) == 0.0);
    CHECK(c(2.0) == 1.0);
    CHECK(c(2.5) == 1.0);
    double prev = 0;
    for (int i = 0; i <= 1000; ++i) {
        const double x = 1.0 + i / 1000.0;
        CHECK(c(x) >= prev - 1e-15);
        prev = c(x);
        CHECK(c.derivative(x) <= 1.0 + 0.05 + 1e-12);
    }
    CHECK_ERROR(PlanProfileInvalid, CutoffRamp(2.0, 1.0, 0.05));
}

TEST_CASE("exponential gauge saturates on the monopole") {
    const BundleAtlas b = make_monopole(1);
    const Point n = v3(0, 0, 1);
    const GaugeTrivialization g = exponential_gauge(b, n, 1.0);
    REQUIRE(g.certificate);
    CHECK(g.certificate->holds());
    CHECK(g.achieved.value == doctest::Approx(0.5 * std::tan(0.5)).epsilon(1e-3));
    const BundleAtlas gauged = apply_gauge(b, g);
    // radial components vanish
    for (double rho : {0.2, 0.5, 0.9})
        for (int j = 0; j < 6; ++j) {
            const Vec dir = v3(std::cos(j), std::sin(j), 0);
            const Point p = b.base().exp(n, rho * dir);
            const Vec radial = b.base().project_tangent(p, p - n).normalized();
            CHECK(op_norm(gauged.form(p, radial)) < 1e-6);
        }
}

TEST_CASE("exponential gauge on a constant-field ball") {
    const BundleAtlas b = make_constant_field_ball(2.0, 0.4);
    const GaugeTrivialization g = exponential_gauge(b, v2(0, 0), 1.0);
    REQUIRE(g.certificate);
    CHECK(g.certificate->holds());
    CHECK(g.achieved.value == doctest::Approx(0.4 * 0.5).epsilon(1e-3));
    CHECK_ERROR(RadiusTooLarge, exponential_gauge(b, v2(0.5, 0), 1.6));
    CHECK_ERROR(RadiusTooLarge, exponential_gauge(make_monopole(1), v3(0, 0, 1), pi));
}

TEST_CASE("apply_gauge preserves curvature comass and Chern number") {
    const BundleAtlas b = perturb(make_monopole(1), 4, 0.2);
    std::mt19937_64 rng(3);
    const CMat u = testing::random_unitary(rng, 1);
    const BundleAtlas c = apply_gauge(b, GaugeTrivialization::constant(b, u));
    CHECK(comass_norm(c).value == doctest::Approx(comass_norm(b).value).epsilon(1e-8));
    CHECK(std::abs(chern_number_c1(c) - chern_number_c1(b)) < 1e-8);
    CHECK(compatibility_defect(c) < 1e-7);
}

TEST_CASE("two-chart gluing refuses large curvature") {
    CHECK_ERROR(CurvatureTooLarge, sphere_two_chart_trivialize(make_monopole(1)));
}

TEST_CASE("two-chart gluing of a flat rank-2 bundle") {
    const BundleAtlas b = make_trivial(Manifold::sphere(), 2);
    SphereGluingConfig cfg;
    cfg.measure_resolution = 2;
    const SphereGluingResult r = sphere_two_chart_trivialize(b, cfg);
    CHECK(r.checks_pass);
    CHECK(r.gauge.achieved.value < 1e-8);
    CHECK(r.gluing_mismatch < 1e-10);
}

TEST_CASE("two-chart gluing of a small perturbation meets its bound") {
    const BundleAtlas b = perturb(make_trivial(Manifold::sphere(), 1), 2, 0.04);
    SphereGluingConfig cfg;
    cfg.measure_resolution = 2;
    cfg.curvature_resolution = 2;
    const SphereGluingResult r = sphere_two_chart_trivialize(b, cfg);
    CHECK(r.checks_pass);
    REQUIRE(r.gauge.certificate);
    CHECK(r.gauge.certificate->holds());
    CHECK(r.gauge.achieved.value <= 21 * std::sqrt(3.0) * r.curvature_comass);
}

TEST_CASE("flatten plan validation") {
    const Manifold s = Manifold::sphere();
    CHECK_ERROR(PlanProfileInvalid, make_flatten_plan(s, v3(0, 0, 1), 0.8));
    FlattenPlan p = make_flatten_plan(s, v3(0, 0, 1), 0.2);
    validate_plan(p);
    p.h = [](double) { return 0.5; };
    CHECK_ERROR(PlanProfileInvalid, validate_plan(p));
}

TEST_CASE("relative flatten needs a certified matching gauge") {
    const BundleAtlas b = make_monopole(1);
    const FlattenPlan p = make_flatten_plan(b.base(), v3(0, 0, 1), 0.2);
    CHECK_ERROR(GaugeNotCertified, relative_flatten(b, p, GaugeTrivialization::identity(b)));
    const BundleAtlas b2 = direct_sum(b, b);
    const GaugeTrivialization g1 = exponential_gauge(pullback(b, p.retraction), v3(0, 0, 1), 0.7);
    CHECK_ERROR(CoverageMismatch, relative_flatten(b2, p, g1));
}

TEST_CASE("relative flatten kills the form near the point") {
    const BundleAtlas b = make_monopole(1);
    const Point n = v3(0, 0, 1);
    const FlattenPlan p = make_flatten_plan(b.base(), n, 0.2);
    const BundleAtlas bp = pullback(b, p.retraction);
    const BundleAtlas out = relative_flatten(b, p, exponential_gauge(bp, n, 0.7));
    CHECK(gauged_form_comass_at(out, n) < 1e-9);
    CHECK(gauged_form_comass_at(out, b.base().exp(n, v3(0.15, 0, 0))) < 1e-9);
    CHECK(comass_norm(out).value <= p.constant * comass_norm(b).value);
    CHECK(std::abs(chern_number_c1(out) - 1) < 1e-3);
}
