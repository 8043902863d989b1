#include <cmath>
#include <numbers>

#include "support.hpp"

#include "gaugelab/bundle.hpp"

using namespace gaugelab;
using std::numbers::pi;

TEST_CASE("monopole curvature comass and Chern number") {
    for (int k = -3; k <= 3; ++k) {
        const BundleAtlas b = make_monopole(k);
        CHECK(comass_norm(b).value == doctest::Approx(std::abs(k) / 2.0).epsilon(1e-9));
        CHECK(std::lround(chern_number_c1(b)) == k);
        CHECK(std::abs(chern_number_c1(b) - k) < 1e-6);
        CHECK(compatibility_defect(b) < 1e-8);
    }
    const BundleAtlas b2 = make_monopole(2, 2.0);
    CHECK(comass_norm(b2).value == doctest::Approx(2.0 / 8.0).epsilon(1e-9));
}

TEST_CASE("torus line bundle has constant curvature 2 pi c / area") {
    const BundleAtlas b = make_torus_line(1.0, 2.0, 3);
    CHECK(comass_norm(b).value == doctest::Approx(2 * pi * 3 / 2.0).epsilon(1e-9));
    CHECK(std::abs(chern_number_c1(b) - 3) < 1e-6);
    CHECK(compatibility_defect(b) < 1e-8);
}

TEST_CASE("Chern-Weil bound |c1| <= comass * area / 2 pi") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const BundleAtlas b = perturb(make_monopole(1), seed, 0.3);
        const double c1 = chern_number_c1(b);
        CHECK(std::abs(c1 - 1) < 1e-3);
        CHECK(std::abs(c1) <= comass_norm(b).value * 4 * pi / (2 * pi) + 1e-6);
    }
}

TEST_CASE("perturbation keeps the topology and hits its target size") {
    const BundleAtlas base = make_trivial(Manifold::sphere(), 2);
    const BundleAtlas b = perturb(base, 7, 0.2);
    CHECK(b.rank() == 2);
    CHECK(comass_norm(b, ComassMode::Full, 3).value == doctest::Approx(0.95 * 0.2).epsilon(0.1));
    CHECK(compatibility_defect(b) < 1e-7);
    const BundleAtlas again = perturb(base, 7, 0.2);
    Vec v(3);
    v << 0.3, 0.1, 0;
    Point p(3);
    p << 0, 0, 1;
    CHECK((b.form(p, v) - again.form(p, v)).norm() == 0.0);
}

TEST_CASE("direct sum adds ranks and Chern numbers") {
    const BundleAtlas s = direct_sum(make_monopole(1), make_monopole(-2));
    CHECK(s.rank() == 2);
    CHECK(std::abs(chern_number_c1(s) + 1) < 1e-6);
    CHECK(comass_norm(s).value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cocycle_defect(s) < 1e-10);
}

TEST_CASE("pullback along a torus cover multiplies degree and keeps comass") {
    const BundleAtlas b = make_torus_line(1.0, 1.0, 1);
    const BundleAtlas up = pullback(b, map_torus_cover(1.0, 1.0, 2));
    CHECK(std::abs(chern_number_c1(up) - 4) < 1e-6);
    CHECK(comass_norm(up).value == doctest::Approx(comass_norm(b).value).epsilon(1e-9));
}

TEST_CASE("pushforward along a circle cover") {
    const BundleAtlas up = make_flat_circle(2.0, 0.4);
    const BundleAtlas down = pushforward_cover(up, map_circle_cover(1.0, 2));
    CHECK(down.rank() == 2);
    CHECK(compatibility_defect(down) < 1e-8);
}

TEST_CASE("bundle JSON round trip reproduces the connection") {
    const BundleAtlas b = perturb(make_monopole(1), 3, 0.2);
    const BundleAtlas r = bundle_from_json(nlohmann::json::parse(bundle_to_json(b).dump()));
    CHECK(r.rank() == b.rank());
    CHECK(r.chart_count() == b.chart_count());
    for (const auto& fp : sample_frames(Manifold::sphere(), 2)) {
        const Vec v = fp.frame.col(0);
        CHECK((r.form(fp.x, v) - b.form(fp.x, v)).norm() < 1e-14);
    }
}

TEST_CASE("rank must be positive") {
    CHECK(testing::error_kind([] { make_trivial(Manifold::sphere(), 0); }).has_value());
}
