#include <cmath>
#include <numbers>
#include <sstream>

#include "support.hpp"

#include "gaugelab/geometry.hpp"
#include "gaugelab/mesh.hpp"

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

TEST_CASE("sphere geodesic between orthogonal points") {
    const Manifold s = Manifold::sphere();
    const PathCurve g = geodesic(s, v3(1, 0, 0), v3(0, 1, 0));
    CHECK(g.length() == doctest::Approx(pi / 2).epsilon(1e-12));
    CHECK((g.end() - v3(0, 1, 0)).norm() < 1e-12);
    const Point mid = g.segments()[0].pos(0.5);
    CHECK((mid - v3(1, 1, 0) / std::sqrt(2.0)).norm() < 1e-12);
    CHECK(s.distance(v3(0, 0, 1), v3(0, 0, -1)) == doctest::Approx(pi));
    CHECK_ERROR(NonUniqueGeodesic, geodesic(s, v3(0, 0, 1), v3(0, 0, -1)));
}

TEST_CASE("sphere_arc reaches the antipode") {
    const Manifold s = Manifold::sphere();
    const PathCurve a = sphere_arc(s, v3(0, 0, 1), v3(0, 0, -1), v3(1, 0, 0));
    CHECK(a.length() == doctest::Approx(pi));
    CHECK((a.segments()[0].pos(0.5) - v3(1, 0, 0)).norm() < 1e-12);
}

TEST_CASE("torus geodesics use the nearest lift") {
    const Manifold t = Manifold::torus(1.0, 1.0);
    const PathCurve g = geodesic(t, v2(0.1, 0.1), v2(0.9, 0.1));
    CHECK(g.length() == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(t.distance(v2(0.05, 0.05), v2(0.95, 0.95)) == doctest::Approx(0.1 * std::sqrt(2.0)));
    CHECK_ERROR(NonUniqueGeodesic, geodesic(t, v2(0, 0), v2(0.5, 0)));
}

TEST_CASE("triangle areas") {
    const Manifold b = Manifold::ball(2, 5.0);
    CHECK(triangle_area(b, v2(0, 0), v2(1, 0), v2(0, 1)).area == doctest::Approx(0.5));
    const TriangleArea flat = triangle_area(b, v2(0, 0), v2(1, 0), v2(2, 0));
    CHECK(flat.area == doctest::Approx(0.0));
    const Manifold s = Manifold::sphere();
    CHECK(triangle_area(s, v3(1, 0, 0), v3(0, 1, 0), v3(0, 0, 1)).area == doctest::Approx(pi / 2).epsilon(1e-12));
    const Manifold s2 = Manifold::sphere(2.0);
    CHECK(triangle_area(s2, v3(2, 0, 0), v3(0, 2, 0), v3(0, 0, 2)).area == doctest::Approx(2 * pi).epsilon(1e-12));
}

TEST_CASE("injectivity radii") {
    CHECK(injectivity_radius(Manifold::sphere(1.5)) == doctest::Approx(1.5 * pi));
    CHECK(injectivity_radius(Manifold::torus(1.0, 3.0)) == doctest::Approx(0.5));
    CHECK(injectivity_radius(Manifold::circle(4.0)) == doctest::Approx(2.0));
    CHECK(injectivity_radius(Manifold::product(Manifold::sphere(), 1.0)) == doctest::Approx(0.5));
}

TEST_CASE("sample counts and frames") {
    CHECK(sample_frames(Manifold::sphere(), 1).size() == 12);
    CHECK(sample_frames(Manifold::sphere(), 3).size() == 162);
    CHECK(sample_frames(Manifold::torus(1, 1), 2).size() == 256);
    for (const auto& fp : sample_frames(Manifold::sphere(2.0), 2)) {
        CHECK(std::abs(fp.x.norm() - 2.0) < 1e-12);
        CHECK((fp.frame.transpose() * fp.frame - Mat::Identity(2, 2)).norm() < 1e-12);
        CHECK((fp.frame.transpose() * fp.x).norm() < 1e-12);
    }
}

TEST_CASE("triangulations have the right Euler characteristic") {
    for (int level = 0; level <= 3; ++level) {
        const auto k = triangulate(Manifold::sphere(), level);
        CHECK(k.euler_characteristic() == 2);
        validate_complex(k);
    }
    for (int level = 0; level <= 2; ++level) {
        const auto k = triangulate(Manifold::torus(1.0, 2.0), level);
        CHECK(k.euler_characteristic() == 0);
        validate_complex(k);
    }
    CHECK_ERROR(UnsupportedGeometry, triangulate(Manifold::ball(2, 1.0), 1));
}

TEST_CASE("sphere distances satisfy the triangle inequality") {
    const Manifold s = Manifold::sphere();
    const auto pts = sample_frames(s, 2);
    for (size_t i = 0; i < pts.size(); i += 3)
        for (size_t j = 1; j < pts.size(); j += 5)
            for (size_t k = 2; k < pts.size(); k += 7) {
                const double dij = s.distance(pts[i].x, pts[j].x);
                CHECK(dij <= s.distance(pts[i].x, pts[k].x) + s.distance(pts[k].x, pts[j].x) + 1e-12);
            }
}

TEST_CASE("exp follows the geodesic") {
    const Manifold s = Manifold::sphere();
    const Point p = v3(0, 0, 1);
    const Point q = s.exp(p, v3(pi / 3, 0, 0));
    CHECK((q - v3(std::sin(pi / 3), 0, std::cos(pi / 3))).norm() < 1e-12);
    CHECK(s.distance(p, q) == doctest::Approx(pi / 3));
}

TEST_CASE("OFF round trip") {
    const auto k = triangulate(Manifold::sphere(), 1);
    std::stringstream ss;
    write_off(ss, k);
    const auto r = read_off(ss, Manifold::sphere());
    REQUIRE(r.vertices.size() == k.vertices.size());
    REQUIRE(r.faces.size() == k.faces.size());
    for (size_t i = 0; i < k.vertices.size(); ++i) CHECK((r.vertices[i] - k.vertices[i]).norm() < 1e-12);
    CHECK(r.faces == k.faces);
}

TEST_CASE("manifold JSON round trip") {
    for (const Manifold& m : {Manifold::sphere(2.0), Manifold::torus(1.0, 2.0), Manifold::ball(3, 0.5),
                              Manifold::circle(3.0), Manifold::product(Manifold::sphere(), 2.0)})
        CHECK(Manifold::from_json(m.to_json()) == m);
}

TEST_CASE("lasso disc bounds the geodesic circle") {
    const Manifold s = Manifold::sphere();
    const Point c = v3(0, 0, 1);
    const Point base = s.exp(c, v3(0.5, 0, 0));
    const DiscHomotopy d = DiscHomotopy::lasso(s, base, c, 48);
    CHECK(d.boundary_defect() < 1e-9);
    CHECK(d.area() == doctest::Approx(2 * pi * (1 - std::cos(0.5))).epsilon(1e-2));
    const Manifold b = Manifold::ball(2, 2.0);
    const DiscHomotopy e = DiscHomotopy::lasso(b, v2(1, 0), v2(0, 0), 48);
    CHECK(e.area() == doctest::Approx(pi).epsilon(1e-2));
}
