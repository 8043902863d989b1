#include <cmath>
#include <numbers>

#include "support.hpp"

#include "gaugelab/coulomb.hpp"

using namespace gaugelab;
using std::numbers::pi;

namespace {
const DecOperators& level2() {
    static const DecOperators ops = dec_operators(triangulate(Manifold::sphere(), 2));
    return ops;
}
MatrixCochain random_cochain(const DecOperators& ops, int degree, int m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto& k = *ops.mesh;
    const int n = degree == 0 ? static_cast<int>(k.vertices.size())
                              : degree == 1 ? static_cast<int>(k.edges.size()) : static_cast<int>(k.faces.size());
    MatrixCochain c = MatrixCochain::zeros(degree, m, n);
    for (auto& v : c.values) v = testing::random_skew(rng, m, 0.1);
    return c;
}
double inner(const MatrixCochain& a, const MatrixCochain& b, const Vec& w) {
    double s = 0;
    for (int i = 0; i < a.size(); ++i) s += w(i) * (a.values[i].adjoint() * b.values[i]).trace().real();
    return s;
}
}  // namespace

TEST_CASE("d squared vanishes") {
    const auto& ops = level2();
    const MatrixCochain f = random_cochain(ops, 0, 2, 1);
    CHECK(exterior_d(ops, exterior_d(ops, f)).max_norm() < 1e-14);
}

TEST_CASE("codifferential is the adjoint of d") {
    const auto& ops = level2();
    const MatrixCochain f = random_cochain(ops, 0, 2, 2);
    const MatrixCochain a = random_cochain(ops, 1, 2, 3);
    const double lhs = inner(exterior_d(ops, f), a, ops.star1);
    const double rhs = inner(f, codifferential(ops, a), ops.star0);
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(lhs)));
}

TEST_CASE("discrete areas sum to the sphere area") {
    const auto& ops = level2();
    CHECK(ops.face_area.sum() == doctest::Approx(4 * pi).epsilon(1e-12));
    CHECK(ops.star0.sum() == doctest::Approx(4 * pi).epsilon(1e-12));
}

TEST_CASE("first Laplacian eigenvalue of the unit sphere is close to 2") {
    const DecOperators ops = dec_operators(triangulate(Manifold::sphere(), 3));
    CHECK(laplacian_first_eigenvalue(ops) == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("lambda estimate") {
    const DecOperators ops = dec_operators(triangulate(Manifold::sphere(), 3));
    const LambdaEstimate l = lambda_estimate(ops);
    CHECK(l.value == doctest::Approx(1.0).epsilon(0.01));
    const DecOperators big = dec_operators(triangulate(Manifold::sphere(2.0), 3));
    CHECK(lambda_estimate(big).value == doctest::Approx(2 * l.value).epsilon(1e-9));
    CHECK_ERROR(NonzeroFirstCohomology, lambda_estimate(dec_operators(triangulate(Manifold::torus(1, 1), 1))));
}

TEST_CASE("lambda dominates the ratio of every coclosed cochain") {
    const auto& ops = level2();
    const LambdaEstimate l = lambda_estimate(ops);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const MatrixCochain a = coulomb_project_abelian(ops, random_cochain(ops, 1, 1, seed)).a;
        const double ratio = cochain_comass(ops, a) / cochain_comass(ops, exterior_d(ops, a));
        CHECK(ratio <= l.value * (1 + 1e-9));
    }
}

TEST_CASE("abelian projection is exact and idempotent") {
    const auto& ops = level2();
    const MatrixCochain a = random_cochain(ops, 1, 1, 4);
    const CoulombResult r = coulomb_project_abelian(ops, a);
    CHECK(r.residual < 1e-10);
    CHECK((exterior_d(ops, r.a) - exterior_d(ops, a)).max_norm() < 1e-12);
    const CoulombResult again = coulomb_project_abelian(ops, r.a);
    CHECK((again.a - r.a).max_norm() < 1e-10);
    const CoulombResult nl = coulomb_project(ops, a);
    CHECK((nl.a - r.a).max_norm() < 1e-9);
}

TEST_CASE("nonabelian projection converges and is idempotent") {
    const auto& ops = level2();
    const MatrixCochain a = random_cochain(ops, 1, 2, 5) * 0.5;
    const CoulombResult r = coulomb_project(ops, a);
    CHECK(r.residual < 1e-10);
    const CoulombResult again = coulomb_project(ops, r.a);
    CHECK(again.iterations <= 1);
    CHECK((again.a - r.a).max_norm() < 1e-9);
    CoulombConfig gated;
    gated.gate = 1e-6;
    CHECK_ERROR(NewtonDiverged, coulomb_project(ops, a, gated));
}

TEST_CASE("plaquette curvature is gauge covariant") {
    const auto& ops = level2();
    const MatrixCochain a = random_cochain(ops, 1, 2, 6);
    std::mt19937_64 rng(7);
    std::vector<CMat> g;
    for (size_t i = 0; i < ops.mesh->vertices.size(); ++i) g.push_back(testing::random_unitary(rng, 2));
    const MatrixCochain f = plaquette_curvature(ops, a);
    const MatrixCochain fg = plaquette_curvature(ops, gauge_action(ops, a, g));
    double worst = 0;
    for (int i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(op_norm(f.values[i]) - op_norm(fg.values[i])));
    CHECK(worst < 1e-12);
}

TEST_CASE("wedge is antisymmetric and vanishes for abelian forms") {
    const auto& ops = level2();
    const MatrixCochain a = random_cochain(ops, 1, 1, 8), b = random_cochain(ops, 1, 1, 9);
    CHECK(wedge(ops, a, a).max_norm() < 1e-15);
    const MatrixCochain ab = wedge(ops, a, b), ba = wedge(ops, b, a);
    CHECK((ab + ba).max_norm() < 1e-15);
}

TEST_CASE("coclosed bound on scaled smooth samples") {
    const DecOperators ops = dec_operators(triangulate(Manifold::sphere(), 3));
    const LambdaEstimate l = lambda_estimate(ops);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const MatrixCochain a = random_coclosed(ops, 2, seed, 1e-3);
        CHECK(coclosed_residual(ops, a) < 1e-10);
        CHECK(cochain_comass(ops, a) == doctest::Approx(1e-3).epsilon(1e-9));
        const CoclosedBoundReport r = coclosed_bound_check(ops, a, l);
        CHECK(r.hypothesis_met);
        CHECK(r.pass);
    }
}

TEST_CASE("torus has harmonic one-forms") {
    CHECK(harmonic_dimension(triangulate(Manifold::torus(1, 1), 0)) == 2);
    CHECK(harmonic_dimension(triangulate(Manifold::sphere(), 0)) == 0);
}

TEST_CASE("projections from different starts agree up to a constant unitary") {
    const auto& ops = level2();
    const MatrixCochain a = random_cochain(ops, 1, 2, 10) * 0.5;
    const CoulombResult r1 = coulomb_project(ops, a);
    CoulombConfig cfg;
    cfg.start = random_cochain(ops, 0, 2, 11) * 2.0;
    const CoulombResult r2 = coulomb_project(ops, a, cfg);
    REQUIRE(r2.residual < 1e-10);
    // conjugation invariants: per-edge norms and pairwise traces
    double worst = 0;
    for (int e = 0; e < r1.a.size(); ++e) {
        worst = std::max(worst, std::abs(op_norm(r1.a.values[e]) - op_norm(r2.a.values[e])));
        const int f = (e * 7 + 3) % r1.a.size();
        const cplx t1 = (r1.a.values[e] * r1.a.values[f]).trace();
        const cplx t2 = (r2.a.values[e] * r2.a.values[f]).trace();
        worst = std::max(worst, std::abs(t1 - t2));
    }
    CHECK(worst < 1e-6);
}
