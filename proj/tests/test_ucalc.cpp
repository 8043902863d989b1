#include <cmath>
#include <numbers>

#include "support.hpp"

using namespace gaugelab;
using std::numbers::pi;

TEST_CASE("op_norm basic values") {
    CHECK(op_norm(CMat::Zero(3, 3)) == 0.0);
    CMat d = CMat::Zero(2, 2);
    d(0, 0) = {0, 0.5};
    d(1, 1) = {0, -0.5};
    CHECK(op_norm(d) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("op_norm agrees with power iteration on random matrices") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 20; ++trial) {
        CMat m(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = {nd(rng), nd(rng)};
        Eigen::VectorXcd v = Eigen::VectorXcd::Random(3);
        for (int it = 0; it < 500; ++it) v = (m.adjoint() * (m * v)).normalized();
        CHECK(std::abs(op_norm(m) - (m * v).norm()) < 1e-6);
    }
}

TEST_CASE("op_norm is unitarily invariant") {
    std::mt19937_64 rng(12);
    for (int m = 1; m <= 4; ++m) {
        const CMat a = testing::random_skew(rng, m, 1.3) + CMat::Identity(m, m) * 0.7;
        const CMat u = testing::random_unitary(rng, m), v = testing::random_unitary(rng, m);
        CHECK(std::abs(op_norm(u * a * v) - op_norm(a)) < 1e-10);
    }
}

TEST_CASE("u_exp examples") {
    CHECK((u_exp(AntiHermitian::zero(3)).matrix() - CMat::Identity(3, 3)).norm() < 1e-15);
    CMat a(1, 1);
    a(0, 0) = {0, pi};
    CHECK(std::abs(u_exp(AntiHermitian(a)).matrix()(0, 0) - cplx(-1, 0)) < 1e-15);
}

TEST_CASE("distance to the identity is exactly 2 sin(|A|/2)") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ud(0.0, pi);
    for (int trial = 0; trial < 300; ++trial) {
        const int m = 1 + trial % 5;
        const CMat a = testing::random_skew(rng, m, ud(rng));
        const CMat u = u_exp(AntiHermitian(a)).matrix();
        CHECK(std::abs(op_norm(u - CMat::Identity(m, m)) - 2 * std::sin(op_norm(a) / 2)) < 1e-9);
        CHECK(unitarity_defect(u) < 1e-12);
    }
}

TEST_CASE("expm_skew matches a Taylor series oracle") {
    std::mt19937_64 rng(14);
    for (int m = 1; m <= 5; ++m) {
        const CMat a = testing::random_skew(rng, m, 1.7);
        CMat term = CMat::Identity(m, m), sum = term;
        for (int k = 1; k < 60; ++k) {
            term = term * a / static_cast<double>(k);
            sum += term;
        }
        CHECK((expm_skew(a) - sum).norm() < 1e-12);
    }
}

TEST_CASE("u_log principal branch and round trip") {
    CHECK(u_log(Unitary::identity(2)).matrix().norm() < 1e-15);
    CMat u(1, 1);
    u(0, 0) = std::exp(cplx(0, 0.3));
    CHECK(std::abs(u_log(Unitary(u)).matrix()(0, 0) - cplx(0, 0.3)) < 1e-14);
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> ud(0.0, 0.49);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 1 + trial % 4;
        const CMat a = testing::random_skew(rng, m, ud(rng));
        const Unitary w = u_exp(AntiHermitian(a));
        CHECK((u_log(w).matrix() - a).norm() < 1e-10);
        CHECK((u_exp(u_log(w)).matrix() - w.matrix()).norm() < 1e-10);
    }
}

TEST_CASE("u_log rejects unitaries outside the log chart") {
    CHECK(log_domain_radius() == doctest::Approx(2 * std::sin(0.25)).epsilon(1e-15));
    CMat u(1, 1);
    u(0, 0) = std::exp(cplx(0, 0.6));
    CHECK_ERROR(OutsideLogDomain, u_log(Unitary(u)));
}

TEST_CASE("logm_unitary inverts exp up to |A| < pi") {
    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 100; ++trial) {
        const CMat a = testing::random_skew(rng, 3, 3.0 * (trial + 1) / 100);
        CHECK((logm_unitary(expm_skew(a)) - a).norm() < 1e-10);
    }
}

TEST_CASE("dexp bounds") {
    std::mt19937_64 rng(17);
    const CMat x = testing::random_skew(rng, 2, 1.0);
    const DexpReport zero = dexp_bounds_check(AntiHermitian::zero(2), AntiHermitian(x));
    CHECK(zero.deviation < 1e-9);
    CHECK(zero.pass);

    const CMat a4 = testing::random_skew(rng, 2, 0.4);
    const DexpReport r4 = dexp_bounds_check(AntiHermitian(a4), AntiHermitian(x));
    CHECK(r4.deviation_bound == doctest::Approx(std::exp(0.4) - 1).epsilon(1e-12));
    CHECK(r4.deviation_bound == doctest::Approx(0.4918).epsilon(1e-4));
    CHECK(r4.inverse_bound == doctest::Approx(1.96782).epsilon(1e-5));
    CHECK(r4.pass);

    for (int trial = 0; trial < 50; ++trial) {
        const DexpReport r = dexp_bounds_check(AntiHermitian(testing::random_skew(rng, 3, 0.3)),
                                               AntiHermitian(testing::random_skew(rng, 3, 1.0)));
        CHECK(r.deviation <= r.deviation_bound + 1e-4);
        CHECK(r.inverse_ratio <= r.inverse_bound + 1e-4);
    }
    CHECK_ERROR(PreconditionViolated, dexp_bounds_check(AntiHermitian(testing::random_skew(rng, 2, 0.6)),
                                                        AntiHermitian(x)));
}

TEST_CASE("AntiHermitian and Unitary invariants") {
    CMat h = CMat::Identity(2, 2);
    CHECK_ERROR(DriftTooLarge, AntiHermitian(h));
    CHECK_ERROR(DriftTooLarge, Unitary(CMat(2.0 * CMat::Identity(2, 2))));
    std::mt19937_64 rng(18);
    CMat a = testing::random_skew(rng, 3, 1.0);
    a(0, 1) += cplx(1e-11, 0);
    const AntiHermitian s(a);
    CHECK((s.matrix() + s.matrix().adjoint()).norm() == 0.0);
    CMat u = testing::random_unitary(rng, 3);
    u(0, 0) += 1e-11;
    CHECK(unitarity_defect(Unitary(u).matrix()) < 1e-14);
}

TEST_CASE("skew coordinates round trip") {
    std::mt19937_64 rng(19);
    const CMat a = testing::random_skew(rng, 3, 0.8);
    const Vec c = skew_to_coords(a);
    CHECK(c.size() == 9);
    CHECK((coords_to_skew(c, 3) - a).norm() < 1e-14);
}
