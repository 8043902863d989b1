#pragma once

#include <optional>
#include <random>

#include "doctest.h"

#include "gaugelab/error.hpp"
#include "gaugelab/ucalc.hpp"

namespace testing {

template <class F>
std::optional<gaugelab::ErrorKind> error_kind(F&& f) {
    try {
        f();
    } catch (const gaugelab::Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

inline gaugelab::CMat random_skew(std::mt19937_64& rng, int m, double norm) {
    std::normal_distribution<double> nd;
    gaugelab::CMat g(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) g(i, j) = {nd(rng), nd(rng)};
    gaugelab::CMat s = 0.5 * (g - g.adjoint());
    return s * (norm / gaugelab::op_norm(s));
}

inline gaugelab::CMat random_unitary(std::mt19937_64& rng, int m) {
    return gaugelab::expm_skew(random_skew(rng, m, 2.0));
}

}  // namespace testing

#define CHECK_ERROR(kind, expr) CHECK(testing::error_kind([&] { (void)(expr); }) == gaugelab::ErrorKind::kind)
