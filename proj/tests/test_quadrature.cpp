#include <doctest.h>

#include <cmath>
#include <numbers>

#include "keyact/error.hpp"
#include "keyact/quadrature.hpp"

using namespace keyact;

TEST_CASE("two-node rule from the moment equations") {
    // w1 + w2 = 1, w1 t + w2 = 1/2, w1 t^2 + w2 = 1/3  =>  t = 1/3, w1 = 3/4.
    const QuadratureRule r = gauss_radau(2);
    REQUIRE(r.nodes.size() == 2);
    CHECK(r.nodes[0] == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(r.nodes[1] == 1.0);
    CHECK(r.weights[0] == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(r.weights[1] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(r.c_m == doctest::Approx(0.75 / (1.0 / 3 * std::numbers::ln2)).epsilon(1e-13));
}

TEST_CASE("exactness degree 2m-2") {
    for (int m = 2; m <= 12; ++m) {
        const QuadratureRule r = gauss_radau(m);
        CHECK(r.nodes.size() == static_cast<std::size_t>(m));
        CHECK(r.nodes.back() == 1.0);
        for (int i = 0; i + 1 < m; ++i) CHECK(r.nodes[i] < r.nodes[i + 1]);
        for (double w : r.weights) CHECK(w > 0.0);
        for (int k = 0; k <= 2 * m - 2; ++k) {
            double s = 0.0;
            for (int i = 0; i < m; ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
            CHECK(std::abs(s - 1.0 / (k + 1)) < 1e-10);
        }
        // One degree higher is no longer integrated exactly (the error decays
        // quickly with m, so this is only visible in double precision for small m).
        if (m <= 7) {
            double s = 0.0;
            for (int i = 0; i < m; ++i) s += r.weights[i] * std::pow(r.nodes[i], 2 * m - 1);
            CHECK(std::abs(s - 1.0 / (2 * m)) > 1e-8);
        }
    }
}

TEST_CASE("c_m sums every node but the endpoint") {
    for (int m : {2, 5, 8, 12}) {
        const QuadratureRule r = gauss_radau(m);
        double c = 0.0;
        for (int i = 0; i + 1 < m; ++i) c += r.weights[i] / (r.nodes[i] * std::numbers::ln2);
        CHECK(r.c_m == doctest::Approx(c).epsilon(1e-13));
    }
}

TEST_CASE("too few nodes") {
    CHECK_THROWS_AS(gauss_radau(1), DomainError);
    CHECK_THROWS_AS(gauss_radau(0), DomainError);
}
