#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "keyact/boxes.hpp"
#include "keyact/quantum.hpp"
#include "keyact/rates.hpp"
#include "oracles.hpp"

using namespace keyact;
using namespace keyact::quantum;

TEST_CASE("state is a density matrix") {
    for (const FamilyPoint p : {FamilyPoint{1, 1}, FamilyPoint{0.02, 0.90236}, FamilyPoint{0, 0.5}, FamilyPoint{0.6, 0}}) {
        const DensityMatrix rho = build_state(p);
        CHECK(is_hermitian(rho.rho, 1e-14));
        CHECK(std::abs(rho.rho.trace() - Complex(1.0)) < 1e-14);
        CHECK(min_eigenvalue(rho.rho) > -1e-14);
    }
}

TEST_CASE("observables are Hermitian involutions") {
    const ObservableSet obs = observables();
    auto check = [](const Observable& o) {
        CHECK((o.op - o.op.adjoint()).norm() < 1e-15);
        CHECK((o.op * o.op - Matrix4::Identity()).norm() < 1e-14);
    };
    for (const auto& o : obs.alice) check(o);
    for (const auto& o : obs.bob) check(o);
    // The default angles reproduce the explicit Pauli combinations.
    const ObservableSet angled = observables(default_angles());
    for (int x = 0; x < 2; ++x) CHECK((angled.alice[x].op - obs.alice[x].op).norm() < 1e-14);
    for (int y = 0; y < 3; ++y) CHECK((angled.bob[y].op - obs.bob[y].op).norm() < 1e-14);
}

TEST_CASE("explicit observables match the written Pauli sums") {
    const ObservableSet obs = observables();
    const double s = 1.0 / std::numbers::sqrt2;
    // A0 = X + Z23, A1 = Z + Z23, B0 = -(X + Z)/sqrt2, B1 = (X - Z)/sqrt2, B2 = -X.
    CHECK((obs.alice[0].op - oracle::observable(std::numbers::pi / 2)).norm() < 1e-14);
    CHECK((obs.alice[1].op - oracle::observable(0.0)).norm() < 1e-14);
    oracle::M4 b0 = oracle::observable(0.0);
    b0.block<2, 2>(0, 0) << -s, -s, -s, s;
    CHECK((obs.bob[0].op - b0).norm() < 1e-14);
    oracle::M4 b1 = oracle::observable(0.0);
    b1.block<2, 2>(0, 0) << -s, s, s, s;
    CHECK((obs.bob[1].op - b1).norm() < 1e-14);
    oracle::M4 b2 = oracle::observable(0.0);
    b2.block<2, 2>(0, 0) << 0, -1, -1, 0;
    CHECK((obs.bob[2].op - b2).norm() < 1e-14);
}

TEST_CASE("Born rule box equals the family box") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 0; n < 50; ++n) {
        const FamilyPoint p{u(rng), u(rng)};
        const Box q = born_box(build_state(p), observables());
        CHECK(max_abs_difference(q, family_box(p)) < 1e-12);
    }
}

TEST_CASE("Born rule agrees with a Kronecker-product evaluation") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0), t(-3.2, 3.2);
    for (int n = 0; n < 10; ++n) {
        const double alpha = u(rng), v = u(rng);
        MeasurementAngles angles{{t(rng), t(rng)}, {t(rng), t(rng), t(rng)}};
        const Box q = born_box(build_state({alpha, v}), observables(angles));
        const auto rho = oracle::state(alpha, v);
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 3; ++y)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) {
                        const double ref = oracle::born(rho, oracle::observable(angles.alice[x]),
                                                        oracle::observable(angles.bob[y]), a, b);
                        CHECK(std::abs(q(x, y, a, b) - ref) < 1e-12);
                    }
        CHECK(is_no_signalling(q).ok);
    }
}

TEST_CASE("Tsirelson bound at the noiseless point") {
    const Box b = born_box(build_state({1, 1}), observables());
    CHECK(std::abs(chsh(b) - 2 * std::numbers::sqrt2) < 1e-9);
    CHECK(std::abs(signed_chsh(b) - 2 * std::numbers::sqrt2) < 1e-9);
    CHECK(qber(b) < 1e-15);
}

TEST_CASE("projectors") {
    const ObservableSet obs = observables();
    const Matrix4 p0 = projector(obs.alice[0], 0), p1 = projector(obs.alice[0], 1);
    CHECK((p0 * p0 - p0).norm() < 1e-14);
    CHECK((p0 + p1 - Matrix4::Identity()).norm() < 1e-14);
    CHECK((p0 * p1).norm() < 1e-14);
}
