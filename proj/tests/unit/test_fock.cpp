#include <doctest.h>

#include <cmath>
#include <numbers>

#include "otdf/errors.hpp"
#include "otdf/fock.hpp"

using namespace otdf;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("basis states and observables") {
    const FockSpace space{15, 15};
    CHECK(space.dim() == 4 * 15 * 15);

    const auto gg = make_initial_state(kDownDown, {0, 0}, space);
    CHECK(gg.norm2() == doctest::Approx(1.0).epsilon(1e-15));
    auto obs = reduce_observables(gg);
    CHECK(obs.p0 == doctest::Approx(1.0));
    CHECK(obs.p1 == 0.0);
    CHECK(obs.p2 == 0.0);
    CHECK(obs.mean_n[kModeCm] == 0.0);
    CHECK(obs.mean_n[kModeBm] == 0.0);

    const auto uu = make_initial_state(kUpUp, {0, 0}, space);
    obs = reduce_observables(uu);
    CHECK(obs.p2 == doctest::Approx(1.0));
    // sigma_z |down> = +|down>: <sz1 sz2> = +1 for both stretched states.
    CHECK(spin_sign(kUpUp, 0) * spin_sign(kUpUp, 1) == 1);
    CHECK(spin_sign(kDownDown, 0) * spin_sign(kDownDown, 1) == 1);
    CHECK(spin_sign(kDownUp, 0) * spin_sign(kDownUp, 1) == -1);

    const auto excited = make_initial_state(kDownDown, {2, 1}, space);
    obs = reduce_observables(excited);
    CHECK(obs.mean_n[kModeCm] == doctest::Approx(2.0));
    CHECK(obs.mean_n[kModeBm] == doctest::Approx(1.0));

    CHECK_THROWS_AS(make_initial_state(kDownDown, {15, 0}, space), TruncationError);
    CHECK_THROWS_AS(make_initial_state(kDownDown, {0, -1}, space), TruncationError);
}

TEST_CASE("thermal weights follow the geometric distribution") {
    const auto ground = thermal_weights(0.0, 1e-9);
    REQUIRE(ground.size() == 1);
    CHECK(ground[0].first == 0);
    CHECK(ground[0].second == 1.0);

    const auto w = thermal_weights(0.1, 1e-6);
    // Raw geometric values before renormalization.
    const double p0 = 1.0 / 1.1;
    const double p1 = 0.1 / (1.1 * 1.1);
    double retained = 0.0;
    for (int n = 0; n < static_cast<int>(w.size()); ++n) {
        retained += std::pow(0.1, n) / std::pow(1.1, n + 1);
    }
    CHECK(w[0].second == doctest::Approx(p0 / retained).epsilon(1e-12));
    CHECK(w[1].second == doctest::Approx(p1 / retained).epsilon(1e-12));
    CHECK(p0 == doctest::Approx(0.9091).epsilon(1e-4));
    CHECK(p1 == doctest::Approx(0.0826).epsilon(1e-2));

    double sum = 0.0;
    for (const auto& [n, weight] : w) {
        CHECK(weight >= 0.0);
        sum += weight;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);

    // Property: distribution sums to 1 for a spread of nbar values.
    for (double nbar : {0.01, 0.3, 1.7, 12.0}) {
        const auto weights = thermal_weights(nbar, 1e-8);
        double total = 0.0;
        for (const auto& [n, weight] : weights) total += weight;
        CHECK(std::abs(total - 1.0) < 1e-12);
    }
}

TEST_CASE("global rotations") {
    const FockSpace space{4, 4};
    const auto gg = make_initial_state(kDownDown, {0, 0}, space);

    auto flipped = apply_global_rotation(gg, kPi, 0.0);
    CHECK(reduce_observables(flipped).p2 == doctest::Approx(1.0).epsilon(1e-12));

    auto half = apply_global_rotation(gg, kPi / 2.0, 0.0);
    const auto obs = reduce_observables(half);
    CHECK(obs.p0 == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(obs.p1 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(obs.p2 == doctest::Approx(0.25).epsilon(1e-12));

    // Full 2 pi rotation returns the state up to global phase.
    auto full = apply_global_rotation(half, 2.0 * kPi, 0.77);
    const Complex ov = half.amplitudes.dot(full.amplitudes);
    CHECK(std::norm(ov) > 1.0 - 1e-12);

    // Four successive (pi/2, phi) rotations equal identity up to phase.
    auto state = half;
    for (int k = 0; k < 4; ++k) state = apply_global_rotation(state, kPi / 2.0, 1.3);
    const Complex ov4 = half.amplitudes.dot(state.amplitudes);
    CHECK(std::norm(ov4) > 1.0 - 1e-12);
}

TEST_CASE("parity populations of a Bell state") {
    const FockSpace space{3, 3};
    CompositeState bell = make_initial_state(kDownDown, {0, 0}, space);
    bell.amplitudes.setZero();
    bell.amplitudes[space.index(kDownDown, 0, 0)] = 1.0 / std::numbers::sqrt2;
    bell.amplitudes[space.index(kUpUp, 0, 0)] = Complex(0.0, 1.0) / std::numbers::sqrt2;
    const auto obs = reduce_observables(bell);
    CHECK(obs.p0 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(obs.p1 == 0.0);
    CHECK(obs.p2 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(obs.p0 + obs.p1 + obs.p2 == doctest::Approx(1.0).epsilon(1e-12));
}
