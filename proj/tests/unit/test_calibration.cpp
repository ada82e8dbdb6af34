#include <doctest.h>

#include <cmath>
#include <numbers>

#include "otdf/calibration.hpp"
#include "otdf/errors.hpp"
#include "test_helpers.hpp"

using namespace otdf;

namespace {

constexpr double kPi = std::numbers::pi;

SpacingScanOptions toy_scan_options() {
    SpacingScanOptions o;
    o.space = FockSpace{14, 14};
    o.rel_tol = 1e-10;
    return o;
}

}  // namespace

TEST_CASE("spacing excitation symmetry and extremes") {
    const GateConfig& cfg = test::toy_gate_calibrated();
    const auto opts = toy_scan_options();

    // The toy gate sits closer to the two-phonon resonances than the
    // production preset, so its matched-spacing floor is higher; the
    // production-level bounds run in the acceptance suite.
    const double e0 = spacing_excitation(0.0, cfg, opts);
    CHECK(e0 < 1e-6);

    const double plus = spacing_excitation(0.4, cfg, opts);
    const double minus = spacing_excitation(-0.4, cfg, opts);
    CHECK(std::abs(plus - minus) < 1e-7);
    CHECK(plus > 1e-3);

    // 2 pi periodicity
    const double wrapped = spacing_excitation(0.4 - 2.0 * kPi, cfg, opts);
    CHECK(std::abs(wrapped - plus) < 1e-7);

    // monotone growth of the excitation towards anti-phased forces
    const double mid = spacing_excitation(1.6, cfg, opts);
    const double peak = spacing_excitation(kPi, cfg, opts);
    CHECK(plus < mid);
    CHECK(mid < peak);
}

TEST_CASE("spacing calibration recovers the injected mismatch") {
    const GateConfig& cfg = test::toy_gate_calibrated();
    const auto opts = toy_scan_options();

    SUBCASE("true optimum at zero") {
        const double rec = calibrate_spacing(-0.6, 0.6, cfg, opts);
        CHECK(std::abs(rec) < 1e-3);
    }
    SUBCASE("injected 0.3 rad") {
        GateConfig injected = cfg;
        injected.lattice.theta_ion[1] += 0.3;
        const double rec = calibrate_spacing(-0.8, 0.6, injected, opts);
        CHECK(rec == doctest::Approx(0.3).epsilon(4e-3));
        // idempotent: correcting by the recovered value leaves nothing behind
        GateConfig corrected = injected;
        corrected.lattice.theta_ion[1] -= rec;
        const double again = calibrate_spacing(-0.6, 0.6, corrected, opts);
        CHECK(std::abs(again) < 1e-3);
    }
    SUBCASE("bracket without an interior minimum") {
        GateConfig injected = cfg;
        injected.lattice.theta_ion[1] += 2.0;
        CHECK_THROWS_AS(calibrate_spacing(0.5, 1.2, injected, opts), CalibrationError);
        CHECK_THROWS_AS(calibrate_spacing(0.6, -0.6, injected, opts), CalibrationError);
    }
}

TEST_CASE("single-beam beat period") {
    CHECK(std::isinf(intensity_beat_period(1000.0, 1000.0)));
    CHECK(intensity_beat_period(2.0 * kPi * 11e3, 2.0 * kPi * 10e3) ==
          doctest::Approx(1e-3).epsilon(1e-12));
    // divergence as the shifts approach balance
    double prev = 0.0;
    for (double diff : {1e3, 1e2, 1e1}) {
        const double period = intensity_beat_period(2.0 * kPi * (10e3 + diff), 2.0 * kPi * 10e3);
        CHECK(period > prev);
        prev = period;
    }
}

TEST_CASE("single-beam Ramsey populations beat at the shift difference") {
    const GateConfig& cfg = test::toy_gate_calibrated();
    const double w1 = test::kTwoPi * 11e3;
    const double w2 = test::kTwoPi * 10e3;

    auto parity_at = [&](double t_gap) {
        std::vector<SequenceSegment> segs{Rotation{kPi / 2.0, 0.0}, Delay{t_gap, {w1, w2}},
                                          Rotation{kPi / 2.0, kPi}};
        RunOptions opts;
        const auto r = run_sequence(segs, cfg, opts);
        return r.p0 + r.p2 - r.p1;
    };

    // The two qubits precess independently: P0 + P2 - P1 = cos(w1 t) cos(w2 t).
    for (double t : {23e-6, 111e-6, 402e-6, 733e-6}) {
        CHECK(parity_at(t) == doctest::Approx(std::cos(w1 * t) * std::cos(w2 * t)).epsilon(1e-9));
    }

    // Demodulating the carrier leaves the beat envelope cos((w1 - w2) t);
    // its first zero pins the period to the formula within 1%.
    auto envelope = [&](double t) {
        return 2.0 * parity_at(t) - std::cos((w1 + w2) * t);
    };
    double lo = 100e-6, hi = 400e-6;  // envelope zero expected at 250 us
    REQUIRE(envelope(lo) > 0.0);
    REQUIRE(envelope(hi) < 0.0);
    for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        (envelope(mid) > 0.0 ? lo : hi) = mid;
    }
    const double period_sim = 4.0 * 0.5 * (lo + hi);
    const double period_formula = intensity_beat_period(w1, w2);
    CHECK(std::abs(period_sim - period_formula) / period_formula < 0.01);
}
