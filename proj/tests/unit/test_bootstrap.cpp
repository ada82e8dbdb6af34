#include <doctest.h>

#include <cmath>

#include "otdf/errors.hpp"
#include "otdf/stats.hpp"

using namespace otdf;

namespace {

// Paper-shaped synthetic experiment: two alternating-phase parity datasets
// and one population dataset, drawn at a known fidelity.
std::vector<Dataset> synthetic_fidelity_data(double p1_parity, double p1_pop, int shots,
                                             std::uint64_t seed) {
    const MixtureModel model{60.0, 30.0, 1.0};
    std::vector<Dataset> ds;
    ds.push_back({sample_counts({(1 - p1_parity) / 2, p1_parity, (1 - p1_parity) / 2}, model,
                                shots, seed),
                  model});
    const double p1m = 1.0 - p1_parity;
    ds.push_back({sample_counts({(1 - p1m) / 2, p1m, (1 - p1m) / 2}, model, shots, seed + 1),
                  model});
    ds.push_back({sample_counts({(1 - p1_pop) / 2, p1_pop, (1 - p1_pop) / 2}, model, shots,
                                seed + 2),
                  model});
    return ds;
}

}  // namespace

TEST_CASE("bootstrap is deterministic under a fixed seed") {
    const auto ds = synthetic_fidelity_data(5e-4, 2e-4, 800, 31);
    const auto a = bootstrap(ds, 400, 99, Statistic::kFidelity);
    const auto b = bootstrap(ds, 400, 99, Statistic::kFidelity);
    CHECK(a.point == b.point);
    CHECK(a.mean == b.mean);
    CHECK(a.lo == b.lo);
    CHECK(a.hi == b.hi);
    CHECK(a.dropped == 0);

    const auto c = bootstrap(ds, 400, 100, Statistic::kFidelity);
    CHECK(a.mean != c.mean);
}

TEST_CASE("zero-variance data gives a zero-width interval") {
    const MixtureModel model{60.0, 30.0, 1.0};
    CountHistogram hist;
    hist.counts.assign(500, 61);
    const std::vector<Dataset> ds{{hist, model}};
    const auto res = bootstrap(ds, 200, 5, Statistic::kEvenPopulation);
    CHECK(res.hi - res.lo == 0.0);
    CHECK(res.mean == doctest::Approx(res.point).epsilon(1e-12));
}

TEST_CASE("synthetic fidelity pipeline has a sensible interval") {
    const double p1_parity = (1.0 - 0.99903) / 2.0;
    const double p1_pop = 2.3e-4;
    const double truth = 0.5 * ((1.0 - p1_pop) + 0.99903);
    const auto ds = synthetic_fidelity_data(p1_parity, p1_pop, 2000, 77);
    const auto res = bootstrap(ds, 1000, 7, Statistic::kFidelity);

    CHECK(res.hi > res.lo);
    const double width = res.hi - res.lo;
    CHECK(width > 1e-5);
    CHECK(width < 5e-3);
    // resampling is not significantly biased
    CHECK(std::abs(res.mean - res.point) < 0.5 * width);
    // the interval sits near the generating fidelity
    CHECK(std::abs(res.point - truth) < 5.0 * width);
}

TEST_CASE("bootstrap input validation") {
    const auto ds = synthetic_fidelity_data(5e-4, 2e-4, 100, 3);
    CHECK_THROWS_AS(bootstrap(ds, 50, 1, Statistic::kFidelity), BootstrapError);
    CHECK_THROWS_AS(bootstrap({ds[0]}, 200, 1, Statistic::kFidelity), BootstrapError);
    std::vector<Dataset> empty{{CountHistogram{}, MixtureModel{60, 30, 1}}};
    CHECK_THROWS_AS(bootstrap(empty, 200, 1, Statistic::kEvenPopulation), BootstrapError);
}
