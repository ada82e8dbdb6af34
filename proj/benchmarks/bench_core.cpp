#include <benchmark/benchmark.h>

#include <numbers>

#include "otdf/gate.hpp"
#include "otdf/integrator.hpp"
#include "otdf/presets.hpp"
#include "otdf/sequence.hpp"
#include "otdf/stats.hpp"
#include "otdf/trajectory.hpp"

using namespace otdf;

namespace {

const GateConfig& gate() {
    static const GateConfig cfg = [] {
        GateConfig c = presets::ca40_2021_gate();
        c.delta = solve_gate_detuning(c, c.loops).delta_star;
        return c;
    }();
    return cfg;
}

void bm_odf_apply(benchmark::State& state) {
    const FockSpace space{15, 15};
    OdfHamiltonian h(gate(), space, 0.0, 0.0);
    VectorXc psi = VectorXc::Random(space.dim());
    psi.normalize();
    VectorXc out(space.dim());
    double t = 1e-6;
    for (auto _ : state) {
        h.apply(t, psi, out);
        benchmark::DoNotOptimize(out.data());
        t += 1e-9;
    }
}
BENCHMARK(bm_odf_apply);

void bm_single_pulse_evolve(benchmark::State& state) {
    const FockSpace space{15, 15};
    const double rel_tol = std::pow(10.0, -static_cast<double>(state.range(0)));
    for (auto _ : state) {
        CompositeState psi = make_initial_state(kDownUp, {0, 0}, space);
        OdfHamiltonian h(gate(), space, 0.0, 0.0);
        psi = evolve(psi, h, {0.0, gate().pulse.tau_total}, rel_tol);
        benchmark::DoNotOptimize(psi.amplitudes.data());
    }
}
BENCHMARK(bm_single_pulse_evolve)->Arg(8)->Arg(9)->Unit(benchmark::kMillisecond);

void bm_ld_coupled_kick(benchmark::State& state) {
    for (auto _ : state) {
        const auto kick =
            ld_coupled_kick(gate(), kDownUp, 0.0, 0.0, {Complex(0, 0), Complex(0, 0)});
        benchmark::DoNotOptimize(kick.phase);
    }
}
BENCHMARK(bm_ld_coupled_kick)->Unit(benchmark::kMillisecond);

void bm_mle(benchmark::State& state) {
    const MixtureModel model = presets::ca40_2021_mixture();
    const auto hist = sample_counts({0.49, 0.02, 0.49}, model, 5000, 17);
    for (auto _ : state) {
        const auto est = mle_populations(hist, model);
        benchmark::DoNotOptimize(est.p0);
    }
}
BENCHMARK(bm_mle)->Unit(benchmark::kMicrosecond);

void bm_bootstrap_100(benchmark::State& state) {
    const MixtureModel model = presets::ca40_2021_mixture();
    std::vector<Dataset> ds;
    ds.push_back({sample_counts({0.499, 0.002, 0.499}, model, 5000, 1), model});
    for (auto _ : state) {
        const auto res = bootstrap(ds, 100, 3, Statistic::kEvenPopulation);
        benchmark::DoNotOptimize(res.mean);
    }
}
BENCHMARK(bm_bootstrap_100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
