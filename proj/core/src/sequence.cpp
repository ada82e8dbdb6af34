#include "otdf/sequence.hpp"

#include <cmath>
#include <numbers>

#include "otdf/errors.hpp"
#include "otdf/parallel.hpp"

namespace otdf {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pi_rotation(double theta) { return std::abs(theta - kPi) < 1e-12; }

Eigen::Matrix4cd two_qubit_rotation(double theta, double phi) {
    const Eigen::Matrix2cd r = rotation_matrix(theta, phi);
    Eigen::Matrix4cd r2;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) r2(2 * a + c, 2 * b + d) = r(a, b) * r(c, d);
    return r2;
}

// One spin path of the analytic model: a definite spin configuration
// carrying a complex amplitude and one coherent displacement per mode.
struct Path {
    int initial_spin = 0;
    int spin = 0;
    Complex amp{1.0, 0.0};
    double diag_phase = 0.0;  // ODF/delay phase only, unwrapped
    std::array<Complex, 2> beta{Complex(0, 0), Complex(0, 0)};
};

struct AnalyticState {
    std::vector<Path> paths;
    bool frozen = false;            // mixing rotation after an ODF segment
    Eigen::Matrix4cd pending = Eigen::Matrix4cd::Identity();
    double t = 0.0;
};

void analytic_delay(AnalyticState& st, const Delay& d) {
    if (st.frozen) {
        Eigen::Matrix4cd diag = Eigen::Matrix4cd::Zero();
        for (int s = 0; s < 4; ++s) {
            const double xi =
                -0.5 * (d.shift[0] * spin_sign(s, 0) + d.shift[1] * spin_sign(s, 1)) * d.duration;
            diag(s, s) = std::exp(Complex(0.0, xi));
        }
        st.pending = diag * st.pending;
    } else {
        for (auto& p : st.paths) {
            const double xi = -0.5 *
                              (d.shift[0] * spin_sign(p.spin, 0) +
                               d.shift[1] * spin_sign(p.spin, 1)) *
                              d.duration;
            p.amp *= std::exp(Complex(0.0, xi));
            p.diag_phase += xi;
        }
    }
    st.t += d.duration;
}

void analytic_rotation(AnalyticState& st, const Rotation& r) {
    if (st.frozen) {
        st.pending = two_qubit_rotation(r.theta, r.phi) * st.pending;
        return;
    }
    if (is_pi_rotation(r.theta)) {
        // Global pi pulse permutes the configurations; paths stay coherent
        // displacement states.
        const Complex i(0.0, 1.0);
        const Complex f_down = -i * std::exp(i * r.phi);   // |down> -> f |up>
        const Complex f_up = -i * std::exp(-i * r.phi);    // |up> -> f |down>
        for (auto& p : st.paths) {
            for (int ion = 0; ion < 2; ++ion) {
                p.amp *= spin_sign(p.spin, ion) > 0 ? f_down : f_up;
            }
            p.spin ^= 3;
        }
        return;
    }
    // General rotation: allowed in place while every path still carries the
    // same motional state (before the first ODF segment), otherwise deferred
    // into the measurement matrix.
    bool shared_beta = true;
    for (const auto& p : st.paths) {
        if (p.beta != st.paths.front().beta) shared_beta = false;
    }
    if (shared_beta) {
        const Eigen::Matrix4cd m = two_qubit_rotation(r.theta, r.phi);
        Eigen::Vector4cd amps = Eigen::Vector4cd::Zero();
        for (const auto& p : st.paths) amps[p.spin] += p.amp;
        const Eigen::Vector4cd out = m * amps;
        std::vector<Path> next;
        for (int s = 0; s < 4; ++s) {
            if (out[s] == Complex(0.0, 0.0)) continue;
            Path p;
            p.initial_spin = s;
            p.spin = s;
            p.amp = out[s];
            p.beta = st.paths.front().beta;
            next.push_back(p);
        }
        st.paths = std::move(next);
        return;
    }
    st.frozen = true;
    st.pending = two_qubit_rotation(r.theta, r.phi);
}

void analytic_odf(AnalyticState& st, const GateConfig& config, const OdfSegment& seg) {
    if (st.frozen) {
        throw ConfigError(
            "analytic model: ODF segment after a mixing rotation is not representable");
    }
    for (auto& p : st.paths) {
        const CoupledKick kick = ld_coupled_kick(config, p.spin, st.t, seg.phase_offset, p.beta);
        p.beta = kick.alpha;
        p.amp *= std::exp(Complex(0.0, kick.phase));
        p.diag_phase += kick.phase;
    }
    st.t += config.pulse.tau_total;
}

AnalyticState run_analytic_paths(const std::vector<SequenceSegment>& segments,
                                 const GateConfig& config, std::vector<Path> initial) {
    AnalyticState st;
    st.paths = std::move(initial);
    for (const auto& seg : segments) {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Rotation>) {
                    analytic_rotation(st, s);
                } else if constexpr (std::is_same_v<T, Delay>) {
                    analytic_delay(st, s);
                } else {
                    analytic_odf(st, config, s);
                }
            },
            seg);
    }
    return st;
}

SequenceResult analytic_populations(const AnalyticState& st, const GateConfig& config,
                                    bool thermal) {
    std::array<double, 2> width;  // nbar + 1/2 per mode
    for (int m = 0; m < 2; ++m) {
        width[m] = (thermal ? config.modes[m].nbar : 0.0) + 0.5;
    }
    auto overlap = [&](const Path& p, const Path& q) {
        Complex k(1.0, 0.0);
        for (int m = 0; m < 2; ++m) {
            const Complex d = p.beta[m] - q.beta[m];
            const double mag = -std::norm(d) * width[m];
            const double ph = -std::imag(q.beta[m] * std::conj(p.beta[m]));
            k *= std::exp(Complex(mag, ph));
        }
        return k;
    };
    SequenceResult res;
    for (int s_out = 0; s_out < 4; ++s_out) {
        double prob = 0.0;
        for (const auto& p : st.paths) {
            for (const auto& q : st.paths) {
                const Complex term = st.pending(s_out, p.spin) *
                                     std::conj(st.pending(s_out, q.spin)) * p.amp *
                                     std::conj(q.amp) * overlap(p, q);
                prob += std::real(term);
            }
        }
        prob = std::max(prob, 0.0);
        if (s_out == kDownDown) res.p0 += prob;
        else if (s_out == kUpUp) res.p2 += prob;
        else res.p1 += prob;
    }
    return res;
}

SequenceResult run_numeric(const std::vector<SequenceSegment>& segments,
                           const GateConfig& config, const RunOptions& opts) {
    std::vector<std::pair<std::pair<int, int>, double>> members;
    if (opts.thermal) {
        const auto wc = thermal_weights(config.modes[kModeCm].nbar, opts.weight_cutoff);
        const auto wb = thermal_weights(config.modes[kModeBm].nbar, opts.weight_cutoff);
        double total = 0.0;
        for (const auto& [ncm, pc] : wc) {
            for (const auto& [nbm, pb] : wb) {
                members.push_back({{ncm, nbm}, pc * pb});
                total += pc * pb;
            }
        }
        for (auto& m : members) m.second /= total;
    } else {
        members.push_back({{0, 0}, 1.0});
    }

    SequenceResult res;
    for (const auto& [occ, weight] : members) {
        CompositeState state = make_initial_state(opts.initial_spin, occ, opts.space);
        double t = 0.0;
        for (const auto& seg : segments) {
            if (const auto* r = std::get_if<Rotation>(&seg)) {
                state = apply_global_rotation(state, r->theta, r->phi);
            } else if (const auto* d = std::get_if<Delay>(&seg)) {
                const int mdim = state.space.motional_dim();
                for (int s = 0; s < 4; ++s) {
                    const double xi = -0.5 *
                                      (d->shift[0] * spin_sign(s, 0) +
                                       d->shift[1] * spin_sign(s, 1)) *
                                      d->duration;
                    state.amplitudes.segment(s * mdim, mdim) *= std::exp(Complex(0.0, xi));
                }
                t += d->duration;
                state.time = t;
            } else {
                const auto& odf = std::get<OdfSegment>(seg);
                OdfHamiltonian h(config, state.space, t, odf.phase_offset);
                IntegratorOptions iopts;
                iopts.rel_tol = opts.rel_tol;
                state = evolve(state, h, {t, t + config.pulse.tau_total}, iopts);
                t += config.pulse.tau_total;
            }
        }
        const Observables obs = reduce_observables(state);
        res.p0 += weight * obs.p0;
        res.p1 += weight * obs.p1;
        res.p2 += weight * obs.p2;
        if (opts.return_state && members.size() == 1) res.final_state = std::move(state);
    }
    return res;
}

std::vector<Path> single_path(int spin) {
    Path p;
    p.initial_spin = spin;
    p.spin = spin;
    return {p};
}

// Segments (2)-(4) with the same timing as the Bell sequence.
std::vector<SequenceSegment> echo_core_segments(const GateConfig& config, double pi2_slot) {
    const double comp = config.compensate_echo_phase
                            ? echo_phase_compensation(config.delta, config.echo_dt())
                            : 0.0;
    std::vector<SequenceSegment> segs;
    if (pi2_slot > 0.0) segs.push_back(Delay{pi2_slot});
    segs.push_back(OdfSegment{0.0});
    segs.push_back(Delay{config.echo_gap / 2.0});
    segs.push_back(Rotation{kPi, 0.0});
    segs.push_back(Delay{config.echo_gap / 2.0});
    segs.push_back(OdfSegment{comp});
    return segs;
}

}  // namespace

std::vector<SequenceSegment> build_bell_sequence(const GateConfig& config, double pi2_slot,
                                                 std::optional<double> analysis_phi) {
    std::vector<SequenceSegment> segs;
    auto slot = [&](double theta, double phi, double width) {
        if (width > 0.0) segs.push_back(Delay{width / 2.0});
        segs.push_back(Rotation{theta, phi});
        if (width > 0.0) segs.push_back(Delay{width / 2.0});
    };
    const double comp = config.compensate_echo_phase
                            ? echo_phase_compensation(config.delta, config.echo_dt())
                            : 0.0;
    slot(kPi / 2.0, 0.0, pi2_slot);
    segs.push_back(OdfSegment{0.0});
    slot(kPi, 0.0, config.echo_gap);
    segs.push_back(OdfSegment{comp});
    slot(kPi / 2.0, kPi, pi2_slot);
    if (analysis_phi) {
        slot(kPi / 2.0, *analysis_phi + kPi / 2.0, pi2_slot);
    }
    return segs;
}

SequenceResult run_sequence(const std::vector<SequenceSegment>& segments,
                            const GateConfig& config, const RunOptions& opts) {
    if (opts.model == Model::kNumeric) {
        return run_numeric(segments, config, opts);
    }
    AnalyticState st = run_analytic_paths(segments, config, single_path(opts.initial_spin));
    return analytic_populations(st, config, opts.thermal);
}

double entangling_phase(const GateConfig& config, double pi2_slot) {
    std::vector<Path> init;
    for (int s = 0; s < 4; ++s) {
        Path p;
        p.initial_spin = s;
        p.spin = s;
        init.push_back(p);
    }
    AnalyticState st =
        run_analytic_paths(echo_core_segments(config, pi2_slot), config, std::move(init));
    std::array<double, 4> phase{};
    for (const auto& p : st.paths) phase[p.initial_spin] = p.diag_phase;
    return 0.5 * (phase[kDownDown] + phase[kUpUp]) - 0.5 * (phase[kDownUp] + phase[kUpDown]);
}

double calibrate_amplitude(const GateConfig& config, double pi2_slot) {
    if (!(config.pulse.omega_peak > 0.0)) {
        throw CalibrationError("calibrate_amplitude: starting omega_peak must be > 0");
    }
    GateConfig cfg = config;
    const double target = kPi / 2.0;
    // chi is quadratic in the drive up to the (tiny, linear) scalar phase
    // residual; rescale-and-polish converges in a few rounds.
    for (int iter = 0; iter < 12; ++iter) {
        const double chi = entangling_phase(cfg, pi2_slot);
        if (chi == 0.0) throw CalibrationError("calibrate_amplitude: no entangling phase");
        const double ratio = target / std::abs(chi);
        cfg.pulse.omega_peak *= std::sqrt(ratio);
        if (std::abs(ratio - 1.0) < 1e-10) return cfg.pulse.omega_peak;
    }
    throw CalibrationError("calibrate_amplitude: did not converge");
}

std::vector<ScanRow> detuning_scan(const std::vector<double>& deltas, const GateConfig& config,
                                   double pi2_slot, const RunOptions& opts) {
    std::vector<ScanRow> rows(deltas.size());
    parallel_for(deltas.size(), [&](std::size_t i) {
        GateConfig cfg = config;
        cfg.delta = deltas[i];
        const auto segs = build_bell_sequence(cfg, pi2_slot, std::nullopt);
        const SequenceResult r = run_sequence(segs, cfg, opts);
        rows[i] = {deltas[i], r.p0, r.p1, r.p2};
    });
    return rows;
}

std::vector<ParityRow> parity_scan(const std::vector<double>& phis, const GateConfig& config,
                                   double pi2_slot, const RunOptions& opts) {
    std::vector<ParityRow> rows(phis.size());
    parallel_for(phis.size(), [&](std::size_t i) {
        const auto segs = build_bell_sequence(config, pi2_slot, phis[i]);
        const SequenceResult r = run_sequence(segs, config, opts);
        rows[i] = {phis[i], 1.0 - 2.0 * r.p1};
    });
    return rows;
}

double fit_detuning_offset(const std::vector<ScanRow>& measured, const GateConfig& config,
                           double pi2_slot, const RunOptions& opts) {
    if (measured.size() < 5) throw FitError("fit_detuning_offset: need at least 5 scan rows");
    auto ssr = [&](double offset) {
        double sum = 0.0;
        std::vector<double> deltas;
        deltas.reserve(measured.size());
        for (const auto& row : measured) deltas.push_back(row.delta + offset);
        const auto sim = detuning_scan(deltas, config, pi2_slot, opts);
        for (std::size_t i = 0; i < measured.size(); ++i) {
            sum += std::pow(sim[i].p0 - measured[i].p0, 2) +
                   std::pow(sim[i].p1 - measured[i].p1, 2) +
                   std::pow(sim[i].p2 - measured[i].p2, 2);
        }
        return sum;
    };
    // Golden-section search over +-2pi*10 kHz.
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = -2.0 * kPi * 10e3;
    double b = 2.0 * kPi * 10e3;
    double c = b - golden * (b - a);
    double d = a + golden * (b - a);
    double fc = ssr(c);
    double fd = ssr(d);
    const double f_edge = std::max(ssr(a), ssr(b));
    const double xtol = 2.0 * kPi * 1.0;  // 1 Hz
    while (b - a > xtol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = ssr(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = ssr(d);
        }
    }
    const double best = 0.5 * (a + b);
    const double f_best = ssr(best);
    if (!(f_edge - f_best > 1e-12)) {
        throw FitError("fit_detuning_offset: flat residual landscape");
    }
    return best;
}

}  // namespace otdf
