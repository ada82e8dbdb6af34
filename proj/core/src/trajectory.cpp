#include "otdf/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "otdf/errors.hpp"
#include "otdf/integrator.hpp"

namespace otdf {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// d alpha / dt = -i g(t) with g the a^+ coefficient of the first-order drive;
// d Phi / dt = Im(alpha^* d alpha / dt).
struct DriveIntegrand {
    const OdfPulse* pulse;
    double t_start;
    double mu;
    double omega_m;
    double eta_eff;
    Complex c_fw;      // force weight with lattice phase folded in
    bool counter_rotating;

    Complex g(double t) const {
        const double env = pulse->envelope(t - t_start);
        if (env == 0.0) return Complex(0.0, 0.0);
        const Complex i(0.0, 1.0);
        Complex val = c_fw * std::exp(i * ((omega_m - mu) * t));
        if (counter_rotating) {
            val -= std::conj(c_fw) * std::exp(i * ((omega_m + mu) * t));
        }
        return 0.5 * i * eta_eff * env * val;
    }
};

}  // namespace

Complex force_weight(const ModeSpec& mode, const LatticeSpec& lattice, int spin_config) {
    Complex c(0.0, 0.0);
    for (int ion = 0; ion < 2; ++ion) {
        c += lattice.balance[ion] * static_cast<double>(spin_sign(spin_config, ion)) *
             static_cast<double>(mode.signs[ion]) *
             std::exp(Complex(0.0, lattice.theta_ion[ion]));
    }
    return c;
}

PulseKick ld_pulse_kick(const ModeSpec& mode, const GateConfig& config, int spin_config,
                        double t_start, double phase_offset, const LdOptions& opts) {
    const double phi = config.lattice.phi + phase_offset;
    DriveIntegrand drive{
        &config.pulse,
        t_start,
        config.mu(),
        mode.omega,
        mode.eta * (opts.debye_waller ? std::exp(-0.5 * mode.eta * mode.eta) : 1.0),
        force_weight(mode, config.lattice, spin_config) * std::exp(Complex(0.0, -phi)),
        opts.counter_rotating,
    };
    if (drive.c_fw == Complex(0.0, 0.0)) return {Complex(0.0, 0.0), 0.0};

    VectorXc y = VectorXc::Zero(2);  // y[0] = alpha, y[1] = Phi (real part)
    auto rhs = [&drive](double t, const VectorXc& v, VectorXc& dv) {
        const Complex dalpha = Complex(0.0, -1.0) * drive.g(t);
        dv[0] = dalpha;
        dv[1] = std::imag(std::conj(v[0]) * dalpha);
    };
    IntegratorOptions iopts;
    iopts.rel_tol = opts.rel_tol;
    iopts.abs_tol = opts.rel_tol * 1e-3;
    integrate_adaptive(rhs, y, t_start, t_start + config.pulse.tau_total, iopts);
    return {y[0], std::real(y[1])};
}

CoupledKick ld_coupled_kick(const GateConfig& config, int spin_config, double t_start,
                            double phase_offset, const std::array<Complex, 2>& beta0,
                            double rel_tol) {
    const double phi = config.lattice.phi + phase_offset;
    double dw = 1.0;
    for (const auto& m : config.modes) dw *= std::exp(-0.5 * m.eta * m.eta);

    // y = (alpha_cm, alpha_bm, Theta, b2_cm, b2_bm, b11). Theta is real
    // (stored in the real part); the b's are the second-order two-phonon and
    // cross-mode amplitudes whose Im(b^* db) supply the squeezing phases.
    VectorXc y = VectorXc::Zero(6);
    y[0] = beta0[kModeCm];
    y[1] = beta0[kModeBm];

    auto rhs = [&](double t, const VectorXc& v, VectorXc& dv) {
        const double env = config.pulse.envelope(t - t_start);
        if (env == 0.0) {
            dv.setZero();
            return;
        }
        const Complex i(0.0, 1.0);
        std::array<Complex, 2> frame;   // e^{i w_m t}
        std::array<double, 2> kappa{};  // 2 eta_m Re(alpha e^{-i w t}), ion-0 sign
        for (int m = 0; m < 2; ++m) {
            frame[m] = std::exp(i * (config.modes[m].omega * t));
            kappa[m] = 2.0 * config.modes[m].eta * std::real(v[m] * std::conj(frame[m]));
        }
        double h0 = 0.0;
        std::array<double, 2> force_sum{0.0, 0.0};  // sum_j w_j b_jm sin(Gamma_j)
        double cos_sum = 0.0;                       // sum_j w_j cos(Gamma_j)
        double cross_sum = 0.0;                     // sum_j w_j b_jc b_jb cos(Gamma_j)
        const double drive = config.mu() * t + phi;
        for (int ion = 0; ion < 2; ++ion) {
            double gamma = config.lattice.theta_ion[ion] - drive;
            for (int m = 0; m < 2; ++m) gamma += config.modes[m].signs[ion] * kappa[m];
            const double w = config.lattice.balance[ion] * spin_sign(spin_config, ion) * env * dw;
            const double c = std::cos(gamma);
            h0 += w * c;
            cos_sum += w * c;
            cross_sum +=
                w * config.modes[kModeCm].signs[ion] * config.modes[kModeBm].signs[ion] * c;
            for (int m = 0; m < 2; ++m) {
                force_sum[m] += w * config.modes[m].signs[ion] * std::sin(gamma);
            }
        }
        const double eta_c = config.modes[kModeCm].eta;
        const double eta_b = config.modes[kModeBm].eta;
        double im_sum = 0.0;
        for (int m = 0; m < 2; ++m) {
            dv[m] = i * config.modes[m].eta * force_sum[m] * frame[m];
            im_sum += std::imag(std::conj(v[m]) * dv[m]);
        }
        // Two-phonon channels |0> -> |2_m> and |0> -> |1_c 1_b>. Unlike the
        // displacements, these have no counterpart inside h0, so their
        // second-order phase enters as +Im(b^* db).
        dv[3] = i * (eta_c * eta_c / std::numbers::sqrt2) * cos_sum * frame[0] * frame[0];
        dv[4] = i * (eta_b * eta_b / std::numbers::sqrt2) * cos_sum * frame[1] * frame[1];
        dv[5] = i * (eta_c * eta_b) * cross_sum * frame[0] * frame[1];
        for (int k = 3; k < 6; ++k) im_sum -= std::imag(std::conj(v[k]) * dv[k]);
        dv[2] = Complex(-h0 - im_sum, 0.0);
    };
    IntegratorOptions iopts;
    iopts.rel_tol = rel_tol;
    iopts.abs_tol = rel_tol * 1e-3;
    integrate_adaptive(rhs, y, t_start, t_start + config.pulse.tau_total, iopts);
    CoupledKick out;
    out.alpha = {y[0], y[1]};
    out.phase = std::real(y[2]);
    return out;
}

double ld_scalar_phase(const GateConfig& config, int spin_config, double t_start,
                       double phase_offset, const LdOptions& opts) {
    const double phi = config.lattice.phi + phase_offset;
    double dw = 1.0;
    if (opts.debye_waller) {
        for (const auto& m : config.modes) dw *= std::exp(-0.5 * m.eta * m.eta);
    }
    VectorXc y = VectorXc::Zero(1);
    auto rhs = [&](double t, const VectorXc&, VectorXc& dv) {
        const double env = config.pulse.envelope(t - t_start);
        double rate = 0.0;
        for (int ion = 0; ion < 2; ++ion) {
            rate -= config.lattice.balance[ion] * spin_sign(spin_config, ion) * env *
                    std::cos(config.lattice.theta_ion[ion] - config.mu() * t - phi);
        }
        dv[0] = rate * dw;
    };
    IntegratorOptions iopts;
    iopts.rel_tol = std::max(opts.rel_tol, 1e-12);
    iopts.abs_tol = 1e-12;
    integrate_adaptive(rhs, y, t_start, t_start + config.pulse.tau_total, iopts);
    return std::real(y[0]);
}

Trajectory ld_trajectory(const ModeSpec& mode, const GateConfig& config, int spin_config,
                         int n_samples, const LdOptions& opts) {
    Trajectory traj;
    const double tau = config.pulse.tau_total;
    if (n_samples < 2) {
        const PulseKick kick = ld_pulse_kick(mode, config, spin_config, 0.0, 0.0, opts);
        traj.times = {0.0, tau};
        traj.alphas = {Complex(0.0, 0.0), kick.alpha};
        traj.alpha_final = kick.alpha;
        traj.geometric_phase = kick.phase;
        return traj;
    }
    // Integrate piecewise so the samples are on the same adaptive solution.
    const double phi = config.lattice.phi;
    DriveIntegrand drive{
        &config.pulse,
        0.0,
        config.mu(),
        mode.omega,
        mode.eta * (opts.debye_waller ? std::exp(-0.5 * mode.eta * mode.eta) : 1.0),
        force_weight(mode, config.lattice, spin_config) * std::exp(Complex(0.0, -phi)),
        opts.counter_rotating,
    };
    VectorXc y = VectorXc::Zero(2);
    auto rhs = [&drive](double t, const VectorXc& v, VectorXc& dv) {
        const Complex dalpha = Complex(0.0, -1.0) * drive.g(t);
        dv[0] = dalpha;
        dv[1] = std::imag(std::conj(v[0]) * dalpha);
    };
    IntegratorOptions iopts;
    iopts.rel_tol = opts.rel_tol;
    iopts.abs_tol = opts.rel_tol * 1e-3;
    traj.times.reserve(n_samples + 1);
    traj.alphas.reserve(n_samples + 1);
    traj.times.push_back(0.0);
    traj.alphas.push_back(Complex(0.0, 0.0));
    for (int k = 1; k <= n_samples; ++k) {
        const double t0 = tau * (k - 1) / n_samples;
        const double t1 = tau * k / n_samples;
        integrate_adaptive(rhs, y, t0, t1, iopts);
        traj.times.push_back(t1);
        traj.alphas.push_back(y[0]);
    }
    traj.alpha_final = y[0];
    traj.geometric_phase = std::real(y[1]);
    return traj;
}

namespace {

// Windowed envelope transform, centered so it is real for the symmetric
// pulse shapes in use: G(delta) = int Omega(u) cos(delta (u - tau/2)) du.
double envelope_transform(const OdfPulse& pulse, double delta) {
    const double tau = pulse.tau_total;
    // Composite Gauss-Legendre; panel count tracks the oscillation count.
    static const double nodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                    0.5384693101056831, 0.9061798459386640};
    static const double weights[5] = {0.2369268850561891, 0.4786286704993665,
                                      0.5688888888888889, 0.4786286704993665,
                                      0.2369268850561891};
    const int cycles = static_cast<int>(std::ceil(std::abs(delta) * tau / kTwoPi));
    const int panels = std::max(48, 8 * cycles);
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = tau * p / panels;
        const double b = tau * (p + 1) / panels;
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (int q = 0; q < 5; ++q) {
            const double u = mid + half * nodes[q];
            sum += half * weights[q] * pulse.envelope(u) * std::cos(delta * (u - 0.5 * tau));
        }
    }
    return sum;
}

double brent_root(const std::function<double(double)>& f, double a, double b, double fa,
                  double fb, double xtol) {
    // Plain bisection with secant acceleration; monotone bracket assumed.
    for (int i = 0; i < 200 && (b - a) > xtol; ++i) {
        double m = 0.5 * (a + b);
        if (fb != fa) {
            const double s = b - fb * (b - a) / (fb - fa);
            if (s > a + 0.1 * (b - a) && s < b - 0.1 * (b - a)) m = s;
        }
        const double fm = f(m);
        if ((fa < 0.0) == (fm < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

DetuningSolve solve_gate_detuning(const GateConfig& config, int loops,
                                  std::optional<double> initial_guess) {
    config.pulse.validate();
    const double tau = config.pulse.tau_total;
    const double loops_per_pulse = loops / 2.0;
    if (loops_per_pulse < 0.5) throw CalibrationError("solve_gate_detuning: loops must be >= 1");
    const double delta0 = initial_guess.value_or(kTwoPi * loops_per_pulse / tau);

    // The zeros do not depend on the drive strength; use a unit-peak copy so
    // the solve also works before amplitude calibration.
    OdfPulse unit = config.pulse;
    unit.omega_peak = 1.0;
    auto g = [&](double delta) { return envelope_transform(unit, delta); };

    // Collect closure zeros in a generous bracket and take the one nearest
    // the square-pulse estimate.
    const double lo = 0.2 * delta0;
    const double hi = 3.5 * delta0 + kTwoPi / tau;
    const int n_scan = 400;
    std::vector<double> roots;
    double prev_x = lo;
    double prev_f = g(lo);
    for (int k = 1; k <= n_scan; ++k) {
        const double x = lo + (hi - lo) * k / n_scan;
        const double fx = g(x);
        if (prev_f == 0.0) {
            roots.push_back(prev_x);
        } else if ((prev_f < 0.0) != (fx < 0.0)) {
            const double xtol = kTwoPi * 1e-4;  // 0.1 mHz
            roots.push_back(brent_root(g, prev_x, x, prev_f, fx, xtol));
        }
        prev_x = x;
        prev_f = fx;
    }
    if (roots.empty()) {
        throw CalibrationError("solve_gate_detuning: no loop closure in search bracket");
    }
    double best = roots.front();
    for (double r : roots) {
        if (std::abs(r - delta0) < std::abs(best - delta0)) best = r;
    }

    DetuningSolve out;
    out.delta_star = best;

    GateConfig solved = config;
    solved.delta = best;
    if (solved.pulse.omega_peak == 0.0) solved.pulse.omega_peak = 1.0;
    LdOptions opts;  // slow-term closure, see header
    // Driven spin configurations: odd for the BM mode, even for the c.m.
    const PulseKick bm = ld_pulse_kick(solved.modes[kModeBm], solved, kDownUp, 0.0, 0.0, opts);
    const PulseKick cm = ld_pulse_kick(solved.modes[kModeCm], solved, kDownDown, 0.0, 0.0, opts);
    const double fw_bm =
        std::abs(force_weight(solved.modes[kModeBm], solved.lattice, kDownUp));
    const double loop_radius =
        0.5 * solved.modes[kModeBm].eta * solved.pulse.omega_peak * fw_bm / best;
    const double rho2 = loop_radius * loop_radius;
    if (rho2 > 0.0) {
        out.closure_residual = std::norm(bm.alpha) / rho2;
        out.residual_cm = std::norm(cm.alpha) / rho2;
    }
    return out;
}

}  // namespace otdf
