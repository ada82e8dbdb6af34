#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "otdf/gate.hpp"

namespace otdf {

// First-order Lamb-Dicke drive model options. The slow e^{i(w_m - mu)t} term
// is always kept; the counter-rotating e^{i(w_m + mu)t} term and the
// e^{-eta^2/2} Debye-Waller drive renormalization are opt-in (the sequence
// composer enables both, pure trajectory analysis keeps the textbook model).
struct LdOptions {
    bool counter_rotating = false;
    bool debye_waller = false;
    double rel_tol = 1e-10;
};

// Complex force weight sum_j r_j s_j b_{jm} e^{i theta_j} for one mode and
// spin configuration; zero when the per-ion forces cancel.
Complex force_weight(const ModeSpec& mode, const LatticeSpec& lattice, int spin_config);

// Displacement increment and geometric phase of one ODF segment for one mode,
// starting from alpha = 0. t_start is the absolute segment start time and
// phase_offset adds to the lattice phase.
struct PulseKick {
    Complex alpha;
    double phase;  // Im integral alpha^* dalpha
};

PulseKick ld_pulse_kick(const ModeSpec& mode, const GateConfig& config, int spin_config,
                        double t_start, double phase_offset, const LdOptions& opts);

// Motion-independent sigma^z light-shift phase of one ODF segment.
double ld_scalar_phase(const GateConfig& config, int spin_config, double t_start,
                       double phase_offset, const LdOptions& opts);

// One ODF segment under the coherent-state mean-field model: both modes
// coupled through the full lattice cosine evaluated on the displaced state,
//   <a| cos(theta + eta x(t) - mu t) |a> = e^{-eta^2/2} cos(Gamma + kappa(t)),
// which keeps the counter-rotating drive and the loop-radius-dependent
// lattice nonlinearity to all orders in eta |alpha|. phase is the total
// sigma^z-diagonal phase of the segment (scalar plus geometric), with
// d Theta / dt = -<H> - sum_m Im(alpha_m^* d alpha_m / dt).
struct CoupledKick {
    std::array<Complex, 2> alpha{Complex(0, 0), Complex(0, 0)};
    double phase = 0.0;
};

CoupledKick ld_coupled_kick(const GateConfig& config, int spin_config, double t_start,
                            double phase_offset, const std::array<Complex, 2>& beta0,
                            double rel_tol = 1e-10);

struct Trajectory {
    std::vector<double> times;
    std::vector<Complex> alphas;
    Complex alpha_final;
    double geometric_phase = 0.0;
};

// Phase-space trajectory alpha(t) of one mode under a single ODF pulse
// starting at t = 0, by quadrature of the first-order drive integral.
Trajectory ld_trajectory(const ModeSpec& mode, const GateConfig& config, int spin_config,
                         int n_samples = 0, const LdOptions& opts = {});

struct DetuningSolve {
    double delta_star = 0.0;        // rad/s
    // Gate-mode (BM) loop-closure residual |alpha_BM(T)|^2 in units of the
    // single-loop radius squared; exactly zero for square pulses at
    // delta = 2 pi K'/tau. The far-off-resonant c.m. loop cannot be closed
    // by the same detuning and is reported separately.
    double closure_residual = 0.0;
    double residual_cm = 0.0;
};

// Gate detuning closing the BM phase-space loop for the configured pulse
// shape: the zero of the (real, time-symmetric) windowed envelope transform
// nearest the initial guess, which defaults to the square-pulse estimate
// 2 pi (K/2) / tau_ODF.
DetuningSolve solve_gate_detuning(const GateConfig& config, int loops,
                                  std::optional<double> initial_guess = {});

inline DetuningSolve solve_gate_detuning(const GateConfig& config) {
    return solve_gate_detuning(config, config.loops);
}

}  // namespace otdf
