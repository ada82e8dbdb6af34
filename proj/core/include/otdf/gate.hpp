#pragma once

#include <array>
#include <optional>
#include <variant>
#include <vector>

#include "otdf/fock.hpp"
#include "otdf/integrator.hpp"
#include "otdf/pulse.hpp"

namespace otdf {

// Moving-lattice geometry. The beat (drive) frequency is mu = omega_BM + delta
// and lives in GateConfig::mu() so there is a single source of truth for the
// detuning.
struct LatticeSpec {
    double delta_k = 0.0;               // rad/m, sqrt(2) * 2 pi / 532 nm for 90 deg beams
    double phi = 0.0;                   // optical lattice phase
    std::array<double, 2> theta_ion{0.0, 0.0};  // per-ion static phase Delta_k * z_j
    std::array<double, 2> balance{1.0, 1.0};    // per-ion relative force amplitude

    void validate() const;

    double spacing_mismatch() const { return theta_ion[1] - theta_ion[0]; }
};

struct GateConfig {
    std::array<ModeSpec, 2> modes;  // [kModeCm, kModeBm]
    OdfPulse pulse;
    LatticeSpec lattice;
    double delta = 0.0;      // gate detuning from the BM mode, rad/s
    int loops = 2;           // loops in phase space over both pulses (K)
    double echo_gap = 0.0;   // s between the two ODF pulses (pi pulse slot)
    bool compensate_echo_phase = true;

    void validate() const;

    double mu() const { return modes[kModeBm].omega + delta; }

    // Start-to-start separation of the two ODF pulses.
    double echo_dt() const { return pulse.tau_total + echo_gap; }
};

// Lattice phase offset applied to the second ODF pulse so its drive phase,
// seen in the frame rotating with the BM mode, matches the first pulse at the
// pulse start. This cancels the BM displacement of pulse 2 against pulse 4
// for every detuning. Returned in [0, 2 pi).
double echo_phase_compensation(double delta, double dt);

// Full moving-lattice coupling in the interaction picture,
//   H(t) = sum_j r_j Omega(t - t_start) sigma^z_j
//          cos(theta_j + sum_m b_{jm} eta_m (a_m e^{-i w_m t} + a_m^+ e^{+i w_m t})
//              - mu t - phi_seg),
// with the cosine of the position operator kept to all orders. sigma^z is
// diagonal, so the operator acts blockwise on the four spin components.
class OdfHamiltonian final : public Hamiltonian {
  public:
    OdfHamiltonian(const GateConfig& config, const FockSpace& space, double t_start,
                   double phase_offset);

    void apply(double t, const VectorXc& psi, VectorXc& out) const override;

    double segment_start() const { return t_start_; }
    double segment_phase() const { return phase_; }

  private:
    GateConfig config_;
    FockSpace space_;
    double t_start_ = 0.0;
    double phase_ = 0.0;  // phi + per-segment offset
    // V_m^{+-} = exp(+- i eta_m (a + a^+)) per mode; the time dependence is a
    // diagonal frame rotation D(t) V D(t)^+ with D = diag(e^{i w_m n t}).
    std::array<MatrixXc, 2> v_plus_;
    std::array<MatrixXc, 2> v_minus_;
};

}  // namespace otdf
