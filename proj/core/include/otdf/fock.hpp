#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <utility>
#include <vector>

namespace otdf {

using Complex = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

// Two spins and two truncated axial modes. Basis index order is
// (spin1, spin2, n_cm, n_bm) with n_bm fastest:
//   index = ((spin * n_cm) + nc) * n_bm + nb,   spin = 2*i1 + i2,
// where i_j = 0 for |down> and 1 for |up>. sigma_z |down> = +|down>, so
// spin block 0 is the two-bright (P0) subspace.
struct FockSpace {
    int n_cm = 15;
    int n_bm = 15;

    int dim() const { return 4 * n_cm * n_bm; }
    int motional_dim() const { return n_cm * n_bm; }

    int index(int spin, int nc, int nb) const { return (spin * n_cm + nc) * n_bm + nb; }

    bool operator==(const FockSpace&) const = default;
};

enum SpinConfig : int {
    kDownDown = 0,
    kDownUp = 1,
    kUpDown = 2,
    kUpUp = 3,
};

// sigma_z eigenvalue of ion j (0 or 1) in a spin configuration; +1 for down.
inline int spin_sign(int config, int ion) {
    const int bit = ion == 0 ? (config >> 1) & 1 : config & 1;
    return 1 - 2 * bit;
}

// One axial normal mode: frequency, Lamb-Dicke parameter, per-ion
// participation signs (+1,+1 for c.m., +1,-1 for BM), thermal occupation and
// heating rate.
struct ModeSpec {
    double omega = 0.0;            // rad/s
    double eta = 0.0;              // dimensionless
    std::array<int, 2> signs{1, 1};
    double nbar = 0.0;
    double heat_rate = 0.0;        // quanta/s

    void validate() const;
};

enum ModeIndex : int { kModeCm = 0, kModeBm = 1 };

struct CompositeState {
    VectorXc amplitudes;
    FockSpace space;
    double time = 0.0;

    double norm2() const { return amplitudes.squaredNorm(); }
};

// Unit-norm basis state at time 0.
CompositeState make_initial_state(int spin_config, std::pair<int, int> fock_occ,
                                  const FockSpace& space);

// Geometric distribution p(n) = nbar^n/(nbar+1)^(n+1), truncated so the
// retained weight is >= 1 - weight_cutoff, then renormalized.
std::vector<std::pair<int, double>> thermal_weights(double nbar, double weight_cutoff);

// Identical single-qubit rotation R(theta, phi) on both spins, identity on
// motion. R = exp(-i theta/2 (cos(phi) sx + sin(phi) sy)).
CompositeState apply_global_rotation(const CompositeState& state, double theta, double phi);

// 2x2 rotation matrix in the (down, up) basis; exposed for the analytic model.
Eigen::Matrix2cd rotation_matrix(double theta, double phi);

struct Observables {
    double p0 = 0.0;  // two bright (down down)
    double p1 = 0.0;  // one bright
    double p2 = 0.0;  // two dark (up up)
    std::array<double, 2> mean_n{0.0, 0.0};
    std::array<Complex, 2> mean_a{Complex(0, 0), Complex(0, 0)};
};

Observables reduce_observables(const CompositeState& state);

}  // namespace otdf
