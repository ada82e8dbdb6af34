#include "otdf/gate.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "otdf/errors.hpp"

namespace otdf {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double mod_2pi(double x) {
    double m = std::fmod(x, kTwoPi);
    if (m < 0.0) m += kTwoPi;
    return m;
}

// exp(i s eta (a + a^+)) on an n-dimensional Fock ladder.
MatrixXc lattice_exponential(int n, double eta, int sign) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k + 1 < n; ++k) {
        x(k, k + 1) = x(k + 1, k) = eta * std::sqrt(k + 1.0);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
    const auto& vals = es.eigenvalues();
    const auto& vecs = es.eigenvectors();
    MatrixXc out(n, n);
    VectorXc phases(n);
    for (int k = 0; k < n; ++k) phases[k] = std::exp(Complex(0.0, sign * vals[k]));
    out.noalias() = vecs.cast<Complex>() * phases.asDiagonal() * vecs.transpose().cast<Complex>();
    return out;
}

}  // namespace

void LatticeSpec::validate() const {
    if (!(delta_k > 0.0)) throw ConfigError("LatticeSpec: delta_k must be > 0");
    for (double r : balance) {
        if (!(r > 0.0)) throw ConfigError("LatticeSpec: balance entries must be > 0");
    }
}

void GateConfig::validate() const {
    for (const auto& m : modes) m.validate();
    pulse.validate();
    lattice.validate();
    if (loops < 1) throw ConfigError("GateConfig: loops must be >= 1");
    if (delta == 0.0) throw ConfigError("GateConfig: delta must be nonzero for a closed-loop gate");
    if (!(echo_gap >= 0.0)) throw ConfigError("GateConfig: echo_gap must be >= 0");
}

double echo_phase_compensation(double delta, double dt) { return mod_2pi(-delta * dt); }

OdfHamiltonian::OdfHamiltonian(const GateConfig& config, const FockSpace& space, double t_start,
                               double phase_offset)
    : config_(config),
      space_(space),
      t_start_(t_start),
      phase_(config.lattice.phi + phase_offset) {
    const std::array<int, 2> dims{space.n_cm, space.n_bm};
    for (int m = 0; m < 2; ++m) {
        v_plus_[m] = lattice_exponential(dims[m], config_.modes[m].eta, +1);
        v_minus_[m] = lattice_exponential(dims[m], config_.modes[m].eta, -1);
    }
}

void OdfHamiltonian::apply(double t, const VectorXc& psi, VectorXc& out) const {
    const double omega_t = config_.pulse.envelope(t - t_start_);
    out.setZero();
    if (omega_t == 0.0) return;

    const int nc = space_.n_cm;
    const int nb = space_.n_bm;
    const std::array<int, 2> dims{nc, nb};

    // Frame phases e^{i w_m n t} per mode. Workspaces are thread_local so
    // concurrent apply() calls on shared instances stay safe.
    thread_local std::array<VectorXc, 2> frame;
    thread_local std::array<std::array<MatrixXc, 2>, 2> a;  // [ion][mode]
    for (int m = 0; m < 2; ++m) {
        frame[m].resize(dims[m]);
        const double w = config_.modes[m].omega;
        for (int k = 0; k < dims[m]; ++k) frame[m][k] = std::exp(Complex(0.0, w * t * k));
    }
    // Per-ion factors A_jm(t) = exp(i b_jm eta_m x_m(t)) = D V_m^{b} D^+.
    for (int ion = 0; ion < 2; ++ion) {
        for (int m = 0; m < 2; ++m) {
            const int b = config_.modes[m].signs[ion];
            const MatrixXc& v = b > 0 ? v_plus_[m] : v_minus_[m];
            a[ion][m] = frame[m].asDiagonal() * v * frame[m].conjugate().asDiagonal();
        }
    }

    const double drive_phase = config_.mu() * t + phase_;
    using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    thread_local RowMat t1, t2;
    t1.resize(nc, nb);
    t2.resize(nc, nb);

    for (int s = 0; s < 4; ++s) {
        Eigen::Map<const RowMat> block(psi.data() + s * nc * nb, nc, nb);
        // Blockwise action: an exactly-zero spin component stays zero.
        if (block.squaredNorm() == 0.0) continue;
        Eigen::Map<RowMat> result(out.data() + s * nc * nb, nc, nb);
        for (int ion = 0; ion < 2; ++ion) {
            const double coeff =
                0.5 * config_.lattice.balance[ion] * spin_sign(s, ion) * omega_t;
            const Complex z =
                coeff * std::exp(Complex(0.0, config_.lattice.theta_ion[ion] - drive_phase));
            // Re[z W] psi with W = A_cm kron A_bm:
            //   (z W psi + conj(z) W^+ psi) / 2, applied as small matrix products.
            t1.noalias() = a[ion][kModeCm] * block;
            t2.noalias() = t1 * a[ion][kModeBm].transpose();
            result.noalias() += z * t2;
            t1.noalias() = a[ion][kModeCm].adjoint() * block;
            t2.noalias() = t1 * a[ion][kModeBm].conjugate();
            result.noalias() += std::conj(z) * t2;
        }
    }
}

}  // namespace otdf
