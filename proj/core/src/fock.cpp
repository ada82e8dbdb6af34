#include "otdf/fock.hpp"

#include <cmath>

#include "otdf/errors.hpp"

namespace otdf {

void ModeSpec::validate() const {
    if (!(omega > 0.0)) throw ConfigError("ModeSpec: omega must be > 0");
    if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("ModeSpec: eta must be in (0, 1)");
    if (!(nbar >= 0.0)) throw ConfigError("ModeSpec: nbar must be >= 0");
    for (int s : signs) {
        if (s != 1 && s != -1) throw ConfigError("ModeSpec: signs entries must be +1 or -1");
    }
}

CompositeState make_initial_state(int spin_config, std::pair<int, int> fock_occ,
                                  const FockSpace& space) {
    if (space.n_cm < 2 || space.n_bm < 2) throw ConfigError("FockSpace: truncation must be >= 2");
    if (spin_config < 0 || spin_config > 3) throw ConfigError("make_initial_state: bad spin config");
    const auto [nc, nb] = fock_occ;
    if (nc < 0 || nc >= space.n_cm || nb < 0 || nb >= space.n_bm) {
        throw TruncationError("make_initial_state: Fock occupation outside truncation");
    }
    CompositeState st;
    st.space = space;
    st.amplitudes = VectorXc::Zero(space.dim());
    st.amplitudes[space.index(spin_config, nc, nb)] = 1.0;
    st.time = 0.0;
    return st;
}

std::vector<std::pair<int, double>> thermal_weights(double nbar, double weight_cutoff) {
    if (!(nbar >= 0.0)) throw ConfigError("thermal_weights: nbar must be >= 0");
    if (!(weight_cutoff > 0.0 && weight_cutoff < 1.0)) {
        throw ConfigError("thermal_weights: weight_cutoff must be in (0, 1)");
    }
    std::vector<std::pair<int, double>> out;
    if (nbar == 0.0) {
        out.emplace_back(0, 1.0);
        return out;
    }
    const double ratio = nbar / (nbar + 1.0);
    double p = 1.0 / (nbar + 1.0);
    double retained = 0.0;
    int n = 0;
    while (retained < 1.0 - weight_cutoff) {
        out.emplace_back(n, p);
        retained += p;
        p *= ratio;
        ++n;
    }
    for (auto& [k, w] : out) w /= retained;
    return out;
}

Eigen::Matrix2cd rotation_matrix(double theta, double phi) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const Complex i(0.0, 1.0);
    Eigen::Matrix2cd r;
    r << c, -i * std::exp(-i * phi) * s,  //
        -i * std::exp(i * phi) * s, c;
    return r;
}

CompositeState apply_global_rotation(const CompositeState& state, double theta, double phi) {
    const Eigen::Matrix2cd r = rotation_matrix(theta, phi);
    Eigen::Matrix4cd r2 = Eigen::Matrix4cd::Zero();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) r2(2 * a + c, 2 * b + d) = r(a, b) * r(c, d);

    const int mdim = state.space.motional_dim();
    CompositeState out = state;
    for (int m = 0; m < mdim; ++m) {
        Eigen::Vector4cd v;
        for (int s = 0; s < 4; ++s) v[s] = state.amplitudes[s * mdim + m];
        const Eigen::Vector4cd w = r2 * v;
        for (int s = 0; s < 4; ++s) out.amplitudes[s * mdim + m] = w[s];
    }
    return out;
}

Observables reduce_observables(const CompositeState& state) {
    const auto& sp = state.space;
    Observables obs;
    for (int s = 0; s < 4; ++s) {
        double w = 0.0;
        for (int nc = 0; nc < sp.n_cm; ++nc)
            for (int nb = 0; nb < sp.n_bm; ++nb) w += std::norm(state.amplitudes[sp.index(s, nc, nb)]);
        if (s == kDownDown) obs.p0 += w;
        else if (s == kUpUp) obs.p2 += w;
        else obs.p1 += w;
    }
    for (int s = 0; s < 4; ++s) {
        for (int nc = 0; nc < sp.n_cm; ++nc) {
            for (int nb = 0; nb < sp.n_bm; ++nb) {
                const Complex amp = state.amplitudes[sp.index(s, nc, nb)];
                const double pr = std::norm(amp);
                obs.mean_n[kModeCm] += pr * nc;
                obs.mean_n[kModeBm] += pr * nb;
                // <a> couples n and n-1 within a mode.
                if (nc + 1 < sp.n_cm) {
                    obs.mean_a[kModeCm] += std::conj(amp) * std::sqrt(nc + 1.0) *
                                           state.amplitudes[sp.index(s, nc + 1, nb)];
                }
                if (nb + 1 < sp.n_bm) {
                    obs.mean_a[kModeBm] += std::conj(amp) * std::sqrt(nb + 1.0) *
                                           state.amplitudes[sp.index(s, nc, nb + 1)];
                }
            }
        }
    }
    return obs;
}

}  // namespace otdf
