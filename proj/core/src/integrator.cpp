#include "otdf/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "otdf/errors.hpp"

namespace otdf {

MatrixXc Hamiltonian::matrix(double t, const FockSpace& space) const {
    const int n = space.dim();
    MatrixXc m(n, n);
    VectorXc e = VectorXc::Zero(n);
    VectorXc col(n);
    for (int j = 0; j < n; ++j) {
        e[j] = 1.0;
        apply(t, e, col);
        m.col(j) = col;
        e[j] = 0.0;
    }
    return m;
}

namespace {

// Hairer-Norsett-Wanner DOP853 tableau.
constexpr double c2 = 0.526001519587677318785587544488e-01;
constexpr double c3 = 0.789002279381515978178381316732e-01;
constexpr double c4 = 0.118350341907227396726757197510e+00;
constexpr double c5 = 0.281649658092772603273242802490e+00;
constexpr double c6 = 0.333333333333333333333333333333e+00;
constexpr double c7 = 0.25e+00;
constexpr double c8 = 0.307692307692307692307692307692e+00;
constexpr double c9 = 0.651282051282051282051282051282e+00;
constexpr double c10 = 0.6e+00;
constexpr double c11 = 0.857142857142857142857142857142e+00;

constexpr double a21 = 5.26001519587677318785587544488e-2;
constexpr double a31 = 1.97250569845378994544595329183e-2;
constexpr double a32 = 5.91751709536136983633785987549e-2;
constexpr double a41 = 2.95875854768068491816892993775e-2;
constexpr double a43 = 8.87627564304205475450678981324e-2;
constexpr double a51 = 2.41365134159266685502369798665e-1;
constexpr double a53 = -8.84549479328286085344864962717e-1;
constexpr double a54 = 9.24834003261792003115737966543e-1;
constexpr double a61 = 3.7037037037037037037037037037e-2;
constexpr double a64 = 1.70828608729473871279604482173e-1;
constexpr double a65 = 1.25467687566822425016691814123e-1;
constexpr double a71 = 3.7109375e-2;
constexpr double a74 = 1.70252211019544039314978060272e-1;
constexpr double a75 = 6.02165389804559606850219397283e-2;
constexpr double a76 = -1.7578125e-2;
constexpr double a81 = 3.70920001185047927108779319836e-2;
constexpr double a84 = 1.70383925712239993810214054705e-1;
constexpr double a85 = 1.07262030446373284651809199168e-1;
constexpr double a86 = -1.53194377486244017527936158236e-2;
constexpr double a87 = 8.27378916381402288758473766002e-3;
constexpr double a91 = 6.24110958716075717114429577812e-1;
constexpr double a94 = -3.36089262944694129406857109825e0;
constexpr double a95 = -8.68219346841726006818189891453e-1;
constexpr double a96 = 2.75920996994467083049415600797e1;
constexpr double a97 = 2.01540675504778934086186788979e1;
constexpr double a98 = -4.34898841810699588477366255144e1;
constexpr double a101 = 4.77662536438264365890433908527e-1;
constexpr double a104 = -2.48811461997166764192642586468e0;
constexpr double a105 = -5.90290826836842996371446475743e-1;
constexpr double a106 = 2.12300514481811942347288949897e1;
constexpr double a107 = 1.52792336328824235832596922938e1;
constexpr double a108 = -3.32882109689848629194453265587e1;
constexpr double a109 = -2.03312017085086261358222928593e-2;
constexpr double a111 = -9.3714243008598732571704021658e-1;
constexpr double a114 = 5.18637242884406370830023853209e0;
constexpr double a115 = 1.09143734899672957818500254654e0;
constexpr double a116 = -8.14978701074692612513997267357e0;
constexpr double a117 = -1.85200656599969598641566180701e1;
constexpr double a118 = 2.27394870993505042818970056734e1;
constexpr double a119 = 2.49360555267965238987089396762e0;
constexpr double a1110 = -3.0467644718982195003823669022e0;
constexpr double a121 = 2.27331014751653820792359768449e0;
constexpr double a124 = -1.05344954667372501984066689879e1;
constexpr double a125 = -2.00087205822486249909675718444e0;
constexpr double a126 = -1.79589318631187989172765950534e1;
constexpr double a127 = 2.79488845294199600508499808837e1;
constexpr double a128 = -2.85899827713502369474065508674e0;
constexpr double a129 = -8.87285693353062954433549289258e0;
constexpr double a1210 = 1.23605671757943030647266201528e1;
constexpr double a1211 = 6.43392746015763530355970484046e-1;

constexpr double b1 = 5.42937341165687622380535766363e-2;
constexpr double b6 = 4.45031289275240888144113950566e0;
constexpr double b7 = 1.89151789931450038304281599044e0;
constexpr double b8 = -5.8012039600105847814672114227e0;
constexpr double b9 = 3.1116436695781989440891606237e-1;
constexpr double b10 = -1.52160949662516078556178806805e-1;
constexpr double b11 = 2.01365400804030348374776537501e-1;
constexpr double b12 = 4.47106157277725905176885569043e-2;

// 3rd-order error comparison weights.
constexpr double e3_1 = 0.244094488188976377952755905512e+00;
constexpr double e3_9 = 0.733846688281611857341361741547e+00;
constexpr double e3_12 = 0.220588235294117647058823529412e-01;

// 5th-order error estimator weights.
constexpr double e5_1 = 0.1312004499419488073250102996e-01;
constexpr double e5_6 = -0.1225156446376204440720569753e+01;
constexpr double e5_7 = -0.4957589496572501915214079952e+00;
constexpr double e5_8 = 0.1664377182454986536961530415e+01;
constexpr double e5_9 = -0.3503288487499736816886487290e+00;
constexpr double e5_10 = 0.3341791187130174790297318841e+00;
constexpr double e5_11 = 0.8192320648511571246570742613e-01;
constexpr double e5_12 = -0.2235530786388629525884427845e-01;

}  // namespace

IntegrationStats integrate_adaptive(const OdeRhs& rhs, VectorXc& y, double t0, double t1,
                                    const IntegratorOptions& opts) {
    IntegrationStats stats;
    const double span = t1 - t0;
    if (span == 0.0) return stats;
    const double dir = span > 0.0 ? 1.0 : -1.0;
    // Local per-step errors accumulate over the run; controlling the stepper
    // a safety factor below the requested tolerance keeps the accumulated
    // error (norm drift in particular) within the caller's budget.
    constexpr double kAccumulationMargin = 50.0;
    const double rtol = opts.rel_tol / kAccumulationMargin;
    const double atol = opts.effective_abs_tol() / kAccumulationMargin;
    const long n = y.size();

    VectorXc k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), k8(n), k9(n), k10(n), k11(n),
        k12(n), yw(n), ynew(n);

    double t = t0;
    rhs(t, y, k1);
    ++stats.rhs_evals;

    // Initial step: conservative estimate from the first derivative scale.
    double dnf = 0.0, dny = 0.0;
    for (long i = 0; i < n; ++i) {
        const double sk = atol + rtol * std::abs(y[i]);
        dnf += std::norm(k1[i] / sk);
        dny += std::norm(y[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 * std::abs(span)
                                              : 0.01 * std::sqrt(dny / dnf);
    h = std::min(h, std::abs(span));
    h *= dir;

    constexpr double safety = 0.9;
    constexpr double min_scale = 1.0 / 3.0;
    constexpr double max_scale = 6.0;
    constexpr double alpha = 1.0 / 8.0;
    bool rejected = false;

    while (dir * (t1 - t) > 0.0) {
        if (stats.steps >= opts.max_steps) {
            throw IntegratorError("integrate_adaptive: max step count exceeded");
        }
        if (std::abs(h) < 1e-14 * std::max(std::abs(t), std::abs(t1))) {
            throw StiffnessError("integrate_adaptive: step size underflow");
        }
        if (dir * (t + h - t1) > 0.0) h = t1 - t;

        yw = y + h * (a21 * k1);
        rhs(t + c2 * h, yw, k2);
        yw = y + h * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h, yw, k3);
        yw = y + h * (a41 * k1 + a43 * k3);
        rhs(t + c4 * h, yw, k4);
        yw = y + h * (a51 * k1 + a53 * k3 + a54 * k4);
        rhs(t + c5 * h, yw, k5);
        yw = y + h * (a61 * k1 + a64 * k4 + a65 * k5);
        rhs(t + c6 * h, yw, k6);
        yw = y + h * (a71 * k1 + a74 * k4 + a75 * k5 + a76 * k6);
        rhs(t + c7 * h, yw, k7);
        yw = y + h * (a81 * k1 + a84 * k4 + a85 * k5 + a86 * k6 + a87 * k7);
        rhs(t + c8 * h, yw, k8);
        yw = y + h * (a91 * k1 + a94 * k4 + a95 * k5 + a96 * k6 + a97 * k7 + a98 * k8);
        rhs(t + c9 * h, yw, k9);
        yw = y + h * (a101 * k1 + a104 * k4 + a105 * k5 + a106 * k6 + a107 * k7 + a108 * k8 +
                      a109 * k9);
        rhs(t + c10 * h, yw, k10);
        yw = y + h * (a111 * k1 + a114 * k4 + a115 * k5 + a116 * k6 + a117 * k7 + a118 * k8 +
                      a119 * k9 + a1110 * k10);
        rhs(t + c11 * h, yw, k11);
        yw = y + h * (a121 * k1 + a124 * k4 + a125 * k5 + a126 * k6 + a127 * k7 + a128 * k8 +
                      a129 * k9 + a1210 * k10 + a1211 * k11);
        rhs(t + h, yw, k12);
        stats.rhs_evals += 11;

        ynew = y + h * (b1 * k1 + b6 * k6 + b7 * k7 + b8 * k8 + b9 * k9 + b10 * k10 + b11 * k11 +
                        b12 * k12);

        // Combined 5th/3rd-order error estimate (Hairer's dop853 scheme).
        double err3 = 0.0, err5 = 0.0;
        for (long i = 0; i < n; ++i) {
            const double sk = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const Complex sum_b = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] +
                                  b10 * k10[i] + b11 * k11[i] + b12 * k12[i];
            const Complex e3 = sum_b - e3_1 * k1[i] - e3_9 * k9[i] - e3_12 * k12[i];
            const Complex e5 = e5_1 * k1[i] + e5_6 * k6[i] + e5_7 * k7[i] + e5_8 * k8[i] +
                               e5_9 * k9[i] + e5_10 * k10[i] + e5_11 * k11[i] + e5_12 * k12[i];
            err3 += std::norm(e3 / sk);
            err5 += std::norm(e5 / sk);
        }
        double deno = err5 + 0.01 * err3;
        if (deno <= 0.0) deno = 1.0;
        const double err = std::abs(h) * err5 * std::sqrt(1.0 / (static_cast<double>(n) * deno));

        if (err <= 1.0) {
            t += h;
            y.swap(ynew);
            rhs(t, y, k1);
            ++stats.rhs_evals;
            ++stats.steps;
            double scale = err == 0.0 ? max_scale
                                      : std::clamp(safety * std::pow(err, -alpha), min_scale,
                                                   max_scale);
            if (rejected) scale = std::min(scale, 1.0);
            h *= scale;
            rejected = false;
        } else {
            ++stats.rejected;
            const double scale =
                std::clamp(safety * std::pow(err, -alpha), min_scale, 1.0);
            h *= scale;
            rejected = true;
        }
    }
    return stats;
}

CompositeState evolve(const CompositeState& state, const Hamiltonian& h,
                      std::pair<double, double> t_span, const IntegratorOptions& opts) {
    CompositeState out = state;
    auto rhs = [&h](double t, const VectorXc& psi, VectorXc& dpsi) {
        h.apply(t, psi, dpsi);
        dpsi *= Complex(0.0, -1.0);
    };
    integrate_adaptive(rhs, out.amplitudes, t_span.first, t_span.second, opts);
    out.time = t_span.second;
    const double drift = std::abs(out.norm2() - 1.0);
    if (drift > 10.0 * opts.rel_tol) {
        throw IntegratorError("evolve: norm drift " + std::to_string(drift) +
                              " exceeds 10 * rel_tol");
    }
    return out;
}

CompositeState evolve(const CompositeState& state, const Hamiltonian& h,
                      std::pair<double, double> t_span, double rel_tol) {
    IntegratorOptions opts;
    opts.rel_tol = rel_tol;
    return evolve(state, h, t_span, opts);
}

}  // namespace otdf
