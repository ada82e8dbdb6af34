#pragma once

#include <functional>

#include "otdf/fock.hpp"

namespace otdf {

// Time-dependent operator on a CompositeState. apply() computes
// out = H(t) psi with t the absolute sequence time, in the interaction
// picture with respect to the qubit splitting and the bare motional
// Hamiltonians.
class Hamiltonian {
  public:
    virtual ~Hamiltonian() = default;

    virtual void apply(double t, const VectorXc& psi, VectorXc& out) const = 0;

    // Dense matrix at time t, assembled column by column through apply().
    MatrixXc matrix(double t, const FockSpace& space) const;
};

class ZeroHamiltonian final : public Hamiltonian {
  public:
    void apply(double, const VectorXc&, VectorXc& out) const override { out.setZero(); }
};

class CallbackHamiltonian final : public Hamiltonian {
  public:
    using Fn = std::function<void(double, const VectorXc&, VectorXc&)>;
    explicit CallbackHamiltonian(Fn fn) : fn_(std::move(fn)) {}
    void apply(double t, const VectorXc& psi, VectorXc& out) const override { fn_(t, psi, out); }

  private:
    Fn fn_;
};

struct IntegratorOptions {
    double rel_tol = 1e-10;
    // Absolute tolerance per component; unit-norm states keep components
    // below 1, so tie it to rel_tol by default.
    double abs_tol = 0.0;  // 0 means rel_tol * 1e-2
    long max_steps = 50'000'000;

    double effective_abs_tol() const { return abs_tol > 0.0 ? abs_tol : rel_tol * 1e-2; }
};

using OdeRhs = std::function<void(double, const VectorXc&, VectorXc&)>;

struct IntegrationStats {
    long steps = 0;
    long rejected = 0;
    long rhs_evals = 0;
};

// Dormand-Prince 8(5,3) with PI step control, complex state vector.
// Advances y from t0 to t1 in place.
IntegrationStats integrate_adaptive(const OdeRhs& rhs, VectorXc& y, double t0, double t1,
                                    const IntegratorOptions& opts);

// Solves i d/dt psi = H(t) psi over [t0, t1]. The final norm must stay within
// 10 * rel_tol of 1 (no renormalization is performed; drift is a diagnostic).
CompositeState evolve(const CompositeState& state, const Hamiltonian& h,
                      std::pair<double, double> t_span, double rel_tol);

CompositeState evolve(const CompositeState& state, const Hamiltonian& h,
                      std::pair<double, double> t_span, const IntegratorOptions& opts);

}  // namespace otdf
