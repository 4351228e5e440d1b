#pragma once

#include <functional>
#include <vector>

#include "sgwave/potentials.hpp"

namespace sgw {

struct stiffness_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WaveParams {
    Vec q;          // integration constant, length = model dim
    double s = 0.0; // wave speed; 0 for standing waves
};

struct PhaseState {
    Vec tau;
    Vec tau_prime;
};

struct PhaseDeriv {
    Vec dtau;
    Vec dtau_prime;
};

// tau'' = DW(tau) - s^2 tau - q - s b(tau) tau'. At s = 0 this is the
// Hamiltonian standing-wave system. The D2Psi factor is the identity here;
// `twode_rhs_general` keeps the seam for a future nonconstant strain-gradient
// coefficient.
PhaseDeriv twode_rhs(const PotentialModel& model, const WaveParams& params, const PhaseState& state);

// H = 1/2 |tau'|^2 + q.tau - W(tau)  (the s = 0 invariant).
double hamiltonian(const PotentialModel& model, const Vec& q, const PhaseState& state);

// The drifted invariant of the s != 0 theorem, adding s^2/2 |tau|^2. Equals
// the plain Hamiltonian when s = 0; this is the quantity stored on traces.
double hamiltonian(const PotentialModel& model, const WaveParams& params, const PhaseState& state);

// dH/dzeta = -s <b(tau) tau', tau'>.
double hamiltonian_drift_rate(const PotentialModel& model, const WaveParams& params,
                              const PhaseState& state);

struct OrbitSample {
    double zeta;
    PhaseState state;
    double h;  // Hamiltonian at this sample
};

struct StepStats {
    int accepted = 0;
    int rejected = 0;
    double min_step = 0.0;
    double max_step = 0.0;
};

struct OrbitTrace {
    std::vector<OrbitSample> samples;
    StepStats stats;
    bool truncated_infeasible = false;  // stopped early at the tau3 > 0 boundary
};

// Adaptive Dormand-Prince RK5(4) over zeta in [0, length]. Records every
// accepted step. Infeasible excursions truncate the trace with a flag;
// step-size underflow throws stiffness_error.
OrbitTrace integrate(const PotentialModel& model, const WaveParams& params, const PhaseState& state0,
                     double length, double tol);

// Low-level embedded RK5(4) stepper on a flat state vector, shared with the
// phase-plane event logic.
class Dopri5 {
public:
    using Rhs = std::function<void(const Vec&, Vec&)>;

    explicit Dopri5(Rhs rhs) : rhs_(std::move(rhs)) {}

    // One trial step of size h from y; fills y5 (5th order) and returns the
    // embedded error estimate (scaled max norm against atol+rtol*|y|).
    double try_step(const Vec& y, double h, Vec& y5, double atol, double rtol);

    // Advance from (t, y) to exactly t_end with adaptive steps.
    void advance_to(double& t, Vec& y, double t_end, double tol,
                    const std::function<void(double, const Vec&)>& on_accept = nullptr);

private:
    Rhs rhs_;
};

}  // namespace sgw
