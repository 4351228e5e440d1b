#pragma once

#include <cstdint>

#include "sgwave/potentials.hpp"

namespace sgw {

struct Grid {
    double period = 1.0;
    int n = 256;  // power of two, >= 16

    double dx() const { return period / n; }
    void validate() const;
};

// Grid samples of (tau, u), one contiguous array per component.
struct FieldState {
    std::vector<Vec> tau, u;  // [dim][n]
    double t = 0.0;

    static FieldState constant(const PotentialModel& model, const Grid& grid, const Vec& m,
                               const Vec& u0);
};

struct EnergyRecord {
    double t;
    double energy;
    double dissipation;
    double dEdt_numeric;  // filled after the run; NaN at the trace edges
};

struct EnergyTrace {
    std::vector<EnergyRecord> records;
};

struct DtControl {
    double dt = 0.0;   // 0: choose from the explicit stability estimate
    double cfl = 0.5;  // fraction of the explicit stability limit
    int save_every = 1;
    bool spectral = true;  // false: 4th-order finite differences + classic RK4
};

struct EvolveResult {
    FieldState state;
    EnergyTrace trace;
    bool truncated_infeasible = false;
    bool step_failure = false;
    double dt_used = 0.0;
    int steps = 0;
};

struct FieldDeriv {
    std::vector<Vec> dtau, du;
};

// (tau_t, u_t) = (u_x, (DW(tau))_x + (b(tau) u_x)_x - tau_xxx).
FieldDeriv semidiscrete_rhs(const PotentialModel& model, const Grid& grid, const FieldState& state,
                            bool spectral = true);

// Time integration: exponential ETDRK4 on the per-mode linear blocks
// (dispersion + frozen viscosity) with the nonlinear remainder explicit.
EvolveResult evolve(const PotentialModel& model, const Grid& grid, const FieldState& state0,
                    double t_end, const DtControl& control = {});

// Int u^2/2 + W(tau) + |tau_x|^2/2 dx.
double mechanical_energy(const PotentialModel& model, const Grid& grid, const FieldState& state);

// -Int u_x . b(tau) u_x dx  (always <= 0).
double dissipation_rate(const PotentialModel& model, const Grid& grid, const FieldState& state);

// Relative mechanical energy about the constant reference (m, u_mean):
// Int Psi(tau_x) + W(tau) - DW(m).tau - W(m) dx
//   + Int |u|^2/2 - |u_mean|^2/2 - u_mean.u dx.
double relative_energy(const PotentialModel& model, const Grid& grid, const FieldState& state,
                       const Vec& m, const Vec& u_mean);

struct ProbeResult {
    std::vector<double> times;
    std::vector<double> excess;       // relative energy above the wave, min over translates
    std::vector<double> l2_distance;  // orbital L2 distance, min over grid translates
    double bound_factor = 0.0;        // max excess / initial excess
    EvolveResult evolution;
};

// Perturb a standing-wave field (u = 0) by a random zero-mean co-periodic
// field of the given scale, evolve, and track the relative-energy excess over
// the wave orbit.
ProbeResult stability_probe(const PotentialModel& model, const Grid& grid, const FieldState& wave,
                            double perturbation_scale, double t_end, std::uint64_t seed,
                            const DtControl& control = {});

// Random zero-mean smooth field (modes 1..8), sup-normalized to `scale`.
Vec random_smooth_field(const Grid& grid, double scale, std::uint64_t seed);

// Fill dEdt_numeric by the 4th-order centered stencil on the record times
// (uniform spacing assumed).
void fill_numeric_dEdt(EnergyTrace& trace);

// Spectral first derivative of a periodic sample vector (exposed for tests).
Vec spectral_derivative(const Vec& f, double period, int order);

}  // namespace sgw
