#pragma once

#include <limits>
#include <optional>

#include "sgwave/standing_wave.hpp"

namespace sgw {

struct no_orbit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct classification_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Zeros and critical points of W' for a 1-D model. `critical_points` holds
// every root of W''; `extremum_points` only those where W' has a genuine
// local extremum (tangential inflections excluded). Q is the largest critical
// value magnitude over extrema, +inf when W' is monotone.
struct CriticalStructure {
    std::vector<double> zeros;
    std::vector<double> critical_points;
    std::vector<double> extremum_points;
    double q_threshold = std::numeric_limits<double>::infinity();
    bool monotone = true;
};

CriticalStructure critical_structure(const PotentialModel& model);

struct RootCount {
    int count = 0;
    std::vector<double> roots;  // sorted
};

// Solutions of W'(tau) = q, using the monotone pieces between extrema.
RootCount count_roots(const PotentialModel& model, double q);

enum class OrbitTag {
    NoBoundedOrbits,
    PeriodicFamily,
    PeriodicFamilyPlusHeteroclinic,
    PeriodicFamilyPlusHomoclinic,
};

enum class EquilibriumType { Center, Saddle, Degenerate };

struct Equilibrium {
    double tau;
    double v_value;  // V(tau) = q tau - W(tau)
    EquilibriumType type;
};

struct OrbitClass {
    OrbitTag tag = OrbitTag::NoBoundedOrbits;
    std::vector<Equilibrium> equilibria;
    bool physical = true;  // all relevant orbits keep tau3 > 0 where that applies
    // Connecting-orbit data, when present:
    double saddle_base = 0.0;   // saddle the connection is based at
    double saddle_other = 0.0;  // target saddle (het) or turning point (hom)
    double orbit_min_tau = 0.0, orbit_max_tau = 0.0;
};

std::string to_string(OrbitTag tag);

// Orbit classification for given q per the 1-D phase-plane analysis.
// `equal_tol` is the relative tolerance for declaring the two V-maxima equal
// (heteroclinic) rather than distinct (homoclinic).
OrbitClass classify(const PotentialModel& model, double q, double equal_tol = 1e-9);

struct HomoclinicCheck {
    bool physical;
    double v_at_zero;
    double v_at_tau_r;
};

// Compressible 1-D model, -Q < q < 0: physical homoclinic orbit exists iff
// V(0) > V(tau_r).
HomoclinicCheck physical_homoclinic_check(const PotentialModel& model, double q);

struct PeriodicOrbit1D {
    double energy;
    double tau_minus, tau_plus;
    double period;
    OrbitTrace profile;  // one period sampled by the ODE integrator
};

// Period by singularity-free quadrature: T(E) = sqrt(2) * Int dtau/sqrt(E-V)
// under tau = c + a sin(theta). Near-separatrix energies are handled by a
// cancellation-free evaluation of E - V anchored at the turning points.
double period_quadrature(const PotentialModel& model, double q, double E);

// Period plus the one-period ODE profile started at the left turning point.
PeriodicOrbit1D period_of_energy(const PotentialModel& model, double q, double E,
                                 bool with_profile = true, double ode_tol = 1e-10);

// Independent period measurement: integrate from (tau_-, 0) and locate the
// second zero crossing of tau'.
double ode_roundtrip_period(const PotentialModel& model, double q, double E, double tol = 1e-12);

// Energy window (V at the center, smaller adjacent V-maximum) of the periodic
// annulus for given q; requires 3 equilibria.
std::pair<double, double> energy_window(const PotentialModel& model, double q);

// Heteroclinic or homoclinic trace started tol-displaced along the unstable
// eigendirection of the base saddle.
OrbitTrace connecting_orbit(const PotentialModel& model, double q, double tol = 1e-6);

// The q = W'(tau_-) convention.
double q_from_tau_minus(const PotentialModel& model, double tau_minus);

// Scalar closed forms for 1-D models (thin wrappers over the potentials
// module; exposed for tests and the CLI).
double w_scalar(const PotentialModel& model, double tau);
double wp_scalar(const PotentialModel& model, double tau);
double wpp_scalar(const PotentialModel& model, double tau);

}  // namespace sgw
