#pragma once

#include "sgwave/fourier.hpp"
#include "sgwave/potentials.hpp"

namespace sgw {

struct MinimizeConfig {
    int modes = 32;
    int grid_factor = 4;  // collocation points per mode
    enum class StepRule { GradientDescent, LBFGS } rule = StepRule::LBFGS;
    int max_iters = 20000;
    double grad_tol = 1e-10;             // sup-norm of the L2 gradient on the grid
    double nonconstant_factor = 1e-4;    // sup|v| > factor * max(1,|m|) declares nonconstant
    double barrier_strength = 0.0;       // optional log barrier on tau3
    double seed_amplitude_factor = 0.1;
};

struct MinimizerResult {
    FourierProfile v;
    double action = 0.0;
    double el_residual = 0.0;  // sup-norm of v'' - DW~(v) + q~ on a 4x refined grid
    Vec q_recovered;           // period mean of DW(v + m)
    bool nonconstant = false;
    bool feasible = true;
    bool converged = false;
    bool trivial_only = false;  // descent fell back to the zero critical point
    int iterations = 0;
    double grad_sup = 0.0;
    double min_tau3 = 0.0;  // min over the grid of v3 + m3 (constrained kinds)
    double lambda = 0.0;    // lambda(m)
    bool condition_holds = false;
};

// Action I(v) = Int 1/2|v'|^2 + W(v+m) - W(m) - DW(m).v over one period,
// by collocation on an equispaced grid of grid_factor * N points. Returns
// +inf when a constrained kind leaves tau3 > 0 anywhere on the grid.
double action(const PotentialModel& model, const Vec& m, const FourierProfile& v,
              int grid_factor = 4);

// L2 gradient -v'' + DW(v+m) - DW(m) projected to zero mean, represented in
// the same truncated Fourier space (exact gradient of the discrete action).
FourierProfile action_gradient(const PotentialModel& model, const Vec& m, const FourierProfile& v,
                               int grid_factor = 4);

// (2 pi / T)^2 < lambda(m)?
bool existence_condition(const PotentialModel& model, const Vec& m, double period,
                         double* lambda_out = nullptr);

MinimizerResult minimize(const PotentialModel& model, const Vec& m, double period,
                         const MinimizeConfig& config = {});

// Number of singular values of the centered sample matrix above 1e-6 of the
// largest one; 0 for an identically zero profile.
int effective_dimension(const FourierProfile& v, Vec* singular_values = nullptr);

// sup-norm of v'' - DW~(v) + q~ on a grid refined 4x over the collocation
// grid, with q~ the grid mean of DW~(v).
double euler_lagrange_residual(const PotentialModel& model, const Vec& m, const FourierProfile& v,
                               int grid_factor = 4);

// Period mean of DW(v+m) on the refined grid.
Vec recover_q(const PotentialModel& model, const Vec& m, const FourierProfile& v,
              int grid_factor = 4);

}  // namespace sgw
