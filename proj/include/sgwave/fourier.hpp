#pragma once

#include <vector>

#include "sgwave/linalg.hpp"

namespace sgw {

// Zero-mean T-periodic vector field as a truncated real Fourier series:
//   v_c(x) = sum_{k=1..N} a[c][k-1] cos(2 pi k x / T) + b[c][k-1] sin(...).
// The zero mode is absent by construction, which pins the mean of v at 0.
struct FourierProfile {
    double period = 1.0;
    int dim = 1;
    int n_modes = 0;
    std::vector<Vec> a, b;  // [dim][n_modes]

    FourierProfile() = default;
    FourierProfile(double T, int d, int n)
        : period(T), dim(d), n_modes(n), a(d, Vec(n, 0.0)), b(d, Vec(n, 0.0)) {}

    double omega() const;           // 2 pi / period
    Vec value_at(double x) const;   // v(x)
    double sup_norm(int oversample = 8) const;
};

// Precomputed trig tables for an equispaced collocation grid of n_grid
// points on [0, T).
class TrigGrid {
public:
    TrigGrid(double period, int n_modes, int n_grid);

    int n_grid() const { return n_grid_; }
    double dx() const { return period_ / n_grid_; }
    double x(int i) const { return period_ * i / n_grid_; }

    // Evaluate the profile (or its derivative of given order, 0..2) on the
    // grid; out[c] has n_grid entries.
    void eval(const FourierProfile& p, int deriv, std::vector<Vec>& out) const;

    // Accumulate grid-function coefficients: given g[c] on the grid, add
    // (2/T) * Int g cos_k / sin_k dx into (ga, gb) - the L2 Riesz coefficients
    // of the zero-mean projection of g.
    void project(const std::vector<Vec>& g, FourierProfile& out) const;

private:
    double period_;
    int n_modes_, n_grid_;
    std::vector<double> cos_, sin_;  // [n_grid][n_modes]
};

// Least-squares fit (here: exact DFT projection) of grid samples onto N modes;
// samples[c] on an equispaced grid of size n over [0, T). Returns the profile
// of the samples minus their mean; `mean_out` receives the grid mean.
FourierProfile fit_profile(const std::vector<Vec>& samples, double period, int n_modes,
                           Vec* mean_out = nullptr);

}  // namespace sgw
