#pragma once

#include "sgwave/potentials.hpp"

namespace sgw {

// State (tau, z, u) of the second-order transformed systems, z = tau_x.
struct ExtendedState {
    Vec tau, z, u;
};

enum class Variant { Original93, Modified94 };

struct SpectrumReport {
    std::vector<Complex> eigenvalues;
    std::vector<Complex> predicted;  // closed-form roots when available
    double min_real_part = 0.0;
    double max_mismatch = 0.0;  // bottleneck matching distance vs predicted
    bool ok = true;             // the property the report checks
    bool elliptic = false;      // characteristic speeds: D2W has a nonpositive eigenvalue
};

// Second-order coefficient matrix of the transformed system, block layout
// (tau, z, u), size 3 dim. The two variants differ exactly in the (2,1)
// block (0 vs identity).
Mat build_B(Variant variant, const PotentialModel& model, const ExtendedState& state);

// First-order flux Jacobian; block (3,1) = D sigma = -D2W(tau), and the
// (2,2) block is 0 (Original93) or identity (Modified94).
Mat build_Df(Variant variant, const PotentialModel& model, const ExtendedState& state);

// Spectrum of B: all real parts must be positive (strict parabolicity).
// Predicted closed form: (lambda-1)^dim times lambda^2 - b_ii lambda + 1 per
// diagonal viscosity entry.
SpectrumReport parabolicity_check(Variant variant, const PotentialModel& model,
                                  const ExtendedState& state);

// Spectrum of Df vs {1 (Modified) / 0 (Original) with multiplicity dim} union
// {+-sqrt(mu)} over eigenvalues mu of D2W(tau); flags the elliptic region.
SpectrumReport characteristic_speeds(Variant variant, const PotentialModel& model,
                                     const ExtendedState& state);

// Modified94: spectrum of Df equals spectrum of B^{-1} Df.
SpectrumReport spectrum_equivalence(const PotentialModel& model, const ExtendedState& state);

// Closed-form inverse of the Modified94 B (identity d), for cross-checks.
Mat modified_b_inverse(const PotentialModel& model, const ExtendedState& state);

}  // namespace sgw
