#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "sgwave/linalg.hpp"

namespace sgw {

// Thrown when a strain state violates the physical constraint tau3 > 0.
struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown on dimension mismatches between a model and a supplied vector.
struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class ModelKind {
    Shear1D_I,          // tau2 = 0, tau3 = 1
    Shear1D_II,         // tau1 = 0, tau3 = 1
    Compressible1D_III, // tau1 = tau2 = 0, tau = tau3
    Incompressible2D,   // tau3 = 1
    Compressible2D,     // tau1 = 0, tau = (tau2, tau3)
    Full3D,
};

// One of the six explicit phase-transitional elasticity models. All six are
// restrictions of the planar matrix potential |F^TF-C-|^2|F^TF-C+|^2 with
// selected strain components frozen, so every evaluation funnels through a
// single closed-form core.
struct PotentialModel {
    ModelKind kind = ModelKind::Shear1D_I;
    double epsilon = 1.0;

    // eps = 0 is admitted: the degenerate compressible potential (tau^2-1)^4
    // is the base case of the phase-plane perturbation analysis.
    PotentialModel() = default;
    PotentialModel(ModelKind k, double eps) : kind(k), epsilon(eps) {
        if (!(eps >= 0.0)) throw std::invalid_argument("PotentialModel: epsilon must be nonnegative");
    }

    int dim() const {
        switch (kind) {
            case ModelKind::Shear1D_I:
            case ModelKind::Shear1D_II:
            case ModelKind::Compressible1D_III: return 1;
            case ModelKind::Incompressible2D:
            case ModelKind::Compressible2D: return 2;
            case ModelKind::Full3D: return 3;
        }
        return 0;
    }

    // True for kinds carrying the tau3 > 0 constraint.
    bool constrained() const {
        return kind == ModelKind::Compressible1D_III || kind == ModelKind::Compressible2D ||
               kind == ModelKind::Full3D;
    }

    // Indices into the full (tau1,tau2,tau3) vector that this model varies.
    std::array<int, 3> active() const {
        switch (kind) {
            case ModelKind::Shear1D_I: return {0, -1, -1};
            case ModelKind::Shear1D_II: return {1, -1, -1};
            case ModelKind::Compressible1D_III: return {2, -1, -1};
            case ModelKind::Incompressible2D: return {0, 1, -1};
            case ModelKind::Compressible2D: return {1, 2, -1};
            case ModelKind::Full3D: return {0, 1, 2};
        }
        return {-1, -1, -1};
    }

    // Embed a reduced tau into the full 3-component strain.
    std::array<double, 3> embed(const Vec& tau) const;

    std::string name() const;

    void check_dim(const Vec& tau) const {
        if (static_cast<int>(tau.size()) != dim())
            throw dimension_error("tau has length " + std::to_string(tau.size()) + ", model " +
                                  name() + " expects " + std::to_string(dim()));
    }

    void check_feasible(const Vec& tau) const {
        check_dim(tau);
        if (constrained() && !(tau.back() > 0.0))
            throw infeasible_error("infeasible state: tau3 <= 0 for model " + name());
    }
};

// W(tau) for the selected model; >= 0 for all six.
double energy(const PotentialModel& model, const Vec& tau);

// DW(tau).
Vec gradient(const PotentialModel& model, const Vec& tau);

// D2W(tau), symmetric by construction.
Mat hessian(const PotentialModel& model, const Vec& tau);

// lambda(m) = -(smallest eigenvalue of D2W(m)); positive exactly where the
// nonconvexity assumption holds.
double lambda_m(const PotentialModel& model, const Vec& m);

// Viscosity matrix restricted to the model's active components: identity for
// the shear kinds, tau3^{-1} diag(1,1,2) restricted otherwise.
Mat b_matrix(const PotentialModel& model, const Vec& tau);

// Matrix form W(F) = |F^TF - C-|^2 |F^TF - C+|^2 evaluated literally on a
// general 3x3 deformation gradient.
double energy_matrix_form(const Mat& f, double epsilon);

// Planar deformation gradient [[1,0,t1],[0,1,t2],[0,0,t3]].
Mat planar_deformation(double t1, double t2, double t3);

PotentialModel make_model(const std::string& name, double epsilon);

}  // namespace sgw
