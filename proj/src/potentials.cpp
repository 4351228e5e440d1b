#include "sgwave/potentials.hpp"

#include <cmath>

namespace sgw {

namespace {

// Shared core: the planar potential
//   W = P- * P+,  P-+ = 2 t1^2 + 2 (t2 -+ eps)^2 + R^2,  R = |tau|^2 - 1 - eps^2,
// with gradient and Hessian in the factored forms
//   DW1 = 8 t1 (|tau|^2 - eps^2) S        S := 2(|tau|^2 - t3^2 + eps^2) + R^2
//   DW2 = 8 t2 (|tau|^2 - eps^2) S - 32 eps^2 t2
//   DW3 = 8 t3 R S
// which reproduce the per-model expansions exactly.
struct Core {
    double t1, t2, t3, eps;
    double n2, R, S, G;  // |tau|^2, R, S, |tau|^2 - eps^2

    Core(const std::array<double, 3>& t, double e) : t1(t[0]), t2(t[1]), t3(t[2]), eps(e) {
        n2 = t1 * t1 + t2 * t2 + t3 * t3;
        R = n2 - 1.0 - eps * eps;
        S = 2.0 * (n2 - t3 * t3 + eps * eps) + R * R;
        G = n2 - eps * eps;
    }

    double energy() const {
        const double pm = 2.0 * t1 * t1 + 2.0 * (t2 - eps) * (t2 - eps) + R * R;
        const double pp = 2.0 * t1 * t1 + 2.0 * (t2 + eps) * (t2 + eps) + R * R;
        return pm * pp;
    }

    std::array<double, 3> grad() const {
        return {8.0 * t1 * G * S, 8.0 * t2 * G * S - 32.0 * eps * eps * t2, 8.0 * t3 * R * S};
    }

    std::array<std::array<double, 3>, 3> hess() const {
        std::array<std::array<double, 3>, 3> w{};
        w[0][0] = 8.0 * (G + 2.0 * t1 * t1) * S + 32.0 * t1 * t1 * G * G;
        w[1][1] = 8.0 * (G + 2.0 * t2 * t2) * S + 32.0 * (t2 * t2 * G * G - eps * eps);
        w[2][2] = 8.0 * (R + 2.0 * t3 * t3) * S + 32.0 * t3 * t3 * R * R;
        w[0][1] = w[1][0] = 16.0 * t1 * t2 * S + 32.0 * t1 * t2 * G * G;
        w[0][2] = w[2][0] = 16.0 * t1 * t3 * S + 32.0 * t1 * t3 * G * R;
        w[1][2] = w[2][1] = 16.0 * t2 * t3 * S + 32.0 * t2 * t3 * G * R;
        return w;
    }
};

}  // namespace

std::array<double, 3> PotentialModel::embed(const Vec& tau) const {
    check_dim(tau);
    switch (kind) {
        case ModelKind::Shear1D_I: return {tau[0], 0.0, 1.0};
        case ModelKind::Shear1D_II: return {0.0, tau[0], 1.0};
        case ModelKind::Compressible1D_III: return {0.0, 0.0, tau[0]};
        case ModelKind::Incompressible2D: return {tau[0], tau[1], 1.0};
        case ModelKind::Compressible2D: return {0.0, tau[0], tau[1]};
        case ModelKind::Full3D: return {tau[0], tau[1], tau[2]};
    }
    return {0.0, 0.0, 0.0};
}

std::string PotentialModel::name() const {
    switch (kind) {
        case ModelKind::Shear1D_I: return "shear1";
        case ModelKind::Shear1D_II: return "shear2";
        case ModelKind::Compressible1D_III: return "comp1";
        case ModelKind::Incompressible2D: return "incomp2d";
        case ModelKind::Compressible2D: return "comp2d";
        case ModelKind::Full3D: return "full3d";
    }
    return "?";
}

double energy(const PotentialModel& model, const Vec& tau) {
    model.check_dim(tau);
    return Core(model.embed(tau), model.epsilon).energy();
}

Vec gradient(const PotentialModel& model, const Vec& tau) {
    model.check_dim(tau);
    const auto g3 = Core(model.embed(tau), model.epsilon).grad();
    const auto act = model.active();
    Vec g(model.dim());
    for (int i = 0; i < model.dim(); ++i) g[i] = g3[act[i]];
    return g;
}

Mat hessian(const PotentialModel& model, const Vec& tau) {
    model.check_dim(tau);
    const auto h3 = Core(model.embed(tau), model.epsilon).hess();
    const auto act = model.active();
    const int d = model.dim();
    Mat h(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) h(i, j) = h3[act[i]][act[j]];
    return h;
}

double lambda_m(const PotentialModel& model, const Vec& m) {
    const Mat h = hessian(model, m);
    if (model.dim() == 1) return -h(0, 0);
    return -sym_eigenvalues(h).front();
}

Mat b_matrix(const PotentialModel& model, const Vec& tau) {
    model.check_dim(tau);
    const int d = model.dim();
    if (!model.constrained()) return Mat::identity(d);  // shear flow: constant coefficients
    const double t3 = tau.back();
    if (!(t3 > 0.0)) throw infeasible_error("b_matrix: tau3 <= 0");
    static const double diag3[3] = {1.0, 1.0, 2.0};
    const auto act = model.active();
    Mat b(d, d);
    for (int i = 0; i < d; ++i) b(i, i) = diag3[act[i]] / t3;
    return b;
}

Mat planar_deformation(double t1, double t2, double t3) {
    Mat f = Mat::identity(3);
    f(0, 2) = t1;
    f(1, 2) = t2;
    f(2, 2) = t3;
    return f;
}

double energy_matrix_form(const Mat& f, double epsilon) {
    if (f.rows() != 3 || f.cols() != 3) throw dimension_error("energy_matrix_form: F must be 3x3");
    const Mat ftf = f.transposed() * f;
    double frob2[2] = {0.0, 0.0};
    for (int which = 0; which < 2; ++which) {
        const double sgn = which == 0 ? -1.0 : 1.0;
        Mat c = Mat::identity(3);
        c(1, 2) = c(2, 1) = sgn * epsilon;
        c(2, 2) = 1.0 + epsilon * epsilon;
        const Mat d = ftf - c;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) frob2[which] += d(i, j) * d(i, j);
    }
    return frob2[0] * frob2[1];
}

PotentialModel make_model(const std::string& name, double epsilon) {
    if (name == "shear1") return {ModelKind::Shear1D_I, epsilon};
    if (name == "shear2") return {ModelKind::Shear1D_II, epsilon};
    if (name == "comp1") return {ModelKind::Compressible1D_III, epsilon};
    if (name == "incomp2d") return {ModelKind::Incompressible2D, epsilon};
    if (name == "comp2d") return {ModelKind::Compressible2D, epsilon};
    if (name == "full3d") return {ModelKind::Full3D, epsilon};
    throw std::invalid_argument("unknown model '" + name +
                                "' (expected shear1|shear2|comp1|incomp2d|comp2d|full3d)");
}

}  // namespace sgw
