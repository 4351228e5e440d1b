#include "sgwave/parabolic.hpp"

#include <cmath>

namespace sgw {

namespace {

void check_state(const PotentialModel& model, const ExtendedState& state) {
    model.check_feasible(state.tau);
    const int d = model.dim();
    if (static_cast<int>(state.z.size()) != d || static_cast<int>(state.u.size()) != d)
        throw dimension_error("parabolic: state blocks must all have the model dimension");
}

}  // namespace

Mat build_B(Variant variant, const PotentialModel& model, const ExtendedState& state) {
    check_state(model, state);
    const int d = model.dim();
    const Mat id = Mat::identity(d);
    const Mat b = b_matrix(model, state.tau);
    Mat out(3 * d, 3 * d);
    out.set_block(0, 0, id);
    if (variant == Variant::Modified94) out.set_block(d, 0, id);
    out.set_block(d, 2 * d, id);
    out.set_block(2 * d, d, -1.0 * id);  // -d(z), with d = Id
    out.set_block(2 * d, 2 * d, b);
    return out;
}

Mat build_Df(Variant variant, const PotentialModel& model, const ExtendedState& state) {
    check_state(model, state);
    const int d = model.dim();
    const Mat id = Mat::identity(d);
    Mat out(3 * d, 3 * d);
    out.set_block(0, d, id);
    out.set_block(0, 2 * d, -1.0 * id);
    if (variant == Variant::Modified94) out.set_block(d, d, id);
    out.set_block(2 * d, 0, -1.0 * hessian(model, state.tau));  // D sigma = -D2W
    return out;
}

SpectrumReport parabolicity_check(Variant variant, const PotentialModel& model,
                                  const ExtendedState& state) {
    const Mat b_big = build_B(variant, model, state);
    SpectrumReport rep;
    rep.eigenvalues = eigenvalues(b_big);

    // Closed form: det((l-1)I) det(l^2 I - l b + I) with diagonal b.
    const Mat b = b_matrix(model, state.tau);
    const int d = model.dim();
    for (int i = 0; i < d; ++i) rep.predicted.emplace_back(1.0, 0.0);
    for (int i = 0; i < d; ++i) {
        const Complex half_b(0.5 * b(i, i), 0.0);
        const Complex disc = std::sqrt(Complex(0.25 * b(i, i) * b(i, i) - 1.0, 0.0));
        rep.predicted.push_back(half_b + disc);
        rep.predicted.push_back(half_b - disc);
    }

    rep.min_real_part = rep.eigenvalues.front().real();
    for (const auto& l : rep.eigenvalues) rep.min_real_part = std::min(rep.min_real_part, l.real());
    rep.max_mismatch = bottleneck_distance(rep.eigenvalues, rep.predicted);
    rep.ok = rep.min_real_part > 0.0;
    return rep;
}

SpectrumReport characteristic_speeds(Variant variant, const PotentialModel& model,
                                     const ExtendedState& state) {
    const Mat df = build_Df(variant, model, state);
    SpectrumReport rep;
    rep.eigenvalues = eigenvalues(df);

    const int d = model.dim();
    const double block = variant == Variant::Modified94 ? 1.0 : 0.0;
    for (int i = 0; i < d; ++i) rep.predicted.emplace_back(block, 0.0);
    const Vec mu = sym_eigenvalues(hessian(model, state.tau));
    for (double m : mu) {
        const Complex root = std::sqrt(Complex(m, 0.0));
        rep.predicted.push_back(root);
        rep.predicted.push_back(-root);
        if (m <= 1e-12) rep.elliptic = true;  // zero or imaginary speed
    }
    rep.min_real_part = rep.eigenvalues.front().real();
    for (const auto& l : rep.eigenvalues) rep.min_real_part = std::min(rep.min_real_part, l.real());
    rep.max_mismatch = bottleneck_distance(rep.eigenvalues, rep.predicted);
    // Nonzero speeds hold where D2W is strictly positive definite.
    rep.ok = !rep.elliptic || variant == Variant::Original93;
    return rep;
}

Mat modified_b_inverse(const PotentialModel& model, const ExtendedState& state) {
    check_state(model, state);
    const int d = model.dim();
    const Mat id = Mat::identity(d);
    const Mat b = b_matrix(model, state.tau);
    Mat out(3 * d, 3 * d);
    out.set_block(0, 0, id);
    out.set_block(d, 0, -1.0 * b);
    out.set_block(d, d, b);
    out.set_block(d, 2 * d, -1.0 * id);
    out.set_block(2 * d, 0, -1.0 * id);
    out.set_block(2 * d, d, id);
    return out;
}

SpectrumReport spectrum_equivalence(const PotentialModel& model, const ExtendedState& state) {
    const Mat df = build_Df(Variant::Modified94, model, state);
    const Mat b_big = build_B(Variant::Modified94, model, state);
    const Mat b_inv = inverse(b_big);

    SpectrumReport rep;
    rep.eigenvalues = eigenvalues(df);
    rep.predicted = eigenvalues(b_inv * df);
    rep.max_mismatch = bottleneck_distance(rep.eigenvalues, rep.predicted);
    double radius = 0.0;
    for (const auto& l : rep.eigenvalues) radius = std::max(radius, std::abs(l));
    rep.min_real_part = rep.eigenvalues.front().real();
    for (const auto& l : rep.eigenvalues) rep.min_real_part = std::min(rep.min_real_part, l.real());
    rep.ok = rep.max_mismatch <= 1e-8 * std::max(radius, 1.0);
    return rep;
}

}  // namespace sgw
