#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sgwave/parabolic.hpp"

using namespace sgw;

namespace {

ExtendedState feasible_state(const PotentialModel& m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-1.5, 1.5), upos(0.2, 2.5);
    ExtendedState st;
    st.tau.resize(m.dim());
    st.z.resize(m.dim());
    st.u.resize(m.dim());
    for (int c = 0; c < m.dim(); ++c) {
        st.tau[c] = uni(rng);
        st.z[c] = uni(rng);
        st.u[c] = uni(rng);
    }
    if (m.constrained()) st.tau.back() = upos(rng);
    return st;
}

const ModelKind kAllKinds[] = {ModelKind::Shear1D_I,        ModelKind::Shear1D_II,
                               ModelKind::Compressible1D_III, ModelKind::Incompressible2D,
                               ModelKind::Compressible2D,     ModelKind::Full3D};

}  // namespace

TEST_CASE("B block layout") {
    PotentialModel f3{ModelKind::Full3D, 1.0};
    const ExtendedState st{{0.0, 0.0, 1.0}, {0, 0, 0}, {0, 0, 0}};
    const Mat b93 = build_B(Variant::Original93, f3, st);
    REQUIRE(b93.rows() == 9);
    // Row blocks: [I 0 0; 0 0 I; 0 -I b]
    CHECK(b93(0, 0) == 1.0);
    CHECK(b93(3, 0) == 0.0);
    CHECK(b93(3, 6) == 1.0);
    CHECK(b93(6, 3) == -1.0);
    CHECK(b93(6, 6) == 1.0);
    CHECK(b93(8, 8) == 2.0);  // b33 = 2/tau3 at tau3 = 1

    const Mat b94 = build_B(Variant::Modified94, f3, st);
    // The variants differ exactly in the (2,1) block.
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) {
            const bool in_block21 = i >= 3 && i < 6 && j < 3;
            if (in_block21) CHECK(b94(i, j) == (i - 3 == j ? 1.0 : 0.0));
            else CHECK(b94(i, j) == b93(i, j));
        }

    // 1-D shear analogue: 3x3 with b = d = 1.
    PotentialModel s1{ModelKind::Shear1D_I, 2.0};
    const ExtendedState st1{{0.5}, {0.0}, {0.0}};
    const Mat b3 = build_B(Variant::Original93, s1, st1);
    REQUIRE(b3.rows() == 3);
    CHECK(b3(0, 0) == 1.0);
    CHECK(b3(1, 2) == 1.0);
    CHECK(b3(2, 1) == -1.0);
    CHECK(b3(2, 2) == 1.0);
}

TEST_CASE("Df block layout") {
    PotentialModel s1{ModelKind::Shear1D_I, 2.0};
    const ExtendedState st{{0.0}, {0.0}, {0.0}};
    const Mat d93 = build_Df(Variant::Original93, s1, st);
    const Mat d94 = build_Df(Variant::Modified94, s1, st);
    // Block (3,1) = -D2W: at tau=0, eps=2 that is +576.
    CHECK(d93(2, 0) == doctest::Approx(576.0));
    CHECK(d94(2, 0) == doctest::Approx(576.0));
    // (2,2) block: zero vs identity.
    CHECK(d93(1, 1) == 0.0);
    CHECK(d94(1, 1) == 1.0);
    CHECK(d93(0, 1) == 1.0);
    CHECK(d93(0, 2) == -1.0);
}

TEST_CASE("strict parabolicity with closed-form spectrum") {
    PotentialModel f3{ModelKind::Full3D, 1.0};
    // tau3 = 1: spectrum {1 x5, (1 +- i sqrt3)/2 x2 each}.
    const ExtendedState st{{0.2, -0.1, 1.0}, {0, 0, 0}, {0, 0, 0}};
    for (Variant v : {Variant::Original93, Variant::Modified94}) {
        const SpectrumReport rep = parabolicity_check(v, f3, st);
        CHECK(rep.ok);
        CHECK(rep.min_real_part == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(rep.max_mismatch < 1e-8);
        std::vector<Complex> want;
        for (int i = 0; i < 5; ++i) want.emplace_back(1.0, 0.0);
        const double s3 = std::sqrt(3.0) / 2;
        want.emplace_back(0.5, s3);
        want.emplace_back(0.5, -s3);
        want.emplace_back(0.5, s3);
        want.emplace_back(0.5, -s3);
        CHECK(bottleneck_distance(rep.eigenvalues, want) < 1e-8);
    }
    // tau3 = 2: quadratic factors l^2 - l/2 + 1 and l^2 - l + 1.
    const ExtendedState st2{{0.0, 0.0, 2.0}, {0, 0, 0}, {0, 0, 0}};
    const SpectrumReport r2 = parabolicity_check(Variant::Original93, f3, st2);
    CHECK(r2.ok);
    CHECK(r2.max_mismatch < 1e-9);
    std::vector<Complex> want2;
    for (int i = 0; i < 3; ++i) want2.emplace_back(1.0, 0.0);
    for (int rep = 0; rep < 2; ++rep) {
        want2.emplace_back(0.25, std::sqrt(1.0 - 1.0 / 16.0));
        want2.emplace_back(0.25, -std::sqrt(1.0 - 1.0 / 16.0));
    }
    want2.emplace_back(0.5, std::sqrt(3.0) / 2);
    want2.emplace_back(0.5, -std::sqrt(3.0) / 2);
    CHECK(bottleneck_distance(r2.eigenvalues, want2) < 1e-9);
    // Both variants share the spectrum.
    const SpectrumReport r2m = parabolicity_check(Variant::Modified94, f3, st2);
    CHECK(bottleneck_distance(r2.eigenvalues, r2m.eigenvalues) < 1e-8);
}

TEST_CASE("determinant matches the closed-form factorization at random lambda") {
    PotentialModel f3{ModelKind::Full3D, 1.0};
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> upos(0.3, 2.5), uni(-3.0, 3.0);
    for (int rep = 0; rep < 20; ++rep) {
        const double t3 = upos(rng);
        const ExtendedState st{{uni(rng) * 0.3, uni(rng) * 0.3, t3}, {0, 0, 0}, {0, 0, 0}};
        const Mat b = build_B(Variant::Original93, f3, st);
        const double l = uni(rng);
        Mat shifted = -1.0 * b;
        for (int i = 0; i < 9; ++i) shifted(i, i) += l;
        const double lhs = oracle::det(shifted);
        const double rhs = std::pow(l - 1.0, 3) * std::pow(l * l - l / t3 + 1.0, 2) *
                           (l * l - 2.0 * l / t3 + 1.0);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("strict parabolicity over random states, all models") {
    std::mt19937_64 rng(13);
    for (ModelKind k : kAllKinds) {
        PotentialModel m{k, 1.2};
        for (int i = 0; i < 30; ++i) {
            const ExtendedState st = feasible_state(m, rng);
            for (Variant v : {Variant::Original93, Variant::Modified94}) {
                const SpectrumReport rep = parabolicity_check(v, m, st);
                CHECK(rep.min_real_part > 0.0);
                CHECK(rep.max_mismatch < 1e-7);
            }
        }
    }
}

TEST_CASE("characteristic speeds") {
    PotentialModel s1{ModelKind::Shear1D_I, 2.0};
    // Convex region: speeds {1, +-sqrt(W''(2))}, all real nonzero.
    const double wpp2 = hessian(s1, {2.0})(0, 0);
    REQUIRE(wpp2 > 0.0);
    const ExtendedState st{{2.0}, {0.0}, {0.0}};
    const SpectrumReport rep = characteristic_speeds(Variant::Modified94, s1, st);
    CHECK_FALSE(rep.elliptic);
    CHECK(rep.ok);
    std::vector<Complex> want = {{1.0, 0.0}, {std::sqrt(wpp2), 0}, {-std::sqrt(wpp2), 0}};
    CHECK(bottleneck_distance(rep.eigenvalues, want) < 1e-8);
    CHECK(rep.max_mismatch < 1e-8);

    // Elliptic region: imaginary pair +-24i, flagged.
    const ExtendedState st0{{0.0}, {0.0}, {0.0}};
    const SpectrumReport rep0 = characteristic_speeds(Variant::Modified94, s1, st0);
    CHECK(rep0.elliptic);
    std::vector<Complex> want0 = {{1.0, 0.0}, {0.0, 24.0}, {0.0, -24.0}};
    CHECK(bottleneck_distance(rep0.eigenvalues, want0) < 1e-8);

    // Original system: zero speeds in the middle block.
    const SpectrumReport rep93 = characteristic_speeds(Variant::Original93, s1, st);
    std::vector<Complex> want93 = {{0.0, 0.0}, {std::sqrt(wpp2), 0}, {-std::sqrt(wpp2), 0}};
    CHECK(bottleneck_distance(rep93.eigenvalues, want93) < 1e-8);
}

TEST_CASE("zero speed flagged at a degenerate Hessian point") {
    // W~''(1) = 0 for the compressible model at eps = 0.
    PotentialModel comp{ModelKind::Compressible1D_III, 0.0};
    const ExtendedState st{{1.0}, {0.0}, {0.0}};
    const SpectrumReport rep = characteristic_speeds(Variant::Modified94, comp, st);
    CHECK(rep.elliptic);
}

TEST_CASE("spectrum equivalence of Df and B^-1 Df") {
    PotentialModel f3{ModelKind::Full3D, 1.0};
    const ExtendedState st{{0.1, 0.2, 1.0}, {0, 0, 0}, {0, 0, 0}};
    const SpectrumReport rep = spectrum_equivalence(f3, st);
    CHECK(rep.ok);
    CHECK(rep.max_mismatch < 1e-8);

    // 1-D: both spectra are {1, +-sqrt(W'')}.
    PotentialModel s1{ModelKind::Shear1D_I, 2.0};
    const ExtendedState st1{{2.0}, {0.0}, {0.0}};
    const SpectrumReport rep1 = spectrum_equivalence(s1, st1);
    CHECK(rep1.ok);
    const double c = std::sqrt(hessian(s1, {2.0})(0, 0));
    std::vector<Complex> want = {{1.0, 0.0}, {c, 0.0}, {-c, 0.0}};
    CHECK(bottleneck_distance(rep1.eigenvalues, want) < 1e-8);
}

TEST_CASE("closed-form inverse of the modified B") {
    std::mt19937_64 rng(14);
    for (ModelKind k : kAllKinds) {
        PotentialModel m{k, 0.9};
        const ExtendedState st = feasible_state(m, rng);
        const Mat b = build_B(Variant::Modified94, m, st);
        const Mat binv = modified_b_inverse(m, st);
        const Mat prod = b * binv;
        for (int i = 0; i < prod.rows(); ++i)
            for (int j = 0; j < prod.cols(); ++j)
                CHECK(prod(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    }
}

TEST_CASE("infeasible states are rejected") {
    PotentialModel f3{ModelKind::Full3D, 1.0};
    const ExtendedState bad{{0.0, 0.0, -0.5}, {0, 0, 0}, {0, 0, 0}};
    CHECK_THROWS_AS(build_B(Variant::Original93, f3, bad), infeasible_error);
    CHECK_THROWS_AS(build_Df(Variant::Modified94, f3, bad), infeasible_error);
}
