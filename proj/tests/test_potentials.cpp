#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sgwave/potentials.hpp"

using namespace sgw;

namespace {

const ModelKind kAllKinds[] = {ModelKind::Shear1D_I,        ModelKind::Shear1D_II,
                               ModelKind::Compressible1D_III, ModelKind::Incompressible2D,
                               ModelKind::Compressible2D,     ModelKind::Full3D};

Vec random_feasible(const PotentialModel& m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-1.5, 1.5), upos(0.2, 2.5);
    Vec tau(m.dim());
    for (auto& t : tau) t = uni(rng);
    if (m.constrained()) tau.back() = upos(rng);
    return tau;
}

}  // namespace

TEST_CASE("energy closed-form anchor values") {
    CHECK(energy({ModelKind::Shear1D_I, 2.0}, {0.0}) == doctest::Approx(576.0));  // (2e^2+e^4)^2
    CHECK(energy({ModelKind::Shear1D_I, 2.0}, {std::sqrt(3.0)}) == doctest::Approx(225.0));
    // W vanishes at the wells tau = +-eps of model II.
    for (double eps : {0.5, 1.0, 2.0})
        CHECK(energy({ModelKind::Shear1D_II, eps}, {eps}) == doctest::Approx(0.0));
    CHECK(energy({ModelKind::Compressible1D_III, 0.0}, {1.0}) == doctest::Approx(0.0));
    // Nonnegativity over random states.
    std::mt19937_64 rng(1);
    for (ModelKind k : kAllKinds) {
        PotentialModel m{k, 1.3};
        for (int i = 0; i < 200; ++i) CHECK(energy(m, random_feasible(m, rng)) >= 0.0);
    }
}

TEST_CASE("gradient anchor values") {
    CHECK(gradient({ModelKind::Shear1D_I, 2.0}, {0.0})[0] == doctest::Approx(0.0));
    CHECK(gradient({ModelKind::Shear1D_I, 2.0}, {std::sqrt(3.0)})[0] == doctest::Approx(0.0).epsilon(1e-12));
    // W~'(tau) = 8 tau (tau^2-1)^3 at eps = 0.
    CHECK(gradient({ModelKind::Compressible1D_III, 0.0}, {0.5})[0] == doctest::Approx(-1.6875));
    // Printed form of the shear-I derivative at a generic point.
    const double t = 0.73, e = 1.7;
    const double printed =
        8 * t * (t * t + 1 - e * e) * (2 * (t * t + e * e) + (t * t - e * e) * (t * t - e * e));
    CHECK(gradient({ModelKind::Shear1D_I, e}, {t})[0] == doctest::Approx(printed).epsilon(1e-14));
}

TEST_CASE("hessian anchor values") {
    CHECK(hessian({ModelKind::Shear1D_I, 2.0}, {0.0})(0, 0) == doctest::Approx(-576.0));
    CHECK(hessian({ModelKind::Shear1D_II, 1.0}, {0.0})(0, 0) == doctest::Approx(-32.0));
    // W~''(tau) = 8 (tau^2-1)^2 (7 tau^2 - 1) at eps = 0.
    CHECK(hessian({ModelKind::Compressible1D_III, 0.0}, {1.0})(0, 0) == doctest::Approx(0.0));
    const double t = 0.9;
    CHECK(hessian({ModelKind::Compressible1D_III, 0.0}, {t})(0, 0) ==
          doctest::Approx(8 * std::pow(t * t - 1, 2) * (7 * t * t - 1)).epsilon(1e-13));
}

TEST_CASE("gradient and hessian agree with finite differences") {
    std::mt19937_64 rng(42);
    for (ModelKind k : kAllKinds) {
        for (double eps : {0.5, 1.0, 2.0}) {
            PotentialModel m{k, eps};
            auto f = [&](const Vec& tau) { return energy(m, tau); };
            for (int rep = 0; rep < 60; ++rep) {
                const Vec tau = random_feasible(m, rng);
                const double h = 1e-5 * std::max(1.0, norm(tau));
                const Vec g = gradient(m, tau);
                for (int i = 0; i < m.dim(); ++i) {
                    const double fd = oracle::fd_partial(f, tau, i, h);
                    CHECK(std::fabs(g[i] - fd) <= 1e-6 * std::max(1.0, std::fabs(g[i])));
                }
                const Mat hess = hessian(m, tau);
                for (int i = 0; i < m.dim(); ++i)
                    for (int j = 0; j < m.dim(); ++j) {
                        CHECK(hess(i, j) == hess(j, i));  // exact by construction
                        auto gj = [&](const Vec& t2) { return gradient(m, t2)[j]; };
                        const double fd = oracle::fd_partial(gj, tau, i, h);
                        CHECK(std::fabs(hess(i, j) - fd) <= 1e-5 * std::max(1.0, std::fabs(hess(i, j))));
                    }
            }
        }
    }
}

TEST_CASE("shear models are even with odd gradients") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (ModelKind k : {ModelKind::Shear1D_I, ModelKind::Shear1D_II}) {
        PotentialModel m{k, 1.4};
        for (int i = 0; i < 100; ++i) {
            const double t = uni(rng);
            CHECK(energy(m, {t}) == doctest::Approx(energy(m, {-t})).epsilon(1e-13));
            CHECK(gradient(m, {t})[0] == doctest::Approx(-gradient(m, {-t})[0]).epsilon(1e-13));
        }
    }
}

TEST_CASE("restriction consistency between 2D and 1D incompressible models") {
    PotentialModel two{ModelKind::Incompressible2D, 1.7};
    PotentialModel one_i{ModelKind::Shear1D_I, 1.7};
    PotentialModel one_ii{ModelKind::Shear1D_II, 1.7};
    for (double t : {-1.3, -0.2, 0.0, 0.45, 2.1}) {
        CHECK(energy(two, {t, 0.0}) == doctest::Approx(energy(one_i, {t})).epsilon(1e-12));
        CHECK(energy(two, {0.0, t}) == doctest::Approx(energy(one_ii, {t})).epsilon(1e-12));
    }
}

TEST_CASE("lambda_m") {
    CHECK(lambda_m({ModelKind::Shear1D_I, 2.0}, {0.0}) == doctest::Approx(576.0));
    // Closed form 8(e^6+e^4+2e^2) at m=0 for model II.
    CHECK(lambda_m({ModelKind::Shear1D_II, 1.0}, {0.0}) == doctest::Approx(32.0));
    CHECK(lambda_m({ModelKind::Shear1D_I, 0.5}, {0.0}) < 0.0);  // condition fails below eps = 1
    // 2D: lambda is minus the smallest Hessian eigenvalue.
    PotentialModel m2{ModelKind::Incompressible2D, 2.0};
    const Vec m = {0.1, 0.1};
    const Vec ev = sym_eigenvalues(hessian(m2, m));
    CHECK(lambda_m(m2, m) == doctest::Approx(-ev[0]).epsilon(1e-12));
    CHECK(lambda_m(m2, m) == doctest::Approx(690.992007364776).epsilon(1e-10));
}

TEST_CASE("viscosity matrix") {
    PotentialModel f3{ModelKind::Full3D, 1.0};
    Mat b = b_matrix(f3, {0.0, 0.0, 1.0});
    CHECK(b(0, 0) == doctest::Approx(1.0));
    CHECK(b(1, 1) == doctest::Approx(1.0));
    CHECK(b(2, 2) == doctest::Approx(2.0));
    b = b_matrix(f3, {0.0, 0.0, 2.0});
    CHECK(b(0, 0) == doctest::Approx(0.5));
    CHECK(b(2, 2) == doctest::Approx(1.0));
    CHECK(b(0, 1) == 0.0);

    // Shear flow: constant identity viscosity.
    b = b_matrix({ModelKind::Shear1D_I, 2.0}, {0.7});
    CHECK(b.rows() == 1);
    CHECK(b(0, 0) == doctest::Approx(1.0));
    b = b_matrix({ModelKind::Incompressible2D, 2.0}, {0.7, -0.3});
    CHECK(b(0, 0) == doctest::Approx(1.0));
    CHECK(b(1, 1) == doctest::Approx(1.0));

    // Restricted components for the 2D compressible model: (tau2, tau3).
    b = b_matrix({ModelKind::Compressible2D, 1.0}, {0.5, 2.0});
    CHECK(b(0, 0) == doctest::Approx(0.5));
    CHECK(b(1, 1) == doctest::Approx(1.0));

    CHECK_THROWS_AS(b_matrix(f3, {0.0, 0.0, -1.0}), infeasible_error);
    CHECK_THROWS_AS(b_matrix(f3, {0.0, 0.0, 0.0}), infeasible_error);
}

TEST_CASE("matrix-form potential matches the polynomial form on planar F") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(-1.5, 1.5), upos(0.2, 2.5);
    PotentialModel f3{ModelKind::Full3D, 1.0};
    for (int rep = 0; rep < 1000; ++rep) {
        const double t1 = uni(rng), t2 = uni(rng), t3 = upos(rng);
        const double wm = energy_matrix_form(planar_deformation(t1, t2, t3), f3.epsilon);
        const double wp = energy(f3, {t1, t2, t3});
        CHECK(std::fabs(wm - wp) <= 1e-10 * std::max(1.0, std::fabs(wp)));
    }
    // The two reference configurations F+- are exact minima.
    for (double sgn : {-1.0, 1.0})
        CHECK(energy_matrix_form(planar_deformation(0.0, sgn * 1.0, 1.0), 1.0) ==
              doctest::Approx(energy(f3, {0.0, sgn * 1.0, 1.0})).epsilon(1e-12));
    CHECK(energy_matrix_form(Mat::identity(3), 1.0) ==
          doctest::Approx(energy(f3, {0.0, 0.0, 1.0})).epsilon(1e-12));
}

TEST_CASE("dimension and feasibility violations") {
    PotentialModel m{ModelKind::Incompressible2D, 1.0};
    CHECK_THROWS_AS(energy(m, {1.0}), dimension_error);
    CHECK_THROWS_AS(gradient(m, {1.0, 2.0, 3.0}), dimension_error);
    CHECK_THROWS_AS((PotentialModel{ModelKind::Shear1D_I, -1.0}), std::invalid_argument);
    PotentialModel c{ModelKind::Compressible1D_III, 1.0};
    CHECK_THROWS_AS(c.check_feasible({-0.5}), infeasible_error);
}
