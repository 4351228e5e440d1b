#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sgwave/phase_plane.hpp"

using namespace sgw;

namespace {
const PotentialModel kShear1{ModelKind::Shear1D_I, 2.0};
const PotentialModel kShear1Mono{ModelKind::Shear1D_I, 0.5};
const PotentialModel kShear2{ModelKind::Shear1D_II, 1.0};
const PotentialModel kComp0{ModelKind::Compressible1D_III, 0.0};

// Frozen reference values (high-precision quadrature / root finding).
constexpr double kQShear1Eps2 = 312.744073389365459;
constexpr double kTauCShear1Eps2 = 0.864870893272511369;
constexpr double kQShear2Eps1 = 13.8437781581774846;
constexpr double kQComp0 = 1.90414754915435758;  // 8 (6/7)^3 sqrt(1/7)
}  // namespace

TEST_CASE("critical structure of shear model I") {
    const CriticalStructure cs = critical_structure(kShear1);
    REQUIRE(cs.zeros.size() == 3);
    CHECK(cs.zeros[0] == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-12));
    CHECK(cs.zeros[1] == doctest::Approx(0.0));
    CHECK(cs.zeros[2] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    REQUIRE(cs.extremum_points.size() == 2);
    CHECK(cs.extremum_points[1] == doctest::Approx(kTauCShear1Eps2).epsilon(1e-9));
    CHECK(cs.q_threshold == doctest::Approx(kQShear1Eps2).epsilon(1e-10));
    CHECK_FALSE(cs.monotone);
    // Zeros and extrema interlace.
    CHECK(cs.zeros[0] < cs.extremum_points[0]);
    CHECK(cs.extremum_points[0] < cs.zeros[1]);
    CHECK(cs.zeros[1] < cs.extremum_points[1]);
    CHECK(cs.extremum_points[1] < cs.zeros[2]);
}

TEST_CASE("monotone regime below eps = 1") {
    const CriticalStructure cs = critical_structure(kShear1Mono);
    CHECK(cs.monotone);
    CHECK(std::isinf(cs.q_threshold));
    REQUIRE(cs.zeros.size() == 1);
    CHECK(cs.zeros[0] == doctest::Approx(0.0));
    CHECK(cs.critical_points.empty());
}

TEST_CASE("compressible model at eps = 0: degenerate critical points") {
    const CriticalStructure cs = critical_structure(kComp0);
    // Roots of W'' = 8 (tau^2-1)^2 (7 tau^2 - 1): +-1 (tangential), +-sqrt(1/7).
    REQUIRE(cs.critical_points.size() == 4);
    CHECK(cs.critical_points[0] == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(cs.critical_points[1] == doctest::Approx(-std::sqrt(1.0 / 7.0)).epsilon(1e-9));
    CHECK(cs.critical_points[2] == doctest::Approx(std::sqrt(1.0 / 7.0)).epsilon(1e-9));
    CHECK(cs.critical_points[3] == doctest::Approx(1.0).epsilon(1e-6));
    // Only the +-sqrt(1/7) pair are extrema; Q from them.
    REQUIRE(cs.extremum_points.size() == 2);
    CHECK(cs.q_threshold == doctest::Approx(kQComp0).epsilon(1e-10));
}

TEST_CASE("shear II at eps <= 1 has the shear-I eps > 1 topology") {
    const CriticalStructure cs = critical_structure(kShear2);
    REQUIRE(cs.zeros.size() == 3);
    CHECK(cs.zeros[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(cs.zeros[2] == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(cs.extremum_points.size() == 2);
    CHECK(cs.q_threshold == doctest::Approx(kQShear2Eps1).epsilon(1e-10));
}

TEST_CASE("root counting across the threshold") {
    const double Q = critical_structure(kShear1).q_threshold;
    CHECK(count_roots(kShear1, 0.0).count == 3);
    CHECK(count_roots(kShear1, 2.0 * Q).count == 1);
    CHECK(count_roots(kShear1, -2.0 * Q).count == 1);
    CHECK(count_roots(kShear1, Q).count == 2);
    CHECK(count_roots(kShear1, Q * (1.0 - 1e-8)).count == 3);
    CHECK(count_roots(kShear1, Q * (1.0 + 1e-8)).count == 1);
    CHECK(count_roots(kShear1, -Q * (1.0 - 1e-8)).count == 3);
    CHECK(count_roots(kShear1, -Q * (1.0 + 1e-8)).count == 1);
    // Roots of W' = 0 are the zeros.
    const RootCount rc = count_roots(kShear1, 0.0);
    CHECK(rc.roots[0] == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-12));
    CHECK(rc.roots[2] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    // Monotone model: single root everywhere.
    for (double q : {-5.0, -0.1, 0.0, 2.0, 50.0}) CHECK(count_roots(kShear1Mono, q).count == 1);
}

TEST_CASE("root count is piecewise constant with jumps only at +-Q") {
    const double Q = critical_structure(kShear1).q_threshold;
    int prev = -1;
    double prev_q = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double q = -2.0 * Q + 4.0 * Q * i / 199.0;
        const int c = count_roots(kShear1, q).count;
        if (prev >= 0 && c != prev) {
            const bool near_threshold = std::fabs(std::fabs(q) - Q) < 0.03 * Q ||
                                        std::fabs(std::fabs(prev_q) - Q) < 0.03 * Q;
            CHECK(near_threshold);
        }
        prev = c;
        prev_q = q;
    }
}

TEST_CASE("classification") {
    const double Q = critical_structure(kShear1).q_threshold;
    CHECK(classify(kShear1, 0.0).tag == OrbitTag::PeriodicFamilyPlusHeteroclinic);
    CHECK(classify(kShear1, Q / 2).tag == OrbitTag::PeriodicFamilyPlusHomoclinic);
    CHECK(classify(kShear1, 1.5 * Q).tag == OrbitTag::NoBoundedOrbits);
    for (int i = 0; i < 50; ++i)
        CHECK(classify(kShear1Mono, -2.0 + 4.0 * i / 49.0).tag == OrbitTag::NoBoundedOrbits);

    // Heteroclinic at q=0: equal saddle energies, symmetric connection.
    const OrbitClass het = classify(kShear1, 0.0);
    REQUIRE(het.equilibria.size() == 3);
    CHECK(het.equilibria[0].type == EquilibriumType::Saddle);
    CHECK(het.equilibria[1].type == EquilibriumType::Center);
    CHECK(het.equilibria[2].type == EquilibriumType::Saddle);
    CHECK(het.equilibria[0].v_value == doctest::Approx(-225.0).epsilon(1e-12));
    CHECK(het.equilibria[2].v_value == doctest::Approx(-225.0).epsilon(1e-12));
    CHECK(het.physical);  // no tau3 constraint for shear

    // Compressible, q = 0: connection spans negative tau -> not physical.
    PotentialModel comp{ModelKind::Compressible1D_III, 0.3};
    const OrbitClass c0 = classify(comp, 0.0);
    CHECK(c0.tag == OrbitTag::PeriodicFamilyPlusHeteroclinic);
    CHECK_FALSE(c0.physical);

    // Near q = -Q the homoclinic is physical (small eps).
    PotentialModel comp005{ModelKind::Compressible1D_III, 0.05};
    const double Qc = critical_structure(comp005).q_threshold;
    const OrbitClass cn = classify(comp005, -0.99 * Qc);
    CHECK(cn.tag == OrbitTag::PeriodicFamilyPlusHomoclinic);
    CHECK(cn.physical);
    CHECK(cn.orbit_min_tau > 0.0);
}

TEST_CASE("physical homoclinic check") {
    PotentialModel comp{ModelKind::Compressible1D_III, 0.05};
    const double Q = critical_structure(comp).q_threshold;
    CHECK(Q == doctest::Approx(1.93387674580899).epsilon(1e-10));
    const HomoclinicCheck hc = physical_homoclinic_check(comp, -0.99 * Q);
    CHECK(hc.physical);
    CHECK(hc.v_at_zero == doctest::Approx(-1.0201126250390625).epsilon(1e-10));
    CHECK(hc.v_at_tau_r == doctest::Approx(-1.27666418448220).epsilon(1e-10));
    // Near q = 0^- there is no physical homoclinic (V(0) < V(r)).
    CHECK_FALSE(physical_homoclinic_check(comp, -1e-4 * Q).physical);
    CHECK_THROWS_AS(physical_homoclinic_check(comp, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(physical_homoclinic_check(kShear1, -1.0), std::invalid_argument);
}

TEST_CASE("period function: harmonic and separatrix limits") {
    const double span = -225.0 - (-576.0);
    const double harmonic = 2.0 * std::acos(-1.0) / 24.0;
    // Near the center the period approaches 2 pi / sqrt(lambda).
    const double t_low = period_quadrature(kShear1, 0.0, -576.0 + 1e-4 * span);
    CHECK(t_low == doctest::Approx(0.261806367802587).epsilon(1e-8));  // frozen oracle value
    CHECK(std::fabs(t_low - harmonic) <= 0.01 * harmonic);
    // Near the saddle the period diverges; frozen oracle values.
    CHECK(period_quadrature(kShear1, 0.0, -225.0 - 1e-8) == doctest::Approx(2.074289106).epsilon(2e-5));
    CHECK(period_quadrature(kShear1, 0.0, -225.0 - 1e-12) == doctest::Approx(2.760787345).epsilon(2e-3));
    // Monotone growth on the annulus (observation, not asserted by theory).
    double prev = 0.0;
    bool monotone = true;
    for (int i = 1; i <= 12; ++i) {
        const double e = -576.0 + span * i / 13.0;
        const double t = period_quadrature(kShear1, 0.0, e);
        if (t < prev) monotone = false;
        prev = t;
    }
    if (!monotone) MESSAGE("T(E) not monotone on the annulus for shear I eps=2");
}

TEST_CASE("turning points are symmetric for even wells") {
    const PeriodicOrbit1D orb = period_of_energy(kShear1, 0.0, -400.0, false);
    CHECK(orb.tau_plus == doctest::Approx(-orb.tau_minus).epsilon(1e-12));
}

TEST_CASE("quadrature period matches the ODE round trip") {
    for (double f : {0.25, 0.6, 0.85}) {
        const double e = -576.0 + (351.0) * f;
        const double tq = period_quadrature(kShear1, 0.0, e);
        const double tode = ode_roundtrip_period(kShear1, 0.0, e, 1e-12);
        CHECK(std::fabs(tq - tode) <= 1e-6 * tq);
    }
}

TEST_CASE("energy window validation") {
    CHECK_THROWS_AS(period_of_energy(kShear1, 0.0, -600.0, false), no_orbit_error);
    CHECK_THROWS_AS(period_of_energy(kShear1, 0.0, -100.0, false), no_orbit_error);
    CHECK_THROWS_AS(period_of_energy(kShear1Mono, 0.0, -1.0, false), no_orbit_error);
}

TEST_CASE("orbit profile conserves the energy relation and closes") {
    const double e = -420.0;
    const PeriodicOrbit1D orb = period_of_energy(kShear1, 0.0, e, true, 1e-11);
    REQUIRE(orb.profile.samples.size() > 10);
    for (const auto& s : orb.profile.samples) {
        const double t = s.state.tau[0];
        const double v = -energy(kShear1, {t});
        const double resid = 0.5 * s.state.tau_prime[0] * s.state.tau_prime[0] + v - e;
        CHECK(std::fabs(resid) <= 1e-8 * std::max(1.0, std::fabs(e)));
    }
    const auto& last = orb.profile.samples.back().state;
    CHECK(last.tau[0] == doctest::Approx(orb.tau_minus).epsilon(1e-6));
    CHECK(std::fabs(last.tau_prime[0]) < 1e-4);
}

TEST_CASE("heteroclinic trace connects the two saddles") {
    const double tol = 1e-6;
    const OrbitTrace tr = connecting_orbit(kShear1, 0.0, tol);
    REQUIRE(tr.samples.size() > 10);
    const auto& first = tr.samples.front().state;
    const auto& last = tr.samples.back().state;
    CHECK(std::fabs(first.tau[0] + std::sqrt(3.0)) < 10 * tol);
    const double dist = std::hypot(last.tau[0] - std::sqrt(3.0), last.tau_prime[0]);
    CHECK(dist < 10 * tol);
    // Energy stays on the saddle level.
    for (const auto& s : tr.samples) CHECK(s.h == doctest::Approx(-225.0).epsilon(1e-6));
}

TEST_CASE("homoclinic loop returns to its saddle") {
    const double Q = critical_structure(kShear1).q_threshold;
    const double q = Q / 2;
    const OrbitClass oc = classify(kShear1, q);
    REQUIRE(oc.tag == OrbitTag::PeriodicFamilyPlusHomoclinic);
    const double tol = 1e-6;
    const OrbitTrace tr = connecting_orbit(kShear1, q, tol);
    const auto& last = tr.samples.back().state;
    const double dist = std::hypot(last.tau[0] - oc.saddle_base, last.tau_prime[0]);
    CHECK(dist < 10 * tol);
    // The loop reaches the far turning point.
    double reach = oc.saddle_base;
    for (const auto& s : tr.samples) reach = std::min(reach, s.state.tau[0]);
    const double lo = std::min(oc.saddle_other, oc.saddle_base);
    CHECK(reach == doctest::Approx(lo).epsilon(1e-4));
}

TEST_CASE("physical compressible homoclinic stays at positive strain") {
    PotentialModel comp{ModelKind::Compressible1D_III, 0.05};
    const double Q = critical_structure(comp).q_threshold;
    const OrbitTrace tr = connecting_orbit(comp, -0.99 * Q, 1e-6);
    double min_tau = 1e30;
    for (const auto& s : tr.samples) min_tau = std::min(min_tau, s.state.tau[0]);
    CHECK(min_tau > 0.0);
    CHECK_FALSE(tr.truncated_infeasible);
}

TEST_CASE("tau_minus convention") {
    const double q = q_from_tau_minus(kShear1, 1.2);
    CHECK(q == doctest::Approx(wp_scalar(kShear1, 1.2)));
    const RootCount rc = count_roots(kShear1, q);
    bool found = false;
    for (double r : rc.roots)
        if (std::fabs(r - 1.2) < 1e-9) found = true;
    CHECK(found);
}

TEST_CASE("connecting orbit requires a connection") {
    CHECK_THROWS_AS(connecting_orbit(kShear1Mono, 0.0, 1e-6), classification_error);
    const double Q = critical_structure(kShear1).q_threshold;
    CHECK_THROWS_AS(connecting_orbit(kShear1, 2.0 * Q, 1e-6), classification_error);
}
