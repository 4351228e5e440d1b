#include "sgwave/standing_wave.hpp"

#include <algorithm>
#include <cmath>

namespace sgw {

PhaseDeriv twode_rhs(const PotentialModel& model, const WaveParams& params, const PhaseState& state) {
    model.check_feasible(state.tau);
    const int d = model.dim();
    if (static_cast<int>(params.q.size()) != d || static_cast<int>(state.tau_prime.size()) != d)
        throw dimension_error("twode_rhs: q/tau' length mismatch");
    Vec acc = gradient(model, state.tau);
    for (int i = 0; i < d; ++i) acc[i] -= params.s * params.s * state.tau[i] + params.q[i];
    if (params.s != 0.0) {
        const Vec visc = b_matrix(model, state.tau) * state.tau_prime;
        for (int i = 0; i < d; ++i) acc[i] -= params.s * visc[i];
    }
    return {state.tau_prime, acc};
}

double hamiltonian(const PotentialModel& model, const Vec& q, const PhaseState& state) {
    model.check_dim(state.tau);
    return 0.5 * dot(state.tau_prime, state.tau_prime) + dot(q, state.tau) - energy(model, state.tau);
}

double hamiltonian(const PotentialModel& model, const WaveParams& params, const PhaseState& state) {
    double h = hamiltonian(model, params.q, state);
    if (params.s != 0.0) h += 0.5 * params.s * params.s * dot(state.tau, state.tau);
    return h;
}

double hamiltonian_drift_rate(const PotentialModel& model, const WaveParams& params,
                              const PhaseState& state) {
    const Vec bv = b_matrix(model, state.tau) * state.tau_prime;
    return -params.s * dot(bv, state.tau_prime);
}

namespace {

// Dormand-Prince RK5(4) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 35.0 / 384 - 5179.0 / 57600, E3 = 500.0 / 1113 - 7571.0 / 16695,
                 E4 = 125.0 / 192 - 393.0 / 640, E5 = -2187.0 / 6784 + 92097.0 / 339200,
                 E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;

}  // namespace

double Dopri5::try_step(const Vec& y, double h, Vec& y5, double atol, double rtol) {
    const size_t n = y.size();
    Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n);
    rhs_(y, k1);
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * A21 * k1[i];
    rhs_(tmp, k2);
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
    rhs_(tmp, k3);
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
    rhs_(tmp, k4);
    for (size_t i = 0; i < n; ++i)
        tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
    rhs_(tmp, k5);
    for (size_t i = 0; i < n; ++i)
        tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
    rhs_(tmp, k6);
    y5.resize(n);
    for (size_t i = 0; i < n; ++i)
        y5[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
    rhs_(y5, k7);
    double err = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double e =
            h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        const double sc = atol + rtol * std::max(std::fabs(y[i]), std::fabs(y5[i]));
        err = std::max(err, std::fabs(e) / sc);
    }
    return err;
}

void Dopri5::advance_to(double& t, Vec& y, double t_end, double tol,
                        const std::function<void(double, const Vec&)>& on_accept) {
    const double atol = tol, rtol = tol;
    double h = (t_end - t) / 100.0;
    if (h <= 0.0) return;
    const double hmin = std::max(1e-14 * std::fabs(t_end), 1e-300);
    Vec y5;
    while (t < t_end) {
        h = std::min(h, t_end - t);
        const double err = try_step(y, h, y5, atol, rtol);
        if (err <= 1.0) {
            t += h;
            y = y5;
            if (on_accept) on_accept(t, y);
            h *= std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (h < hmin) throw stiffness_error("Dopri5: step size underflow");
        }
    }
}

OrbitTrace integrate(const PotentialModel& model, const WaveParams& params, const PhaseState& state0,
                     double length, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("integrate: tol must be positive");
    model.check_feasible(state0.tau);
    const int d = model.dim();

    OrbitTrace trace;
    auto unpack = [d](const Vec& y) {
        return PhaseState{Vec(y.begin(), y.begin() + d), Vec(y.begin() + d, y.end())};
    };
    auto record = [&](double zeta, const Vec& y) {
        PhaseState st = unpack(y);
        const double h = hamiltonian(model, params, st);
        trace.samples.push_back({zeta, std::move(st), h});
    };

    Dopri5 stepper([&](const Vec& y, Vec& dy) {
        const PhaseDeriv pd = twode_rhs(model, params, unpack(y));
        dy.resize(2 * d);
        std::copy(pd.dtau.begin(), pd.dtau.end(), dy.begin());
        std::copy(pd.dtau_prime.begin(), pd.dtau_prime.end(), dy.begin() + d);
    });

    Vec y(2 * d);
    std::copy(state0.tau.begin(), state0.tau.end(), y.begin());
    std::copy(state0.tau_prime.begin(), state0.tau_prime.end(), y.begin() + d);
    record(0.0, y);

    double t = 0.0;
    double prev_t = 0.0;
    try {
        stepper.advance_to(t, y, length, tol, [&](double zeta, const Vec& yy) {
            record(zeta, yy);
            trace.stats.accepted++;
            const double dz = zeta - prev_t;
            prev_t = zeta;
            trace.stats.min_step =
                trace.stats.min_step == 0.0 ? dz : std::min(trace.stats.min_step, dz);
            trace.stats.max_step = std::max(trace.stats.max_step, dz);
        });
    } catch (const infeasible_error&) {
        trace.truncated_infeasible = true;
    }
    return trace;
}

}  // namespace sgw
