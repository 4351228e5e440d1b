#include "sgwave/phase_plane.hpp"

#include <algorithm>
#include <cmath>

namespace sgw {

namespace {

void require_1d(const PotentialModel& model) {
    if (model.dim() != 1) throw dimension_error("phase_plane: 1-D model required, got " + model.name());
}

// 16-node Gauss-Legendre on [-1,1]; exact for polynomials of degree <= 31,
// so integrals of W' (degree <= 7) are exact up to rounding.
constexpr int kGl16 = 16;
const double kGlX[kGl16] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
const double kGlW[kGl16] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

double gl16(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < kGl16; ++i) s += kGlW[i] * f(c + h * kGlX[i]);
    return s * h;
}

struct Scalar1D {
    PotentialModel model;
    double w(double t) const { return energy(model, {t}); }
    double wp(double t) const { return gradient(model, {t})[0]; }
    double wpp(double t) const { return hessian(model, {t})(0, 0); }
    double v(double t, double q) const { return q * t - w(t); }
    // Exact-to-rounding W(b) - W(a) via Gauss quadrature of W'.
    double w_diff(double a, double b) const {
        return gl16([this](double t) { return wp(t); }, a, b);
    }
};

// Safeguarded bisection down to relative machine width; assumes a bracket.
double bisect(const std::function<double(double)>& f, double a, double b, double fa, double fb) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) return m;
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fa < 0) != (fm < 0)) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    (void)fb;
    return 0.5 * (a + b);
}

// Golden-section minimizer of |f| used for tangential (non-crossing) roots.
double golden_min_abs(const std::function<double(double)>& f, double a, double b) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = std::fabs(f(x1)), f2 = std::fabs(f(x2));
    for (int i = 0; i < 120 && (b - a) > 1e-14 * (1.0 + std::fabs(a) + std::fabs(b)); ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = std::fabs(f(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = std::fabs(f(x2));
        }
    }
    return 0.5 * (a + b);
}

// Scan bound: every zero of W' and W'' of the six models lies well inside
// |tau| <= 2.5 (1 + eps); beyond it the leading power dominates.
double scan_bound(const PotentialModel& model) { return 2.5 * (1.0 + model.epsilon); }

std::vector<double> scan_grid(double bound) {
    // Symmetric hybrid grid: log-spaced toward 0 plus a uniform overlay.
    std::vector<double> g;
    const int nlog = 400, nuni = 1600;
    g.push_back(0.0);
    for (int i = 0; i < nlog; ++i) {
        const double t = bound * std::pow(10.0, -8.0 * (1.0 - double(i) / (nlog - 1)));
        g.push_back(t);
        g.push_back(-t);
    }
    for (int i = 1; i <= nuni; ++i) {
        const double t = bound * double(i) / nuni;
        g.push_back(t);
        g.push_back(-t);
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

std::vector<double> find_crossing_roots(const std::function<double(double)>& f,
                                        const std::vector<double>& grid) {
    std::vector<double> roots;
    double prev_x = grid.front(), prev_f = f(prev_x);
    for (size_t i = 1; i < grid.size(); ++i) {
        const double x = grid[i], fx = f(x);
        if (prev_f == 0.0) roots.push_back(prev_x);
        else if ((prev_f < 0) != (fx < 0)) roots.push_back(bisect(f, prev_x, x, prev_f, fx));
        prev_x = x;
        prev_f = fx;
    }
    if (prev_f == 0.0) roots.push_back(prev_x);
    return roots;
}

void dedupe_sorted(std::vector<double>& v, double tol_scale) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v)
        if (out.empty() || std::fabs(x - out.back()) > 1e-9 * (tol_scale + std::fabs(x)))
            out.push_back(x);
    v = std::move(out);
}

}  // namespace

double w_scalar(const PotentialModel& model, double tau) {
    require_1d(model);
    return Scalar1D{model}.w(tau);
}
double wp_scalar(const PotentialModel& model, double tau) {
    require_1d(model);
    return Scalar1D{model}.wp(tau);
}
double wpp_scalar(const PotentialModel& model, double tau) {
    require_1d(model);
    return Scalar1D{model}.wpp(tau);
}

double q_from_tau_minus(const PotentialModel& model, double tau_minus) {
    return wp_scalar(model, tau_minus);
}

CriticalStructure critical_structure(const PotentialModel& model) {
    require_1d(model);
    const Scalar1D s{model};
    const double bound = scan_bound(model);
    const auto grid = scan_grid(bound);

    CriticalStructure cs;
    auto fp = [&](double t) { return s.wp(t); };
    auto fpp = [&](double t) { return s.wpp(t); };

    cs.zeros = find_crossing_roots(fp, grid);
    // Newton polish with the closed-form W''.
    for (double& z : cs.zeros)
        for (int it = 0; it < 4; ++it) {
            const double d = s.wpp(z);
            if (std::fabs(d) < 1e-8) break;
            z -= s.wp(z) / d;
        }
    dedupe_sorted(cs.zeros, bound);

    cs.critical_points = find_crossing_roots(fpp, grid);
    dedupe_sorted(cs.critical_points, bound);

    // Tangential roots of W'' (no sign change): local dips of |W''| reaching
    // numerically zero, e.g. tau = +-1 for the compressible model at eps = 0.
    double wpp_scale = 1.0;
    for (double t : {0.0, 0.5 * bound, bound}) wpp_scale = std::max(wpp_scale, std::fabs(s.wpp(t)));
    std::vector<double> vals(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) vals[i] = std::fabs(fpp(grid[i]));
    for (size_t i = 1; i + 1 < grid.size(); ++i) {
        if (vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1] && vals[i] < 1e-4 * wpp_scale) {
            const double t = golden_min_abs(fpp, grid[i - 1], grid[i + 1]);
            if (std::fabs(s.wpp(t)) <= 1e-9 * wpp_scale) cs.critical_points.push_back(t);
        }
    }
    dedupe_sorted(cs.critical_points, bound);

    // Extrema of W': sign change of W'' across the critical point.
    for (double c : cs.critical_points) {
        const double d = 1e-5 * (1.0 + std::fabs(c));
        if (s.wpp(c - d) * s.wpp(c + d) < 0.0) cs.extremum_points.push_back(c);
    }

    if (!cs.extremum_points.empty()) {
        cs.monotone = false;
        double q = 0.0;
        for (double c : cs.extremum_points) q = std::max(q, std::fabs(s.wp(c)));
        cs.q_threshold = q;
    }
    return cs;
}

RootCount count_roots(const PotentialModel& model, double q) {
    require_1d(model);
    const Scalar1D s{model};
    const CriticalStructure cs = critical_structure(model);

    double bound = scan_bound(model);
    while (s.wp(bound) < std::fabs(q) * 1.1 + 1.0) bound *= 2.0;  // W' odd-like, increasing tails

    std::vector<double> breaks = cs.extremum_points;
    breaks.insert(breaks.begin(), -bound);
    breaks.push_back(bound);

    auto f = [&](double t) { return s.wp(t) - q; };
    RootCount rc;
    const double eq_tol = 1e-11 * std::max({1.0, std::fabs(q), cs.monotone ? 1.0 : cs.q_threshold});
    for (size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i], b = breaks[i + 1];
        const double fa = f(a), fb = f(b);
        if (std::fabs(fa) <= eq_tol) {
            rc.roots.push_back(a);
            continue;
        }
        if ((fa < 0) != (fb < 0)) {
            double r = bisect(f, a, b, fa, fb);
            for (int it = 0; it < 4; ++it) {
                const double d = s.wpp(r);
                if (std::fabs(d) < 1e-8) break;
                const double r2 = r - f(r) / d;
                if (r2 > a && r2 < b) r = r2;
            }
            rc.roots.push_back(r);
        }
    }
    if (!breaks.empty() && std::fabs(f(breaks.back())) <= eq_tol) rc.roots.push_back(breaks.back());
    dedupe_sorted(rc.roots, 1.0 + model.epsilon);
    rc.count = static_cast<int>(rc.roots.size());
    return rc;
}

std::string to_string(OrbitTag tag) {
    switch (tag) {
        case OrbitTag::NoBoundedOrbits: return "no_bounded_orbits";
        case OrbitTag::PeriodicFamily: return "periodic_family";
        case OrbitTag::PeriodicFamilyPlusHeteroclinic: return "periodic_family_plus_heteroclinic";
        case OrbitTag::PeriodicFamilyPlusHomoclinic: return "periodic_family_plus_homoclinic";
    }
    return "?";
}

namespace {

// Turning point of V(tau) = E on the far side of the center from `saddle`,
// i.e. the solution of V(tau) = v_level in [lo, hi] where V is monotone.
double solve_v_level(const Scalar1D& s, double q, double v_level, double lo, double hi) {
    auto f = [&](double t) { return s.v(t, q) - v_level; };
    double r = bisect(f, lo, hi, f(lo), f(hi));
    // One Newton polish; V' = q - W'.
    const double d = q - s.wp(r);
    if (std::fabs(d) > 1e-9) {
        const double r2 = r - f(r) / d;
        if (r2 > std::min(lo, hi) && r2 < std::max(lo, hi)) r = r2;
    }
    return r;
}

}  // namespace

OrbitClass classify(const PotentialModel& model, double q, double equal_tol) {
    require_1d(model);
    const Scalar1D s{model};
    const RootCount rc = count_roots(model, q);

    OrbitClass oc;
    auto equilibrium_of = [&](double t) {
        const double vpp = -s.wpp(t);
        EquilibriumType ty = EquilibriumType::Degenerate;
        const double scale = 1e-9 * (1.0 + std::fabs(s.wpp(t)));
        if (vpp > scale) ty = EquilibriumType::Center;
        else if (vpp < -scale) ty = EquilibriumType::Saddle;
        return Equilibrium{t, s.v(t, q), ty};
    };
    for (double r : rc.roots) oc.equilibria.push_back(equilibrium_of(r));

    if (rc.count != 3) {
        oc.tag = OrbitTag::NoBoundedOrbits;
        oc.physical = !model.constrained();  // no orbit at all; nothing physical to offer
        return oc;
    }

    const double tl = rc.roots[0], tm = rc.roots[1], tr = rc.roots[2];
    const double vl = s.v(tl, q), vr = s.v(tr, q);
    const double vscale = std::max({1.0, std::fabs(vl), std::fabs(vr)});

    if (std::fabs(vl - vr) <= equal_tol * vscale) {
        oc.tag = OrbitTag::PeriodicFamilyPlusHeteroclinic;
        oc.saddle_base = tl;
        oc.saddle_other = tr;
        oc.orbit_min_tau = tl;
        oc.orbit_max_tau = tr;
    } else {
        oc.tag = OrbitTag::PeriodicFamilyPlusHomoclinic;
        const bool base_left = vl < vr;
        const double base = base_left ? tl : tr;
        const double vbase = base_left ? vl : vr;
        // Turning point on the opposite side of the center.
        const double turn = base_left ? solve_v_level(s, q, vbase, tm, tr)
                                      : solve_v_level(s, q, vbase, tl, tm);
        oc.saddle_base = base;
        oc.saddle_other = turn;
        oc.orbit_min_tau = std::min(base, turn);
        oc.orbit_max_tau = std::max(base, turn);
    }
    oc.physical = model.constrained() ? (oc.orbit_min_tau > 0.0) : true;
    return oc;
}

HomoclinicCheck physical_homoclinic_check(const PotentialModel& model, double q) {
    require_1d(model);
    if (model.kind != ModelKind::Compressible1D_III)
        throw std::invalid_argument("physical_homoclinic_check: compressible 1-D model required");
    const CriticalStructure cs = critical_structure(model);
    if (!(q > -cs.q_threshold && q < 0.0))
        throw std::invalid_argument("physical_homoclinic_check: q must lie in (-Q, 0)");
    const Scalar1D s{model};
    const RootCount rc = count_roots(model, q);
    if (rc.count != 3) throw classification_error("physical_homoclinic_check: expected 3 roots");
    const double v0 = s.v(0.0, q);
    const double vr = s.v(rc.roots[2], q);
    return {v0 > vr, v0, vr};
}

std::pair<double, double> energy_window(const PotentialModel& model, double q) {
    const Scalar1D s{model};
    const RootCount rc = count_roots(model, q);
    if (rc.count != 3) throw no_orbit_error("energy_window: no periodic annulus for this q");
    const double emin = s.v(rc.roots[1], q);
    const double emax = std::min(s.v(rc.roots[0], q), s.v(rc.roots[2], q));
    return {emin, emax};
}

namespace {

// Cancellation-free evaluation of E - V(tau) over a periodic well.
//
// Direct evaluation loses all digits near the turning points once
// E - V ~ ulp(W); instead, near either turning point t we use
//   E - V(tau) = [V(t) - V(tau)] + (E - V(t)),
// where V(t) - V(tau) = q (t - tau) - Int_tau^t W' is evaluated by exact
// Gauss quadrature of the polynomial W' and the residual E - V(t) is pinned
// by the turning-point solve.
struct WellEval {
    const Scalar1D& s;
    double q, E;
    double tau_minus, tau_plus;
    double res_minus = 0.0, res_plus = 0.0;  // E - V at the solved turning points
    double near_frac = 0.15;

    double operator()(double tau) const {
        const double span = tau_plus - tau_minus;
        if (tau - tau_minus < near_frac * span)
            return q * (tau_minus - tau) - s.w_diff(tau, tau_minus) + res_minus;
        if (tau_plus - tau < near_frac * span)
            return q * (tau_plus - tau) - s.w_diff(tau, tau_plus) + res_plus;
        return E - s.v(tau, q);
    }
};

struct WellSetup {
    double tl, tm, tr;  // equilibria
    double emin, emax;
    double tau_minus, tau_plus;
    WellEval make_eval(const Scalar1D& s, double q, double E) const {
        WellEval ev{s, q, E, tau_minus, tau_plus};
        ev.res_minus = E - s.v(tau_minus, q);
        ev.res_plus = E - s.v(tau_plus, q);
        // Near the separatrix the direct residual is pure noise; the solve
        // already pinned V(t) = E there, so zero is the better estimate.
        const double wscale = std::max({std::fabs(s.w(tau_minus)), std::fabs(s.w(tau_plus)), 1.0});
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * wscale;
        if (std::fabs(ev.res_minus) < noise) ev.res_minus = 0.0;
        if (std::fabs(ev.res_plus) < noise) ev.res_plus = 0.0;
        return ev;
    }
};

WellSetup setup_well(const PotentialModel& model, double q, double E) {
    const Scalar1D s{model};
    const RootCount rc = count_roots(model, q);
    if (rc.count != 3) throw no_orbit_error("period_of_energy: no periodic annulus for this q");
    WellSetup ws;
    ws.tl = rc.roots[0];
    ws.tm = rc.roots[1];
    ws.tr = rc.roots[2];
    ws.emin = s.v(ws.tm, q);
    ws.emax = std::min(s.v(ws.tl, q), s.v(ws.tr, q));
    if (!(E > ws.emin && E < ws.emax))
        throw no_orbit_error("period_of_energy: E outside the periodic energy window");

    // Turning points. Near a saddle the level solve must run on the
    // anchored form of V(sigma) - V(tau) to keep digits.
    const double span_e = ws.emax - ws.emin;
    auto solve_turn = [&](double sigma, double interior) {
        const double gap = s.v(sigma, q) - E;  // >= 0, small near the separatrix
        if (gap < 1e-3 * span_e) {
            auto g = [&](double t) {
                // V(sigma) - V(t) - gap, all cancellation-free
                return q * (sigma - t) - s.w_diff(t, sigma) - gap;
            };
            return bisect(g, interior, sigma, g(interior), g(sigma));
        }
        return solve_v_level(Scalar1D{model}, q, E, interior, sigma);
    };
    ws.tau_minus = solve_turn(ws.tl, ws.tm);
    ws.tau_plus = solve_turn(ws.tr, ws.tm);
    return ws;
}

// Adaptive Gauss panels on f over [a,b].
double adaptive_gauss(const std::function<double(double)>& f, double a, double b, double tol,
                      int depth) {
    const double whole = gl16(f, a, b);
    const double m = 0.5 * (a + b);
    const double split = gl16(f, a, m) + gl16(f, m, b);
    if (depth > 42 || std::fabs(whole - split) <= tol) return split;
    return adaptive_gauss(f, a, m, 0.5 * tol, depth + 1) +
           adaptive_gauss(f, m, b, 0.5 * tol, depth + 1);
}

}  // namespace

double period_quadrature(const PotentialModel& model, double q, double E) {
    require_1d(model);
    const Scalar1D s{model};
    const WellSetup ws = setup_well(model, q, E);
    const WellEval emv = ws.make_eval(s, q, E);

    const double amp = 0.5 * (ws.tau_plus - ws.tau_minus);
    const double mid = 0.5 * (ws.tau_plus + ws.tau_minus);
    auto f = [&](double th) {
        const double ct = std::cos(th);
        const double tau = mid + amp * std::sin(th);
        double val = emv(tau);
        if (val <= 0.0) val = 1e-300;  // roundoff at the very endpoints
        return amp * ct / std::sqrt(val);
    };
    const double half_pi = std::asin(1.0);
    const double est = gl16(f, -half_pi, half_pi);
    const double tol = 1e-11 * std::max(1.0, std::fabs(est));
    return std::sqrt(2.0) * adaptive_gauss(f, -half_pi, half_pi, tol, 0);
}

PeriodicOrbit1D period_of_energy(const PotentialModel& model, double q, double E, bool with_profile,
                                 double ode_tol) {
    const WellSetup ws = setup_well(model, q, E);
    PeriodicOrbit1D orbit;
    orbit.energy = E;
    orbit.tau_minus = ws.tau_minus;
    orbit.tau_plus = ws.tau_plus;
    orbit.period = period_quadrature(model, q, E);
    if (with_profile) {
        const WaveParams params{{q}, 0.0};
        orbit.profile = integrate(model, params, PhaseState{{ws.tau_minus}, {0.0}}, orbit.period, ode_tol);
    }
    return orbit;
}

double ode_roundtrip_period(const PotentialModel& model, double q, double E, double tol) {
    const WellSetup ws = setup_well(model, q, E);
    const Scalar1D s{model};

    Dopri5 stepper([&](const Vec& y, Vec& dy) {
        dy = {y[1], s.wp(y[0]) - q};
    });

    // Walk fixed observation segments; refine the zero crossings of tau'
    // (y[1]) by Newton with re-integration from the bracket start. Segments
    // are a fraction of the harmonic period so a half period cannot hide
    // inside one segment.
    const double t_harm = 2.0 * std::acos(-1.0) / std::sqrt(std::max(std::fabs(s.wpp(ws.tm)), 1e-8));
    const double seg_len = t_harm / 16.0;
    double t = 0.0;
    Vec y = {ws.tau_minus, 0.0};
    int crossings = 0;
    double prev_t = 0.0;
    Vec prev_y = y;
    const double t_max = 1e4;
    while (t < t_max) {
        prev_t = t;
        prev_y = y;
        double h = std::min(seg_len, t_max - t);
        // single adaptive segment
        double seg_end = t + h;
        stepper.advance_to(t, y, seg_end, tol);
        if (t <= prev_t) break;
        if (prev_y[1] == 0.0 && t > 0 && crossings == 0 && prev_t == 0.0) {
            // starting point itself; ignore
        }
        if ((prev_y[1] < 0) != (y[1] < 0) && prev_t > 0.0) {
            // refine crossing in [prev_t, t]
            double ta = prev_t;
            Vec ya = prev_y;
            double tc = 0.5 * (prev_t + t);
            for (int it = 0; it < 60; ++it) {
                Vec yc = ya;
                double tt = ta;
                stepper.advance_to(tt, yc, tc, tol * 0.1);
                const double g = yc[1];
                const double dg = s.wp(yc[0]) - q;
                double step = g / dg;
                if (!std::isfinite(step)) break;
                const double tn = tc - step;
                if (std::fabs(tn - tc) < 1e-15 * std::max(1.0, tc)) {
                    tc = tn;
                    break;
                }
                tc = std::min(std::max(tn, ta), t);
                if (it >= 59) break;
                if (std::fabs(step) < 1e-15 * std::max(1.0, tc)) break;
            }
            ++crossings;
            if (crossings == 2) return tc;
        }
    }
    throw no_orbit_error("ode_roundtrip_period: failed to detect a full period");
}

OrbitTrace connecting_orbit(const PotentialModel& model, double q, double tol) {
    require_1d(model);
    const OrbitClass oc = classify(model, q);
    const bool het = oc.tag == OrbitTag::PeriodicFamilyPlusHeteroclinic;
    const bool hom = oc.tag == OrbitTag::PeriodicFamilyPlusHomoclinic;
    if (!het && !hom)
        throw classification_error("connecting_orbit: no connecting orbit for this q");

    const Scalar1D s{model};
    const double base = oc.saddle_base;
    const double target = het ? oc.saddle_other : base;
    // Center lies between the connection extremes.
    double center = 0.0;
    for (const auto& e : oc.equilibria)
        if (e.type == EquilibriumType::Center) center = e.tau;

    const double nu2 = s.wpp(base);
    if (!(nu2 > 0.0)) throw classification_error("connecting_orbit: base saddle is degenerate");
    const double nu = std::sqrt(nu2);
    const double dir = center > base ? 1.0 : -1.0;

    const WaveParams params{{q}, 0.0};
    PhaseState st{{base + dir * tol}, {dir * tol * nu}};

    OrbitTrace trace;
    auto record = [&](double zeta, const PhaseState& state) {
        trace.samples.push_back({zeta, state, hamiltonian(model, params, state)});
    };
    record(0.0, st);

    Dopri5 stepper([&](const Vec& y, Vec& dy) { dy = {y[1], s.wp(y[0]) - q}; });
    Vec y = {st.tau[0], st.tau_prime[0]};
    double t = 0.0;
    const double zeta_max = 400.0 / nu * std::log(1.0 / tol) + 100.0;
    const double stop_dist = 5.0 * tol;
    int turnings = 0;
    double prev_sign = dir;
    while (t < zeta_max) {
        double seg = t + std::min(0.05, zeta_max - t);
        stepper.advance_to(t, y, seg, 1e-12, [&](double zeta, const Vec& yy) {
            record(zeta, PhaseState{{yy[0]}, {yy[1]}});
        });
        const double d = std::hypot(y[0] - target, y[1]);
        if (d <= stop_dist) break;
        const double sgn = y[1] >= 0 ? 1.0 : -1.0;
        if (sgn != prev_sign) {
            ++turnings;
            prev_sign = sgn;
            if (het && turnings >= 1) break;      // overshoot past the target turning
            if (hom && turnings >= 2) break;      // fallback; normally distance stops first
        }
    }
    return trace;
}

}  // namespace sgw
