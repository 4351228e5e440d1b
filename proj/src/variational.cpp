#include "sgwave/variational.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace sgw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Workspace {
    const PotentialModel& model;
    Vec m;
    TrigGrid grid;
    Vec dw_m;
    double w_m;
    double barrier = 0.0;
    int tau3_index = -1;  // component index of tau3 within the reduced vector

    Workspace(const PotentialModel& mod, Vec mean, double period, int n_modes, int grid_factor,
              double barrier_strength)
        : model(mod),
          m(std::move(mean)),
          grid(period, n_modes, std::max(grid_factor, 3) * n_modes),
          dw_m(gradient(mod, m)),
          w_m(energy(mod, m)),
          barrier(barrier_strength) {
        if (mod.constrained()) tau3_index = mod.dim() - 1;
    }

    // Action (and optionally the L2-gradient) on the collocation grid.
    double eval(const FourierProfile& v, FourierProfile* grad_out, double* min_tau3_out = nullptr) const {
        const int d = model.dim();
        const int n = grid.n_grid();
        std::vector<Vec> vg, vpg;
        grid.eval(v, 0, vg);
        grid.eval(v, 1, vpg);

        double min_t3 = kInf;
        Vec tau(d);
        double acc = 0.0;
        std::vector<Vec> dwg;
        if (grad_out) dwg.assign(d, Vec(n, 0.0));
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < d; ++c) tau[c] = vg[c][i] + m[c];
            if (tau3_index >= 0) min_t3 = std::min(min_t3, tau[tau3_index]);
            if (tau3_index >= 0 && !(tau[tau3_index] > 0.0)) {
                if (min_tau3_out) *min_tau3_out = min_t3;
                return kInf;  // Remark 6.3 constraint by rejection
            }
            double kin = 0.0;
            for (int c = 0; c < d; ++c) kin += vpg[c][i] * vpg[c][i];
            double f = energy(model, tau) - w_m;
            for (int c = 0; c < d; ++c) f -= dw_m[c] * vg[c][i];
            acc += 0.5 * kin + f;
            if (barrier > 0.0 && tau3_index >= 0) acc -= barrier * std::log(tau[tau3_index]);
            if (grad_out) {
                const Vec dw = gradient(model, tau);
                for (int c = 0; c < d; ++c) dwg[c][i] = dw[c] - dw_m[c];
                if (barrier > 0.0 && tau3_index >= 0) dwg[tau3_index][i] -= barrier / tau[tau3_index];
            }
        }
        if (min_tau3_out) *min_tau3_out = tau3_index >= 0 ? min_t3 : 0.0;
        const double dx = grid.dx();
        if (grad_out) {
            // L2 gradient: -v'' + (DW~ projected to zero mean in Fourier space).
            *grad_out = FourierProfile(v.period, v.dim, v.n_modes);
            grid.project(dwg, *grad_out);
            const double w = v.omega();
            for (int c = 0; c < d; ++c)
                for (int k = 1; k <= v.n_modes; ++k) {
                    grad_out->a[c][k - 1] += w * w * k * k * v.a[c][k - 1];
                    grad_out->b[c][k - 1] += w * w * k * k * v.b[c][k - 1];
                }
        }
        return acc * dx;
    }
};

// Flat packing of the coefficient vector for the descent loop.
Vec pack(const FourierProfile& p) {
    Vec z;
    z.reserve(static_cast<size_t>(2 * p.dim) * p.n_modes);
    for (int c = 0; c < p.dim; ++c) {
        z.insert(z.end(), p.a[c].begin(), p.a[c].end());
        z.insert(z.end(), p.b[c].begin(), p.b[c].end());
    }
    return z;
}

void unpack(const Vec& z, FourierProfile& p) {
    size_t idx = 0;
    for (int c = 0; c < p.dim; ++c) {
        std::copy(z.begin() + idx, z.begin() + idx + p.n_modes, p.a[c].begin());
        idx += p.n_modes;
        std::copy(z.begin() + idx, z.begin() + idx + p.n_modes, p.b[c].begin());
        idx += p.n_modes;
    }
}

// Inner product weight: <f,g>_{L2} = (T/2) sum of coefficient products.
double coeff_dot(const Vec& a, const Vec& b) { return dot(a, b); }

}  // namespace

double action(const PotentialModel& model, const Vec& m, const FourierProfile& v, int grid_factor) {
    model.check_dim(m);
    if (v.dim != model.dim()) throw dimension_error("action: profile dim mismatch");
    Workspace ws(model, m, v.period, v.n_modes, grid_factor, 0.0);
    return ws.eval(v, nullptr);
}

FourierProfile action_gradient(const PotentialModel& model, const Vec& m, const FourierProfile& v,
                               int grid_factor) {
    model.check_dim(m);
    if (v.dim != model.dim()) throw dimension_error("action_gradient: profile dim mismatch");
    Workspace ws(model, m, v.period, v.n_modes, grid_factor, 0.0);
    FourierProfile g;
    if (ws.eval(v, &g) == kInf) throw infeasible_error("action_gradient: infeasible profile");
    return g;
}

bool existence_condition(const PotentialModel& model, const Vec& m, double period,
                         double* lambda_out) {
    const double lam = lambda_m(model, m);
    if (lambda_out) *lambda_out = lam;
    const double w0 = 2.0 * std::acos(-1.0) / period;
    return w0 * w0 < lam;
}

MinimizerResult minimize(const PotentialModel& model, const Vec& m, double period,
                         const MinimizeConfig& config) {
    model.check_dim(m);
    if (config.modes < 8) throw std::invalid_argument("minimize: need at least 8 modes");
    if (!(period > 0.0)) throw std::invalid_argument("minimize: period must be positive");
    const int d = model.dim();
    const int n_modes = config.modes;

    Workspace ws(model, m, period, n_modes, config.grid_factor, config.barrier_strength);

    MinimizerResult res;
    res.condition_holds = existence_condition(model, m, period, &res.lambda);

    // Seed: the destabilizing mode of the second variation, eta sin(2 pi x/T) v0
    // with v0 the eigenvector of the most negative eigenvalue of D2W(m).
    FourierProfile v(period, d, n_modes);
    {
        const Mat h = hessian(model, m);
        Vec v0(d, 0.0);
        if (d == 1) {
            v0[0] = 1.0;
        } else {
            const Vec evals = sym_eigenvalues(h);
            const double target = evals.front();
            // Inverse-iteration-free: solve (H - target I - tiny) x = e via a few
            // shifted solves would be overkill; for 2x2/3x3 use the nullspace of
            // (H - target I) found по largest cross product row.
            Mat a = h;
            for (int i = 0; i < d; ++i) a(i, i) -= target;
            // Find the column of adj(A) with the largest norm (2x2/3x3 only).
            if (d == 2) {
                // rows of A are multiples of the orthogonal complement of v0
                const double r0 = std::hypot(a(0, 0), a(0, 1));
                const double r1 = std::hypot(a(1, 0), a(1, 1));
                if (r0 >= r1 && r0 > 0) v0 = {-a(0, 1), a(0, 0)};
                else if (r1 > 0) v0 = {-a(1, 1), a(1, 0)};
                else v0 = {1.0, 0.0};
            } else {
                // cross products of row pairs
                auto cross = [&](int i, int j) {
                    return Vec{a(i, 1) * a(j, 2) - a(i, 2) * a(j, 1),
                               a(i, 2) * a(j, 0) - a(i, 0) * a(j, 2),
                               a(i, 0) * a(j, 1) - a(i, 1) * a(j, 0)};
                };
                Vec best(3, 0.0);
                for (auto [i, j] : {std::pair{0, 1}, {0, 2}, {1, 2}}) {
                    Vec c = cross(i, j);
                    if (norm(c) > norm(best)) best = c;
                }
                v0 = norm(best) > 0 ? best : Vec{1.0, 0.0, 0.0};
            }
            const double nv = norm(v0);
            for (double& c : v0) c /= nv;
        }
        double eta = config.seed_amplitude_factor * std::max(1.0, norm(m));
        if (model.constrained()) eta = std::min(eta, 0.5 * m.back());  // keep 0 < eta < m3
        for (int c = 0; c < d; ++c) v.b[c][0] = eta * v0[c];
    }

    // Descent on the packed coefficients. The L2 inner product is (T/2) times
    // the flat dot product, a constant factor that cancels in the directions.
    Vec z = pack(v);
    FourierProfile gprof(period, d, n_modes);
    double min_t3 = 0.0;
    double f = ws.eval(v, &gprof, &min_t3);
    Vec g = pack(gprof);

    const int mem = 10;
    std::deque<Vec> sk, yk;
    std::deque<double> rho;
    int it = 0;
    bool converged = false;
    for (; it < config.max_iters; ++it) {
        const double gsup = gprof.sup_norm();
        if (gsup <= config.grad_tol) {
            converged = true;
            break;
        }
        // Direction.
        Vec dir(z.size());
        if (config.rule == MinimizeConfig::StepRule::LBFGS && !sk.empty()) {
            dir = g;
            std::vector<double> alpha(sk.size());
            for (int i = static_cast<int>(sk.size()) - 1; i >= 0; --i) {
                alpha[i] = rho[i] * coeff_dot(sk[i], dir);
                for (size_t j = 0; j < dir.size(); ++j) dir[j] -= alpha[i] * yk[i][j];
            }
            const double gamma = coeff_dot(sk.back(), yk.back()) / coeff_dot(yk.back(), yk.back());
            for (double& c : dir) c *= gamma;
            for (size_t i = 0; i < sk.size(); ++i) {
                const double beta = rho[i] * coeff_dot(yk[i], dir);
                for (size_t j = 0; j < dir.size(); ++j) dir[j] += (alpha[i] - beta) * sk[i][j];
            }
            for (double& c : dir) c = -c;
        } else {
            for (size_t j = 0; j < z.size(); ++j) dir[j] = -g[j];
        }
        double slope = coeff_dot(g, dir);
        if (!(slope < 0.0)) {  // not a descent direction; reset to steepest
            for (size_t j = 0; j < z.size(); ++j) dir[j] = -g[j];
            slope = -coeff_dot(g, g);
            sk.clear();
            yk.clear();
            rho.clear();
        }
        // Armijo backtracking (infeasible trials return +inf and shrink).
        double step = 1.0;
        if (sk.empty()) step = 1.0 / std::max(1.0, std::sqrt(-slope));
        Vec z_new(z.size());
        FourierProfile v_new(period, d, n_modes), g_new_prof(period, d, n_modes);
        double f_new = f;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (size_t j = 0; j < z.size(); ++j) z_new[j] = z[j] + step * dir[j];
            unpack(z_new, v_new);
            f_new = ws.eval(v_new, &g_new_prof, &min_t3);
            if (f_new <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        Vec g_new = pack(g_new_prof);
        // L-BFGS memory update.
        Vec svec(z.size()), yvec(z.size());
        for (size_t j = 0; j < z.size(); ++j) {
            svec[j] = z_new[j] - z[j];
            yvec[j] = g_new[j] - g[j];
        }
        const double sy = coeff_dot(svec, yvec);
        if (sy > 1e-14 * norm(svec) * norm(yvec)) {
            sk.push_back(std::move(svec));
            yk.push_back(std::move(yvec));
            rho.push_back(1.0 / sy);
            if (static_cast<int>(sk.size()) > mem) {
                sk.pop_front();
                yk.pop_front();
                rho.pop_front();
            }
        }
        z = std::move(z_new);
        g = std::move(g_new);
        gprof = g_new_prof;
        f = f_new;
        unpack(z, v);
    }

    unpack(z, v);
    ws.eval(v, nullptr, &min_t3);
    res.v = v;
    res.iterations = it;
    res.converged = converged;
    res.action = action(model, m, v, config.grid_factor);
    res.grad_sup = gprof.sup_norm();
    res.el_residual = euler_lagrange_residual(model, m, v, config.grid_factor);
    res.q_recovered = recover_q(model, m, v, config.grid_factor);
    res.nonconstant = v.sup_norm() > config.nonconstant_factor * std::max(1.0, norm(m));
    res.trivial_only = converged && !res.nonconstant;
    if (model.constrained()) {
        res.min_tau3 = min_t3;
        res.feasible = min_t3 > 0.0;
    }
    return res;
}

int effective_dimension(const FourierProfile& v, Vec* singular_values) {
    const int d = v.dim;
    const int n = std::max(64, 8 * std::max(v.n_modes, 1));
    // Gram matrix of the centered samples (the profile is zero-mean already).
    Mat gram(d, d);
    for (int i = 0; i < n; ++i) {
        const Vec s = v.value_at(v.period * i / n);
        for (int c0 = 0; c0 < d; ++c0)
            for (int c1 = 0; c1 < d; ++c1) gram(c0, c1) += s[c0] * s[c1] / n;
    }
    Vec ev = sym_eigenvalues(gram);
    Vec sv(d);
    for (int i = 0; i < d; ++i) sv[i] = std::sqrt(std::max(ev[d - 1 - i], 0.0));  // descending
    if (singular_values) *singular_values = sv;
    const double smax = sv[0];
    if (!(smax > 0.0)) return 0;
    int count = 0;
    for (double s : sv)
        if (s > 1e-6 * smax) ++count;
    return count;
}

double euler_lagrange_residual(const PotentialModel& model, const Vec& m, const FourierProfile& v,
                               int grid_factor) {
    model.check_dim(m);
    const int refine = 4 * std::max(grid_factor, 3);
    TrigGrid grid(v.period, v.n_modes, refine * v.n_modes);
    std::vector<Vec> vg, vppg;
    grid.eval(v, 0, vg);
    grid.eval(v, 2, vppg);
    const int d = model.dim();
    const int n = grid.n_grid();
    const Vec dw_m = gradient(model, m);
    std::vector<Vec> dwt(d, Vec(n));
    Vec tau(d);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < d; ++c) tau[c] = vg[c][i] + m[c];
        const Vec dw = gradient(model, tau);
        for (int c = 0; c < d; ++c) dwt[c][i] = dw[c] - dw_m[c];
    }
    Vec qt(d, 0.0);
    for (int c = 0; c < d; ++c) {
        for (int i = 0; i < n; ++i) qt[c] += dwt[c][i];
        qt[c] /= n;
    }
    double sup = 0.0;
    for (int c = 0; c < d; ++c)
        for (int i = 0; i < n; ++i)
            sup = std::max(sup, std::fabs(vppg[c][i] - dwt[c][i] + qt[c]));
    return sup;
}

Vec recover_q(const PotentialModel& model, const Vec& m, const FourierProfile& v, int grid_factor) {
    model.check_dim(m);
    TrigGrid grid(v.period, v.n_modes, 4 * std::max(grid_factor, 3) * v.n_modes);
    std::vector<Vec> vg;
    grid.eval(v, 0, vg);
    const int d = model.dim();
    const int n = grid.n_grid();
    Vec q(d, 0.0);
    Vec tau(d);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < d; ++c) tau[c] = vg[c][i] + m[c];
        const Vec dw = gradient(model, tau);
        for (int c = 0; c < d; ++c) q[c] += dw[c];
    }
    for (int c = 0; c < d; ++c) q[c] /= n;
    return q;
}

}  // namespace sgw
