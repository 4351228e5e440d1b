#include "sgwave/evolution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "sgwave/fft.hpp"

namespace sgw {

namespace {

using Cx = std::complex<double>;
using CVec = std::vector<Cx>;

const double kPi = std::acos(-1.0);
const double kNan = std::numeric_limits<double>::quiet_NaN();

// The six scalar functions ETDRK4 needs, in hL units.
std::array<Cx, 6> etdrk4_funcs(Cx z) {
    const Cx ez = std::exp(z), ez2 = std::exp(0.5 * z);
    const Cx z2 = z * z, z3 = z2 * z;
    return {ez,
            ez2,
            (ez2 - 1.0) / z,
            (-4.0 - z + ez * (4.0 - 3.0 * z + z2)) / z3,
            (2.0 + z + ez * (-2.0 + z)) / z3,
            (-4.0 - 3.0 * z - z2 + ez * (4.0 - z)) / z3};
}

struct Block2 {
    Cx m00{0}, m01{0}, m10{0}, m11{0};

    void apply(Cx a, Cx b, Cx& oa, Cx& ob) const {
        oa = m00 * a + m01 * b;
        ob = m10 * a + m11 * b;
    }
};

// phi-type functions of the 2x2 matrix A = hL. Well-separated eigenvalues:
// diagonalize and use the scalar mean-value contour around each eigenvalue.
// Near-defective blocks: Cauchy-integral trapezoid with the (z-c) Jacobian
// factor on a small circle enclosing both eigenvalues.
std::array<Block2, 6> block_funcs(const Block2& a) {
    const Cx tr = a.m00 + a.m11;
    const Cx det = a.m00 * a.m11 - a.m01 * a.m10;
    const Cx disc = std::sqrt(tr * tr - 4.0 * det);
    const Cx l1 = 0.5 * (tr + disc), l2 = 0.5 * (tr - disc);

    auto scalar_contour = [](Cx z0) {
        std::array<Cx, 6> acc{};
        const int m = 32;
        for (int j = 0; j < m; ++j) {
            const double th = 2.0 * kPi * (j + 0.5) / m;
            const auto f = etdrk4_funcs(z0 + Cx(std::cos(th), std::sin(th)));
            for (int i = 0; i < 6; ++i) acc[i] += f[i];
        }
        for (auto& v : acc) v /= static_cast<double>(m);
        return acc;
    };

    std::array<Block2, 6> out{};
    if (std::abs(l1 - l2) > 1e-2 * (1.0 + std::abs(l1) + std::abs(l2))) {
        // Eigenvectors from the better-conditioned row of (A - l I).
        auto evec = [&](Cx l, Cx& v0, Cx& v1) {
            const Cx r00 = a.m00 - l, r01 = a.m01;
            const Cx r10 = a.m10, r11 = a.m11 - l;
            if (std::abs(r00) + std::abs(r01) >= std::abs(r10) + std::abs(r11)) {
                v0 = -r01;
                v1 = r00;
            } else {
                v0 = -r11;
                v1 = r10;
            }
            const double nn = std::sqrt(std::norm(v0) + std::norm(v1));
            v0 /= nn;
            v1 /= nn;
        };
        Cx s00, s10, s01, s11;
        evec(l1, s00, s10);
        evec(l2, s01, s11);
        const Cx dets = s00 * s11 - s01 * s10;
        const auto f1 = scalar_contour(l1), f2 = scalar_contour(l2);
        for (int i = 0; i < 6; ++i) {
            // S diag(f1,f2) S^{-1}
            const Cx a0 = f1[i], b0 = f2[i];
            out[i].m00 = (a0 * s00 * s11 - b0 * s01 * s10) / dets;
            out[i].m01 = (b0 - a0) * s00 * s01 / dets;
            out[i].m10 = (a0 - b0) * s10 * s11 / dets;
            out[i].m11 = (b0 * s00 * s11 - a0 * s01 * s10) / dets;
        }
    } else {
        const Cx c = 0.5 * (l1 + l2);
        const double radius = 1.0 + 0.6 * std::abs(l1 - l2);
        const int m = 64;
        for (int j = 0; j < m; ++j) {
            const double th = 2.0 * kPi * (j + 0.5) / m;
            const Cx z = c + radius * Cx(std::cos(th), std::sin(th));
            // resolvent (zI - A)^{-1}
            const Cx r00 = z - a.m00, r01 = -a.m01, r10 = -a.m10, r11 = z - a.m11;
            const Cx rdet = r00 * r11 - r01 * r10;
            const Cx i00 = r11 / rdet, i01 = -r01 / rdet, i10 = -r10 / rdet, i11 = r00 / rdet;
            const Cx jac = z - c;  // dz factor of the Cauchy integral
            const auto f = etdrk4_funcs(z);
            for (int i = 0; i < 6; ++i) {
                out[i].m00 += f[i] * jac * i00;
                out[i].m01 += f[i] * jac * i01;
                out[i].m10 += f[i] * jac * i10;
                out[i].m11 += f[i] * jac * i11;
            }
        }
        for (auto& blk : out) {
            blk.m00 /= double(m);
            blk.m01 /= double(m);
            blk.m10 /= double(m);
            blk.m11 /= double(m);
        }
    }
    return out;
}

struct HatState {
    std::vector<CVec> tau, u;  // [dim][n]
};

HatState to_hat(const FieldState& s) {
    HatState h;
    const int d = static_cast<int>(s.tau.size());
    h.tau.resize(d);
    h.u.resize(d);
    for (int c = 0; c < d; ++c) {
        h.tau[c].assign(s.tau[c].begin(), s.tau[c].end());
        h.u[c].assign(s.u[c].begin(), s.u[c].end());
        fft(h.tau[c], false);
        fft(h.u[c], false);
    }
    return h;
}

FieldState from_hat(const HatState& h, double t) {
    FieldState s;
    const int d = static_cast<int>(h.tau.size());
    const int n = static_cast<int>(h.tau[0].size());
    s.t = t;
    s.tau.assign(d, Vec(n));
    s.u.assign(d, Vec(n));
    for (int c = 0; c < d; ++c) {
        CVec tt = h.tau[c], uu = h.u[c];
        fft(tt, true);
        fft(uu, true);
        for (int i = 0; i < n; ++i) {
            s.tau[c][i] = tt[i].real();
            s.u[c][i] = uu[i].real();
        }
    }
    return s;
}

// Signed wavenumbers with the Nyquist mode zeroed for derivative symmetry.
Vec wavenumbers(const Grid& grid) {
    const int n = grid.n;
    Vec k(n);
    for (int i = 0; i < n; ++i) {
        const int j = i <= n / 2 ? i : i - n;
        k[i] = 2.0 * kPi * j / grid.period;
    }
    k[n / 2] = 0.0;
    return k;
}

class Etdrk4 {
public:
    Etdrk4(const PotentialModel& model, const Grid& grid, double h, const Vec& b_frozen)
        : model_(model), grid_(grid), dim_(model.dim()), k_(wavenumbers(grid)) {
        const int n = grid.n;
        tabs_.resize(static_cast<size_t>(dim_) * n);
        l_.resize(static_cast<size_t>(dim_) * n);
        for (int c = 0; c < dim_; ++c)
            for (int i = 0; i < n; ++i) {
                Block2 L;
                L.m01 = Cx(0.0, k_[i]);
                L.m10 = Cx(0.0, k_[i] * k_[i] * k_[i]);
                L.m11 = Cx(-b_frozen[c] * k_[i] * k_[i], 0.0);
                l_[idx(c, i)] = L;
                Block2 Lh = L;
                Lh.m00 *= h;
                Lh.m01 *= h;
                Lh.m10 *= h;
                Lh.m11 *= h;
                auto f = block_funcs(Lh);
                // Fold the step size into the phi combinations.
                for (int t = 2; t < 6; ++t) {
                    f[t].m00 *= h;
                    f[t].m01 *= h;
                    f[t].m10 *= h;
                    f[t].m11 *= h;
                }
                tabs_[idx(c, i)] = f;
            }
    }

    // Full semidiscrete RHS in Fourier space. Throws infeasible_error when a
    // constrained model crosses tau3 <= 0.
    void full_rhs(const HatState& v, HatState& out) const {
        const int n = grid_.n;
        out.tau.assign(dim_, CVec(n));
        out.u.assign(dim_, CVec(n));
        // Real-space fields.
        std::vector<Vec> tau(dim_, Vec(n)), ux(dim_, Vec(n));
        for (int c = 0; c < dim_; ++c) {
            CVec tmp = v.tau[c];
            fft(tmp, true);
            for (int i = 0; i < n; ++i) tau[c][i] = tmp[i].real();
            tmp = v.u[c];
            for (int i = 0; i < n; ++i) tmp[i] *= Cx(0.0, k_[i]);
            fft(tmp, true);
            for (int i = 0; i < n; ++i) ux[c][i] = tmp[i].real();
        }
        if (model_.constrained()) {
            for (int i = 0; i < n; ++i)
                if (!(tau[dim_ - 1][i] > 0.0)) throw infeasible_error("evolve: tau3 <= 0 on the grid");
        }
        // Pointwise DW and b(tau) u_x.
        std::vector<CVec> dwh(dim_, CVec(n)), bvh(dim_, CVec(n));
        Vec pt(dim_);
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < dim_; ++c) pt[c] = tau[c][i];
            const Vec dw = gradient(model_, pt);
            const Mat b = b_matrix(model_, pt);
            for (int c = 0; c < dim_; ++c) {
                dwh[c][i] = dw[c];
                bvh[c][i] = b(c, c) * ux[c][i];
            }
        }
        for (int c = 0; c < dim_; ++c) {
            fft(dwh[c], false);
            fft(bvh[c], false);
            for (int i = 0; i < n; ++i) {
                const Cx ik(0.0, k_[i]);
                out.tau[c][i] = ik * v.u[c][i];
                out.u[c][i] = ik * dwh[c][i] + ik * bvh[c][i] +
                              Cx(0.0, k_[i] * k_[i] * k_[i]) * v.tau[c][i];
            }
        }
    }

    void nonlin(const HatState& v, HatState& out) const {
        full_rhs(v, out);
        const int n = grid_.n;
        for (int c = 0; c < dim_; ++c)
            for (int i = 0; i < n; ++i) {
                const Block2& L = l_[idx(c, i)];
                Cx la, lb;
                L.apply(v.tau[c][i], v.u[c][i], la, lb);
                out.tau[c][i] -= la;
                out.u[c][i] -= lb;
            }
    }

    void step(HatState& v) const {
        HatState nu, na, nb, nc, a, b, c;
        nonlin(v, nu);
        apply_pair(kE2, kQ, v, nu, a);
        nonlin(a, na);
        apply_pair(kE2, kQ, v, na, b);
        nonlin(b, nb);
        HatState comb = nb;
        axpy(comb, 2.0, -1.0, nu);  // 2 N(b) - N(u)
        apply_pair(kE2, kQ, a, comb, c);
        nonlin(c, nc);

        HatState result;
        const int n = grid_.n;
        result.tau.assign(dim_, CVec(n));
        result.u.assign(dim_, CVec(n));
        for (int cc = 0; cc < dim_; ++cc)
            for (int i = 0; i < n; ++i) {
                const auto& t = tabs_[idx(cc, i)];
                Cx ra, rb, t1a, t1b, t2a, t2b, t3a, t3b;
                t[kE].apply(v.tau[cc][i], v.u[cc][i], ra, rb);
                t[kF1].apply(nu.tau[cc][i], nu.u[cc][i], t1a, t1b);
                t[kF2].apply(na.tau[cc][i] + nb.tau[cc][i], na.u[cc][i] + nb.u[cc][i], t2a, t2b);
                t[kF3].apply(nc.tau[cc][i], nc.u[cc][i], t3a, t3b);
                result.tau[cc][i] = ra + t1a + 2.0 * t2a + t3a;
                result.u[cc][i] = rb + t1b + 2.0 * t2b + t3b;
            }
        v = std::move(result);
    }

    const Vec& k() const { return k_; }

private:
    enum : int { kE = 0, kE2 = 1, kQ = 2, kF1 = 3, kF2 = 4, kF3 = 5 };

    size_t idx(int c, int i) const { return static_cast<size_t>(c) * grid_.n + i; }

    // out = T1 * base + T2 * nl, per mode.
    void apply_pair(int t1, int t2, const HatState& base, const HatState& nl, HatState& out) const {
        const int n = grid_.n;
        out.tau.assign(dim_, CVec(n));
        out.u.assign(dim_, CVec(n));
        for (int c = 0; c < dim_; ++c)
            for (int i = 0; i < n; ++i) {
                const auto& t = tabs_[idx(c, i)];
                Cx ea, eb, qa, qb;
                t[t1].apply(base.tau[c][i], base.u[c][i], ea, eb);
                t[t2].apply(nl.tau[c][i], nl.u[c][i], qa, qb);
                out.tau[c][i] = ea + qa;
                out.u[c][i] = eb + qb;
            }
    }

    static void axpy(HatState& y, double alpha, double beta, const HatState& x) {
        for (size_t c = 0; c < y.tau.size(); ++c)
            for (size_t i = 0; i < y.tau[c].size(); ++i) {
                y.tau[c][i] = alpha * y.tau[c][i] + beta * x.tau[c][i];
                y.u[c][i] = alpha * y.u[c][i] + beta * x.u[c][i];
            }
    }

    const PotentialModel& model_;
    Grid grid_;
    int dim_;
    Vec k_;
    std::vector<Block2> l_;
    std::vector<std::array<Block2, 6>> tabs_;
};

// Explicit-part stability rate: k_max sqrt(max |D2W|) for the hyperbolic
// coupling plus k_max^2 |b - b_frozen| for the viscosity remainder.
double explicit_rate(const PotentialModel& model, const Grid& grid, const FieldState& s,
                     const Vec& b_frozen) {
    const int d = model.dim();
    const int n = grid.n;
    double lam = 1.0, db = 0.0;
    Vec pt(d);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < d; ++c) pt[c] = s.tau[c][i];
        if (model.constrained() && !(pt.back() > 0.0)) continue;
        const Vec ev = sym_eigenvalues(hessian(model, pt));
        for (double e : ev) lam = std::max(lam, std::fabs(e));
        if (model.constrained()) {
            const Mat b = b_matrix(model, pt);
            for (int c = 0; c < d; ++c) db = std::max(db, std::fabs(b(c, c) - b_frozen[c]));
        }
    }
    const double kmax = kPi * n / grid.period;
    return kmax * std::sqrt(1.5 * lam) + kmax * kmax * 1.5 * db;
}

Vec frozen_viscosity(const PotentialModel& model, const Grid& grid, const FieldState& s) {
    const int d = model.dim();
    Vec mean(d, 0.0);
    for (int c = 0; c < d; ++c) {
        for (double v : s.tau[c]) mean[c] += v;
        mean[c] /= grid.n;
    }
    if (model.constrained() && !(mean.back() > 0.0))
        throw infeasible_error("evolve: infeasible mean strain");
    const Mat b = b_matrix(model, mean);
    Vec diag(d);
    for (int c = 0; c < d; ++c) diag[c] = b(c, c);
    return diag;
}

// ---- finite-difference fallback ----

Vec fd_derivative(const Vec& f, double dx, int order) {
    const int n = static_cast<int>(f.size());
    Vec out(n);
    auto at = [&](int i) { return f[((i % n) + n) % n]; };
    if (order == 1) {
        for (int i = 0; i < n; ++i)
            out[i] = (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * dx);
    } else if (order == 3) {
        const double d3 = dx * dx * dx;
        for (int i = 0; i < n; ++i)
            out[i] = (at(i + 3) - 8.0 * at(i + 2) + 13.0 * at(i + 1) - 13.0 * at(i - 1) +
                      8.0 * at(i - 2) - at(i - 3)) /
                     (8.0 * d3);
    } else {
        throw std::invalid_argument("fd_derivative: order must be 1 or 3");
    }
    return out;
}

}  // namespace

void Grid::validate() const {
    if (n < 16 || !is_power_of_two(n)) throw std::invalid_argument("Grid: n must be a power of two >= 16");
    if (!(period > 0.0)) throw std::invalid_argument("Grid: period must be positive");
}

FieldState FieldState::constant(const PotentialModel& model, const Grid& grid, const Vec& m,
                                const Vec& u0) {
    model.check_dim(m);
    model.check_dim(u0);
    FieldState s;
    s.tau.assign(model.dim(), Vec(grid.n));
    s.u.assign(model.dim(), Vec(grid.n));
    for (int c = 0; c < model.dim(); ++c) {
        std::fill(s.tau[c].begin(), s.tau[c].end(), m[c]);
        std::fill(s.u[c].begin(), s.u[c].end(), u0[c]);
    }
    return s;
}

Vec spectral_derivative(const Vec& f, double period, int order) {
    const int n = static_cast<int>(f.size());
    Grid g{period, n};
    const Vec k = wavenumbers(g);
    CVec hat(f.begin(), f.end());
    fft(hat, false);
    for (int i = 0; i < n; ++i) {
        Cx factor(1.0, 0.0);
        for (int o = 0; o < order; ++o) factor *= Cx(0.0, k[i]);
        hat[i] *= factor;
    }
    fft(hat, true);
    Vec out(n);
    for (int i = 0; i < n; ++i) out[i] = hat[i].real();
    return out;
}

FieldDeriv semidiscrete_rhs(const PotentialModel& model, const Grid& grid, const FieldState& state,
                            bool spectral) {
    grid.validate();
    const int d = model.dim();
    const int n = grid.n;
    if (static_cast<int>(state.tau.size()) != d) throw dimension_error("semidiscrete_rhs: dim mismatch");
    if (model.constrained())
        for (int i = 0; i < n; ++i)
            if (!(state.tau[d - 1][i] > 0.0)) throw infeasible_error("semidiscrete_rhs: tau3 <= 0");

    auto d1 = [&](const Vec& f) {
        return spectral ? spectral_derivative(f, grid.period, 1) : fd_derivative(f, grid.dx(), 1);
    };
    auto d3 = [&](const Vec& f) {
        return spectral ? spectral_derivative(f, grid.period, 3) : fd_derivative(f, grid.dx(), 3);
    };

    FieldDeriv out;
    out.dtau.resize(d);
    out.du.resize(d);
    std::vector<Vec> ux(d);
    for (int c = 0; c < d; ++c) {
        out.dtau[c] = d1(state.u[c]);  // tau_t = u_x
        ux[c] = out.dtau[c];
    }
    // Pointwise DW(tau) and b(tau) u_x.
    std::vector<Vec> dw(d, Vec(n)), bv(d, Vec(n));
    Vec pt(d);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < d; ++c) pt[c] = state.tau[c][i];
        const Vec g = gradient(model, pt);
        const Mat b = b_matrix(model, pt);
        for (int c = 0; c < d; ++c) {
            dw[c][i] = g[c];
            bv[c][i] = b(c, c) * ux[c][i];
        }
    }
    for (int c = 0; c < d; ++c) {
        const Vec dwx = d1(dw[c]);
        const Vec bvx = d1(bv[c]);
        const Vec t3 = d3(state.tau[c]);
        out.du[c].resize(n);
        for (int i = 0; i < n; ++i) out.du[c][i] = dwx[i] + bvx[i] - t3[i];
    }
    return out;
}

double mechanical_energy(const PotentialModel& model, const Grid& grid, const FieldState& state) {
    const int d = model.dim();
    const int n = grid.n;
    std::vector<Vec> tx(d);
    for (int c = 0; c < d; ++c) tx[c] = spectral_derivative(state.tau[c], grid.period, 1);
    double acc = 0.0;
    Vec pt(d);
    for (int i = 0; i < n; ++i) {
        double kin = 0.0, cap = 0.0;
        for (int c = 0; c < d; ++c) {
            kin += state.u[c][i] * state.u[c][i];
            cap += tx[c][i] * tx[c][i];
            pt[c] = state.tau[c][i];
        }
        acc += 0.5 * kin + energy(model, pt) + 0.5 * cap;
    }
    return acc * grid.dx();
}

double dissipation_rate(const PotentialModel& model, const Grid& grid, const FieldState& state) {
    const int d = model.dim();
    const int n = grid.n;
    std::vector<Vec> ux(d);
    for (int c = 0; c < d; ++c) ux[c] = spectral_derivative(state.u[c], grid.period, 1);
    double acc = 0.0;
    Vec pt(d);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < d; ++c) pt[c] = state.tau[c][i];
        const Mat b = b_matrix(model, pt);
        for (int c = 0; c < d; ++c) acc += ux[c][i] * b(c, c) * ux[c][i];
    }
    return -acc * grid.dx();
}

double relative_energy(const PotentialModel& model, const Grid& grid, const FieldState& state,
                       const Vec& m, const Vec& u_mean) {
    model.check_dim(m);
    model.check_dim(u_mean);
    const int d = model.dim();
    const int n = grid.n;
    std::vector<Vec> tx(d);
    for (int c = 0; c < d; ++c) tx[c] = spectral_derivative(state.tau[c], grid.period, 1);
    const double w_m = energy(model, m);
    const Vec dw_m = gradient(model, m);
    double acc = 0.0;
    Vec pt(d);
    for (int i = 0; i < n; ++i) {
        double cap = 0.0, lin = 0.0, kin = 0.0;
        for (int c = 0; c < d; ++c) {
            cap += tx[c][i] * tx[c][i];
            pt[c] = state.tau[c][i];
            lin += dw_m[c] * state.tau[c][i];
            kin += 0.5 * state.u[c][i] * state.u[c][i] - 0.5 * u_mean[c] * u_mean[c] -
                   u_mean[c] * state.u[c][i];
        }
        acc += 0.5 * cap + energy(model, pt) - lin - w_m + kin;
    }
    return acc * grid.dx();
}

void fill_numeric_dEdt(EnergyTrace& trace) {
    auto& r = trace.records;
    const int n = static_cast<int>(r.size());
    for (int i = 0; i < n; ++i) r[i].dEdt_numeric = kNan;
    if (n < 5) return;
    const double dt = r[1].t - r[0].t;
    for (int i = 2; i + 2 < n; ++i) {
        bool uniform = true;  // the stencil needs evenly spaced records
        for (int j = i - 2; j < i + 2; ++j)
            if (std::fabs((r[j + 1].t - r[j].t) - dt) > 1e-9 * dt) uniform = false;
        if (!uniform) continue;
        r[i].dEdt_numeric =
            (-r[i + 2].energy + 8.0 * r[i + 1].energy - 8.0 * r[i - 1].energy + r[i - 2].energy) /
            (12.0 * dt);
    }
}

namespace {

EvolveResult evolve_spectral(const PotentialModel& model, const Grid& grid, const FieldState& state0,
                             double t_end, const DtControl& control) {
    EvolveResult res;
    const Vec b_frozen = frozen_viscosity(model, grid, state0);
    double dt = control.dt;
    if (dt <= 0.0) dt = control.cfl * 2.8 / explicit_rate(model, grid, state0, b_frozen);
    dt = std::min(dt, t_end / 8.0);
    int nst = static_cast<int>(std::ceil(t_end / dt));
    dt = t_end / nst;
    res.dt_used = dt;
    res.steps = nst;

    Etdrk4 scheme(model, grid, dt, b_frozen);
    HatState v = to_hat(state0);

    auto record = [&](double t, const FieldState& s) {
        res.trace.records.push_back(
            {t, mechanical_energy(model, grid, s), dissipation_rate(model, grid, s), kNan});
    };
    record(state0.t, state0);

    FieldState current = state0;
    for (int i = 0; i < nst; ++i) {
        try {
            scheme.step(v);
        } catch (const infeasible_error&) {
            res.truncated_infeasible = true;
            break;
        }
        const double t = state0.t + (i + 1) * dt;
        if ((i + 1) % control.save_every == 0 || i + 1 == nst) {
            current = from_hat(v, t);
            bool finite = true;
            for (const auto& comp : current.tau)
                for (double x : comp)
                    if (!std::isfinite(x)) finite = false;
            if (!finite) {
                res.step_failure = true;
                break;
            }
            record(t, current);
        }
    }
    res.state = current;
    fill_numeric_dEdt(res.trace);
    return res;
}

EvolveResult evolve_fd(const PotentialModel& model, const Grid& grid, const FieldState& state0,
                       double t_end, const DtControl& control) {
    // Classic RK4 on the finite-difference semidiscretization; dt ~ dx^3.
    EvolveResult res;
    const double dx = grid.dx();
    double lam = 1.0;
    {
        Vec pt(model.dim());
        for (int i = 0; i < grid.n; ++i) {
            for (int c = 0; c < model.dim(); ++c) pt[c] = state0.tau[c][i];
            for (double e : sym_eigenvalues(hessian(model, pt))) lam = std::max(lam, std::fabs(e));
        }
    }
    const double rate = 5.5 / (dx * dx * dx) + std::sqrt(lam) * kPi / dx;
    double dt = control.dt > 0.0 ? control.dt : control.cfl * 2.8 / rate;
    dt = std::min(dt, t_end / 8.0);
    const int nst = static_cast<int>(std::ceil(t_end / dt));
    dt = t_end / nst;
    res.dt_used = dt;
    res.steps = nst;

    auto axpy = [&](FieldState& y, double a, const FieldDeriv& d) {
        for (size_t c = 0; c < y.tau.size(); ++c)
            for (size_t i = 0; i < y.tau[c].size(); ++i) {
                y.tau[c][i] += a * d.dtau[c][i];
                y.u[c][i] += a * d.du[c][i];
            }
    };

    FieldState s = state0;
    auto record = [&](const FieldState& st) {
        res.trace.records.push_back(
            {st.t, mechanical_energy(model, grid, st), dissipation_rate(model, grid, st), kNan});
    };
    record(s);
    for (int i = 0; i < nst; ++i) {
        try {
            const FieldDeriv k1 = semidiscrete_rhs(model, grid, s, false);
            FieldState s2 = s;
            axpy(s2, 0.5 * dt, k1);
            const FieldDeriv k2 = semidiscrete_rhs(model, grid, s2, false);
            FieldState s3 = s;
            axpy(s3, 0.5 * dt, k2);
            const FieldDeriv k3 = semidiscrete_rhs(model, grid, s3, false);
            FieldState s4 = s;
            axpy(s4, dt, k3);
            const FieldDeriv k4 = semidiscrete_rhs(model, grid, s4, false);
            for (size_t c = 0; c < s.tau.size(); ++c)
                for (size_t j = 0; j < s.tau[c].size(); ++j) {
                    s.tau[c][j] += dt / 6.0 *
                                   (k1.dtau[c][j] + 2 * k2.dtau[c][j] + 2 * k3.dtau[c][j] + k4.dtau[c][j]);
                    s.u[c][j] +=
                        dt / 6.0 * (k1.du[c][j] + 2 * k2.du[c][j] + 2 * k3.du[c][j] + k4.du[c][j]);
                }
        } catch (const infeasible_error&) {
            res.truncated_infeasible = true;
            break;
        }
        s.t = state0.t + (i + 1) * dt;
        if ((i + 1) % control.save_every == 0 || i + 1 == nst) record(s);
    }
    res.state = s;
    fill_numeric_dEdt(res.trace);
    return res;
}

}  // namespace

EvolveResult evolve(const PotentialModel& model, const Grid& grid, const FieldState& state0,
                    double t_end, const DtControl& control) {
    grid.validate();
    if (!(t_end > 0.0)) throw std::invalid_argument("evolve: t_end must be positive");
    return control.spectral ? evolve_spectral(model, grid, state0, t_end, control)
                            : evolve_fd(model, grid, state0, t_end, control);
}

Vec random_smooth_field(const Grid& grid, double scale, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec f(grid.n, 0.0);
    for (int k = 1; k <= 8; ++k) {
        const double ca = gauss(rng), cb = gauss(rng);
        for (int i = 0; i < grid.n; ++i) {
            const double ph = 2.0 * kPi * k * i / grid.n;
            f[i] += ca * std::cos(ph) + cb * std::sin(ph);
        }
    }
    double sup = 0.0;
    for (double v : f) sup = std::max(sup, std::fabs(v));
    if (sup > 0.0)
        for (double& v : f) v *= scale / sup;
    return f;
}

ProbeResult stability_probe(const PotentialModel& model, const Grid& grid, const FieldState& wave,
                            double perturbation_scale, double t_end, std::uint64_t seed,
                            const DtControl& control) {
    grid.validate();
    const int d = model.dim();
    const int n = grid.n;

    // Reference data for the orbital distance.
    std::vector<Vec> wave_tx(d);
    for (int c = 0; c < d; ++c) wave_tx[c] = spectral_derivative(wave.tau[c], grid.period, 1);
    std::vector<Vec> w_dw(d, Vec(n)), w_w(1, Vec(n));
    {
        Vec pt(d);
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < d; ++c) pt[c] = wave.tau[c][i];
            const Vec g = gradient(model, pt);
            for (int c = 0; c < d; ++c) w_dw[c][i] = g[c];
            w_w[0][i] = energy(model, pt);
        }
    }

    FieldState init = wave;
    for (int c = 0; c < d; ++c) {
        const Vec pt = random_smooth_field(grid, perturbation_scale, seed + 2 * c);
        const Vec pu = random_smooth_field(grid, perturbation_scale, seed + 2 * c + 1);
        for (int i = 0; i < n; ++i) {
            init.tau[c][i] += pt[i];
            init.u[c][i] += pu[i];
        }
    }

    // Relative energy of `state` about the wave translated by j grid cells,
    // minimized over j. The linear term uses DW(wave) and wave_x explicitly.
    auto excess_of = [&](const FieldState& s) {
        std::vector<Vec> tx(d);
        for (int c = 0; c < d; ++c) tx[c] = spectral_derivative(s.tau[c], grid.period, 1);
        Vec wvals(n);
        Vec pt(d);
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < d; ++c) pt[c] = s.tau[c][i];
            wvals[i] = energy(model, pt);
        }
        double best = std::numeric_limits<double>::infinity();
        double best_l2 = best;
        for (int j = 0; j < n; ++j) {
            double acc = 0.0, l2 = 0.0;
            for (int i = 0; i < n; ++i) {
                const int iw = (i - j + n) % n;
                double kin = 0.0, quad = 0.0, lin = 0.0, cap = 0.0;
                for (int c = 0; c < d; ++c) {
                    kin += s.u[c][i] * s.u[c][i];
                    const double dtau = s.tau[c][i] - wave.tau[c][iw];
                    lin += w_dw[c][iw] * dtau;
                    const double dtx = tx[c][i] - wave_tx[c][iw];
                    cap += dtx * dtx;
                    quad += dtau * dtau;
                }
                acc += 0.5 * kin + (wvals[i] - w_w[0][iw]) - lin + 0.5 * cap;
                l2 += quad + kin;
            }
            acc *= grid.dx();
            l2 = std::sqrt(l2 * grid.dx());
            best = std::min(best, acc);
            best_l2 = std::min(best_l2, l2);
        }
        return std::pair{best, best_l2};
    };

    // Evolve and sample. Reuse evolve() over segments so probes see
    // intermediate states without duplicating the stepper here.
    ProbeResult probe;
    const int n_samples = 50;
    FieldState s = init;
    DtControl ctl = control;
    double t0 = 0.0;
    auto sample = [&](double t, const FieldState& st) {
        const auto [ex, l2] = excess_of(st);
        probe.times.push_back(t);
        probe.excess.push_back(ex);
        probe.l2_distance.push_back(l2);
    };
    sample(0.0, s);
    EvolveResult last;
    for (int i = 0; i < n_samples; ++i) {
        const double seg = t_end / n_samples;
        last = evolve(model, grid, s, seg, ctl);
        s = last.state;
        t0 += seg;
        s.t = t0;
        sample(t0, s);
        if (last.truncated_infeasible || last.step_failure) break;
    }
    probe.evolution = last;
    probe.evolution.state = s;
    const double e0 = probe.excess.front();
    double emax = 0.0;
    for (double e : probe.excess) emax = std::max(emax, e);
    probe.bound_factor = e0 > 0.0 ? emax / e0 : 0.0;
    return probe;
}

}  // namespace sgw
