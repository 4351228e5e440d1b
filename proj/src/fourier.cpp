#include "sgwave/fourier.hpp"

#include <cmath>
#include <stdexcept>

namespace sgw {

namespace {
const double kTwoPi = 2.0 * std::acos(-1.0);
}

double FourierProfile::omega() const { return kTwoPi / period; }

Vec FourierProfile::value_at(double x) const {
    Vec v(dim, 0.0);
    const double w = omega();
    for (int k = 1; k <= n_modes; ++k) {
        const double c = std::cos(w * k * x), s = std::sin(w * k * x);
        for (int d = 0; d < dim; ++d) v[d] += a[d][k - 1] * c + b[d][k - 1] * s;
    }
    return v;
}

double FourierProfile::sup_norm(int oversample) const {
    const int n = std::max(8, oversample * std::max(n_modes, 1));
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec v = value_at(period * i / n);
        for (double c : v) m = std::max(m, std::fabs(c));
    }
    return m;
}

TrigGrid::TrigGrid(double period, int n_modes, int n_grid)
    : period_(period), n_modes_(n_modes), n_grid_(n_grid) {
    if (n_grid < 2 * n_modes + 1)
        throw std::invalid_argument("TrigGrid: grid must resolve all modes");
    cos_.resize(static_cast<size_t>(n_grid) * n_modes);
    sin_.resize(static_cast<size_t>(n_grid) * n_modes);
    for (int i = 0; i < n_grid; ++i) {
        const double base = kTwoPi * i / n_grid;
        for (int k = 1; k <= n_modes; ++k) {
            cos_[static_cast<size_t>(i) * n_modes + k - 1] = std::cos(base * k);
            sin_[static_cast<size_t>(i) * n_modes + k - 1] = std::sin(base * k);
        }
    }
}

void TrigGrid::eval(const FourierProfile& p, int deriv, std::vector<Vec>& out) const {
    const double w = kTwoPi / period_;
    out.assign(p.dim, Vec(n_grid_, 0.0));
    for (int d = 0; d < p.dim; ++d) {
        for (int k = 1; k <= n_modes_; ++k) {
            const double wk = w * k;
            double ca = p.a[d][k - 1], cb = p.b[d][k - 1];
            // derivative rotates (a cos + b sin) -> wk (b cos - a sin) etc.
            double fc, fs;
            switch (deriv) {
                case 0: fc = ca, fs = cb; break;
                case 1: fc = wk * cb, fs = -wk * ca; break;
                case 2: fc = -wk * wk * ca, fs = -wk * wk * cb; break;
                default: throw std::invalid_argument("TrigGrid::eval: deriv must be 0..2");
            }
            if (fc == 0.0 && fs == 0.0) continue;
            const double* cr = &cos_[k - 1];
            const double* sr = &sin_[k - 1];
            for (int i = 0; i < n_grid_; ++i)
                out[d][i] += fc * cr[static_cast<size_t>(i) * n_modes_] +
                             fs * sr[static_cast<size_t>(i) * n_modes_];
        }
    }
}

void TrigGrid::project(const std::vector<Vec>& g, FourierProfile& out) const {
    const double scale = 2.0 / n_grid_;  // (2/T) * dx
    for (int d = 0; d < static_cast<int>(g.size()); ++d)
        for (int k = 1; k <= n_modes_; ++k) {
            double sa = 0.0, sb = 0.0;
            const double* cr = &cos_[k - 1];
            const double* sr = &sin_[k - 1];
            for (int i = 0; i < n_grid_; ++i) {
                sa += g[d][i] * cr[static_cast<size_t>(i) * n_modes_];
                sb += g[d][i] * sr[static_cast<size_t>(i) * n_modes_];
            }
            out.a[d][k - 1] += sa * scale;
            out.b[d][k - 1] += sb * scale;
        }
}

FourierProfile fit_profile(const std::vector<Vec>& samples, double period, int n_modes,
                           Vec* mean_out) {
    const int dim = static_cast<int>(samples.size());
    if (dim == 0) throw std::invalid_argument("fit_profile: empty samples");
    const int n = static_cast<int>(samples[0].size());
    FourierProfile p(period, dim, n_modes);
    Vec mean(dim, 0.0);
    for (int d = 0; d < dim; ++d) {
        for (int i = 0; i < n; ++i) mean[d] += samples[d][i];
        mean[d] /= n;
    }
    for (int d = 0; d < dim; ++d)
        for (int k = 1; k <= n_modes; ++k) {
            double sa = 0.0, sb = 0.0;
            for (int i = 0; i < n; ++i) {
                const double ph = kTwoPi * k * i / n;
                const double val = samples[d][i] - mean[d];
                sa += val * std::cos(ph);
                sb += val * std::sin(ph);
            }
            p.a[d][k - 1] = 2.0 * sa / n;
            p.b[d][k - 1] = 2.0 * sb / n;
        }
    if (mean_out) *mean_out = mean;
    return p;
}

}  // namespace sgw
