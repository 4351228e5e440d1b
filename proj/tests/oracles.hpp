#pragma once

// Test-only oracles: finite differences and small helpers kept independent
// of the library's closed-form evaluation paths.

#include <cmath>
#include <functional>
#include <random>

#include "sgwave/linalg.hpp"

namespace oracle {

// Central difference of a scalar field along coordinate i.
inline double fd_partial(const std::function<double(const sgw::Vec&)>& f, sgw::Vec x, size_t i,
                         double h) {
    x[i] += h;
    const double fp = f(x);
    x[i] -= 2 * h;
    const double fm = f(x);
    return (fp - fm) / (2 * h);
}

// Determinant by Gaussian elimination (partial pivoting).
inline double det(sgw::Mat a) {
    const int n = a.rows();
    double d = 1.0;
    for (int c = 0; c < n; ++c) {
        int p = c;
        for (int i = c + 1; i < n; ++i)
            if (std::fabs(a(i, c)) > std::fabs(a(p, c))) p = i;
        if (a(p, c) == 0.0) return 0.0;
        if (p != c) {
            for (int j = 0; j < n; ++j) std::swap(a(p, j), a(c, j));
            d = -d;
        }
        d *= a(c, c);
        for (int i = c + 1; i < n; ++i) {
            const double f = a(i, c) / a(c, c);
            for (int j = c; j < n; ++j) a(i, j) -= f * a(c, j);
        }
    }
    return d;
}

// Complex determinant of (z I - A) for a real matrix A.
inline std::complex<double> char_poly_at(const sgw::Mat& a, std::complex<double> z) {
    const int n = a.rows();
    std::vector<std::complex<double>> m(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i * n + j] = (i == j ? z : 0.0) - a(i, j);
    std::complex<double> d = 1.0;
    for (int c = 0; c < n; ++c) {
        int p = c;
        for (int i = c + 1; i < n; ++i)
            if (std::abs(m[i * n + c]) > std::abs(m[p * n + c])) p = i;
        if (std::abs(m[p * n + c]) == 0.0) return 0.0;
        if (p != c) {
            for (int j = 0; j < n; ++j) std::swap(m[p * n + j], m[c * n + j]);
            d = -d;
        }
        d *= m[c * n + c];
        for (int i = c + 1; i < n; ++i) {
            const auto f = m[i * n + c] / m[c * n + c];
            for (int j = c; j < n; ++j) m[i * n + j] -= f * m[c * n + j];
        }
    }
    return d;
}

}  // namespace oracle
