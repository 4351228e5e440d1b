#include "sgwave/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace sgw {

Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("Mat*: shape mismatch");
    Mat c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Mat operator*(double s, const Mat& a) {
    Mat c = a;
    for (int i = 0; i < c.rows(); ++i)
        for (int j = 0; j < c.cols(); ++j) c(i, j) *= s;
    return c;
}

Mat operator+(const Mat& a, const Mat& b) {
    Mat c = a;
    for (int i = 0; i < c.rows(); ++i)
        for (int j = 0; j < c.cols(); ++j) c(i, j) += b(i, j);
    return c;
}

Mat operator-(const Mat& a, const Mat& b) {
    Mat c = a;
    for (int i = 0; i < c.rows(); ++i)
        for (int j = 0; j < c.cols(); ++j) c(i, j) -= b(i, j);
    return c;
}

Vec operator*(const Mat& a, const Vec& x) {
    if (a.cols() != static_cast<int>(x.size())) throw std::invalid_argument("Mat*Vec: shape mismatch");
    Vec y(a.rows(), 0.0);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

double max_abs(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::fabs(v));
    return m;
}

Vec solve(Mat a, Vec b) {
    const int n = a.rows();
    if (a.cols() != n || static_cast<int>(b.size()) != n) throw std::invalid_argument("solve: shape mismatch");
    std::vector<int> piv(n);
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int col = 0; col < n; ++col) {
        int p = col;
        for (int i = col + 1; i < n; ++i)
            if (std::fabs(a(i, col)) > std::fabs(a(p, col))) p = i;
        if (a(p, col) == 0.0) throw std::runtime_error("solve: singular matrix");
        if (p != col) {
            for (int j = 0; j < n; ++j) std::swap(a(p, j), a(col, j));
            std::swap(b[p], b[col]);
        }
        for (int i = col + 1; i < n; ++i) {
            const double f = a(i, col) / a(col, col);
            a(i, col) = 0.0;
            for (int j = col + 1; j < n; ++j) a(i, j) -= f * a(col, j);
            b[i] -= f * b[col];
        }
    }
    Vec x(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

Mat inverse(const Mat& a) {
    const int n = a.rows();
    Mat inv(n, n);
    for (int j = 0; j < n; ++j) {
        Vec e(n, 0.0);
        e[j] = 1.0;
        Vec col = solve(a, e);
        for (int i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

Vec sym_eigenvalues(Mat a) {
    const int n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-30) break;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    Vec ev(n);
    for (int i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

namespace {

void hessenberg(Mat& a) {
    const int n = a.rows();
    for (int col = 0; col < n - 2; ++col) {
        double scale = 0.0;
        for (int i = col + 1; i < n; ++i) scale += std::fabs(a(i, col));
        if (scale == 0.0) continue;
        Vec v(n, 0.0);
        double alpha = 0.0;
        for (int i = col + 1; i < n; ++i) {
            v[i] = a(i, col) / scale;
            alpha += v[i] * v[i];
        }
        alpha = std::sqrt(alpha);
        if (v[col + 1] > 0) alpha = -alpha;
        v[col + 1] -= alpha;
        double vnorm2 = 0.0;
        for (int i = col + 1; i < n; ++i) vnorm2 += v[i] * v[i];
        if (vnorm2 == 0.0) continue;
        // A <- (I - 2vv^T/|v|^2) A (I - 2vv^T/|v|^2)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int i = col + 1; i < n; ++i) s += v[i] * a(i, j);
            s *= 2.0 / vnorm2;
            for (int i = col + 1; i < n; ++i) a(i, j) -= s * v[i];
        }
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = col + 1; j < n; ++j) s += a(i, j) * v[j];
            s *= 2.0 / vnorm2;
            for (int j = col + 1; j < n; ++j) a(i, j) -= s * v[j];
        }
    }
}

void eig2x2(double a, double b, double c, double d, std::vector<Complex>& out) {
    const double tr = a + d;
    const double det = a * d - b * c;
    const double disc = tr * tr / 4.0 - det;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        out.emplace_back(tr / 2.0 + r, 0.0);
        out.emplace_back(tr / 2.0 - r, 0.0);
    } else {
        const double im = std::sqrt(-disc);
        out.emplace_back(tr / 2.0, im);
        out.emplace_back(tr / 2.0, -im);
    }
}

}  // namespace

std::vector<Complex> eigenvalues(Mat a) {
    const int n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("eigenvalues: square matrix required");
    std::vector<Complex> ev;
    if (n == 0) return ev;
    if (n == 1) return {Complex(a(0, 0), 0.0)};
    hessenberg(a);

    int hi = n - 1;
    int iters_on_block = 0;
    const double eps = std::numeric_limits<double>::epsilon();
    int guard = 0;
    while (hi >= 0 && guard++ < 200 * n) {
        // Deflate negligible subdiagonals.
        int lo = hi;
        while (lo > 0) {
            const double s = std::fabs(a(lo - 1, lo - 1)) + std::fabs(a(lo, lo));
            if (std::fabs(a(lo, lo - 1)) <= eps * std::max(s, 1e-300)) {
                a(lo, lo - 1) = 0.0;
                break;
            }
            --lo;
        }
        if (lo == hi) {
            ev.emplace_back(a(hi, hi), 0.0);
            --hi;
            iters_on_block = 0;
            continue;
        }
        if (lo == hi - 1) {
            eig2x2(a(lo, lo), a(lo, hi), a(hi, lo), a(hi, hi), ev);
            hi -= 2;
            iters_on_block = 0;
            continue;
        }

        // Francis double shift on the active block [lo..hi].
        ++iters_on_block;
        double s, t;
        if (iters_on_block % 12 == 0) {
            // Exceptional shift to break rare cycles.
            const double w = std::fabs(a(hi, hi - 1)) + std::fabs(a(hi - 1, hi - 2));
            s = 1.5 * w;
            t = w * w;
        } else {
            s = a(hi - 1, hi - 1) + a(hi, hi);
            t = a(hi - 1, hi - 1) * a(hi, hi) - a(hi - 1, hi) * a(hi, hi - 1);
        }
        double x = a(lo, lo) * a(lo, lo) + a(lo, lo + 1) * a(lo + 1, lo) - s * a(lo, lo) + t;
        double y = a(lo + 1, lo) * (a(lo, lo) + a(lo + 1, lo + 1) - s);
        double z = a(lo + 2, lo + 1) * a(lo + 1, lo);
        for (int k = lo; k <= hi - 2; ++k) {
            // Householder on (x,y,z).
            double alpha = std::sqrt(x * x + y * y + z * z);
            if (alpha == 0.0) {
                x = a(k + 1, k);
                y = a(k + 2, k);
                z = (k + 3 <= hi) ? a(k + 3, k) : 0.0;
                continue;
            }
            if (x > 0) alpha = -alpha;
            double v0 = x - alpha, v1 = y, v2 = z;
            const double vn2 = v0 * v0 + v1 * v1 + v2 * v2;
            if (vn2 > 0.0) {
                const int jlo = std::max(lo, k - 1);
                for (int j = jlo; j < n; ++j) {
                    double ssum = v0 * a(k, j) + v1 * a(k + 1, j) + (k + 2 <= hi ? v2 * a(k + 2, j) : 0.0);
                    ssum *= 2.0 / vn2;
                    a(k, j) -= ssum * v0;
                    a(k + 1, j) -= ssum * v1;
                    if (k + 2 <= hi) a(k + 2, j) -= ssum * v2;
                }
                const int imax = std::min(hi, k + 3);
                for (int i = 0; i <= imax; ++i) {
                    double ssum = v0 * a(i, k) + v1 * a(i, k + 1) + (k + 2 <= hi ? v2 * a(i, k + 2) : 0.0);
                    ssum *= 2.0 / vn2;
                    a(i, k) -= ssum * v0;
                    a(i, k + 1) -= ssum * v1;
                    if (k + 2 <= hi) a(i, k + 2) -= ssum * v2;
                }
            }
            x = a(k + 1, k);
            y = a(k + 2, k);
            z = (k + 3 <= hi) ? a(k + 3, k) : 0.0;
        }
        // Final 2x1 Givens-like step.
        {
            const int k = hi - 1;
            double alpha = std::sqrt(x * x + y * y);
            if (alpha != 0.0) {
                if (x > 0) alpha = -alpha;
                double v0 = x - alpha, v1 = y;
                const double vn2 = v0 * v0 + v1 * v1;
                if (vn2 > 0.0) {
                    for (int j = k - 1 >= lo ? k - 1 : lo; j < n; ++j) {
                        double ssum = (v0 * a(k, j) + v1 * a(k + 1, j)) * 2.0 / vn2;
                        a(k, j) -= ssum * v0;
                        a(k + 1, j) -= ssum * v1;
                    }
                    for (int i = 0; i <= hi; ++i) {
                        double ssum = (v0 * a(i, k) + v1 * a(i, k + 1)) * 2.0 / vn2;
                        a(i, k) -= ssum * v0;
                        a(i, k + 1) -= ssum * v1;
                    }
                }
            }
        }
    }
    if (static_cast<int>(ev.size()) != n) throw std::runtime_error("eigenvalues: QR iteration failed to converge");
    return ev;
}

double bottleneck_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    const int n = static_cast<int>(a.size());
    if (n != static_cast<int>(b.size())) throw std::invalid_argument("bottleneck_distance: size mismatch");
    if (n == 0) return 0.0;
    if (n > 20) throw std::invalid_argument("bottleneck_distance: sets too large");
    std::vector<double> d(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d[static_cast<size_t>(i) * n + j] = std::abs(a[i] - b[j]);
    // dp[mask]: best achievable bottleneck matching items 0..popcount-1 of `a`
    // onto the subset `mask` of `b`.
    const size_t full = size_t{1} << n;
    std::vector<double> dp(full, std::numeric_limits<double>::infinity());
    dp[0] = 0.0;
    for (size_t mask = 0; mask + 1 < full + 1 && mask < full; ++mask) {
        if (!std::isfinite(dp[mask])) continue;
        const int i = __builtin_popcountll(mask);
        if (i >= n) continue;
        for (int j = 0; j < n; ++j) {
            if (mask & (size_t{1} << j)) continue;
            const size_t nm = mask | (size_t{1} << j);
            const double cand = std::max(dp[mask], d[static_cast<size_t>(i) * n + j]);
            if (cand < dp[nm]) dp[nm] = cand;
        }
    }
    return dp[full - 1];
}

}  // namespace sgw
