#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "sgwave/linalg.hpp"

using namespace sgw;

TEST_CASE("solve and inverse") {
    Mat a(3, 3);
    a(0, 0) = 4;
    a(0, 1) = 1;
    a(1, 0) = 2;
    a(1, 1) = -3;
    a(1, 2) = 1;
    a(2, 1) = 5;
    a(2, 2) = 2;
    const Vec x0 = {1.0, -2.0, 0.5};
    const Vec b = a * x0;
    const Vec x = solve(a, b);
    for (int i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(x0[i]).epsilon(1e-12));

    const Mat ai = inverse(a);
    const Mat prod = a * ai;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(prod(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
}

TEST_CASE("symmetric eigenvalues via Jacobi") {
    Mat a(2, 2);
    a(0, 0) = 2;
    a(0, 1) = a(1, 0) = 1;
    a(1, 1) = 2;
    const Vec ev = sym_eigenvalues(a);
    CHECK(ev[0] == doctest::Approx(1.0));
    CHECK(ev[1] == doctest::Approx(3.0));

    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 20; ++rep) {
        Mat s(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) s(i, j) = s(j, i) = g(rng);
        const Vec evs = sym_eigenvalues(s);
        // Each eigenvalue must zero the characteristic polynomial.
        for (double l : evs) {
            Mat m = s;
            for (int i = 0; i < 3; ++i) m(i, i) -= l;
            CHECK(std::fabs(oracle::det(m)) < 1e-9 * std::max(1.0, std::fabs(l * l * l)));
        }
    }
}

TEST_CASE("general eigenvalues: known spectra") {
    // Triangular: eigenvalues on the diagonal.
    Mat t(3, 3);
    t(0, 0) = 2;
    t(0, 1) = 5;
    t(1, 1) = -1;
    t(1, 2) = 3;
    t(2, 2) = 7;
    auto ev = eigenvalues(t);
    std::vector<Complex> want = {{2, 0}, {-1, 0}, {7, 0}};
    CHECK(bottleneck_distance(ev, want) < 1e-10);

    // Rotation block: +-i.
    Mat r(2, 2);
    r(0, 1) = -1;
    r(1, 0) = 1;
    ev = eigenvalues(r);
    want = {{0, 1}, {0, -1}};
    CHECK(bottleneck_distance(ev, want) < 1e-12);

    // Companion matrix of z^3 - 1: cube roots of unity.
    Mat c(3, 3);
    c(0, 2) = 1;
    c(1, 0) = 1;
    c(2, 1) = 1;
    ev = eigenvalues(c);
    const double s3 = std::sqrt(3.0) / 2;
    want = {{1, 0}, {-0.5, s3}, {-0.5, -s3}};
    CHECK(bottleneck_distance(ev, want) < 1e-10);
}

TEST_CASE("general eigenvalues match characteristic polynomial on random matrices") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int n : {2, 3, 5, 9}) {
        for (int rep = 0; rep < 10; ++rep) {
            Mat a(n, n);
            double scale = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    a(i, j) = g(rng);
                    scale = std::max(scale, std::fabs(a(i, j)));
                }
            const auto ev = eigenvalues(a);
            REQUIRE(static_cast<int>(ev.size()) == n);
            for (const auto& l : ev)
                CHECK(std::abs(oracle::char_poly_at(a, l)) < 1e-7 * std::pow(4.0 * scale + 1.0, n));
        }
    }
}

TEST_CASE("eigenvalues with high multiplicity") {
    Mat a = Mat::identity(5);
    a(0, 1) = 1.0;  // Jordan-ish coupling
    const auto ev = eigenvalues(a);
    for (const auto& l : ev) CHECK(std::abs(l - Complex(1, 0)) < 1e-6);
}

TEST_CASE("bottleneck matching") {
    std::vector<Complex> a = {{1, 1}, {2, -1}, {0, 0}};
    std::vector<Complex> b = {{0, 0}, {1, 1}, {2, -1}};
    CHECK(bottleneck_distance(a, b) == doctest::Approx(0.0));
    b[0] += Complex(1e-4, 0);
    CHECK(bottleneck_distance(a, b) == doctest::Approx(1e-4).epsilon(1e-6));
    // Conjugate pairs defeat sorted-by-real comparisons but not matching.
    std::vector<Complex> c = {{1, 2}, {1, -2}};
    std::vector<Complex> d = {{1, -2}, {1, 2}};
    CHECK(bottleneck_distance(c, d) == doctest::Approx(0.0));
}
