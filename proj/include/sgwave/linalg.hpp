#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace sgw {

using Vec = std::vector<double>;
using Complex = std::complex<double>;

// Dense row-major matrix. Everything in this library is at most 9x9, so no
// attempt is made at blocking or expression templates.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    // Writes `block` with its (0,0) entry at (i0,j0).
    void set_block(int i0, int j0, const Mat& block) {
        for (int i = 0; i < block.rows(); ++i)
            for (int j = 0; j < block.cols(); ++j) (*this)(i0 + i, j0 + j) = block(i, j);
    }

    Mat transposed() const {
        Mat t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

Mat operator*(const Mat& a, const Mat& b);
Mat operator*(double s, const Mat& a);
Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Vec operator*(const Mat& a, const Vec& x);

double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);
double max_abs(const Vec& a);

// Gaussian elimination with partial pivoting.
Vec solve(Mat a, Vec b);
Mat inverse(const Mat& a);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
Vec sym_eigenvalues(Mat a);

// Eigenvalues of a general real matrix: Householder reduction to Hessenberg
// form followed by Francis double-shift QR.
std::vector<Complex> eigenvalues(Mat a);

// Smallest over bijections of the largest pairwise distance between the two
// multisets (bottleneck assignment, exact subset DP). Sizes must match and be
// at most 20.
double bottleneck_distance(const std::vector<Complex>& a, const std::vector<Complex>& b);

}  // namespace sgw
