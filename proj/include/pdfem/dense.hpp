#pragma once

#include <cassert>
#include <cmath>
#include <vector>

#include "pdfem/common.hpp"

namespace pdfem {

/// Small dense row-major matrix. Used for constitutive matrices, local
/// element matrices and effective tensors; never for the global system.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {}

    static DenseMatrix identity(int n, double scale = 1.0) {
        DenseMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = scale;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }

    DenseMatrix transposed() const {
        DenseMatrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::abs(v));
        return m;
    }

    double sym_error() const {
        assert(rows_ == cols_);
        double e = 0.0;
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < i; ++j) e = std::max(e, std::abs((*this)(i, j) - (*this)(j, i)));
        return e;
    }

    DenseMatrix& operator+=(const DenseMatrix& o) {
        assert(rows_ == o.rows_ && cols_ == o.cols_);
        for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }

    DenseMatrix& operator*=(double s) {
        for (double& v : a_) v *= s;
        return *this;
    }

    friend DenseMatrix operator-(const DenseMatrix& x, const DenseMatrix& y) {
        assert(x.rows_ == y.rows_ && x.cols_ == y.cols_);
        DenseMatrix r = x;
        for (size_t k = 0; k < r.a_.size(); ++k) r.a_[k] -= y.a_[k];
        return r;
    }

    friend DenseMatrix operator*(const DenseMatrix& x, const DenseMatrix& y) {
        assert(x.cols_ == y.rows_);
        DenseMatrix r(x.rows_, y.cols_);
        for (int i = 0; i < x.rows_; ++i)
            for (int k = 0; k < x.cols_; ++k) {
                const double v = x(i, k);
                if (v == 0.0) continue;
                for (int j = 0; j < y.cols_; ++j) r(i, j) += v * y(k, j);
            }
        return r;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations,
/// ascending order. Sizes here never exceed 6x6.
std::vector<double> symmetric_eigenvalues(const DenseMatrix& m);

/// Gauss-Jordan inverse with partial pivoting. Throws ValidationError on
/// a numerically singular input.
DenseMatrix dense_inverse(const DenseMatrix& m);

/// Solve the dense system m x = b in place of nothing; small sizes only.
std::vector<double> dense_solve(DenseMatrix m, std::vector<double> b);

} // namespace pdfem
