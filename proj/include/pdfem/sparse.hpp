#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pdfem/common.hpp"

namespace pdfem {

/// Compressed-row sparse matrix with int32 indices and sorted columns per
/// row. The global operators (K_mat, K_inc, combined PDFEM matrix, M) all
/// store the full symmetric pattern.
struct CsrMatrix {
    int n_rows = 0, n_cols = 0;
    std::vector<int> row_ptr{0};
    std::vector<int> cols;
    std::vector<double> vals;

    long nnz() const { return static_cast<long>(cols.size()); }

    /// y = A x (dispatched SIMD kernel).
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;

    double& at(int r, int c);        // throws if the entry is not in the pattern
    double get(int r, int c) const;  // 0 when outside the pattern

    double max_abs() const;
    /// max |A - A^T| over the pattern; 0 for a symmetric matrix.
    double sym_error() const;
    void symmetrize(); // A <- (A + A^T)/2, pattern assumed symmetric
    void scale(double s);
};

/// Collects a sparsity pattern row by row, then freezes it into a zeroed
/// CsrMatrix. Assembly makes a symbolic and a numeric pass over elements.
class PatternBuilder {
public:
    PatternBuilder(int n_rows, int n_cols);
    void add(int row, int col) { rows_[row].push_back(col); }
    void add_block(std::span<const int> row_dofs, std::span<const int> col_dofs);
    CsrMatrix freeze();

private:
    int n_cols_;
    std::vector<std::vector<int>> rows_;
};

CsrMatrix csr_transpose(const CsrMatrix& a);
CsrMatrix csr_multiply(const CsrMatrix& a, const CsrMatrix& b);
CsrMatrix csr_add(const CsrMatrix& a, const CsrMatrix& b);

/// S^T K S, symmetrized by (R + R^T)/2 to cancel roundoff asymmetry.
CsrMatrix galerkin_triple_product(const CsrMatrix& s, const CsrMatrix& k);

/// Matrix Market coordinate format, general symmetry (full pattern written).
void write_matrix_market(std::ostream& out, const CsrMatrix& a);
void write_matrix_market_file(const std::string& path, const CsrMatrix& a);
CsrMatrix read_matrix_market(std::istream& in);

} // namespace pdfem
