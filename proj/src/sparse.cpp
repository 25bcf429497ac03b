#include "pdfem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pdfem/kernels.hpp"

namespace pdfem {

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    kernels::csr_spmv(n_rows, row_ptr.data(), cols.data(), vals.data(), x.data(), y.data());
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(n_rows);
    multiply(x, y);
    return y;
}

namespace {
int find_col(const CsrMatrix& a, int r, int c) {
    const int* begin = a.cols.data() + a.row_ptr[r];
    const int* end = a.cols.data() + a.row_ptr[r + 1];
    const int* it = std::lower_bound(begin, end, c);
    if (it == end || *it != c) return -1;
    return static_cast<int>(it - a.cols.data());
}
} // namespace

double& CsrMatrix::at(int r, int c) {
    const int k = find_col(*this, r, c);
    if (k < 0)
        throw ValidationError("sparse: entry (" + std::to_string(r) + "," + std::to_string(c) +
                              ") not in pattern");
    return vals[k];
}

double CsrMatrix::get(int r, int c) const {
    const int k = find_col(*this, r, c);
    return k < 0 ? 0.0 : vals[k];
}

double CsrMatrix::max_abs() const {
    double m = 0.0;
    for (double v : vals) m = std::max(m, std::abs(v));
    return m;
}

double CsrMatrix::sym_error() const {
    double e = 0.0;
    for (int r = 0; r < n_rows; ++r)
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            e = std::max(e, std::abs(vals[k] - get(cols[k], r)));
    return e;
}

void CsrMatrix::symmetrize() {
    CsrMatrix t = csr_transpose(*this);
    for (size_t k = 0; k < vals.size(); ++k) vals[k] = 0.5 * (vals[k] + t.vals[k]);
}

void CsrMatrix::scale(double s) {
    for (double& v : vals) v *= s;
}

PatternBuilder::PatternBuilder(int n_rows, int n_cols) : n_cols_(n_cols), rows_(n_rows) {}

void PatternBuilder::add_block(std::span<const int> row_dofs, std::span<const int> col_dofs) {
    for (int r : row_dofs)
        for (int c : col_dofs) rows_[r].push_back(c);
}

CsrMatrix PatternBuilder::freeze() {
    CsrMatrix m;
    m.n_rows = static_cast<int>(rows_.size());
    m.n_cols = n_cols_;
    m.row_ptr.assign(m.n_rows + 1, 0);
    for (int r = 0; r < m.n_rows; ++r) {
        auto& cs = rows_[r];
        std::sort(cs.begin(), cs.end());
        cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
        m.row_ptr[r + 1] = m.row_ptr[r] + static_cast<int>(cs.size());
    }
    m.cols.reserve(m.row_ptr.back());
    for (auto& cs : rows_) {
        m.cols.insert(m.cols.end(), cs.begin(), cs.end());
        cs.clear();
        cs.shrink_to_fit();
    }
    m.vals.assign(m.cols.size(), 0.0);
    return m;
}

CsrMatrix csr_transpose(const CsrMatrix& a) {
    CsrMatrix t;
    t.n_rows = a.n_cols;
    t.n_cols = a.n_rows;
    t.row_ptr.assign(t.n_rows + 1, 0);
    for (int c : a.cols) ++t.row_ptr[c + 1];
    for (int r = 0; r < t.n_rows; ++r) t.row_ptr[r + 1] += t.row_ptr[r];
    t.cols.resize(a.cols.size());
    t.vals.resize(a.vals.size());
    std::vector<int> cursor(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (int r = 0; r < a.n_rows; ++r)
        for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
            const int pos = cursor[a.cols[k]]++;
            t.cols[pos] = r;
            t.vals[pos] = a.vals[k];
        }
    return t; // columns sorted because rows were visited in order
}

CsrMatrix csr_multiply(const CsrMatrix& a, const CsrMatrix& b) {
    if (a.n_cols != b.n_rows) throw ValidationError("sparse multiply: dimension mismatch");
    CsrMatrix c;
    c.n_rows = a.n_rows;
    c.n_cols = b.n_cols;
    c.row_ptr.assign(a.n_rows + 1, 0);

    // Gustavson with a dense accumulator
    std::vector<double> acc(b.n_cols, 0.0);
    std::vector<int> marker(b.n_cols, -1);
    std::vector<int> touched;

    for (int r = 0; r < a.n_rows; ++r) {
        touched.clear();
        for (int ka = a.row_ptr[r]; ka < a.row_ptr[r + 1]; ++ka) {
            const int j = a.cols[ka];
            const double av = a.vals[ka];
            for (int kb = b.row_ptr[j]; kb < b.row_ptr[j + 1]; ++kb) {
                const int cc = b.cols[kb];
                if (marker[cc] != r) {
                    marker[cc] = r;
                    acc[cc] = 0.0;
                    touched.push_back(cc);
                }
                acc[cc] += av * b.vals[kb];
            }
        }
        std::sort(touched.begin(), touched.end());
        for (int cc : touched) {
            c.cols.push_back(cc);
            c.vals.push_back(acc[cc]);
        }
        c.row_ptr[r + 1] = static_cast<int>(c.cols.size());
    }
    return c;
}

CsrMatrix csr_add(const CsrMatrix& a, const CsrMatrix& b) {
    if (a.n_rows != b.n_rows || a.n_cols != b.n_cols)
        throw ValidationError("sparse add: dimension mismatch");
    CsrMatrix c;
    c.n_rows = a.n_rows;
    c.n_cols = a.n_cols;
    c.row_ptr.assign(a.n_rows + 1, 0);
    for (int r = 0; r < a.n_rows; ++r) {
        int ka = a.row_ptr[r], kb = b.row_ptr[r];
        while (ka < a.row_ptr[r + 1] || kb < b.row_ptr[r + 1]) {
            const int ca = ka < a.row_ptr[r + 1] ? a.cols[ka] : c.n_cols;
            const int cb = kb < b.row_ptr[r + 1] ? b.cols[kb] : c.n_cols;
            if (ca == cb) {
                c.cols.push_back(ca);
                c.vals.push_back(a.vals[ka++] + b.vals[kb++]);
            } else if (ca < cb) {
                c.cols.push_back(ca);
                c.vals.push_back(a.vals[ka++]);
            } else {
                c.cols.push_back(cb);
                c.vals.push_back(b.vals[kb++]);
            }
        }
        c.row_ptr[r + 1] = static_cast<int>(c.cols.size());
    }
    return c;
}

CsrMatrix galerkin_triple_product(const CsrMatrix& s, const CsrMatrix& k) {
    if (k.n_rows != k.n_cols || k.n_cols != s.n_rows)
        throw ValidationError("triple product: dimension mismatch");
    const CsrMatrix ks = csr_multiply(k, s);
    CsrMatrix r = csr_multiply(csr_transpose(s), ks);
    r.symmetrize();
    return r;
}

void write_matrix_market(std::ostream& out, const CsrMatrix& a) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.n_rows << ' ' << a.n_cols << ' ' << a.nnz() << '\n';
    char buf[64];
    for (int r = 0; r < a.n_rows; ++r)
        for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%d %d %.17g\n", r + 1, a.cols[k] + 1, a.vals[k]);
            out << buf;
        }
}

void write_matrix_market_file(const std::string& path, const CsrMatrix& a) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open output file: " + path);
    write_matrix_market(out, a);
}

CsrMatrix read_matrix_market(std::istream& in) {
    std::string line;
    long rows = -1, cols = -1, nnz = -1;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '%') continue;
        std::istringstream is(line);
        if (!(is >> rows >> cols >> nnz)) throw ParseError("<mm>", line_no, "malformed size line");
        break;
    }
    if (rows < 0) throw ParseError("<mm>", line_no, "missing size line");

    std::vector<std::vector<std::pair<int, double>>> by_row(rows);
    for (long k = 0; k < nnz; ++k) {
        if (!std::getline(in, line)) throw ParseError("<mm>", line_no, "truncated entry list");
        ++line_no;
        std::istringstream is(line);
        int r, c;
        double v;
        if (!(is >> r >> c >> v)) throw ParseError("<mm>", line_no, "malformed entry");
        by_row[r - 1].push_back({c - 1, v});
    }
    CsrMatrix m;
    m.n_rows = static_cast<int>(rows);
    m.n_cols = static_cast<int>(cols);
    m.row_ptr.assign(rows + 1, 0);
    for (long r = 0; r < rows; ++r) {
        auto& es = by_row[r];
        std::sort(es.begin(), es.end());
        for (auto& [c, v] : es) {
            m.cols.push_back(c);
            m.vals.push_back(v);
        }
        m.row_ptr[r + 1] = static_cast<int>(m.cols.size());
    }
    return m;
}

} // namespace pdfem
