#ifndef DIFFALG_MATRIX_HPP
#define DIFFALG_MATRIX_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "prime_field.hpp"
#include "rational.hpp"

namespace diffalg {

// Dense row-major matrix over an exact scalar K.  All elimination routines
// below are deterministic: pivots are always the lexicographically first
// nonzero candidate (leftmost column, then topmost row), never chosen by
// magnitude, so results are identical across runs and across ground fields.
template <class K>
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static Matrix identity(size_t n) {
        Matrix m(n, n);
        for (size_t i = 0; i < n; ++i)
            m(i, i) = K(1);
        return m;
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

    K& operator()(size_t i, size_t j) { return data_[i * cols_ + j]; }
    const K& operator()(size_t i, size_t j) const { return data_[i * cols_ + j]; }

    std::span<K> row(size_t i) { return std::span<K>(data_).subspan(i * cols_, cols_); }
    std::span<const K> row(size_t i) const {
        return std::span<const K>(data_).subspan(i * cols_, cols_);
    }

    std::vector<K> column(size_t j) const {
        std::vector<K> c(rows_);
        for (size_t i = 0; i < rows_; ++i)
            c[i] = (*this)(i, j);
        return c;
    }

    void set_column(size_t j, std::span<const K> v) {
        if (v.size() != rows_)
            throw invalid_input_error("set_column: length mismatch");
        for (size_t i = 0; i < rows_; ++i)
            (*this)(i, j) = v[i];
    }

    void swap_rows(size_t a, size_t b) {
        if (a == b)
            return;
        for (size_t j = 0; j < cols_; ++j)
            std::swap((*this)(a, j), (*this)(b, j));
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            return false;
        for (size_t i = 0; i < a.data_.size(); ++i)
            if (!(a.data_[i] == b.data_[i]))
                return false;
        return true;
    }
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_)
            throw invalid_input_error("matrix product: inner dimensions differ");
        Matrix r(rows_, o.cols_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t k = 0; k < cols_; ++k) {
                const K& a = (*this)(i, k);
                if (a.is_zero())
                    continue;
                for (size_t j = 0; j < o.cols_; ++j) {
                    const K& b = o(k, j);
                    if (b.is_zero())
                        continue;
                    r(i, j) += a * b;
                }
            }
        return r;
    }

    Matrix operator+(const Matrix& o) const {
        require_same_shape(o, "sum");
        Matrix r = *this;
        for (size_t i = 0; i < data_.size(); ++i)
            r.data_[i] += o.data_[i];
        return r;
    }

    Matrix operator-(const Matrix& o) const {
        require_same_shape(o, "difference");
        Matrix r = *this;
        for (size_t i = 0; i < data_.size(); ++i)
            r.data_[i] -= o.data_[i];
        return r;
    }

    Matrix operator-() const {
        Matrix r = *this;
        for (K& x : r.data_)
            x = -x;
        return r;
    }

    friend Matrix operator*(const K& s, Matrix m) {
        for (K& x : m.data_)
            x = s * x;
        return m;
    }

    std::vector<K> mul_vec(std::span<const K> v) const {
        if (v.size() != cols_)
            throw invalid_input_error("matrix-vector product: dimension mismatch");
        std::vector<K> r(rows_);
        for (size_t i = 0; i < rows_; ++i) {
            for (size_t j = 0; j < cols_; ++j) {
                const K& a = (*this)(i, j);
                if (a.is_zero() || v[j].is_zero())
                    continue;
                r[i] += a * v[j];
            }
        }
        return r;
    }

    bool is_zero() const {
        for (const K& x : data_)
            if (!x.is_zero())
                return false;
        return true;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    static Matrix from_columns(size_t rows, const std::vector<std::vector<K>>& cols) {
        Matrix m(rows, cols.size());
        for (size_t j = 0; j < cols.size(); ++j) {
            if (cols[j].size() != rows)
                throw invalid_input_error("from_columns: column length mismatch");
            for (size_t i = 0; i < rows; ++i)
                m(i, j) = cols[j][i];
        }
        return m;
    }

    std::vector<K>& data() { return data_; }
    const std::vector<K>& data() const { return data_; }

private:
    void require_same_shape(const Matrix& o, const char* what) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw invalid_input_error(std::string("matrix ") + what + ": shape mismatch");
    }

    size_t rows_, cols_;
    std::vector<K> data_;
};

namespace detail {

// Default: nothing to unify for field types without a runtime modulus.
template <class K>
inline void unify_field(std::vector<K>&) {}

// GF(p): all bound entries must share one modulus; unbound literals are bound
// to it so later pivot tests see fully reduced values.
inline void unify_field(std::vector<PrimeField>& data) {
    unsigned long long p = 0;
    for (const PrimeField& x : data) {
        if (x.modulus() != 0) {
            if (p != 0 && x.modulus() != p)
                throw invalid_input_error("matrix mixes entries from different prime fields");
            p = x.modulus();
        }
    }
    if (p == 0)
        return;
    for (PrimeField& x : data)
        x.bind_to(p);
}

// Row-content stripping is a no-op except over the rationals (see
// rational.hpp); declared here as the generic fallback.
template <class K>
inline void strip_row_content(std::span<K>) {}

inline void strip_row_content(std::span<Rational> row) { normalize_row_for_rank(row); }

} // namespace detail

// Rank by fraction-free (Bareiss) elimination.  Pivot selection scans columns
// left to right and, within a column, rows top to bottom, taking the first
// nonzero entry.  Over the rationals each updated row is stripped to coprime
// integer content; this rescaling keeps entries small and cannot change the
// zero pattern, the pivot sequence, or the rank.
template <class K>
size_t rank(Matrix<K> m) {
    detail::unify_field(m.data());
    const size_t rows = m.rows(), cols = m.cols();
    size_t r = 0;
    K prev = K(1);
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t piv = rows;
        for (size_t i = r; i < rows; ++i) {
            if (!m(i, c).is_zero()) {
                piv = i;
                break;
            }
        }
        if (piv == rows)
            continue;
        m.swap_rows(r, piv);
        const K pivot = m(r, c);
        for (size_t i = r + 1; i < rows; ++i) {
            const K head = m(i, c);
            for (size_t j = c; j < cols; ++j) {
                const bool cross = !head.is_zero() && !m(r, j).is_zero();
                if (m(i, j).is_zero() && !cross)
                    continue;
                K v = m(i, j).is_zero() ? K(0) : m(i, j) * pivot;
                if (cross)
                    v -= head * m(r, j);
                m(i, j) = v / prev;
            }
            // Content stripping is a unit row scaling: it cannot change the
            // zero pattern, so the pivot walk and the final rank are exactly
            // those of the unstripped elimination.
            detail::strip_row_content(m.row(i).subspan(c));
        }
        prev = pivot;
        ++r;
    }
    return r;
}

// Reduced row echelon form with the same deterministic pivot rule.
template <class K>
struct RrefResult {
    Matrix<K> mat;
    std::vector<size_t> pivot_cols;
};

template <class K>
RrefResult<K> rref(Matrix<K> m) {
    detail::unify_field(m.data());
    const size_t rows = m.rows(), cols = m.cols();
    std::vector<size_t> pivots;
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t piv = rows;
        for (size_t i = r; i < rows; ++i) {
            if (!m(i, c).is_zero()) {
                piv = i;
                break;
            }
        }
        if (piv == rows)
            continue;
        m.swap_rows(r, piv);
        const K inv_lead = K(1) / m(r, c);
        for (size_t j = c; j < cols; ++j) {
            if (!m(r, j).is_zero())
                m(r, j) = m(r, j) * inv_lead;
        }
        for (size_t i = 0; i < rows; ++i) {
            if (i == r)
                continue;
            const K f = m(i, c);
            if (f.is_zero())
                continue;
            for (size_t j = c; j < cols; ++j) {
                if (!m(r, j).is_zero())
                    m(i, j) -= f * m(r, j);
            }
        }
        pivots.push_back(c);
        ++r;
    }
    return {std::move(m), std::move(pivots)};
}

// Kernel basis from the reduced row echelon form: one vector per free column,
// ordered by ascending free-column index, normalized so the free variable
// itself is 1 and all other free variables are 0.
template <class K>
std::vector<std::vector<K>> kernel_basis(const Matrix<K>& m) {
    RrefResult<K> e = rref(m);
    const size_t cols = m.cols();
    std::vector<bool> is_pivot(cols, false);
    for (size_t c : e.pivot_cols)
        is_pivot[c] = true;
    std::vector<std::vector<K>> basis;
    for (size_t fc = 0; fc < cols; ++fc) {
        if (is_pivot[fc])
            continue;
        std::vector<K> v(cols);
        v[fc] = K(1);
        for (size_t t = 0; t < e.pivot_cols.size(); ++t)
            v[e.pivot_cols[t]] = -e.mat(t, fc);
        basis.push_back(std::move(v));
    }
    return basis;
}

// One particular solution of M x = b with every free variable set to 0, or
// nullopt when the system is inconsistent.
template <class K>
std::optional<std::vector<K>> solve(const Matrix<K>& m, const std::vector<K>& b) {
    if (b.size() != m.rows())
        throw invalid_input_error("solve: right-hand side length mismatch");
    Matrix<K> aug(m.rows(), m.cols() + 1);
    for (size_t i = 0; i < m.rows(); ++i) {
        for (size_t j = 0; j < m.cols(); ++j)
            aug(i, j) = m(i, j);
        aug(i, m.cols()) = b[i];
    }
    RrefResult<K> e = rref(std::move(aug));
    std::vector<K> x(m.cols());
    for (size_t t = 0; t < e.pivot_cols.size(); ++t) {
        if (e.pivot_cols[t] == m.cols())
            return std::nullopt; // pivot in the augmented column
        x[e.pivot_cols[t]] = e.mat(t, m.cols());
    }
    return x;
}

// Inverse via Gauss-Jordan on [M | I]; throws on singular input.
template <class K>
Matrix<K> inverse(const Matrix<K>& m) {
    if (m.rows() != m.cols())
        throw invalid_input_error("inverse: matrix not square");
    const size_t n = m.rows();
    Matrix<K> aug(n, 2 * n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j)
            aug(i, j) = m(i, j);
        aug(i, n + i) = K(1);
    }
    RrefResult<K> e = rref(std::move(aug));
    if (e.pivot_cols.size() < n || e.pivot_cols[n - 1] != n - 1)
        throw invalid_input_error("inverse: singular matrix");
    Matrix<K> inv(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            inv(i, j) = e.mat(i, n + j);
    return inv;
}

// Incrementally tracked row space, used to filter cocycle representatives
// against a coboundary image.  add() reduces the vector against the stored
// echelon rows and reports whether the span grew.
template <class K>
class RowSpace {
public:
    // Returns true when v was independent of the current span (and absorbed).
    bool add(std::vector<K> v) {
        for (const Row& r : rows_) {
            if (r.lead >= v.size())
                break;
            const K f = v[r.lead];
            if (f.is_zero())
                continue;
            for (size_t j = r.lead; j < v.size(); ++j) {
                if (!r.vec[j].is_zero())
                    v[j] -= f * r.vec[j];
            }
        }
        size_t lead = v.size();
        for (size_t j = 0; j < v.size(); ++j) {
            if (!v[j].is_zero()) {
                lead = j;
                break;
            }
        }
        if (lead == v.size())
            return false;
        const K inv_lead = K(1) / v[lead];
        for (size_t j = lead; j < v.size(); ++j)
            if (!v[j].is_zero())
                v[j] = v[j] * inv_lead;
        Row row{lead, std::move(v)};
        auto it = rows_.begin();
        while (it != rows_.end() && it->lead < lead)
            ++it;
        rows_.insert(it, std::move(row));
        return true;
    }

    bool contains(std::vector<K> v) const {
        RowSpace tmp = *this;
        return !tmp.add(std::move(v));
    }

    size_t dim() const { return rows_.size(); }

private:
    struct Row {
        size_t lead;
        std::vector<K> vec;
    };
    std::vector<Row> rows_;
};

} // namespace diffalg

#endif
