#pragma once

// Dense matrices over Rational or PFloat. Indices are 0-based here; the model
// layer maps the 1-based basis indices onto them.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rayleigh_ritz/errors.hpp"
#include "rayleigh_ritz/scalars.hpp"

namespace rr {

template <class T>
class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols, const T& fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n, const T& sample) {
        Matrix m(n, n, zero_like(sample));
        for (std::size_t i = 0; i < n; ++i) m(i, i) = one_like(sample);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::vector<T> column(std::size_t c) const {
        std::vector<T> out;
        out.reserve(rows_);
        for (std::size_t r = 0; r < rows_; ++r) out.push_back((*this)(r, c));
        return out;
    }
    void set_column(std::size_t c, std::span<const T> values) {
        if (values.size() != rows_) throw dimension_mismatch("set_column");
        for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
    }

    void swap_columns(std::size_t a, std::size_t b) {
        for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, a), (*this)(r, b));
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<T> data_;
};

/// Real-symmetric matrix; only the upper triangle is stored.
template <class T>
class SymMatrix {
public:
    SymMatrix(std::size_t dim, const T& fill) : dim_(dim), upper_(dim * (dim + 1) / 2, fill) {
        if (dim == 0) throw dimension_mismatch("SymMatrix of dimension 0");
    }

    /// Takes the upper triangle of a square matrix.
    static SymMatrix from_upper(const Matrix<T>& m) {
        if (m.rows() != m.cols()) throw dimension_mismatch("SymMatrix::from_upper");
        SymMatrix s(m.rows(), m(0, 0));
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = i; j < m.cols(); ++j) s.set(i, j, m(i, j));
        return s;
    }

    static SymMatrix identity(std::size_t n, const T& sample) {
        SymMatrix s(n, zero_like(sample));
        for (std::size_t i = 0; i < n; ++i) s.set(i, i, one_like(sample));
        return s;
    }

    std::size_t dim() const { return dim_; }

    const T& operator()(std::size_t i, std::size_t j) const { return upper_[index(i, j)]; }
    void set(std::size_t i, std::size_t j, T value) { upper_[index(i, j)] = std::move(value); }

    Matrix<T> dense() const {
        Matrix<T> m(dim_, dim_, upper_.front());
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
        return m;
    }

    friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

private:
    std::size_t index(std::size_t i, std::size_t j) const {
        if (i > j) std::swap(i, j);
        return i * dim_ - i * (i + 1) / 2 + j;
    }

    std::size_t dim_;
    std::vector<T> upper_;
};

/// Element-wise conversion of either scalar kind to PFloat at `bits`.
template <class T>
Matrix<PFloat> to_float(const Matrix<T>& m, precision_bits bits) {
    Matrix<PFloat> out(m.rows(), m.cols(), PFloat(bits));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = to_float(m(r, c), bits);
    return out;
}

template <class T>
SymMatrix<PFloat> to_float(const SymMatrix<T>& m, precision_bits bits) {
    SymMatrix<PFloat> out(m.dim(), PFloat(bits));
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = i; j < m.dim(); ++j) out.set(i, j, to_float(m(i, j), bits));
    return out;
}

template <class T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b) {
    if (a.cols() != b.rows()) throw dimension_mismatch("matmul");
    Matrix<T> out(a.rows(), b.cols(), zero_like(a(0, 0)));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (a(i, k) == zero_like(a(i, k))) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
        }
    return out;
}

template <class T>
std::vector<T> matvec(const Matrix<T>& a, std::span<const T> x) {
    if (a.cols() != x.size()) throw dimension_mismatch("matvec");
    std::vector<T> out(a.rows(), zero_like(a(0, 0)));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * x[j];
    return out;
}

/// Adjoint; over the reals this is the plain transpose.
template <class T>
Matrix<T> transpose_conjugate(const Matrix<T>& a) {
    Matrix<T> out(a.cols(), a.rows(), a(0, 0));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

/// max_ij |a_ij|
template <class T>
T max_abs(const Matrix<T>& a) {
    T best = zero_like(a(0, 0));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (abs(a(i, j)) > best) best = abs(a(i, j));
    return best;
}

template <class T>
Matrix<T> operator-(const Matrix<T>& a, const Matrix<T>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw dimension_mismatch("matrix subtraction");
    Matrix<T> out = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) -= b(i, j);
    return out;
}

template <class T>
struct LdltFactors {
    Matrix<T> lower;     // unit lower triangular
    std::vector<T> diag;
};

/// Unpivoted A = L·diag(D)·Lᵀ. Exact over Rational; rounded per operation over PFloat.
template <class T>
LdltFactors<T> ldlt(const SymMatrix<T>& a) {
    const std::size_t n = a.dim();
    const T zero = zero_like(a(0, 0));
    LdltFactors<T> f{Matrix<T>::identity(n, zero), std::vector<T>(n, zero)};
    for (std::size_t j = 0; j < n; ++j) {
        T d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= f.lower(j, k) * f.lower(j, k) * f.diag[k];
        if (d == zero) throw zero_pivot(j + 1);
        f.diag[j] = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            T s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= f.lower(i, k) * f.lower(j, k) * f.diag[k];
            f.lower(i, j) = s / d;
        }
    }
    return f;
}

/// L·diag(D)·Lᵀ
template <class T>
Matrix<T> reconstruct(const LdltFactors<T>& f) {
    Matrix<T> ld = f.lower;
    for (std::size_t i = 0; i < ld.rows(); ++i)
        for (std::size_t j = 0; j < ld.cols(); ++j) ld(i, j) *= f.diag[j];
    return matmul(ld, transpose_conjugate(f.lower));
}

/// True iff every LDLᵀ pivot is strictly positive.
template <class T>
bool is_positive_definite(const SymMatrix<T>& a) {
    try {
        auto f = ldlt(a);
        for (const auto& d : f.diag)
            if (d.sign() <= 0) return false;
        return true;
    } catch (const zero_pivot&) {
        return false;
    }
}

/// Exact determinant by Gaussian elimination. When no row exchange is needed the
/// elimination pivots coincide with the LDLᵀ pivots.
inline Rational gram_determinant(const SymMatrix<Rational>& s) {
    Matrix<Rational> a = s.dense();
    const std::size_t n = a.rows();
    Rational det(1);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && a(p, k).is_zero()) ++p;
        if (p == n) return Rational(0);
        if (p != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(p, c));
            det = -det;
        }
        det *= a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a(i, k).is_zero()) continue;
            Rational m = a(i, k) / a(k, k);
            for (std::size_t c = k; c < n; ++c) a(i, c) -= m * a(k, c);
        }
    }
    return det;
}

/// Inverse of a unit lower triangular matrix by forward substitution.
template <class T>
Matrix<T> unit_lower_inverse(const Matrix<T>& l) {
    const std::size_t n = l.rows();
    Matrix<T> inv = Matrix<T>::identity(n, l(0, 0));
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t i = c + 1; i < n; ++i) {
            T s = zero_like(l(0, 0));
            for (std::size_t k = c; k < i; ++k) s -= l(i, k) * inv(k, c);
            inv(i, c) = s;
        }
    return inv;
}

/// Solves A·X = B by Gaussian elimination with partial pivoting (largest magnitude).
/// A zero pivot is replaced by `zero_pivot_fill` when provided, otherwise raises zero_pivot.
template <class T>
Matrix<T> lu_solve(Matrix<T> a, Matrix<T> b, const T* zero_pivot_fill = nullptr) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.rows() != n) throw dimension_mismatch("lu_solve");
    const T zero = zero_like(a(0, 0));
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (abs(a(i, k)) > abs(a(p, k))) p = i;
        if (p != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(p, c));
            for (std::size_t c = 0; c < b.cols(); ++c) std::swap(b(k, c), b(p, c));
        }
        if (a(k, k) == zero) {
            if (!zero_pivot_fill) throw zero_pivot(k + 1);
            a(k, k) = *zero_pivot_fill;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a(i, k) == zero) continue;
            T m = a(i, k) / a(k, k);
            for (std::size_t c = k; c < n; ++c) a(i, c) -= m * a(k, c);
            for (std::size_t c = 0; c < b.cols(); ++c) b(i, c) -= m * b(k, c);
        }
    }
    for (std::size_t c = 0; c < b.cols(); ++c)
        for (std::size_t i = n; i-- > 0;) {
            T s = b(i, c);
            for (std::size_t k = i + 1; k < n; ++k) s -= a(i, k) * b(k, c);
            b(i, c) = s / a(i, i);
        }
    return b;
}

}  // namespace rr
