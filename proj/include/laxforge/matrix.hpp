#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "laxforge/error.hpp"

namespace laxforge {

using cplx = std::complex<double>;

template <typename T>
inline constexpr bool is_complex_v = false;
template <typename T>
inline constexpr bool is_complex_v<std::complex<T>> = true;

/// Dense row-major matrix. Sizes are small (at most 64x64), so everything is
/// value-typed and copied freely.
template <typename T>
class Matrix {
public:
    using value_type = T;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Matrix(std::initializer_list<std::initializer_list<T>> init) {
        rows_ = init.size();
        cols_ = rows_ == 0 ? 0 : init.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) {
                throw Error(ErrorKind::DimensionMismatch, "ragged matrix initializer");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    static Matrix from_rows(std::size_t rows, std::size_t cols, std::vector<T> entries) {
        if (entries.size() != rows * cols) {
            throw Error(ErrorKind::DimensionMismatch, "entry count does not match rows*cols");
        }
        Matrix m;
        m.rows_ = rows;
        m.cols_ = cols;
        m.data_ = std::move(entries);
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const T> data() const noexcept { return data_; }
    std::span<T> data() noexcept { return data_; }

    std::vector<T> row(std::size_t i) const {
        return {data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
    }
    std::vector<T> col(std::size_t j) const {
        std::vector<T> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }
    void set_col(std::size_t j, std::span<const T> values) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix conjugate() const {
        if constexpr (is_complex_v<T>) {
            Matrix c = *this;
            for (auto& v : c.data_) v = std::conj(v);
            return c;
        } else {
            return *this;
        }
    }

    Matrix adjoint() const { return conjugate().transpose(); }

    Matrix& operator+=(const Matrix& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    Matrix& operator*=(T s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator-(Matrix a) { return a *= T{-1}; }
    friend Matrix operator*(Matrix a, T s) { return a *= s; }
    friend Matrix operator*(T s, Matrix a) { return a *= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) {
            throw Error(ErrorKind::DimensionMismatch,
                        "matmul " + a.shape() + " * " + b.shape());
        }
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T aik = a(i, k);
                if (aik == T{}) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend std::vector<T> operator*(const Matrix& a, std::span<const T> x) {
        if (a.cols_ != x.size()) {
            throw Error(ErrorKind::DimensionMismatch, "matvec " + a.shape());
        }
        std::vector<T> y(a.rows_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            T acc{};
            for (std::size_t j = 0; j < a.cols_; ++j) acc += a(i, j) * x[j];
            y[i] = acc;
        }
        return y;
    }
    friend std::vector<T> operator*(const Matrix& a, const std::vector<T>& x) {
        return a * std::span<const T>(x);
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

private:
    void require_same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) {
            throw Error(ErrorKind::DimensionMismatch, shape() + " vs " + o.shape());
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<cplx>;
using RealVector = std::vector<double>;
using ComplexVector = std::vector<cplx>;

ComplexMatrix to_complex(const RealMatrix& m);
ComplexVector to_complex(std::span<const double> v);
RealMatrix real_part(const ComplexMatrix& m);
RealMatrix imag_part(const ComplexMatrix& m);
RealVector real_part(std::span<const cplx> v);
RealVector imag_part(std::span<const cplx> v);

/// Block-diagonal assembly of square blocks.
ComplexMatrix block_diag(std::span<const ComplexMatrix> blocks);

template <typename T>
double abs_value(const T& v) {
    return std::abs(v);
}

/// Induced infinity norm (max absolute row sum).
template <typename T>
double norm_inf(const Matrix<T>& m) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += std::abs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

template <typename T>
double norm_max(const Matrix<T>& m) {
    double best = 0.0;
    for (const auto& v : m.data()) best = std::max(best, static_cast<double>(std::abs(v)));
    return best;
}

template <typename T>
double norm_fro(const Matrix<T>& m) {
    double s = 0.0;
    for (const auto& v : m.data()) s += std::norm(v);
    return std::sqrt(s);
}

template <typename T>
double norm2(std::span<const T> v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
}
template <typename T>
double norm2(const std::vector<T>& v) {
    return norm2(std::span<const T>(v));
}

/// Plain bilinear product uᵀv (no conjugation).
template <typename T>
T dot(std::span<const T> u, std::span<const T> v) {
    if (u.size() != v.size()) throw Error(ErrorKind::DimensionMismatch, "dot");
    T acc{};
    for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
    return acc;
}
template <typename T>
T dot(const std::vector<T>& u, const std::vector<T>& v) {
    return dot(std::span<const T>(u), std::span<const T>(v));
}

/// Hermitian inner product u^H v.
cplx inner(std::span<const cplx> u, std::span<const cplx> v);

/// uᵀ M v with plain transpose.
cplx bilinear(std::span<const cplx> u, const ComplexMatrix& m, std::span<const cplx> v);

ComplexVector add(std::span<const cplx> u, std::span<const cplx> v);
ComplexVector sub(std::span<const cplx> u, std::span<const cplx> v);
ComplexVector scale(std::span<const cplx> u, cplx s);
ComplexVector conj(std::span<const cplx> u);

/// Outer product u vᵀ (no conjugation).
ComplexMatrix outer(std::span<const cplx> u, std::span<const cplx> v);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

template <typename T>
T trace(const Matrix<T>& m) {
    if (!m.is_square()) throw Error(ErrorKind::DimensionMismatch, "trace of " + m.shape());
    T t{};
    for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
    return t;
}

/// All entries finite.
template <typename T>
bool all_finite(const Matrix<T>& m) {
    return std::all_of(m.data().begin(), m.data().end(), [](const T& v) {
        if constexpr (is_complex_v<T>) {
            return std::isfinite(v.real()) && std::isfinite(v.imag());
        } else {
            return std::isfinite(v);
        }
    });
}

}  // namespace laxforge
