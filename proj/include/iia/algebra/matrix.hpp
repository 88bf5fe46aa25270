#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "iia/errors.hpp"

namespace iia::algebra {

/// Dense row-major matrix over any ring-like value type (exact scalars,
/// polynomials). Arithmetic needs a nonempty inner dimension or an explicit
/// zero, because T may not be default-constructible to its own zero.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n, const T& zero, const T& one) {
    Matrix m(n, n, zero);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = one;
    return m;
  }
  static Matrix diagonal(const std::vector<T>& d, const T& zero) {
    Matrix m(d.size(), d.size(), zero);
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  Matrix transpose() const {
    if (data_.empty()) return Matrix();
    Matrix t(cols_, rows_, data_.front());
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    }
    return t;
  }

  std::vector<T> diagonal_entries() const {
    std::vector<T> d;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) {
      d.push_back((*this)(i, i));
    }
    return d;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) {
    a.require_same_shape(b);
    for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] += b.data_[k];
    return a;
  }
  friend Matrix operator-(Matrix a, const Matrix& b) {
    a.require_same_shape(b);
    for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] -= b.data_[k];
    return a;
  }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_ || a.cols_ == 0) {
      throw InvalidArgument("matrix product shape mismatch");
    }
    Matrix c(a.rows_, b.cols_, a(0, 0));
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t j = 0; j < b.cols_; ++j) {
        T acc = a(i, 0) * b(0, j);
        for (std::size_t k = 1; k < a.cols_; ++k) acc += a(i, k) * b(k, j);
        c(i, j) = std::move(acc);
      }
    }
    return c;
  }
  friend Matrix operator*(const T& s, Matrix a) {
    for (auto& x : a.data_) x = s * x;
    return a;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }
  friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

  const std::vector<T>& data() const { return data_; }

 private:
  void require_same_shape(const Matrix& b) const {
    if (rows_ != b.rows_ || cols_ != b.cols_) {
      throw InvalidArgument("matrix shape mismatch");
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Row echelon data of a matrix over an exact field.
template <class F>
struct EchelonForm {
  Matrix<F> reduced;                 // reduced row echelon form
  std::vector<std::size_t> pivots;   // pivot column of each nonzero row
  std::size_t rank() const { return pivots.size(); }
};

/// Gauss-Jordan elimination with exact arithmetic.
template <class F>
EchelonForm<F> rref(Matrix<F> m) {
  EchelonForm<F> out;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t pivot = row;
    while (pivot < m.rows() && m(pivot, col).is_zero()) ++pivot;
    if (pivot == m.rows()) continue;
    if (pivot != row) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        std::swap(m(pivot, j), m(row, j));
      }
    }
    F inv = m(row, col).inverse();
    for (std::size_t j = col; j < m.cols(); ++j) m(row, j) = m(row, j) * inv;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col).is_zero()) continue;
      F factor = m(r, col);
      for (std::size_t j = col; j < m.cols(); ++j) {
        if (!m(row, j).is_zero()) m(r, j) -= factor * m(row, j);
      }
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.reduced = std::move(m);
  return out;
}

template <class F>
std::size_t rank(const Matrix<F>& m) {
  return rref(m).rank();
}

/// Basis of the right nullspace {x : m x = 0}, one vector per free column.
/// `zero` and `one` are the field constants.
template <class F>
std::vector<std::vector<F>> nullspace(const Matrix<F>& m, const F& zero,
                                      const F& one) {
  auto e = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (std::size_t p : e.pivots) is_pivot[p] = true;
  std::vector<std::vector<F>> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<F> v(m.cols(), zero);
    v[free] = one;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) {
      v[e.pivots[r]] = -e.reduced(r, free);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Determinant by Gaussian elimination over an exact field.
template <class F>
F determinant(Matrix<F> m, const F& zero, const F& one) {
  if (m.rows() != m.cols()) throw InvalidArgument("determinant of non-square");
  F det = one;
  const std::size_t n = m.rows();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m(pivot, col).is_zero()) ++pivot;
    if (pivot == n) return zero;
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(pivot, j), m(col, j));
      det = -det;
    }
    det = det * m(col, col);
    F inv = m(col, col).inverse();
    for (std::size_t r = col + 1; r < n; ++r) {
      if (m(r, col).is_zero()) continue;
      F factor = m(r, col) * inv;
      for (std::size_t j = col; j < n; ++j) m(r, j) -= factor * m(col, j);
    }
  }
  return det;
}

/// m * v for a column vector v.
template <class F>
std::vector<F> apply(const Matrix<F>& m, const std::vector<F>& v,
                     const F& zero) {
  if (v.size() != m.cols()) throw InvalidArgument("matrix-vector mismatch");
  std::vector<F> out(m.rows(), zero);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!m(i, j).is_zero() && !v[j].is_zero()) out[i] += m(i, j) * v[j];
    }
  }
  return out;
}

/// Invert a square matrix; throws NonGenericInstance if singular.
template <class F>
Matrix<F> inverse(const Matrix<F>& m, const F& zero, const F& one) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw InvalidArgument("inverse of non-square matrix");
  Matrix<F> aug(n, 2 * n, zero);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = one;
  }
  auto e = rref(std::move(aug));
  if (e.rank() < n || e.pivots[n - 1] != n - 1) {
    throw NonGenericInstance("singular matrix");
  }
  Matrix<F> inv(n, n, zero);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = e.reduced(i, n + j);
  }
  return inv;
}

}  // namespace iia::algebra
