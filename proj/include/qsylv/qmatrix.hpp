#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qsylv/quaternion.hpp"

namespace qsylv {

/// Raised when operand shapes do not line up.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a complex matrix does not have the block structure of an embedded quaternion matrix.
class StructureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Complex = std::complex<double>;

/// Dense row-major complex matrix; host for the complex adjoint of a quaternion matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw DimensionError("ComplexMatrix: entry count mismatch");
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  const std::vector<Complex>& data() const { return data_; }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
  }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) throw DimensionError("ComplexMatrix product: inner dimensions differ");
    ComplexMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  friend ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionError("ComplexMatrix difference: shape mismatch");
    ComplexMatrix out(a);
    for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] -= b.data_[i];
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

/// Dense row-major quaternion matrix. Zero-dimension shapes are valid values.
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  QMatrix(std::size_t rows, std::size_t cols, std::vector<Quaternion> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw DimensionError("QMatrix: entry count mismatch");
  }
  /// Row-list literal; every row must have the same length.
  QMatrix(std::initializer_list<std::initializer_list<Quaternion>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) throw DimensionError("QMatrix literal: ragged rows");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static QMatrix zeros(std::size_t rows, std::size_t cols) { return QMatrix(rows, cols); }
  static QMatrix identity(std::size_t n) {
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }
  bool same_shape(const QMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  Quaternion& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Quaternion& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  const std::vector<Quaternion>& data() const { return data_; }

  QMatrix& operator+=(const QMatrix& o) {
    require_same_shape(o, "sum");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  QMatrix& operator-=(const QMatrix& o) {
    require_same_shape(o, "difference");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  QMatrix& operator*=(double s) {
    for (auto& q : data_) q *= s;
    return *this;
  }

  friend bool operator==(const QMatrix&, const QMatrix&) = default;

  std::string shape_string() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

 private:
  void require_same_shape(const QMatrix& o, const char* what) const {
    if (!same_shape(o))
      throw DimensionError(std::string("QMatrix ") + what + ": shape mismatch " + shape_string() + " vs " +
                           o.shape_string());
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Quaternion> data_;
};

inline QMatrix operator+(QMatrix a, const QMatrix& b) { return a += b; }
inline QMatrix operator-(QMatrix a, const QMatrix& b) { return a -= b; }
inline QMatrix operator-(QMatrix a) { return a *= -1.0; }
inline QMatrix operator*(QMatrix a, double s) { return a *= s; }
inline QMatrix operator*(double s, QMatrix a) { return a *= s; }

inline QMatrix mat_add(const QMatrix& a, const QMatrix& b) { return a + b; }
inline QMatrix mat_sub(const QMatrix& a, const QMatrix& b) { return a - b; }
inline QMatrix scalar_mul(double s, const QMatrix& a) { return s * a; }

/// Left scalar multiple q * A.
inline QMatrix scalar_mul(const Quaternion& q, const QMatrix& a) {
  QMatrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = q * a(r, c);
  return out;
}

/// Right scalar multiple A * q.
inline QMatrix scalar_mul(const QMatrix& a, const Quaternion& q) {
  QMatrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c) * q;
  return out;
}

inline QMatrix mat_mul(const QMatrix& a, const QMatrix& b) {
  if (a.cols() != b.rows())
    throw DimensionError("mat_mul: " + a.shape_string() + " times " + b.shape_string());
  QMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Quaternion aik = a(i, k);
      if (aik == Quaternion{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

inline QMatrix operator*(const QMatrix& a, const QMatrix& b) { return mat_mul(a, b); }

/// A*: conjugate transpose.
inline QMatrix conj_transpose(const QMatrix& a) {
  QMatrix out(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = conj(a(r, c));
  return out;
}

/// A^{eta*} = -eta A* eta.
inline QMatrix eta_conj_transpose(const QMatrix& a, Eta eta) {
  QMatrix out(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = quat_eta_conj(a(r, c), eta);
  return out;
}

inline double frobenius_norm(const QMatrix& a) {
  double s = 0.0;
  for (const auto& q : a.data()) s += norm2(q);
  return std::sqrt(s);
}

inline double max_abs(const QMatrix& a) {
  double m = 0.0;
  for (const auto& q : a.data()) m = std::max(m, abs(q));
  return m;
}

inline QMatrix submatrix(const QMatrix& a, std::size_t row0, std::size_t col0, std::size_t nrows,
                         std::size_t ncols) {
  if (row0 + nrows > a.rows() || col0 + ncols > a.cols())
    throw DimensionError("submatrix: window exceeds " + a.shape_string());
  QMatrix out(nrows, ncols);
  for (std::size_t r = 0; r < nrows; ++r)
    for (std::size_t c = 0; c < ncols; ++c) out(r, c) = a(row0 + r, col0 + c);
  return out;
}

inline QMatrix select_rows(const QMatrix& a, std::size_t row0, std::size_t count) {
  return submatrix(a, row0, 0, count, a.cols());
}

inline QMatrix select_cols(const QMatrix& a, std::size_t col0, std::size_t count) {
  return submatrix(a, 0, col0, a.rows(), count);
}

/// The block row (I_m, 0) of width total (offset 0) or (0, I_m) (offset total - m).
inline QMatrix row_selector(std::size_t m, std::size_t total, std::size_t offset) {
  if (offset + m > total) throw DimensionError("row_selector: identity block exceeds width");
  QMatrix s(m, total);
  for (std::size_t i = 0; i < m; ++i) s(i, offset + i) = 1.0;
  return s;
}

/// The block column (I_n; 0) or (0; I_n), the transpose of row_selector.
inline QMatrix col_selector(std::size_t n, std::size_t total, std::size_t offset) {
  return conj_transpose(row_selector(n, total, offset));
}

inline QMatrix hstack(std::initializer_list<QMatrix> parts) {
  std::size_t rows = parts.size() ? parts.begin()->rows() : 0;
  std::size_t cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) throw DimensionError("hstack: row counts differ");
    cols += p.cols();
  }
  QMatrix out(rows, cols);
  std::size_t off = 0;
  for (const auto& p : parts) {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < p.cols(); ++c) out(r, off + c) = p(r, c);
    off += p.cols();
  }
  return out;
}

inline QMatrix vstack(std::initializer_list<QMatrix> parts) {
  std::size_t cols = parts.size() ? parts.begin()->cols() : 0;
  std::size_t rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) throw DimensionError("vstack: column counts differ");
    rows += p.rows();
  }
  QMatrix out(rows, cols);
  std::size_t off = 0;
  for (const auto& p : parts) {
    for (std::size_t r = 0; r < p.rows(); ++r)
      for (std::size_t c = 0; c < cols; ++c) out(off + r, c) = p(r, c);
    off += p.rows();
  }
  return out;
}

/// Placeholder for a zero block whose shape is inferred from its block row and column.
struct ZeroBlock {};
inline constexpr ZeroBlock zero{};

class BlockEntry {
 public:
  BlockEntry(ZeroBlock) {}
  BlockEntry(const QMatrix& m) : m_(&m) {}
  BlockEntry(QMatrix&& m) : owned_(std::move(m)) { m_ = &*owned_; }
  BlockEntry(const BlockEntry& o) : owned_(o.owned_), m_(o.owned_ ? nullptr : o.m_) {
    if (owned_) m_ = &*owned_;
  }
  BlockEntry& operator=(const BlockEntry&) = delete;

  const QMatrix* get() const { return m_; }

 private:
  std::optional<QMatrix> owned_;
  const QMatrix* m_ = nullptr;
};

/// Assemble a block matrix. Zero blocks take the height of their block row and the width of
/// their block column; each block row and column needs at least one explicit matrix.
inline QMatrix block(std::initializer_list<std::initializer_list<BlockEntry>> grid) {
  const std::size_t nbr = grid.size();
  const std::size_t nbc = nbr ? grid.begin()->size() : 0;
  std::vector<std::optional<std::size_t>> heights(nbr), widths(nbc);
  std::size_t bi = 0;
  for (const auto& row : grid) {
    if (row.size() != nbc) throw DimensionError("block: ragged block grid");
    std::size_t bj = 0;
    for (const auto& e : row) {
      if (const QMatrix* m = e.get()) {
        if (heights[bi] && *heights[bi] != m->rows())
          throw DimensionError("block: inconsistent heights in block row " + std::to_string(bi));
        if (widths[bj] && *widths[bj] != m->cols())
          throw DimensionError("block: inconsistent widths in block column " + std::to_string(bj));
        heights[bi] = m->rows();
        widths[bj] = m->cols();
      }
      ++bj;
    }
    ++bi;
  }
  std::size_t total_rows = 0, total_cols = 0;
  for (std::size_t i = 0; i < nbr; ++i) {
    if (!heights[i]) throw DimensionError("block: cannot infer height of block row " + std::to_string(i));
    total_rows += *heights[i];
  }
  for (std::size_t j = 0; j < nbc; ++j) {
    if (!widths[j]) throw DimensionError("block: cannot infer width of block column " + std::to_string(j));
    total_cols += *widths[j];
  }
  QMatrix out(total_rows, total_cols);
  std::size_t r0 = 0;
  bi = 0;
  for (const auto& row : grid) {
    std::size_t c0 = 0, bj = 0;
    for (const auto& e : row) {
      if (const QMatrix* m = e.get())
        for (std::size_t r = 0; r < m->rows(); ++r)
          for (std::size_t c = 0; c < m->cols(); ++c) out(r0 + r, c0 + c) = (*m)(r, c);
      c0 += *widths[bj++];
    }
    r0 += *heights[bi++];
  }
  return out;
}

/// Complex adjoint: A = A1 + A2 j maps to [[A1, A2], [-conj(A2), conj(A1)]].
inline ComplexMatrix embed(const QMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  ComplexMatrix out(2 * m, 2 * n);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const Quaternion& q = a(r, c);
      const Complex a1(q.w, q.x), a2(q.y, q.z);
      out(r, c) = a1;
      out(r, n + c) = a2;
      out(m + r, c) = -std::conj(a2);
      out(m + r, n + c) = std::conj(a1);
    }
  return out;
}

/// Project onto the adjoint structure by averaging each entry with its structural partner.
inline QMatrix unembed_projected(const ComplexMatrix& mat) {
  if (mat.rows() % 2 != 0 || mat.cols() % 2 != 0)
    throw StructureError("not an adjoint image: odd dimension " + std::to_string(mat.rows()) + "x" +
                         std::to_string(mat.cols()));
  const std::size_t m = mat.rows() / 2, n = mat.cols() / 2;
  QMatrix out(m, n);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const Complex a1 = 0.5 * (mat(r, c) + std::conj(mat(m + r, n + c)));
      const Complex a2 = 0.5 * (mat(r, n + c) - std::conj(mat(m + r, c)));
      out(r, c) = Quaternion(a1.real(), a1.imag(), a2.real(), a2.imag());
    }
  return out;
}

/// Left inverse of embed. Rejects matrices off the adjoint structure by more than 1e-10 ||M||_F.
inline QMatrix unembed(const ComplexMatrix& mat) {
  QMatrix q = unembed_projected(mat);
  const double deviation = (embed(q) - mat).frobenius_norm();
  if (deviation > 1e-10 * mat.frobenius_norm())
    throw StructureError("not an adjoint image: structure deviation " + std::to_string(deviation));
  return q;
}

inline std::ostream& operator<<(std::ostream& os, const QMatrix& a) {
  os << '[';
  for (std::size_t r = 0; r < a.rows(); ++r) {
    os << (r ? ",\n [" : "[");
    for (std::size_t c = 0; c < a.cols(); ++c) os << (c ? ", " : "") << a(r, c);
    os << ']';
  }
  return os << ']';
}

}  // namespace qsylv
