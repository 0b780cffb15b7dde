#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xmbcr/error.hpp"
#include "xmbcr/gf256.hpp"
#include "xmbcr/params.hpp"

namespace xmbcr {

using gf256::Element;

/// Dense row-major matrix over GF(2^8).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}

  static Matrix identity(std::size_t order) {
    Matrix m(order, order);
    for (std::size_t i = 0; i < order; ++i) m(i, i) = Element(1);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  Element& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return entries_[r * cols_ + c];
  }
  Element operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return entries_[r * cols_ + c];
  }

  std::span<const Element> row(std::size_t r) const {
    return std::span<const Element>(entries_).subspan(r * cols_, cols_);
  }
  std::span<const Element> entries() const noexcept { return entries_; }

  Matrix select_columns(std::span<const std::size_t> columns) const {
    Matrix out(rows_, columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c] >= cols_) throw Error(Errc::DimensionMismatch, "column index out of range");
      for (std::size_t r = 0; r < rows_; ++r) out(r, c) = (*this)(r, columns[c]);
    }
    return out;
  }

  /// The leading `count` rows.
  Matrix top_rows(std::size_t count) const {
    if (count > rows_) throw Error(Errc::DimensionMismatch, "row count out of range");
    Matrix out(count, cols_);
    std::copy_n(entries_.begin(), count * cols_, out.entries_.begin());
    return out;
  }

  Matrix transposed() const {
    Matrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Element> entries_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(Errc::DimensionMismatch, "matrix product shape mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Element acc;
      for (std::size_t l = 0; l < a.cols(); ++l) acc = acc + a(i, l) * b(l, j);
      out(i, j) = acc;
    }
  return out;
}

/// [a | b]
inline Matrix hconcat(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw Error(Errc::DimensionMismatch, "hconcat row mismatch");
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c);
    for (std::size_t c = 0; c < b.cols(); ++c) out(r, a.cols() + c) = b(r, c);
  }
  return out;
}

/// entry(r, c) = points[c]^r.
inline Matrix vandermonde(std::size_t rows, std::span<const Element> points) {
  if (rows < 1) throw Error(Errc::DimensionMismatch, "vandermonde needs at least one row");
  std::array<bool, 256> seen{};
  for (Element p : points) {
    if (seen[p.value]) throw Error(Errc::DuplicatePoints, "point " + std::to_string(p.value) + " repeated");
    seen[p.value] = true;
  }
  Matrix m(rows, points.size());
  for (std::size_t c = 0; c < points.size(); ++c)
    for (std::size_t r = 0; r < rows; ++r) m(r, c) = gf256::pow(points[c], static_cast<unsigned>(r));
  return m;
}

/// entry(r, c) = 1 / (x[r] + y[c]). Every square submatrix is nonsingular.
inline Matrix cauchy(std::span<const Element> x_points, std::span<const Element> y_points) {
  std::array<bool, 256> seen{};
  auto claim = [&](Element p) {
    if (seen[p.value]) throw Error(Errc::PointCollision, "point " + std::to_string(p.value) + " used twice");
    seen[p.value] = true;
  };
  for (Element p : x_points) claim(p);
  for (Element p : y_points) claim(p);

  Matrix m(x_points.size(), y_points.size());
  for (std::size_t r = 0; r < x_points.size(); ++r)
    for (std::size_t c = 0; c < y_points.size(); ++c) m(r, c) = gf256::inv(x_points[r] + y_points[c]);
  return m;
}

namespace detail {

// Gauss-Jordan on `work`, mirroring every row operation onto `mirror` when given.
// Pivot: first nonzero entry at or below the diagonal.
inline bool eliminate(Matrix& work, Matrix* mirror) {
  const std::size_t n = work.rows();
  auto swap_rows = [](Matrix& m, std::size_t a, std::size_t b) {
    for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(a, c), m(b, c));
  };
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && work(pivot, col).is_zero()) ++pivot;
    if (pivot == n) return false;
    if (pivot != col) {
      swap_rows(work, pivot, col);
      if (mirror) swap_rows(*mirror, pivot, col);
    }
    const Element scale = gf256::inv(work(col, col));
    for (std::size_t c = 0; c < n; ++c) {
      work(col, c) = work(col, c) * scale;
      if (mirror) (*mirror)(col, c) = (*mirror)(col, c) * scale;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const Element factor = work(r, col);
      if (factor.is_zero()) continue;
      for (std::size_t c = 0; c < n; ++c) {
        work(r, c) = work(r, c) + factor * work(col, c);
        if (mirror) (*mirror)(r, c) = (*mirror)(r, c) + factor * (*mirror)(col, c);
      }
    }
  }
  return true;
}

}  // namespace detail

inline bool is_invertible(const Matrix& m) {
  if (!m.square()) return false;
  Matrix work = m;
  return detail::eliminate(work, nullptr);
}

inline Matrix invert(const Matrix& m) {
  if (!m.square()) throw Error(Errc::DimensionMismatch, "only square matrices can be inverted");
  Matrix work = m;
  Matrix inverse = Matrix::identity(m.rows());
  if (!detail::eliminate(work, &inverse)) {
    throw Error(Errc::Singular, std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + " matrix is singular");
  }
  assert(inverse * m == Matrix::identity(m.rows()));
  return inverse;
}

/// out[r] = sum_c m(r, c) * v[c], lane-wise.
inline std::vector<Block> mat_vec_blocks(const Matrix& m, std::span<const Block> v) {
  if (v.size() != m.cols()) {
    throw Error(Errc::DimensionMismatch, "matrix has " + std::to_string(m.cols()) + " columns but " +
                                             std::to_string(v.size()) + " blocks were supplied");
  }
  const std::size_t width = v.empty() ? 0 : v.front().size();
  for (const Block& b : v)
    if (b.size() != width) throw Error(Errc::LengthMismatch, "blocks of unequal length");

  std::vector<Block> out(m.rows(), Block(width, 0));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) gf256::axpy_inplace(out[r], m(r, c), v[c]);
  return out;
}

/// Checks that every order x order submatrix built from the leading `order`
/// rows and any `order` distinct columns is invertible. With order == rows
/// this is the MDS property of a generator matrix. Exponential in the column
/// count; intended for test-scale matrices (up to ~16 columns).
inline bool verify_mds(const Matrix& m, std::size_t order) {
  if (order == 0 || order > m.rows() || order > m.cols()) return false;
  const Matrix top = m.top_rows(order);
  std::vector<std::size_t> pick(order);
  for (std::size_t i = 0; i < order; ++i) pick[i] = i;
  while (true) {
    if (!is_invertible(top.select_columns(pick))) return false;
    // next combination in lexicographic order
    std::size_t i = order;
    while (i > 0 && pick[i - 1] == m.cols() - order + (i - 1)) --i;
    if (i == 0) return true;
    ++pick[i - 1];
    for (std::size_t j = i; j < order; ++j) pick[j] = pick[j - 1] + 1;
  }
}

/// Evaluation points of the two generator matrices.
struct MatrixPoints {
  std::vector<Element> psi;
  std::vector<Element> phi_x;
  std::vector<Element> phi_y;

  static MatrixPoints defaults(const CodeParams& p) {
    MatrixPoints pts;
    for (std::size_t i = 0; i < p.n; ++i) pts.psi.emplace_back(static_cast<std::uint8_t>(i));
    for (std::size_t i = 0; i < p.d; ++i) pts.phi_x.emplace_back(static_cast<std::uint8_t>(i));
    for (std::size_t i = 0; i < p.n - 1; ++i) pts.phi_y.emplace_back(static_cast<std::uint8_t>(p.d + i));
    return pts;
  }

  friend bool operator==(const MatrixPoints&, const MatrixPoints&) = default;
};

/// psi (k x n): generator of the (n, k) MDS code applied to the b-sequences;
/// column i yields device i's coded primary positions.
/// phi (d x (n-1)): generator of the (n-1, d) MDS code producing secondary
/// blocks; column m-1 yields secondary slot m. [I_d | phi] is also MDS.
struct CodeMatrices {
  Matrix psi;
  Matrix phi;
  MatrixPoints points;
};

inline CodeMatrices build_code_matrices(const CodeParams& p, std::optional<MatrixPoints> seed_points = std::nullopt) {
  if (p.n > gf256::kFieldSize || p.d + p.n - 1 > gf256::kFieldSize) {
    throw Error(Errc::FieldTooSmall, "parameters need " + std::to_string(p.d + p.n - 1) +
                                         " distinct field points, only 256 exist");
  }
  MatrixPoints pts = seed_points ? std::move(*seed_points) : MatrixPoints::defaults(p);
  if (pts.psi.size() != p.n || pts.phi_x.size() != p.d || pts.phi_y.size() != p.n - 1) {
    throw Error(Errc::DimensionMismatch, "point lists do not match the code parameters");
  }
  CodeMatrices m;
  m.psi = vandermonde(p.k, pts.psi);
  m.phi = cauchy(pts.phi_x, pts.phi_y);
  m.points = std::move(pts);
  return m;
}

}  // namespace xmbcr
