#pragma once

// Dense matrices over Scalar or Interval, plus the certified solves used by
// the kernel-ridge and neural-network reductions.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ermlab/precision.hpp"

namespace ermlab {

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Matrix transposed() const {
    Matrix out;
    out.rows_ = cols_;
    out.cols_ = rows_;
    out.data_.reserve(data_.size());
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = 0; i < rows_; ++i) out.data_.push_back((*this)(i, j));
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using IntervalMatrix = Matrix<Interval>;
using ScalarMatrix = Matrix<Scalar>;
using IntervalVector = std::vector<Interval>;
using ScalarVector = std::vector<Scalar>;

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

IntervalMatrix identity_matrix(std::size_t n, Precision bits);
IntervalMatrix to_interval(const ScalarMatrix& m);
ScalarMatrix midpoints(const IntervalMatrix& m);

IntervalMatrix operator+(const IntervalMatrix& x, const IntervalMatrix& y);
IntervalMatrix operator-(const IntervalMatrix& x, const IntervalMatrix& y);
IntervalMatrix operator*(const IntervalMatrix& x, const IntervalMatrix& y);
IntervalVector operator*(const IntervalMatrix& x, const IntervalVector& v);

Interval sum(const IntervalVector& v);
Interval dot(const IntervalVector& x, const IntervalVector& y);

// Lower bound on min_i (|A_ii| - sum_{j != i} |A_ij|); nonpositive when A is
// not strictly diagonally dominant. For such A, ||A^{-1}||_inf <= 1/value.
Scalar varah_margin(const IntervalMatrix& a);
// Upper bound on the infinity norm.
Scalar norm_inf(const IntervalMatrix& a);

// Gauss-Jordan inverse of a midpoint matrix with partial pivoting, at the
// matrix's precision; no enclosure guarantee.
ScalarMatrix approximate_inverse(const ScalarMatrix& a);

// Certified enclosure of A^{-1} for every point matrix in A: with R an
// approximate inverse and E = I - RA, |A^{-1} - R| <= ||ER||/(1 - ||E||)
// entrywise. Throws SingularMatrixError when ||E||_inf >= 1.
IntervalMatrix certified_inverse(const IntervalMatrix& a);

// Cholesky factor of a symmetric midpoint matrix (lower triangular).
// Throws SingularMatrixError on a nonpositive pivot.
ScalarMatrix cholesky(const ScalarMatrix& a);
ScalarVector cholesky_solve(const ScalarMatrix& l, const ScalarVector& rhs);

}  // namespace ermlab
