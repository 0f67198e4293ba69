#include "ermlab/linalg.hpp"

#include <cmath>
#include <utility>

namespace ermlab {

namespace {

void require_shape(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("matrix shape mismatch in ") + what);
}

Precision matrix_precision(const IntervalMatrix& m) {
  return m.rows() * m.cols() == 0 ? kMinPrecision : m(0, 0).precision();
}

}  // namespace

IntervalMatrix identity_matrix(std::size_t n, Precision bits) {
  IntervalMatrix out(n, n, Interval(bits));
  for (std::size_t i = 0; i < n; ++i) out(i, i) = Interval(1, bits);
  return out;
}

IntervalMatrix to_interval(const ScalarMatrix& m) {
  IntervalMatrix out(m.rows(), m.cols(), Interval(kMinPrecision));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = Interval::point(m(i, j));
  return out;
}

ScalarMatrix midpoints(const IntervalMatrix& m) {
  ScalarMatrix out(m.rows(), m.cols(), Scalar(matrix_precision(m)));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).midpoint();
  return out;
}

IntervalMatrix operator+(const IntervalMatrix& x, const IntervalMatrix& y) {
  require_shape(x.rows() == y.rows() && x.cols() == y.cols(), "addition");
  IntervalMatrix out = x;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) += y(i, j);
  return out;
}

IntervalMatrix operator-(const IntervalMatrix& x, const IntervalMatrix& y) {
  require_shape(x.rows() == y.rows() && x.cols() == y.cols(), "subtraction");
  IntervalMatrix out = x;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) -= y(i, j);
  return out;
}

IntervalMatrix operator*(const IntervalMatrix& x, const IntervalMatrix& y) {
  require_shape(x.cols() == y.rows(), "product");
  const Precision bits = std::max(matrix_precision(x), matrix_precision(y));
  IntervalMatrix out(x.rows(), y.cols(), Interval(bits));
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < y.cols(); ++j) {
      Interval acc(bits);
      for (std::size_t k = 0; k < x.cols(); ++k) acc += x(i, k) * y(k, j);
      out(i, j) = std::move(acc);
    }
  }
  return out;
}

IntervalVector operator*(const IntervalMatrix& x, const IntervalVector& v) {
  require_shape(x.cols() == v.size(), "matrix-vector product");
  IntervalVector out;
  out.reserve(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    Interval acc(matrix_precision(x));
    for (std::size_t k = 0; k < x.cols(); ++k) acc += x(i, k) * v[k];
    out.push_back(std::move(acc));
  }
  return out;
}

Interval sum(const IntervalVector& v) {
  Interval acc(v.empty() ? kMinPrecision : v.front().precision());
  for (const auto& x : v) acc += x;
  return acc;
}

Interval dot(const IntervalVector& x, const IntervalVector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: length mismatch");
  Interval acc(x.empty() ? kMinPrecision : x.front().precision());
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

Scalar varah_margin(const IntervalMatrix& a) {
  require_shape(a.square(), "varah_margin");
  std::optional<Scalar> best;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Scalar off(a(i, i).precision());
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j != i) off = add_rounded(off, a(i, j).magnitude(), MPFR_RNDU);
    }
    Scalar margin = sub_rounded(a(i, i).mignitude(), off, MPFR_RNDD);
    if (!best || margin < *best) best = std::move(margin);
  }
  return best ? *best : Scalar(1, kMinPrecision);
}

Scalar norm_inf(const IntervalMatrix& a) {
  Scalar best(matrix_precision(a));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Scalar row(matrix_precision(a));
    for (std::size_t j = 0; j < a.cols(); ++j) row = add_rounded(row, a(i, j).magnitude(), MPFR_RNDU);
    best = max(best, row);
  }
  return best;
}

ScalarMatrix approximate_inverse(const ScalarMatrix& a) {
  require_shape(a.square(), "approximate_inverse");
  const std::size_t n = a.rows();
  const Precision bits = n == 0 ? kMinPrecision : a(0, 0).precision();
  ScalarMatrix work = a;
  ScalarMatrix inv(n, n, Scalar(bits));
  for (std::size_t i = 0; i < n; ++i) inv(i, i) = Scalar(1, bits);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (abs(work(r, col)) > abs(work(pivot, col))) pivot = r;
    }
    if (work(pivot, col).is_zero()) throw SingularMatrixError("matrix is numerically singular");
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(work(pivot, j), work(col, j));
        std::swap(inv(pivot, j), inv(col, j));
      }
    }
    const Scalar p = work(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      work(col, j) = work(col, j) / p;
      inv(col, j) = inv(col, j) / p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || work(r, col).is_zero()) continue;
      const Scalar f = work(r, col);
      for (std::size_t j = 0; j < n; ++j) {
        work(r, j) -= f * work(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

IntervalMatrix certified_inverse(const IntervalMatrix& a) {
  require_shape(a.square(), "certified_inverse");
  const std::size_t n = a.rows();
  const Precision bits = matrix_precision(a);
  const IntervalMatrix r = to_interval(approximate_inverse(midpoints(a)));
  const IntervalMatrix e = identity_matrix(n, bits) - r * a;
  const Scalar e_norm = norm_inf(e);
  if (e_norm >= Scalar(1, bits)) throw SingularMatrixError("approximate inverse does not contract");
  const Scalar er_norm = norm_inf(e * r);
  const Scalar radius = div_rounded(er_norm, sub_rounded(Scalar(1, bits), e_norm, MPFR_RNDD), MPFR_RNDU);
  const Interval spread(-radius, radius);
  IntervalMatrix out = r;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) += spread;
  return out;
}

ScalarMatrix cholesky(const ScalarMatrix& a) {
  require_shape(a.square(), "cholesky");
  const std::size_t n = a.rows();
  const Precision bits = n == 0 ? kMinPrecision : a(0, 0).precision();
  ScalarMatrix l(n, n, Scalar(bits));
  for (std::size_t j = 0; j < n; ++j) {
    Scalar diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (diag.sign() <= 0) throw SingularMatrixError("matrix is not positive definite");
    l(j, j) = sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      Scalar s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

ScalarVector cholesky_solve(const ScalarMatrix& l, const ScalarVector& rhs) {
  const std::size_t n = l.rows();
  if (rhs.size() != n) throw std::invalid_argument("cholesky_solve: length mismatch");
  ScalarVector y(rhs);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= l(i, k) * y[k];
    y[i] = y[i] / l(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) y[i] -= l(k, i) * y[k];
    y[i] = y[i] / l(i, i);
  }
  return y;
}

}  // namespace ermlab
