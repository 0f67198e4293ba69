#include "ermlab/simplex.hpp"

#include <limits>
#include <optional>

namespace ermlab {

namespace {

enum class Bound { Lower, Upper, Basic };

}  // namespace

LpResult maximize_bounded(const BoundedLp& lp, long max_pivots) {
  const std::size_t m = lp.e.rows();
  const std::size_t cols = lp.e.cols();
  if (lp.b.size() != m || lp.c.size() != cols || lp.upper.size() != cols || lp.basis.size() != m) {
    throw std::invalid_argument("maximize_bounded: inconsistent problem dimensions");
  }
  const Precision bits = lp.c.empty() ? kMinPrecision : lp.c.front().precision();
  // Tolerances sit well above the working precision's rounding noise.
  Scalar tiny(1, bits);
  mpfr_div_2si(tiny.raw(), tiny.raw(), static_cast<long>(bits / 2), MPFR_RNDN);

  std::vector<Bound> state(cols, Bound::Lower);
  ScalarMatrix basis_matrix(m, m, Scalar(bits));
  for (std::size_t i = 0; i < m; ++i) {
    state[lp.basis[i]] = Bound::Basic;
    for (std::size_t r = 0; r < m; ++r) basis_matrix(r, i) = lp.e(r, lp.basis[i]);
  }
  const ScalarMatrix binv = approximate_inverse(basis_matrix);
  // Tableau T = B^{-1} E and basic values x_B = B^{-1} b.
  ScalarMatrix tab(m, cols, Scalar(bits));
  ScalarVector xb(m, Scalar(bits));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      if (binv(i, k).is_zero()) continue;
      for (std::size_t j = 0; j < cols; ++j) tab(i, j) += binv(i, k) * lp.e(k, j);
      xb[i] += binv(i, k) * lp.b[k];
    }
  }
  std::vector<std::size_t> basis = lp.basis;
  const Scalar zero(bits);
  for (std::size_t i = 0; i < m; ++i) {
    if (xb[i] < -tiny || xb[i] > lp.upper[basis[i]] + tiny) {
      throw std::invalid_argument("maximize_bounded: starting basis is infeasible");
    }
  }

  LpResult result;
  for (;;) {
    // Reduced costs d_j = c_j - c_B^T T_j.
    std::optional<std::size_t> entering;
    int direction = 0;
    for (std::size_t j = 0; j < cols && !entering; ++j) {
      if (state[j] == Bound::Basic) continue;
      Scalar d = lp.c[j];
      for (std::size_t i = 0; i < m; ++i) d -= lp.c[basis[i]] * tab(i, j);
      if (state[j] == Bound::Lower && d > tiny && lp.upper[j].sign() > 0) {
        entering = j;
        direction = 1;
      } else if (state[j] == Bound::Upper && d < -tiny) {
        entering = j;
        direction = -1;
      }
    }
    if (!entering) {
      result.optimal = true;
      break;
    }
    if (result.pivots >= max_pivots) break;
    const std::size_t j = *entering;
    // Basic x_B moves by -direction * theta * T_j.
    std::optional<Scalar> step = lp.upper[j];
    std::optional<std::size_t> leaving;
    Scalar column_scale(bits);
    for (std::size_t i = 0; i < m; ++i) column_scale = max(column_scale, abs(tab(i, j)));
    const Scalar pivot_tol = column_scale * tiny;
    for (std::size_t i = 0; i < m; ++i) {
      const Scalar rate = direction > 0 ? tab(i, j) : -tab(i, j);
      if (abs(rate) <= pivot_tol) continue;
      Scalar limit = rate.sign() > 0 ? xb[i] / rate : (lp.upper[basis[i]] - xb[i]) / (-rate);
      limit = max(limit, zero);
      const bool better = !step || limit < *step ||
                          (limit == *step && leaving && basis[i] < basis[*leaving]) ||
                          (limit == *step && !leaving);
      if (better) {
        step = limit;
        leaving = i;
      }
    }
    const Scalar theta = *step;
    for (std::size_t i = 0; i < m; ++i) {
      const Scalar delta = theta * tab(i, j);
      if (direction > 0) {
        xb[i] -= delta;
      } else {
        xb[i] += delta;
      }
    }
    if (!leaving) {
      state[j] = direction > 0 ? Bound::Upper : Bound::Lower;
      ++result.pivots;
      continue;
    }
    const std::size_t r = *leaving;
    const std::size_t out = basis[r];
    // The leaving variable lands on the bound it hit.
    const Scalar rate = direction > 0 ? tab(r, j) : -tab(r, j);
    state[out] = rate.sign() > 0 ? Bound::Lower : Bound::Upper;
    Scalar entering_value = direction > 0 ? theta : lp.upper[j] - theta;
    const Scalar p = tab(r, j);
    for (std::size_t k = 0; k < cols; ++k) tab(r, k) = tab(r, k) / p;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || tab(i, j).is_zero()) continue;
      const Scalar f = tab(i, j);
      for (std::size_t k = 0; k < cols; ++k) tab(i, k) -= f * tab(r, k);
    }
    basis[r] = j;
    state[j] = Bound::Basic;
    xb[r] = std::move(entering_value);
    ++result.pivots;
  }

  result.x.assign(cols, Scalar(bits));
  for (std::size_t j = 0; j < cols; ++j) {
    if (state[j] == Bound::Upper) result.x[j] = lp.upper[j];
  }
  for (std::size_t i = 0; i < m; ++i) result.x[basis[i]] = xb[i];
  result.value = Scalar(bits);
  for (std::size_t j = 0; j < cols; ++j) result.value += lp.c[j] * result.x[j];
  // Multipliers from B^T y = c_B at the final basis.
  ScalarMatrix final_basis(m, m, Scalar(bits));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t r = 0; r < m; ++r) final_basis(r, i) = lp.e(r, basis[i]);
  const ScalarMatrix final_inv = approximate_inverse(final_basis);
  result.multipliers.assign(m, Scalar(bits));
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < m; ++i) result.multipliers[k] += lp.c[basis[i]] * final_inv(i, k);
  return result;
}

}  // namespace ermlab
