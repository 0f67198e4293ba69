#pragma once

// Kernel ridge regression reduction: BHCP through the entry sum of K^{-1},
// plus the almost-identity and binomial-inverse checks it rests on.

#include "ermlab/instances.hpp"
#include "ermlab/kernels.hpp"
#include "ermlab/linalg.hpp"
#include "ermlab/verdict.hpp"

namespace ermlab {

// Certified enclosure of K^{-1} rhs: Cholesky at working precision, one
// refinement step, and |x - x_hat| <= ||K x_hat - rhs||_inf / varah_margin(K).
// Throws SingularMatrixError when K is not diagonally dominant or the
// factorization meets a nonpositive pivot.
IntervalVector solve_spd(const IntervalMatrix& k, const IntervalVector& rhs);

// s(K^{-1}) = 1^T K^{-1} 1.
Interval inverse_entry_sum(const IntervalMatrix& k);

// Evaluates both sides of (X+Y)^{-1} = X^{-1} - X^{-1}(I + Y X^{-1})^{-1} Y X^{-1}
// with certified inverses and reports entrywise overlap.
bool binomial_inverse_check(const IntervalMatrix& x, const IntervalMatrix& y);

// Off-diagonal bound eps/(1 - eps n) for the inverse of an almost-identity
// matrix with off-diagonal magnitudes <= eps. Requires eps n <= 1/2.
Interval almost_identity_closure(const Interval& eps, std::size_t n);
// Off-diagonal bound 2 eps + eps^2 n for the product of two such matrices.
Interval almost_identity_product(const Interval& eps, std::size_t n);

struct KrrReductionDetail {
  ReductionVerdict verdict;
  Interval s_inv_a;
  Interval s_inv_b;
  Interval s_inv_ab;
  Interval s_hat;        // (s(K_A^-1) + s(K_B^-1) - s(K_AB^-1)) / 2
  Interval cross_sum;    // sum_ij k(a_i, b_j), computed directly
  Interval slack;
  Interval no_bound;     // 2 n^2 delta
  Interval yes_bound;    // Delta / 2
};

KrrReductionDetail krr_reduction(const VectorPairInstance& inst, const ReductionOptions& options);
ReductionVerdict krr_distinguisher(const VectorPairInstance& inst, const ReductionOptions& options);

}  // namespace ermlab
