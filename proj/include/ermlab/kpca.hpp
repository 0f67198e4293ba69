#pragma once

// Kernel PCA reduction: BHCP through the trace of the centered kernel matrix.

#include "ermlab/instances.hpp"
#include "ermlab/kernels.hpp"
#include "ermlab/verdict.hpp"

namespace ermlab {

// n - s(K)/n for a unit-diagonal self-Gram.
Interval centered_trace(const IntervalMatrix& k);
// tr((I - 1_n) K (I - 1_n)) by explicit products; 1_n has all entries 1/n.
Interval centered_trace_direct(const IntervalMatrix& k);

struct KpcaReductionDetail {
  ReductionVerdict verdict;
  Interval s;          // (s(K_AB) - s(K_A) - s(K_B)) / 2
  Interval no_bound;   // n^2 delta
  Interval yes_bound;  // Delta / 2
};

KpcaReductionDetail kpca_reduction(const VectorPairInstance& inst, const ReductionOptions& options);
ReductionVerdict kpca_distinguisher(const VectorPairInstance& inst, const ReductionOptions& options);

}  // namespace ermlab
