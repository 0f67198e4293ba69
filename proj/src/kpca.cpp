#include "ermlab/kpca.hpp"

#include <algorithm>

namespace ermlab {

Interval centered_trace(const IntervalMatrix& k) {
  if (!k.square() || k.rows() == 0) throw std::invalid_argument("centered_trace needs a nonempty square matrix");
  const Precision bits = k(0, 0).precision();
  const Interval n(static_cast<long>(k.rows()), bits);
  return n - entry_sum(k) / n;
}

Interval centered_trace_direct(const IntervalMatrix& k) {
  if (!k.square() || k.rows() == 0) throw std::invalid_argument("centered_trace needs a nonempty square matrix");
  const std::size_t n = k.rows();
  const Precision bits = k(0, 0).precision();
  const Interval inv_n = Interval::rational(1, static_cast<long>(n), bits);
  IntervalMatrix p = identity_matrix(n, bits);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p(i, j) -= inv_n;
  const IntervalMatrix centered = p * k * p;
  Interval trace(bits);
  for (std::size_t i = 0; i < n; ++i) trace += centered(i, i);
  return trace;
}

KpcaReductionDetail kpca_reduction(const VectorPairInstance& inst, const ReductionOptions& options) {
  if (inst.kind != ProblemKind::BHCP || !inst.t) throw ParameterError("kernel reductions need a BHCP instance with t");
  if (inst.n() < 2 || inst.B.empty()) throw ParameterError("kernel reductions need n >= 2");
  std::vector<BitVector> all = inst.A;
  all.insert(all.end(), inst.B.begin(), inst.B.end());
  {
    std::vector<BitVector> sorted = all;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ParameterError("kernel reductions need the vectors of A and B to be distinct");
    }
  }
  const int t = *inst.t;
  const long n = static_cast<long>(inst.n());
  KpcaReductionDetail detail;
  auto compute = [&](Precision bits) {
    const KernelParams params = KernelParams::standard(inst.n(), options.c_multiplier, bits);
    const Interval half = Interval::rational(1, 2, bits);
    detail.s = half * (entry_sum(gram(all, params)) - entry_sum(gram(inst.A, params)) - entry_sum(gram(inst.B, params)));
    detail.no_bound = Interval(n * n, bits) * params.decay(static_cast<std::size_t>(t));
    detail.yes_bound = half * params.decay(static_cast<std::size_t>(t - 1));
    if (!detail.no_bound.certainly_less(detail.yes_bound)) {
      throw ParameterError("KPCA case separation needs n^2 delta < Delta / 2; raise the C multiplier");
    }
    return ThresholdComparison{detail.s, Interval(detail.no_bound.lo(), detail.yes_bound.hi())};
  };
  detail.verdict = certify(Reduction::Kpca, options, kernel_start_precision(inst.n(), t, options.c_multiplier), compute);
  return detail;
}

ReductionVerdict kpca_distinguisher(const VectorPairInstance& inst, const ReductionOptions& options) {
  return kpca_reduction(inst, options).verdict;
}

}  // namespace ermlab
