#include "ermlab/krr.hpp"

#include <algorithm>

#include "ermlab/oracles.hpp"

namespace ermlab {

IntervalVector solve_spd(const IntervalMatrix& k, const IntervalVector& rhs) {
  if (!k.square() || k.rows() != rhs.size()) throw std::invalid_argument("solve_spd: shape mismatch");
  const std::size_t n = k.rows();
  if (n == 0) return {};
  const Precision bits = k(0, 0).precision();
  const Scalar margin = varah_margin(k);
  if (margin.sign() <= 0) throw SingularMatrixError("solve_spd: matrix is not strictly diagonally dominant");
  const ScalarMatrix km = midpoints(k);
  const ScalarMatrix l = cholesky(km);
  ScalarVector b;
  b.reserve(n);
  for (const auto& r : rhs) b.push_back(r.midpoint());
  ScalarVector x = cholesky_solve(l, b);
  ScalarVector r = b;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r[i] -= km(i, j) * x[j];
  const ScalarVector dx = cholesky_solve(l, r);
  for (std::size_t i = 0; i < n; ++i) x[i] += dx[i];

  IntervalVector xi;
  xi.reserve(n);
  for (const auto& v : x) xi.push_back(Interval::point(v));
  const IntervalVector kx = k * xi;
  Scalar residual(bits);
  for (std::size_t i = 0; i < n; ++i) residual = max(residual, (rhs[i] - kx[i]).magnitude());
  const Scalar err = div_rounded(residual, margin, MPFR_RNDU);
  const Interval spread(-err, err);
  for (auto& v : xi) v += spread;
  return xi;
}

Interval inverse_entry_sum(const IntervalMatrix& k) {
  const Precision bits = k.rows() == 0 ? kMinPrecision : k(0, 0).precision();
  return sum(solve_spd(k, IntervalVector(k.rows(), Interval(1, bits))));
}

bool binomial_inverse_check(const IntervalMatrix& x, const IntervalMatrix& y) {
  if (!x.square() || x.rows() != y.rows() || !y.square()) throw std::invalid_argument("binomial_inverse_check: shapes");
  const std::size_t n = x.rows();
  const Precision bits = n == 0 ? kMinPrecision : x(0, 0).precision();
  const IntervalMatrix lhs = certified_inverse(x + y);
  const IntervalMatrix xi = certified_inverse(x);
  const IntervalMatrix inner = certified_inverse(identity_matrix(n, bits) + y * xi);
  const IntervalMatrix rhs = xi - xi * inner * y * xi;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!lhs(i, j).overlaps(rhs(i, j))) return false;
  return true;
}

Interval almost_identity_closure(const Interval& eps, std::size_t n) {
  const Precision bits = eps.precision();
  const Interval en = eps * Interval(static_cast<long>(n), bits);
  if (eps.lo().sign() < 0 || en.hi() > Interval::rational(1, 2, bits).lo()) {
    throw DomainError("almost-identity closure needs 0 <= eps and eps * n <= 1/2");
  }
  return eps / (Interval(1, bits) - en);
}

Interval almost_identity_product(const Interval& eps, std::size_t n) {
  const Precision bits = eps.precision();
  return Interval(2, bits) * eps + interval_square(eps) * Interval(static_cast<long>(n), bits);
}

namespace {

void require_kernel_instance(const VectorPairInstance& inst) {
  if (inst.kind != ProblemKind::BHCP || !inst.t) throw ParameterError("kernel reductions need a BHCP instance with t");
  if (inst.n() < 2 || inst.B.empty()) throw ParameterError("kernel reductions need n >= 2");
  std::vector<BitVector> all = inst.A;
  all.insert(all.end(), inst.B.begin(), inst.B.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw ParameterError("kernel reductions need the vectors of A and B to be distinct");
  }
}

}  // namespace

KrrReductionDetail krr_reduction(const VectorPairInstance& inst, const ReductionOptions& options) {
  require_kernel_instance(inst);
  const int t = *inst.t;
  const long n = static_cast<long>(inst.n());
  {
    // Case separation Delta >= 100 n^2 delta, i.e. exp(C) >= 100 n^2.
    const KernelParams p = KernelParams::standard(inst.n(), options.c_multiplier, kMinPrecision);
    if (interval_exp(p.C).lo() < Interval(100 * n * n, kMinPrecision).hi()) {
      throw ParameterError("KRR case separation needs exp(C) >= 100 n^2; raise the C multiplier");
    }
  }
  KrrReductionDetail detail;
  auto compute = [&](Precision bits) {
    const KernelParams params = KernelParams::standard(inst.n(), options.c_multiplier, bits);
    std::vector<BitVector> all = inst.A;
    all.insert(all.end(), inst.B.begin(), inst.B.end());
    const KernelMatrix ka = gram(inst.A, params);
    const KernelMatrix kb = gram(inst.B, params);
    const KernelMatrix kab = gram(all, params);
    detail.s_inv_a = inverse_entry_sum(ka.entries);
    detail.s_inv_b = inverse_entry_sum(kb.entries);
    detail.s_inv_ab = inverse_entry_sum(kab.entries);
    const Interval half = Interval::rational(1, 2, bits);
    detail.s_hat = half * (detail.s_inv_a + detail.s_inv_b - detail.s_inv_ab);
    detail.cross_sum = entry_sum(gram(inst.A, inst.B, params));

    const std::size_t big = all.size();
    const Interval eps2 = almost_identity_closure(params.decay(1), big);
    const Interval nn(static_cast<long>(big), bits);
    const Interval eta = Interval(2, bits) * nn * eps2 + nn * nn * interval_square(eps2);
    const Interval s_hi = Interval::point(max(detail.s_hat.hi(), Scalar(bits)));
    detail.slack = Interval(10, bits) * eta * s_hi / (Interval(1, bits) - eta);
    const Interval delta = params.decay(static_cast<std::size_t>(t));
    const Interval big_delta = params.decay(static_cast<std::size_t>(t - 1));
    detail.no_bound = Interval(2 * n * n, bits) * delta;
    detail.yes_bound = half * big_delta;
    // The slack widens the estimate rather than the band, so a large s_hat
    // (a close pair) cannot push the NO bound past the YES bound.
    const Interval widened(sub_rounded(detail.s_hat.lo(), detail.slack.hi(), MPFR_RNDD),
                           add_rounded(detail.s_hat.hi(), detail.slack.hi(), MPFR_RNDU));
    return ThresholdComparison{widened, Interval(detail.no_bound.lo(), detail.yes_bound.hi())};
  };
  detail.verdict = certify(Reduction::Krr, options, kernel_start_precision(inst.n(), t, options.c_multiplier), compute);
  return detail;
}

ReductionVerdict krr_distinguisher(const VectorPairInstance& inst, const ReductionOptions& options) {
  return krr_reduction(inst, options).verdict;
}

}  // namespace ermlab
