#include "ermlab/svm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ermlab/oracles.hpp"

namespace ermlab {

void SvmInstance::validate() const {
  if (labels.size() != points.size() || signs.size() != points.size()) {
    throw std::invalid_argument("SVM instance: points, signs and labels differ in length");
  }
  for (int y : labels) {
    if (y != 1 && y != -1) throw std::invalid_argument("SVM instance: labels must be +1 or -1");
  }
  if (lambda.has_value() != box_bound.has_value()) {
    throw std::invalid_argument("SVM instance: lambda and box bound go together");
  }
}

std::size_t squared_distance(const SvmInstance& svm, std::size_t i, std::size_t j) {
  const BitVector& x = svm.points[i];
  const BitVector& y = svm.points[j];
  if (svm.signs[i] == svm.signs[j]) return hamming(x, y);
  // (x + y)^2 summed over 0/1 coordinates.
  return x.count() + y.count() + 2 * inner_product(x, y);
}

namespace {

class DecayCache {
 public:
  explicit DecayCache(const KernelParams& params) : params_(params) {}
  const Interval& operator()(std::size_t h) {
    auto it = cache_.find(h);
    if (it == cache_.end()) it = cache_.emplace(h, params_.decay(h)).first;
    return it->second;
  }

 private:
  const KernelParams& params_;
  std::map<std::size_t, Interval> cache_;
};

}  // namespace

IntervalMatrix dual_matrix(const SvmInstance& svm) {
  svm.validate();
  const std::size_t n = svm.size();
  DecayCache decay(svm.params);
  IntervalMatrix q(n, n, Interval(svm.params.precision()));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Interval k = decay(squared_distance(svm, i, j));
      if (svm.labels[i] != svm.labels[j]) k = -k;
      q(i, j) = k;
      q(j, i) = std::move(k);
    }
  }
  return q;
}

ThreeSvms build_three_svms(const VectorPairInstance& inst, const KernelParams& params) {
  if (inst.kind != ProblemKind::BHCP) throw std::invalid_argument("SVM reduction needs a BHCP instance");
  if (inst.A.empty() || inst.B.empty()) throw std::invalid_argument("SVM reduction needs nonempty A and B");
  auto make = [&](std::vector<BitVector> pts, std::vector<int> labels) {
    SvmInstance s;
    s.signs.assign(pts.size(), 1);
    s.points = std::move(pts);
    s.labels = std::move(labels);
    s.params = params;
    return s;
  };
  ThreeSvms out;
  out.a = make(inst.A, std::vector<int>(inst.A.size(), 1));
  out.b = make(inst.B, std::vector<int>(inst.B.size(), -1));
  std::vector<BitVector> all = inst.A;
  all.insert(all.end(), inst.B.begin(), inst.B.end());
  std::vector<int> labels(inst.A.size(), 1);
  labels.insert(labels.end(), inst.B.size(), -1);
  out.ab = make(std::move(all), std::move(labels));
  return out;
}

// ---------------------------------------------------------------------------
// Box-constrained concave QP

namespace {

// Upper bound on max over s in [-a, u - a] of g s - mu s^2 / 2.
Scalar coordinate_gain(const Scalar& g, const Scalar& a, const std::optional<Scalar>& u, const Scalar& mu) {
  const Interval G = Interval::point(g);
  const Interval A = Interval::point(a);
  const Interval M = Interval::point(mu);
  const Interval half = Interval::rational(1, 2, g.precision());
  if (G.hi() <= (-(M * A)).lo()) {
    return (-(G * A) - half * M * interval_square(A)).hi();
  }
  if (u) {
    const Interval S = Interval::point(*u) - A;
    if (G.lo() >= (M * S).hi()) return (G * S - half * M * interval_square(S)).hi();
  }
  return (interval_square(G) / (Interval(2, g.precision()) * M)).hi();
}

struct Certificate {
  Interval value;  // objective at the iterate
  Scalar gain;     // upper bound on optimum - value
};

Certificate certify_iterate(const IntervalMatrix& q, const ScalarVector& alpha, const std::optional<Scalar>& u,
                            const Scalar& mu) {
  const std::size_t n = alpha.size();
  const Precision bits = mu.precision();
  IntervalVector a;
  a.reserve(n);
  for (const auto& x : alpha) a.push_back(Interval::point(x));
  const IntervalVector qa = q * a;
  Interval value = sum(a) - Interval::rational(1, 2, bits) * dot(a, qa);
  Scalar gain(bits);
  const Interval one(1, bits);
  for (std::size_t i = 0; i < n; ++i) {
    const Interval g = one - qa[i];
    const Scalar lo_gain = coordinate_gain(g.lo(), alpha[i], u, mu);
    const Scalar hi_gain = coordinate_gain(g.hi(), alpha[i], u, mu);
    gain = add_rounded(gain, max(lo_gain, hi_gain), MPFR_RNDU);
  }
  return Certificate{std::move(value), std::move(gain)};
}

}  // namespace

SvmSolution solve_box_qp(const IntervalMatrix& q, const std::optional<Interval>& box, const Interval& tol,
                         const SvmSolveOptions& opts) {
  if (!q.square()) throw std::invalid_argument("QP matrix must be square");
  const std::size_t n = q.rows();
  const Precision bits = n == 0 ? tol.precision() : q(0, 0).precision();
  const Scalar mu = varah_margin(q);
  if (mu.sign() <= 0) {
    throw SolverError("dual matrix is not strictly diagonally dominant; no strong-concavity certificate", std::nullopt);
  }
  std::optional<Scalar> u;
  if (box) {
    if (box->lo().sign() <= 0) throw std::invalid_argument("box bound must be positive");
    u = box->lo().rounded(bits, MPFR_RNDD);
  }
  const ScalarMatrix qm = midpoints(q);
  ScalarVector alpha(n, Scalar(1, bits));
  if (u) {
    for (auto& a : alpha) a = min(a, *u);
  }
  const Scalar zero(bits);
  SvmSolution sol;
  std::optional<Interval> best;
  for (long sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    ScalarVector grad(n, Scalar(1, bits));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) grad[i] -= qm(i, j) * alpha[j];
    for (std::size_t i = 0; i < n; ++i) {
      Scalar next = alpha[i] + grad[i] / qm(i, i);
      next = max(next, zero);
      if (u) next = min(next, *u);
      const Scalar delta = next - alpha[i];
      if (delta.is_zero()) continue;
      alpha[i] = next;
      for (std::size_t k = 0; k < n; ++k) grad[k] -= qm(k, i) * delta;
    }
    Certificate cert = certify_iterate(q, alpha, u, mu);
    Interval dual(cert.value.lo(), add_rounded(cert.value.hi(), cert.gain, MPFR_RNDU));
    best = dual;
    if (dual.width() <= tol.lo()) {
      sol.alpha.reserve(n);
      for (const auto& a : alpha) sol.alpha.push_back(Interval::point(a));
      sol.dual_value = std::move(dual);
      sol.kkt_residual = Interval(Scalar(bits), cert.gain);
      sol.iterations = sweep;
      return sol;
    }
  }
  throw SolverError("dual coordinate ascent did not reach the requested tolerance", best);
}

// ---------------------------------------------------------------------------
// Bias construction

std::size_t bias_padding(std::size_t n) {
  if (n < 2) return 1;
  const double l = std::log2(static_cast<double>(n));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(l * l * l - 1e-9)));
}

SvmInstance build_bias_instance(const SvmInstance& svm, const KernelParams& params) {
  svm.validate();
  const std::size_t n = svm.size();
  const std::size_t pad = bias_padding(n);
  SvmInstance out;
  out.params = params;
  out.bias = true;
  out.padding = pad;
  for (int sign : {1, -1}) {
    for (std::size_t i = 0; i < n; ++i) {
      if (svm.signs[i] != 1) throw std::invalid_argument("bias construction needs an unsigned source instance");
      out.points.push_back(svm.points[i].padded(pad, pad));
      out.signs.push_back(sign);
      out.labels.push_back(sign * svm.labels[i]);
    }
  }
  return out;
}

namespace {

void require_mirrored(const SvmInstance& svm) {
  svm.validate();
  const std::size_t total = svm.size();
  bool ok = svm.bias && total % 2 == 0;
  const std::size_t n = total / 2;
  for (std::size_t i = 0; ok && i < n; ++i) {
    ok = svm.signs[i] == 1 && svm.signs[n + i] == -1 && svm.points[i] == svm.points[n + i] &&
         svm.labels[i] == -svm.labels[n + i];
  }
  if (!ok) throw std::invalid_argument("bias solve needs the mirrored +-x instance from build_bias_instance");
}

}  // namespace

IntervalMatrix bias_reduced_matrix(const SvmInstance& svm) {
  require_mirrored(svm);
  const std::size_t n = svm.size() / 2;
  DecayCache decay(svm.params);
  IntervalMatrix q(n, n, Interval(svm.params.precision()));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Interval k = decay(squared_distance(svm, i, j)) - decay(squared_distance(svm, i, n + j));
      if (svm.labels[i] != svm.labels[j]) k = -k;
      q(i, j) = k;
      q(j, i) = std::move(k);
    }
  }
  return q;
}

SvmSolution solve_bias_reduced(const SvmInstance& svm, const Interval& tol, const SvmSolveOptions& opts) {
  return solve_box_qp(bias_reduced_matrix(svm), svm.box_bound, tol, opts);
}

SvmSolution solve_dual(const SvmInstance& svm, const Interval& tol, const SvmSolveOptions& opts) {
  svm.validate();
  if (svm.bias) {
    // The full optimum is twice the symmetric one; halve the tolerance to match.
    SvmSolution reduced = solve_bias_reduced(svm, tol * Interval::rational(1, 2, tol.precision()), opts);
    SvmSolution full;
    full.alpha = reduced.alpha;
    full.alpha.insert(full.alpha.end(), reduced.alpha.begin(), reduced.alpha.end());
    const Interval two(2, tol.precision());
    full.dual_value = two * reduced.dual_value;
    full.kkt_residual = two * reduced.kkt_residual;
    full.iterations = reduced.iterations;
    return full;
  }
  const IntervalMatrix q = dual_matrix(svm);
  if (svm.lambda) return solve_box_qp(q, svm.box_bound, tol, opts);
  // Hard margin: w = sum alpha_i y_i phi(x_i) rescaled by its smallest margin
  // is primal feasible, so ||w||^2 / (2 m^2) bounds the optimum from above.
  const Precision bits = tol.precision();
  const Interval two_tol = Interval(2, bits) * tol;
  Interval target = tol;
  for (int round = 0; round < 16; ++round) {
    SvmSolution sol = solve_box_qp(q, svm.box_bound, target, opts);
    const IntervalVector qa = q * sol.alpha;
    Interval margin = qa.empty() ? Interval(1, bits) : qa[0];
    for (const auto& m : qa) margin = Interval(min(margin.lo(), m.lo()), min(margin.hi(), m.hi()));
    Interval next = target * Interval::rational(1, 16, bits);
    if (margin.certainly_positive()) {
      sol.primal_value = Interval::rational(1, 2, bits) * dot(sol.alpha, qa) / interval_square(margin);
      const Interval gap = interval_abs(*sol.primal_value - sol.dual_value);
      if (gap.hi() <= two_tol.lo()) return sol;
      // The gap shrinks like the square root of the certified gain.
      const Interval gain(sol.kkt_residual.hi(), sol.kkt_residual.hi());
      const Interval scaled = gain * interval_square(tol / Interval(gap.hi(), gap.hi())) / Interval(4, bits);
      if (scaled.hi().sign() > 0 && scaled.hi() < next.lo()) next = scaled;
    }
    target = next;
  }
  throw SolverError("primal and dual values did not meet within twice the tolerance", std::nullopt);
}

// ---------------------------------------------------------------------------
// Distinguishers

namespace {

void require_distinct_points(const VectorPairInstance& inst) {
  if (inst.kind != ProblemKind::BHCP || !inst.t) throw ParameterError("kernel reductions need a BHCP instance with t");
  if (inst.A.empty() || inst.B.empty()) throw ParameterError("kernel reductions need nonempty A and B");
  if (inst.n() < 2) throw ParameterError("kernel reductions need n >= 2");
  std::set<BitVector> seen;
  for (const auto* set : {&inst.A, &inst.B}) {
    for (const auto& v : *set) {
      if (!seen.insert(v).second) throw ParameterError("kernel reductions need the vectors of A and B to be distinct");
    }
  }
}

Interval soft_lambda(const VectorPairInstance& inst, const ReductionOptions& options, Precision bits) {
  if (options.K_box <= 0) throw ParameterError("K_box must be positive");
  const long n = static_cast<long>(inst.n());
  const Interval limit = Interval::rational(1, static_cast<long>(options.K_box) * n * n, bits);
  if (!options.lambda) return limit;
  const Interval lambda = Interval::parse(*options.lambda, bits);
  if (!lambda.certainly_positive()) throw ParameterError("lambda must be positive");
  if (lambda.lo() > limit.hi()) {
    throw ParameterError("lambda=" + *options.lambda + " exceeds the bound 1/(K_box n^2) = 1/" +
                         std::to_string(static_cast<long>(options.K_box) * n * n));
  }
  return lambda;
}

}  // namespace

SvmReductionDetail svm_reduction(const VectorPairInstance& inst, SvmVariant variant, const ReductionOptions& options) {
  require_distinct_points(inst);
  const int t = *inst.t;
  const Reduction tag = variant == SvmVariant::NoBias ? Reduction::Svm
                        : variant == SvmVariant::Bias ? Reduction::SvmBias
                                                      : Reduction::SvmSoft;
  if (variant == SvmVariant::Soft) soft_lambda(inst, options, kMinPrecision);
  SvmReductionDetail detail;
  auto compute = [&](Precision bits) {
    const KernelParams params = KernelParams::standard(inst.n(), options.c_multiplier, bits);
    const ThreeSvms three = build_three_svms(inst, params);
    const Interval big_delta = params.decay(static_cast<std::size_t>(t - 1));
    detail.C = params.C;
    detail.tol = big_delta / Interval(100, bits);
    detail.theta = big_delta / Interval(8, bits);
    const Interval solve_tol = detail.tol / Interval(4, bits);
    if (variant == SvmVariant::NoBias) {
      detail.val_a = solve_dual(three.a, solve_tol);
      detail.val_b = solve_dual(three.b, solve_tol);
      detail.val_ab = solve_dual(three.ab, solve_tol);
    } else {
      auto mirrored = [&](const SvmInstance& s) {
        SvmInstance b = build_bias_instance(s, params);
        if (variant == SvmVariant::Soft) {
          b.lambda = soft_lambda(inst, options, bits);
          b.box_bound = Interval(1, bits) / (*b.lambda * Interval(static_cast<long>(b.size()), bits));
        }
        return b;
      };
      detail.val_a = solve_bias_reduced(mirrored(three.a), solve_tol);
      detail.val_b = solve_bias_reduced(mirrored(three.b), solve_tol);
      detail.val_ab = solve_bias_reduced(mirrored(three.ab), solve_tol);
    }
    detail.gap = detail.val_ab.dual_value - detail.val_a.dual_value - detail.val_b.dual_value;
    return ThresholdComparison{detail.gap, detail.theta};
  };
  detail.verdict = certify(tag, options, kernel_start_precision(inst.n(), t, options.c_multiplier), compute);
  return detail;
}

ReductionVerdict svm_distinguisher(const VectorPairInstance& inst, const ReductionOptions& options) {
  return svm_reduction(inst, SvmVariant::NoBias, options).verdict;
}

ReductionVerdict bias_svm_distinguisher(const VectorPairInstance& inst, const ReductionOptions& options) {
  return svm_reduction(inst, SvmVariant::Bias, options).verdict;
}

ReductionVerdict soft_margin_distinguisher(const VectorPairInstance& inst, const ReductionOptions& options) {
  return svm_reduction(inst, SvmVariant::Soft, options).verdict;
}

}  // namespace ermlab
