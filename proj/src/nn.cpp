#include "ermlab/nn.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ermlab/oracles.hpp"
#include "ermlab/simplex.hpp"

namespace ermlab {

const char* to_string(LossKind kind) { return kind == LossKind::Hinge ? "hinge" : "logistic"; }
const char* to_string(ActivationKind kind) { return kind == ActivationKind::Relu ? "relu" : "sigmoid"; }

LossKind parse_loss(std::string_view text) {
  if (text == "hinge") return LossKind::Hinge;
  if (text == "logistic") return LossKind::Logistic;
  throw ParameterError("unknown loss '" + std::string(text) + "'");
}

ActivationKind parse_activation(std::string_view text) {
  if (text == "relu") return ActivationKind::Relu;
  if (text == "sigmoid") return ActivationKind::Sigmoid;
  throw ParameterError("unknown activation '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Losses

namespace {

// log2(1 + exp(-x)) at a point, enclosed.
Interval logistic_point(const Scalar& x) {
  const Precision bits = x.precision();
  const Interval one(1, bits);
  const Interval X = Interval::point(x);
  if (x.sign() >= 0) return interval_ln(one + interval_exp(-X)) / ln2(bits);
  // l(x) = -x / ln 2 + l(-x) keeps exp from overflowing.
  return (-X + interval_ln(one + interval_exp(X))) / ln2(bits);
}

// x ln x at a point in [0, 1], with 0 ln 0 = 0.
Interval xlogx(const Interval& x) {
  if (x.hi().sign() <= 0) return Interval(x.precision());
  return x * interval_ln(x);
}

// Binary entropy in bits at a point p in [0, 1].
Interval entropy_point(const Scalar& p) {
  const Precision bits = p.precision();
  const Interval P = Interval::point(p);
  const Interval Q = Interval(1, bits) - P;
  if (P.hi().sign() <= 0 || Q.hi().sign() <= 0) return Interval(bits);
  const Interval Qc(max(Q.lo(), Scalar(bits)), Q.hi());
  return -(xlogx(P) + xlogx(Qc)) / ln2(bits);
}

}  // namespace

Interval NiceLoss::value(const Interval& z) const {
  const Precision bits = z.precision();
  if (kind == LossKind::Hinge) return interval_relu(Interval(1, bits) - z);
  // Decreasing in z.
  return Interval(logistic_point(z.hi()).lo(), logistic_point(z.lo()).hi());
}

Interval NiceLoss::derivative(const Interval& z) const {
  const Precision bits = z.precision();
  if (kind == LossKind::Hinge) {
    if (z.hi() < Scalar(1, bits)) return Interval(-1, bits);
    if (z.lo() > Scalar(1, bits)) return Interval(bits);
    return Interval(Scalar(-1, bits), Scalar(bits));
  }
  return -sigmoid(-z) / ln2(bits);
}

Interval NiceLoss::at_zero(Precision bits) const { return Interval(1, bits); }

Interval NiceLoss::derivative_at_zero(Precision bits) const {
  if (kind == LossKind::Hinge) return Interval(-1, bits);
  return -(Interval::rational(1, 2, bits) / ln2(bits));
}

Interval NiceLoss::conjugate_floor(Precision bits) const {
  if (kind == LossKind::Hinge) return Interval(-1, bits);
  return -(Interval(1, bits) / ln2(bits));
}

Interval NiceLoss::neg_conjugate(const Scalar& u) const {
  const Precision bits = u.precision();
  if (u.sign() > 0) throw DomainError("conjugate argument must be nonpositive");
  if (kind == LossKind::Hinge) {
    if (u < Scalar(-1, bits)) throw DomainError("hinge conjugate needs u >= -1");
    return -Interval::point(u);
  }
  if (u.is_zero()) return Interval(bits);
  // p = -u ln 2 enclosed; entropy is concave with its peak at 1/2.
  const Interval p = -(Interval::point(u) * ln2(bits));
  if (p.hi() > Scalar(1, bits) && p.lo() > Scalar(1, bits)) throw DomainError("logistic conjugate needs u >= -1/ln 2");
  const Scalar one(1, bits);
  const Scalar plo = max(p.lo(), Scalar(bits));
  const Scalar phi = min(p.hi(), one);
  const Interval hlo = entropy_point(plo);
  const Interval hhi = entropy_point(phi);
  const Scalar half = Interval::rational(1, 2, bits).lo();
  const Scalar lower = min(hlo.lo(), hhi.lo());
  Scalar upper = max(hlo.hi(), hhi.hi());
  if (plo <= half && half <= phi) upper = one;
  return Interval(lower, upper);
}

Interval NiceLoss::pair_growth(Precision bits) const {
  if (kind == LossKind::Hinge) return Interval(1, bits);
  return Interval(1, bits) / ln2(bits);
}

NiceLoss make_loss(LossKind kind, long K_loss) {
  if (K_loss <= 0) throw ParameterError("K_loss must be positive");
  NiceLoss l;
  l.kind = kind;
  l.K_loss = K_loss;
  return l;
}

// ---------------------------------------------------------------------------
// Activations

Interval sigmoid(const Interval& x) {
  const Precision bits = x.precision();
  const Interval one(1, bits);
  auto at = [&](const Scalar& v) { return one / (one + interval_exp(-Interval::point(v))); };
  return Interval(at(x.lo()).lo(), at(x.hi()).hi());
}

Interval NiceActivation::apply(const Interval& x) const {
  return kind == ActivationKind::Relu ? interval_relu(x) : sigmoid(x);
}

NiceActivation activation_thresholds(ActivationKind kind, long T, std::size_t n, Precision bits) {
  if (T <= 0) throw ParameterError("activation exponent T must be positive");
  if (n < 2) throw ParameterError("activation thresholds need n >= 2");
  NiceActivation a;
  a.kind = kind;
  a.T = T;
  const Interval one(1, bits);
  const Interval nT = interval_pow(Interval(static_cast<long>(n), bits), static_cast<unsigned long>(T));
  if (kind == ActivationKind::Relu) {
    a.v0 = one;
    a.v1 = one / nT;
    a.v2 = -one + Interval(2, bits) * a.v1;
    a.offset = a.v0 - a.v1;
    return a;
  }
  const Interval ln_n = interval_ln(Interval(static_cast<long>(n), bits));
  const Interval raw = Interval(T, bits) * ln_n + interval_square(ln_n);
  const long c = static_cast<long>(std::ceil(raw.hi().to_double()));
  a.offset = Interval(c, bits);
  a.v1 = -interval_ln(nT - one);
  a.v0 = a.v1 + a.offset;
  a.v2 = a.v1 - a.offset;
  return a;
}

// ---------------------------------------------------------------------------
// Layer matrix

IntervalMatrix ErmMatrixInstance::signed_matrix() const {
  IntervalMatrix a = M;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (labels[i] > 0) continue;
    for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) = -a(i, j);
  }
  return a;
}

ErmMatrixInstance build_layer_matrix(const VectorPairInstance& inst, const NiceLoss& loss,
                                     const NiceActivation& activation) {
  if (inst.kind != ProblemKind::OVP) throw ParameterError("network reduction needs an OVP instance");
  if (!inst.normalized) throw ParameterError("network reduction needs a normalized instance");
  inst.validate();
  if (inst.n() != inst.m() || inst.n() < 2) throw ParameterError("network reduction needs |A| = |B| >= 2");
  const std::size_t n = inst.n();
  const std::size_t d = inst.d;
  const Precision bits = activation.v0.precision();
  ErmMatrixInstance erm;
  erm.n = n;
  erm.loss = loss;
  erm.activation = activation;
  erm.M = IntervalMatrix(3 * n, n, Interval(bits));

  std::map<std::size_t, Interval> s1;
  std::map<std::size_t, Interval> s2;
  const Interval step1 = activation.v2 - activation.v0;
  const Interval step2 = activation.v2 - activation.v1;
  auto m1 = [&](std::size_t k) -> const Interval& {
    auto it = s1.find(k);
    if (it == s1.end()) {
      it = s1.emplace(k, activation.apply(activation.v0 + step1 * Interval(static_cast<long>(k), bits))).first;
    }
    return it->second;
  };
  auto m2 = [&](std::size_t k) -> const Interval& {
    auto it = s2.find(k);
    if (it == s2.end()) {
      it = s2.emplace(k, activation.apply(activation.v1 + step2 * Interval(static_cast<long>(k), bits))).first;
    }
    return it->second;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      erm.M(i, j) = m1(inner_product(inst.A[i], inst.B[j]));
      // complement(b_i) . b_j
      const Interval& v = m2(complement_product(inst.B[j], inst.B[i]));
      erm.M(n + i, j) = v;
      erm.M(2 * n + i, j) = v;
    }
  }
  erm.labels.assign(3 * n, 1);
  for (std::size_t i = 2 * n; i < 3 * n; ++i) erm.labels[i] = -1;

  auto example = [&](const BitVector& v, const Interval& scale, const Interval& last) {
    IntervalVector e;
    e.reserve(d + 1);
    for (std::size_t k = 0; k < d; ++k) e.push_back(v.get(k) ? scale : Interval(bits));
    e.push_back(last);
    return e;
  };
  for (std::size_t i = 0; i < n; ++i) erm.examples.push_back(example(inst.A[i], step1, activation.v0));
  for (int copy = 0; copy < 2; ++copy) {
    for (std::size_t i = 0; i < n; ++i) erm.examples.push_back(example(inst.B[i].complement(), step2, activation.v1));
  }
  for (std::size_t j = 0; j < n; ++j) erm.weights.push_back(example(inst.B[j], Interval(1, bits), Interval(1, bits)));
  return erm;
}

Interval erm_objective(const ErmMatrixInstance& erm, const IntervalVector& alpha) {
  const IntervalVector z = erm.M * alpha;
  Interval total(erm.M(0, 0).precision());
  for (std::size_t i = 0; i < z.size(); ++i) total += erm.loss.value(erm.labels[i] > 0 ? z[i] : -z[i]);
  return total;
}

Interval erm_objective(const ErmMatrixInstance& erm, const ScalarVector& alpha) {
  IntervalVector a;
  a.reserve(alpha.size());
  for (const auto& x : alpha) a.push_back(Interval::point(x));
  return erm_objective(erm, a);
}

ScalarVector certificate_point(const ErmMatrixInstance& erm) {
  const Precision bits = erm.M(0, 0).precision();
  Scalar value(bits);
  mpfr_ui_pow_ui(value.raw(), erm.n, static_cast<unsigned long>(100 * erm.loss.K_loss), MPFR_RNDN);
  return ScalarVector(erm.n, value);
}

// ---------------------------------------------------------------------------
// Solvers

namespace {

Scalar logistic_scalar(const Scalar& z) {
  // log2(1 + exp(-z)), round to nearest.
  const Precision bits = z.precision();
  Scalar out(bits);
  Scalar t(bits);
  if (z.sign() >= 0) {
    mpfr_neg(t.raw(), z.raw(), MPFR_RNDN);
    mpfr_exp(t.raw(), t.raw(), MPFR_RNDN);
    mpfr_log1p(out.raw(), t.raw(), MPFR_RNDN);
  } else {
    mpfr_exp(t.raw(), z.raw(), MPFR_RNDN);
    mpfr_log1p(out.raw(), t.raw(), MPFR_RNDN);
    mpfr_sub(out.raw(), out.raw(), z.raw(), MPFR_RNDN);
  }
  Scalar l2(bits);
  mpfr_const_log2(l2.raw(), MPFR_RNDN);
  return out / l2;
}

Scalar sigmoid_scalar(const Scalar& x) {
  const Precision bits = x.precision();
  Scalar t(bits);
  mpfr_neg(t.raw(), x.raw(), MPFR_RNDN);
  mpfr_exp(t.raw(), t.raw(), MPFR_RNDN);
  return Scalar(1, bits) / (Scalar(1, bits) + t);
}

struct Dense {
  ScalarMatrix a;  // signed matrix, midpoints
  Precision bits;
};

ScalarVector times(const ScalarMatrix& a, const ScalarVector& x) {
  ScalarVector out(a.rows(), Scalar(x.empty() ? kMinPrecision : x.front().precision()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j).is_zero() || x[j].is_zero()) continue;
      out[i] += a(i, j) * x[j];
    }
  return out;
}

Scalar logistic_total(const ScalarMatrix& a, const ScalarVector& alpha) {
  Scalar total(alpha.front().precision());
  for (const auto& z : times(a, alpha)) total += logistic_scalar(z);
  return total;
}

// Levenberg-Marquardt damped Newton with Armijo backtracking and step
// expansion (exponential tails otherwise cost one unit of progress per step).
ScalarVector logistic_newton(const ScalarMatrix& a, const Scalar& tol, long max_iterations, long& iterations,
                             bool& converged) {
  const std::size_t n = a.cols();
  const Precision bits = tol.precision();
  Scalar l2(bits);
  mpfr_const_log2(l2.raw(), MPFR_RNDN);
  ScalarVector alpha(n, Scalar(bits));
  Scalar damping = Scalar::from_double(1e-8, bits);
  Scalar f = logistic_total(a, alpha);
  converged = false;
  for (iterations = 0; iterations < max_iterations; ++iterations) {
    const ScalarVector z = times(a, alpha);
    ScalarVector g(n, Scalar(bits));
    ScalarMatrix h(n, n, Scalar(bits));
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const Scalar s = sigmoid_scalar(-z[i]);
      const Scalar d1 = -(s / l2);
      const Scalar d2 = s * (Scalar(1, bits) - s) / l2;
      for (std::size_t j = 0; j < n; ++j) {
        if (a(i, j).is_zero()) continue;
        g[j] += d1 * a(i, j);
        const Scalar w = d2 * a(i, j);
        for (std::size_t k = j; k < n; ++k) {
          if (!a(i, k).is_zero()) h(j, k) += w * a(i, k);
        }
      }
    }
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < j; ++k) h(j, k) = h(k, j);

    ScalarVector step;
    for (int attempt = 0; attempt < 60; ++attempt) {
      ScalarMatrix damped = h;
      for (std::size_t j = 0; j < n; ++j) damped(j, j) += damping * h(j, j);
      try {
        const ScalarMatrix l = cholesky(damped);
        ScalarVector rhs(n, Scalar(bits));
        for (std::size_t j = 0; j < n; ++j) rhs[j] = -g[j];
        step = cholesky_solve(l, rhs);
        break;
      } catch (const SingularMatrixError&) {
        damping = damping * Scalar(10, bits);
      }
    }
    if (step.empty()) return alpha;
    Scalar slope(bits);
    for (std::size_t j = 0; j < n; ++j) slope += g[j] * step[j];
    // Newton decrement: estimated suboptimality is -slope / 2.
    if (!(slope.sign() < 0) || -slope <= tol * Scalar(2, bits)) {
      converged = true;
      return alpha;
    }
    auto trial = [&](const Scalar& t) {
      ScalarVector next = alpha;
      for (std::size_t j = 0; j < n; ++j) next[j] += t * step[j];
      return next;
    };
    const Scalar armijo = Scalar::from_double(1e-4, bits);
    Scalar t(1, bits);
    std::optional<ScalarVector> accepted;
    Scalar f_new(bits);
    for (int k = 0; k < 60; ++k) {
      ScalarVector next = trial(t);
      Scalar fn = logistic_total(a, next);
      if (fn <= f + armijo * t * slope) {
        accepted = std::move(next);
        f_new = fn;
        break;
      }
      mpfr_div_2ui(t.raw(), t.raw(), 1, MPFR_RNDN);
    }
    if (!accepted) {
      damping = damping * Scalar(10, bits);
      continue;
    }
    if (t == Scalar(1, bits)) {
      for (int k = 0; k < 60; ++k) {
        Scalar bigger = t * Scalar(2, bits);
        ScalarVector next = trial(bigger);
        Scalar fn = logistic_total(a, next);
        if (!(fn < f_new)) break;
        t = bigger;
        accepted = std::move(next);
        f_new = fn;
      }
    }
    alpha = std::move(*accepted);
    f = f_new;
    damping = max(damping / Scalar(10, bits), Scalar::from_double(1e-30, bits));
  }
  return alpha;
}

// Rows [first, first + count) of m.
IntervalMatrix block(const IntervalMatrix& m, std::size_t first, std::size_t count) {
  IntervalMatrix out(count, m.cols(), Interval(m(0, 0).precision()));
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(first + i, j);
  return out;
}

ScalarVector hinge_subgradient(const ScalarMatrix& a_full, long iterations) {
  // A short averaged subgradient run at modest precision; a warm start only.
  const Precision bits = 128;
  ScalarMatrix a(a_full.rows(), a_full.cols(), Scalar(bits));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) = a_full(i, j).rounded(bits);
  const std::size_t n = a.cols();
  ScalarVector alpha(n, Scalar(bits));
  ScalarVector avg(n, Scalar(bits));
  const Scalar one(1, bits);
  for (long k = 1; k <= iterations; ++k) {
    const ScalarVector z = times(a, alpha);
    ScalarVector g(n, Scalar(bits));
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (!(z[i] < one)) continue;
      for (std::size_t j = 0; j < n; ++j) g[j] -= a(i, j);
    }
    const Scalar eta = one / sqrt(Scalar(k, bits));
    for (std::size_t j = 0; j < n; ++j) {
      alpha[j] -= eta * g[j];
      avg[j] += (alpha[j] - avg[j]) / Scalar(k, bits);
    }
  }
  return avg;
}

}  // namespace

Interval erm_lower_bound(const ErmMatrixInstance& erm, const ScalarVector& dual_hint) {
  const std::size_t n = erm.n;
  const Precision bits = erm.M(0, 0).precision();
  const Interval l0 = erm.loss.at_zero(bits);
  const Interval ceiling = Interval(3 * static_cast<long>(n), bits) * l0;
  if (erm.M.rows() != 3 * n) return Interval(bits);  // only l >= 0 is known
  const IntervalMatrix m2 = block(erm.M, n, n);
  const Scalar margin = varah_margin(m2);
  if (margin.sign() <= 0) return Interval(bits);  // only l >= 0 is left
  const Interval radius = ceiling / (erm.loss.pair_growth(bits) * Interval::point(margin));

  const IntervalMatrix a = erm.signed_matrix();
  const IntervalMatrix at = a.transposed();
  const ScalarMatrix m2t_inv = approximate_inverse(midpoints(m2.transposed()));
  const ScalarMatrix at_mid = midpoints(at);
  const Scalar floor = erm.loss.conjugate_floor(bits).hi();
  const Scalar zero(bits);

  auto evaluate = [&](const ScalarVector& u) {
    Interval conj(bits);
    IntervalVector ui;
    ui.reserve(u.size());
    for (const auto& x : u) {
      conj += erm.loss.neg_conjugate(x);
      ui.push_back(Interval::point(x));
    }
    const IntervalVector r = at * ui;
    Scalar norm(bits);
    for (const auto& x : r) norm = add_rounded(norm, x.magnitude(), MPFR_RNDU);
    return conj - radius * Interval::point(norm);
  };
  auto clamp = [&](ScalarVector u) {
    for (auto& x : u) x = min(max(x, floor), zero);
    return u;
  };
  auto repair = [&](ScalarVector u) {
    const ScalarVector r = times(at_mid, u);
    const ScalarVector c = times(m2t_inv, r);
    for (std::size_t j = 0; j < n; ++j) {
      Scalar half = c[j];
      mpfr_div_2ui(half.raw(), half.raw(), 1, MPFR_RNDN);
      u[n + j] -= half;
      u[2 * n + j] += half;
    }
    return clamp(std::move(u));
  };

  std::vector<ScalarVector> candidates;
  candidates.push_back(ScalarVector(3 * n, erm.loss.derivative_at_zero(bits).midpoint()));
  if (dual_hint.size() == 3 * n) {
    candidates.push_back(clamp(dual_hint));
    candidates.push_back(repair(dual_hint));
  }
  std::optional<Scalar> best;
  for (auto& u : candidates) {
    u = clamp(std::move(u));
    const Scalar lo = evaluate(u).lo();
    if (!best || lo > *best) best = lo;
  }
  Scalar bound = min(*best, ceiling.lo());
  bound = max(bound, zero);
  return Interval::point(bound);
}

ErmSolution solve_final_layer(const ErmMatrixInstance& erm, const Interval& tol, const ErmSolveOptions& opts) {
  const std::size_t n = erm.n;
  const Precision bits = erm.M(0, 0).precision();
  const ScalarMatrix a = midpoints(erm.signed_matrix());
  ErmSolution sol;
  ScalarVector hint;
  if (erm.loss.kind == LossKind::Logistic) {
    bool converged = false;
    sol.alpha = logistic_newton(a, tol.hi(), opts.max_iterations, sol.iterations, converged);
    sol.certified = converged;
    sol.objective = erm_objective(erm, sol.alpha);
    IntervalVector ai;
    for (const auto& x : sol.alpha) ai.push_back(Interval::point(x));
    const IntervalVector z = erm.signed_matrix() * ai;
    IntervalVector du;
    for (const auto& zi : z) du.push_back(erm.loss.derivative(zi));
    const IntervalVector grad = erm.signed_matrix().transposed() * du;
    Scalar g(bits);
    for (const auto& x : grad) g = max(g, x.magnitude());
    sol.stationarity_residual = Interval(Scalar(bits), g);
    for (const auto& x : du) hint.push_back(x.midpoint());
  } else {
    const ScalarVector warm = hinge_subgradient(a, opts.subgradient_iterations);
    ScalarVector warm_full;
    for (const auto& x : warm) warm_full.push_back(x.rounded(bits));
    // Dual LP: maximize 1^T v subject to A^T v = 0, 0 <= v <= 1; the
    // equality multipliers are the optimal weights.
    // Columns fixed at zero (one per row of A^T) give a feasible identity
    // basis for any M; reduction-shaped M starts from the first M2 block.
    const std::size_t rows = a.rows();
    BoundedLp lp;
    lp.e = ScalarMatrix(n, rows + n, Scalar(bits));
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < rows; ++i) lp.e(j, i) = a(i, j);
      lp.e(j, rows + j) = Scalar(1, bits);
    }
    lp.b = ScalarVector(n, Scalar(bits));
    lp.c = ScalarVector(rows + n, Scalar(bits));
    lp.upper = ScalarVector(rows + n, Scalar(bits));
    for (std::size_t i = 0; i < rows; ++i) {
      lp.c[i] = Scalar(1, bits);
      lp.upper[i] = Scalar(1, bits);
    }
    const bool shaped = rows == 3 * n && varah_margin(block(erm.M, n, n)).sign() > 0;
    for (std::size_t j = 0; j < n; ++j) lp.basis.push_back(shaped ? n + j : rows + j);
    const LpResult res = maximize_bounded(lp);
    sol.iterations = res.pivots;
    sol.certified = res.optimal;
    const Interval lp_value = erm_objective(erm, res.multipliers);
    const Interval warm_value = erm_objective(erm, warm_full);
    if (warm_value.hi() < lp_value.hi()) {
      sol.alpha = warm_full;
      sol.objective = warm_value;
    } else {
      sol.alpha = res.multipliers;
      sol.objective = lp_value;
    }
    for (std::size_t i = 0; i < rows; ++i) hint.push_back(-res.x[i]);
  }
  sol.lower_bound = erm_lower_bound(erm, hint);
  if (erm.loss.kind == LossKind::Hinge) {
    sol.stationarity_residual = Interval(Scalar(bits), max(sub_rounded(sol.objective.hi(), sol.lower_bound.lo(), MPFR_RNDU), Scalar(bits)));
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Distinguisher

NnReductionDetail nn_reduction(const VectorPairInstance& inst, LossKind loss_kind, const ReductionOptions& options) {
  const long T = options.activation_exponent();
  const ActivationKind act_kind = options.activation
                                      ? parse_activation(*options.activation)
                                      : (loss_kind == LossKind::Hinge ? ActivationKind::Relu : ActivationKind::Sigmoid);
  const NiceLoss loss = make_loss(loss_kind, options.K_loss);
  if (inst.n() < 2) throw ParameterError("network reduction needs n >= 2");
  const double log2n = std::log2(static_cast<double>(inst.n()));
  const auto start = static_cast<Precision>(std::ceil(static_cast<double>(T) * log2n)) + 256;
  const Reduction tag = loss_kind == LossKind::Hinge ? Reduction::NnHinge : Reduction::NnLogistic;
  NnReductionDetail detail;
  auto compute = [&](Precision bits) {
    const NiceActivation act = activation_thresholds(act_kind, T, inst.n(), bits);
    const ErmMatrixInstance erm = build_layer_matrix(inst, loss, act);
    detail.l0 = loss.at_zero(bits);
    const Interval three_n(3 * static_cast<long>(inst.n()), bits);
    detail.theta = (three_n - Interval::rational(1, 2, bits)) * detail.l0;
    detail.certificate_value = erm_objective(erm, certificate_point(erm));
    detail.solution = solve_final_layer(erm, detail.l0 / Interval(100, bits));
    detail.optimizer_value = detail.solution.objective;
    detail.lower_bound = detail.solution.lower_bound;
    const Scalar upper = min(detail.certificate_value.hi(), detail.optimizer_value.hi());
    const Scalar& lower = detail.lower_bound.lo();
    if (lower > upper) {
      throw std::logic_error("conflicting evidence: certified lower bound exceeds an achieved objective value");
    }
    const Interval statistic = three_n * detail.l0 - Interval(lower, upper);
    return ThresholdComparison{statistic, detail.l0 * Interval::rational(1, 2, bits)};
  };
  detail.verdict = certify(tag, options, start, compute);
  return detail;
}

ReductionVerdict nn_distinguisher(const VectorPairInstance& inst, LossKind loss, const ReductionOptions& options) {
  return nn_reduction(inst, loss, options).verdict;
}

// ---------------------------------------------------------------------------
// Gradient

Interval gadget_value(Gadget gadget, std::size_t dot, std::size_t n, Precision bits) {
  if (gadget == Gadget::Relu) return Interval(dot == 0 ? 1 : 0, bits);
  const Interval ln_n = interval_ln(Interval(static_cast<long>(std::max<std::size_t>(n, 2)), bits));
  return sigmoid(-(Interval(10, bits) * ln_n * Interval(static_cast<long>(dot), bits)));
}

namespace {

void require_ovp(const VectorPairInstance& inst) {
  if (inst.kind != ProblemKind::OVP) throw ParameterError("gradient reduction needs an OVP instance");
  inst.validate();
  if (inst.A.empty() || inst.B.empty()) throw ParameterError("gradient reduction needs nonempty A and B");
}

}  // namespace

GradientResult loss_gradient_at_zero(const VectorPairInstance& inst, const NiceLoss& loss, Gadget gadget,
                                     Precision bits) {
  require_ovp(inst);
  const Interval lp = loss.derivative_at_zero(bits);
  std::map<std::size_t, Interval> cache;
  GradientResult out;
  out.entry_sum = Interval(bits);
  for (const auto& b : inst.B) {
    Interval col(bits);
    for (const auto& a : inst.A) {
      const std::size_t dot = inner_product(a, b);
      auto it = cache.find(dot);
      if (it == cache.end()) it = cache.emplace(dot, gadget_value(gadget, dot, inst.n(), bits)).first;
      col += it->second;
    }
    out.gradient.push_back(lp * col);
    out.entry_sum += out.gradient.back();
  }
  return out;
}

Interval gadget_loss(const VectorPairInstance& inst, const NiceLoss& loss, Gadget gadget, const IntervalVector& alpha,
                     Precision bits) {
  require_ovp(inst);
  if (alpha.size() != inst.m()) throw std::invalid_argument("gadget_loss: alpha has the wrong length");
  Interval total(bits);
  for (const auto& a : inst.A) {
    Interval z(bits);
    for (std::size_t j = 0; j < inst.m(); ++j) z += alpha[j] * gadget_value(gadget, inner_product(a, inst.B[j]), inst.n(), bits);
    total += loss.value(z);
  }
  return total;
}

GradientReductionDetail gradient_reduction(const VectorPairInstance& inst, Gadget gadget, const ReductionOptions& options) {
  require_ovp(inst);
  const NiceLoss loss = make_loss(parse_loss(options.gradient_loss), options.K_loss);
  const Reduction tag = gadget == Gadget::Relu ? Reduction::GradRelu : Reduction::GradSigmoid;
  GradientReductionDetail detail;
  auto compute = [&](Precision bits) {
    detail.gradient = loss_gradient_at_zero(inst, loss, gadget, bits);
    detail.l_prime = loss.derivative_at_zero(bits);
    detail.count.reset();
    if (gadget == Gadget::Relu) {
      const Interval count = detail.gradient.entry_sum / detail.l_prime;
      const long k = std::lround(count.midpoint().to_double());
      if (count.contains(k) && count.width() < Scalar(1, bits)) detail.count = k;
      return ThresholdComparison{count, Interval::rational(1, 2, bits)};
    }
    return ThresholdComparison{interval_abs(detail.gradient.entry_sum),
                               interval_abs(detail.l_prime) * Interval::rational(1, 4, bits)};
  };
  detail.verdict = certify(tag, options, 128, compute);
  return detail;
}

ReductionVerdict gradient_distinguisher(const VectorPairInstance& inst, Gadget gadget, const ReductionOptions& options) {
  return gradient_reduction(inst, gadget, options).verdict;
}

}  // namespace ermlab
