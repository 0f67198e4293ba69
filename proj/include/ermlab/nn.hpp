#pragma once

// Final-layer network ERM built from an OVP instance, its solver and
// certified lower bound, and the gradient-at-zero reduction.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ermlab/instances.hpp"
#include "ermlab/linalg.hpp"
#include "ermlab/verdict.hpp"

namespace ermlab {

enum class LossKind { Hinge, Logistic };
enum class ActivationKind { Relu, Sigmoid };

const char* to_string(LossKind kind);
const char* to_string(ActivationKind kind);
LossKind parse_loss(std::string_view text);
ActivationKind parse_activation(std::string_view text);

struct NiceLoss {
  LossKind kind = LossKind::Hinge;
  long K_loss = 1;

  Interval value(const Interval& z) const;       // l(z)
  Interval derivative(const Interval& z) const;  // l'(z); hinge away from its kink at 1
  Interval at_zero(Precision bits) const;         // l(0) = 1 for both
  Interval derivative_at_zero(Precision bits) const;
  // Domain of the convex conjugate: u in [conjugate_floor, 0].
  Interval conjugate_floor(Precision bits) const;
  // -l*(u) for u in the conjugate domain.
  Interval neg_conjugate(const Scalar& u) const;
  // c with l(x) + l(-x) >= c |x|.
  Interval pair_growth(Precision bits) const;
};

NiceLoss make_loss(LossKind kind, long K_loss = 1);

struct NiceActivation {
  ActivationKind kind = ActivationKind::Relu;
  long T = 1000;
  Interval v0;
  Interval v1;
  Interval v2;
  Interval offset;  // sigmoid: v0 - v1

  Interval apply(const Interval& x) const;
};

Interval sigmoid(const Interval& x);

// relu: v0 = 1, v1 = n^-T, v2 = -1 + 2 n^-T.
// sigmoid: v1 = -ln(n^T - 1), v0 = v1 + C', v2 = v1 - C', C' = ceil(T ln n + (ln n)^2).
NiceActivation activation_thresholds(ActivationKind kind, long T, std::size_t n, Precision bits);

struct ErmMatrixInstance {
  std::size_t n = 0;
  IntervalMatrix M;         // 3n x n: [M1; M2; M2]
  std::vector<int> labels;  // +1 on M1 and the first M2, -1 on the second M2
  NiceLoss loss;
  NiceActivation activation;
  // Network view: row i of M is S(examples[i] . weights[j]).
  std::vector<IntervalVector> examples;
  std::vector<IntervalVector> weights;

  // A = diag(labels) M.
  IntervalMatrix signed_matrix() const;
};

ErmMatrixInstance build_layer_matrix(const VectorPairInstance& inst, const NiceLoss& loss,
                                     const NiceActivation& activation);

// sum_i l(y_i (M alpha)_i).
Interval erm_objective(const ErmMatrixInstance& erm, const IntervalVector& alpha);
Interval erm_objective(const ErmMatrixInstance& erm, const ScalarVector& alpha);

// Certificate point: every entry n^(100 K_loss).
ScalarVector certificate_point(const ErmMatrixInstance& erm);

struct ErmSolution {
  ScalarVector alpha;
  Interval objective;               // encloses the value at alpha
  Interval stationarity_residual;   // logistic: ||grad||_inf at alpha; hinge: objective - lower bound
  Interval lower_bound;             // certified lower bound on the minimum
  long iterations = 0;
  bool certified = true;            // false when an iteration cap was hit
};

struct ErmSolveOptions {
  long max_iterations = 200;
  long subgradient_iterations = 200;
};

ErmSolution solve_final_layer(const ErmMatrixInstance& erm, const Interval& tol, const ErmSolveOptions& opts = {});

// Certified f* >= min(3n l(0), sum -l*(u_i) - R ||A^T u||_1) with
// R = 3n l(0) / (c_l varah(M2)); `dual_hint` (optional) seeds u.
Interval erm_lower_bound(const ErmMatrixInstance& erm, const ScalarVector& dual_hint);

struct NnReductionDetail {
  ReductionVerdict verdict;
  Interval certificate_value;
  Interval optimizer_value;
  Interval lower_bound;
  Interval l0;
  Interval theta;  // (3n - 1/2) l(0)
  ErmSolution solution;
};

// Activation defaults: relu for hinge, sigmoid for logistic.
NnReductionDetail nn_reduction(const VectorPairInstance& inst, LossKind loss, const ReductionOptions& options);
ReductionVerdict nn_distinguisher(const VectorPairInstance& inst, LossKind loss, const ReductionOptions& options);

// ---------------------------------------------------------------------------
// Gradient reduction

enum class Gadget { Relu, Sigmoid };

// relu: max(0, 1 - 2 a.b); sigmoid: sigma(-10 ln(n) a.b).
Interval gadget_value(Gadget gadget, std::size_t dot, std::size_t n, Precision bits);

struct GradientResult {
  IntervalVector gradient;  // d/d alpha_j at alpha = 0
  Interval entry_sum;
};

GradientResult loss_gradient_at_zero(const VectorPairInstance& inst, const NiceLoss& loss, Gadget gadget,
                                     Precision bits = 256);
// sum_{a in A} l(sum_j alpha_j S(a, b_j)).
Interval gadget_loss(const VectorPairInstance& inst, const NiceLoss& loss, Gadget gadget, const IntervalVector& alpha,
                     Precision bits);

struct GradientReductionDetail {
  ReductionVerdict verdict;
  GradientResult gradient;
  Interval l_prime;
  std::optional<long> count;  // relu: exact orthogonal-pair count
};

// The gradient reductions use the logistic loss unless options say otherwise.
GradientReductionDetail gradient_reduction(const VectorPairInstance& inst, Gadget gadget, const ReductionOptions& options);
ReductionVerdict gradient_distinguisher(const VectorPairInstance& inst, Gadget gadget, const ReductionOptions& options);

}  // namespace ermlab
