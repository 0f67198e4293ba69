#pragma once

// Kernel SVM reductions from BHCP: three no-bias hard-margin SVMs, their bias
// counterparts on the mirrored +-x instance, and the soft-margin variant.

#include <cstddef>
#include <optional>
#include <vector>

#include "ermlab/instances.hpp"
#include "ermlab/kernels.hpp"
#include "ermlab/linalg.hpp"
#include "ermlab/verdict.hpp"

namespace ermlab {

struct SvmInstance {
  // Each point is signs[i] * points[i]; signs are all +1 unless bias=true.
  std::vector<BitVector> points;
  std::vector<int> signs;
  std::vector<int> labels;
  KernelParams params;
  bool bias = false;
  std::size_t padding = 0;  // all-ones coordinates appended by the bias construction
  std::optional<Interval> lambda;
  std::optional<Interval> box_bound;

  std::size_t size() const { return points.size(); }
  void validate() const;
};

struct SvmSolution {
  IntervalVector alpha;
  Interval dual_value;
  std::optional<Interval> primal_value;
  // Certified upper bound on (optimum - value at alpha).
  Interval kkt_residual;
  long iterations = 0;
};

struct SvmSolveOptions {
  long max_sweeps = 10000;
};

// ||x_i - x_j||^2 for the signed points (exact integer).
std::size_t squared_distance(const SvmInstance& svm, std::size_t i, std::size_t j);
// Q_ij = y_i y_j k(x_i, x_j).
IntervalMatrix dual_matrix(const SvmInstance& svm);

struct ThreeSvms {
  SvmInstance a;   // A, labels +1
  SvmInstance b;   // B, labels -1
  SvmInstance ab;  // A then B, labels +1 / -1
};

ThreeSvms build_three_svms(const VectorPairInstance& inst, const KernelParams& params);

// Maximizes sum(alpha) - alpha^T Q alpha / 2 over alpha >= 0 (and <= box when
// present). bias=true requires the mirrored structure of build_bias_instance.
// dual_value is certified to within `tol` or SolverError is thrown. Hard-margin
// solves also carry the primal value at a feasible point, within 2 tol of dual_value.
SvmSolution solve_dual(const SvmInstance& svm, const Interval& tol, const SvmSolveOptions& opts = {});

// Padding length max(1, ceil(log2(n)^3)) for an n-point source instance.
std::size_t bias_padding(std::size_t n);
SvmInstance build_bias_instance(const SvmInstance& svm, const KernelParams& params);
// Objective matrix Q - R of the symmetric gamma problem.
IntervalMatrix bias_reduced_matrix(const SvmInstance& svm);
// Solves over gamma >= 0 (alpha = beta = gamma); dual_value is V, half the
// optimum of the bias instance.
SvmSolution solve_bias_reduced(const SvmInstance& svm, const Interval& tol, const SvmSolveOptions& opts = {});

// Box-constrained concave QP core shared by all variants.
SvmSolution solve_box_qp(const IntervalMatrix& q, const std::optional<Interval>& box, const Interval& tol,
                         const SvmSolveOptions& opts = {});

enum class SvmVariant { NoBias, Bias, Soft };

struct SvmReductionDetail {
  ReductionVerdict verdict;
  SvmSolution val_a;
  SvmSolution val_b;
  SvmSolution val_ab;
  Interval gap;        // val(A,B) - val(A) - val(B)
  Interval tol;        // exp(-C(t-1)) / 100
  Interval theta;      // exp(-C(t-1)) / 8
  Interval C;
};

SvmReductionDetail svm_reduction(const VectorPairInstance& inst, SvmVariant variant, const ReductionOptions& options);

ReductionVerdict svm_distinguisher(const VectorPairInstance& inst, const ReductionOptions& options);
ReductionVerdict bias_svm_distinguisher(const VectorPairInstance& inst, const ReductionOptions& options);
ReductionVerdict soft_margin_distinguisher(const VectorPairInstance& inst, const ReductionOptions& options);

}  // namespace ermlab
