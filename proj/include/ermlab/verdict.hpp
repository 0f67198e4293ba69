#pragma once

// Reduction names, shared options, and the certified verdict every
// distinguisher returns.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ermlab/instances.hpp"
#include "ermlab/precision.hpp"

namespace ermlab {

enum class Answer { No, Yes, Undecidable };

const char* to_string(Answer answer);

enum class Reduction { Svm, SvmBias, SvmSoft, Kpca, Krr, NnHinge, NnLogistic, GradRelu, GradSigmoid };

inline constexpr Reduction kAllReductions[] = {
    Reduction::Svm,     Reduction::SvmBias,    Reduction::SvmSoft,  Reduction::Kpca,       Reduction::Krr,
    Reduction::NnHinge, Reduction::NnLogistic, Reduction::GradRelu, Reduction::GradSigmoid,
};

const char* to_string(Reduction reduction);
// Accepts the names above plus "nn" (hinge loss).
Reduction parse_reduction(std::string_view text);
// OVP for the network and gradient reductions, BHCP for the kernel ones.
ProblemKind source_kind(Reduction reduction);

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::optional<Interval> best) : std::runtime_error(what), best_(std::move(best)) {}
  const std::optional<Interval>& best_bounds() const { return best_; }

 private:
  std::optional<Interval> best_;
};

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ReductionOptions {
  std::string c_multiplier = "100";
  // Starting precision; derived from the instance when absent.
  std::optional<Precision> precision;
  // Precision cap; ERM_LAB_PRECISION_CAP or 1,048,576 when absent.
  std::optional<Precision> precision_cap;
  int K_box = 4;
  // Soft-margin regularizer as decimal text; 1/(K_box n^2) when absent.
  std::optional<std::string> lambda;
  long K_loss = 1;
  // Activation exponent; 1000 * K_loss when absent.
  std::optional<long> T;
  // Network activation ("relu" or "sigmoid"); per-loss default when absent.
  std::optional<std::string> activation;
  // Loss for the gradient reductions ("hinge" or "logistic", default logistic).
  std::string gradient_loss = "logistic";
  // Replaces the computed threshold with the statistic's own midpoint at the
  // final precision. Only for exercising the UNDECIDABLE path.
  bool force_tie = false;

  long activation_exponent() const { return T.value_or(1000 * K_loss); }
  PrecisionPolicy policy(Precision derived_start) const;
};

// Classifies per the statistic/threshold convention: YES when the statistic
// is certainly above the threshold band, NO when certainly below.
struct ReductionVerdict {
  Reduction reduction = Reduction::Svm;
  Answer answer = Answer::Undecidable;
  Interval statistic;
  Interval threshold;
  Precision precision_bits_used = 0;
  int escalations = 0;
  double solve_ms = 0;
};

Answer to_answer(Side side);

// Runs `compute` under precision escalation and packages the outcome.
// SolverError at one precision counts as unresolved and escalates.
ReductionVerdict certify(Reduction reduction, const ReductionOptions& options, Precision derived_start,
                         const std::function<ThresholdComparison(Precision)>& compute);

// Start precision covering absolute accuracy exp(-C t) on statistics of size n^3.
Precision kernel_start_precision(std::size_t n, int t, const std::string& c_multiplier);

}  // namespace ermlab
