#include "ermlab/verdict.hpp"

#include <chrono>
#include <cmath>

namespace ermlab {

const char* to_string(Answer answer) {
  switch (answer) {
    case Answer::No: return "NO";
    case Answer::Yes: return "YES";
    case Answer::Undecidable: return "UNDECIDABLE";
  }
  return "UNDECIDABLE";
}

const char* to_string(Reduction reduction) {
  switch (reduction) {
    case Reduction::Svm: return "svm";
    case Reduction::SvmBias: return "svm_bias";
    case Reduction::SvmSoft: return "svm_soft";
    case Reduction::Kpca: return "kpca";
    case Reduction::Krr: return "krr";
    case Reduction::NnHinge: return "nn_hinge";
    case Reduction::NnLogistic: return "nn_logistic";
    case Reduction::GradRelu: return "grad_relu";
    case Reduction::GradSigmoid: return "grad_sigmoid";
  }
  return "svm";
}

Reduction parse_reduction(std::string_view text) {
  if (text == "nn") return Reduction::NnHinge;
  for (Reduction r : kAllReductions) {
    if (text == to_string(r)) return r;
  }
  throw ParameterError("unknown reduction '" + std::string(text) + "'");
}

ProblemKind source_kind(Reduction reduction) {
  switch (reduction) {
    case Reduction::NnHinge:
    case Reduction::NnLogistic:
    case Reduction::GradRelu:
    case Reduction::GradSigmoid: return ProblemKind::OVP;
    default: return ProblemKind::BHCP;
  }
}

PrecisionPolicy ReductionOptions::policy(Precision derived_start) const {
  PrecisionPolicy p = PrecisionPolicy::with_env_cap(precision.value_or(derived_start));
  if (precision_cap) p.cap = std::max(*precision_cap, kMinPrecision);
  p.start = std::min(p.start, p.cap);
  return p;
}

Answer to_answer(Side side) {
  switch (side) {
    case Side::Above: return Answer::Yes;
    case Side::Below: return Answer::No;
    case Side::Undecidable: return Answer::Undecidable;
  }
  return Answer::Undecidable;
}

ReductionVerdict certify(Reduction reduction, const ReductionOptions& options, Precision derived_start,
                         const std::function<ThresholdComparison(Precision)>& compute) {
  const auto started = std::chrono::steady_clock::now();
  PrecisionPolicy policy = options.policy(derived_start);
  if (options.force_tie) policy.cap = policy.start;
  auto guarded = [&](Precision bits) -> ThresholdComparison {
    ThresholdComparison cmp;
    try {
      cmp = compute(bits);
    } catch (const SolverError&) {
      cmp = ThresholdComparison{Interval::whole(bits), Interval::whole(bits)};
    }
    if (options.force_tie) cmp.threshold = cmp.statistic;
    return cmp;
  };
  const CertifiedOutcome outcome = escalate_precision(guarded, policy);
  ReductionVerdict v;
  v.reduction = reduction;
  v.answer = to_answer(outcome.side);
  v.statistic = outcome.statistic;
  v.threshold = outcome.threshold;
  v.precision_bits_used = outcome.bits_used;
  v.escalations = outcome.escalations;
  v.solve_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return v;
}

Precision kernel_start_precision(std::size_t n, int t, const std::string& c_multiplier) {
  const double c = std::stod(c_multiplier) * std::log(static_cast<double>(std::max<std::size_t>(n, 2)));
  const double nats = c * t + std::log(1000.0 * std::pow(static_cast<double>(n), 3));
  return static_cast<Precision>(std::ceil(nats / std::log(2.0))) + 64;
}

}  // namespace ermlab
