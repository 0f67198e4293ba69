#include "ermlab/precision.hpp"

#include <algorithm>
#include <cstdlib>
#include <memory>
#include <vector>

namespace ermlab {

// ---------------------------------------------------------------------------
// Scalar

Scalar::Scalar(Precision bits) {
  mpfr_init2(value_, std::max<Precision>(bits, MPFR_PREC_MIN));
  mpfr_set_zero(value_, 1);
}

Scalar::Scalar(long value, Precision bits) : Scalar(bits) { mpfr_set_si(value_, value, MPFR_RNDN); }

Scalar::Scalar(const Scalar& other) {
  mpfr_init2(value_, other.precision());
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

Scalar::Scalar(Scalar&& other) noexcept {
  // Steal the limbs; leave `other` as a valid minimal-precision zero.
  value_[0] = other.value_[0];
  mpfr_init2(other.value_, MPFR_PREC_MIN);
  mpfr_set_zero(other.value_, 1);
}

Scalar& Scalar::operator=(const Scalar& other) {
  if (this != &other) {
    if (precision() != other.precision()) mpfr_set_prec(value_, other.precision());
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

Scalar& Scalar::operator=(Scalar&& other) noexcept {
  if (this != &other) mpfr_swap(value_, other.value_);
  return *this;
}

Scalar::~Scalar() { mpfr_clear(value_); }

Scalar Scalar::parse(std::string_view text, Precision bits, mpfr_rnd_t rnd) {
  Scalar s(bits);
  std::string owned(text);
  if (mpfr_set_str(s.value_, owned.c_str(), 10, rnd) != 0) {
    throw std::invalid_argument("not a decimal number: '" + owned + "'");
  }
  return s;
}

Scalar Scalar::from_double(double value, Precision bits) {
  Scalar s(bits);
  mpfr_set_d(s.value_, value, MPFR_RNDN);
  return s;
}

Scalar Scalar::infinity(int sign, Precision bits) {
  Scalar s(bits);
  mpfr_set_inf(s.value_, sign);
  return s;
}

Scalar Scalar::rounded(Precision bits, mpfr_rnd_t rnd) const {
  Scalar s(bits);
  mpfr_set(s.value_, value_, rnd);
  return s;
}

std::string Scalar::to_string(int digits, mpfr_rnd_t rnd) const {
  if (mpfr_nan_p(value_)) return "nan";
  if (mpfr_inf_p(value_)) return mpfr_sgn(value_) > 0 ? "inf" : "-inf";
  if (mpfr_zero_p(value_)) return "0";
  std::string format = "%." + std::to_string(std::max(digits - 1, 0)) + "R*e";
  int size = mpfr_snprintf(nullptr, 0, format.c_str(), rnd, value_);
  std::string out(static_cast<std::size_t>(size) + 1, '\0');
  mpfr_snprintf(out.data(), out.size(), format.c_str(), rnd, value_);
  out.resize(static_cast<std::size_t>(size));
  return out;
}

namespace {

Precision joint(const Scalar& x, const Scalar& y) { return std::max(x.precision(), y.precision()); }

}  // namespace

Scalar operator+(const Scalar& x, const Scalar& y) { return add_rounded(x, y, MPFR_RNDN); }
Scalar operator-(const Scalar& x, const Scalar& y) { return sub_rounded(x, y, MPFR_RNDN); }
Scalar operator*(const Scalar& x, const Scalar& y) { return mul_rounded(x, y, MPFR_RNDN); }
Scalar operator/(const Scalar& x, const Scalar& y) { return div_rounded(x, y, MPFR_RNDN); }

Scalar operator-(const Scalar& x) {
  Scalar r(x.precision());
  mpfr_neg(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

Scalar& Scalar::operator+=(const Scalar& y) {
  if (y.precision() > precision()) mpfr_prec_round(value_, y.precision(), MPFR_RNDN);
  mpfr_add(value_, value_, y.value_, MPFR_RNDN);
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& y) {
  if (y.precision() > precision()) mpfr_prec_round(value_, y.precision(), MPFR_RNDN);
  mpfr_sub(value_, value_, y.value_, MPFR_RNDN);
  return *this;
}

Scalar& Scalar::operator*=(const Scalar& y) {
  if (y.precision() > precision()) mpfr_prec_round(value_, y.precision(), MPFR_RNDN);
  mpfr_mul(value_, value_, y.value_, MPFR_RNDN);
  return *this;
}

Scalar add_rounded(const Scalar& x, const Scalar& y, mpfr_rnd_t rnd) {
  Scalar r(joint(x, y));
  mpfr_add(r.raw(), x.raw(), y.raw(), rnd);
  return r;
}

Scalar sub_rounded(const Scalar& x, const Scalar& y, mpfr_rnd_t rnd) {
  Scalar r(joint(x, y));
  mpfr_sub(r.raw(), x.raw(), y.raw(), rnd);
  return r;
}

Scalar mul_rounded(const Scalar& x, const Scalar& y, mpfr_rnd_t rnd) {
  Scalar r(joint(x, y));
  mpfr_mul(r.raw(), x.raw(), y.raw(), rnd);
  return r;
}

Scalar div_rounded(const Scalar& x, const Scalar& y, mpfr_rnd_t rnd) {
  Scalar r(joint(x, y));
  mpfr_div(r.raw(), x.raw(), y.raw(), rnd);
  return r;
}

Scalar abs(const Scalar& x) {
  Scalar r(x.precision());
  mpfr_abs(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

Scalar max(const Scalar& x, const Scalar& y) { return x < y ? y : x; }
Scalar min(const Scalar& x, const Scalar& y) { return y < x ? y : x; }

Scalar sqrt(const Scalar& x) {
  Scalar r(x.precision());
  mpfr_sqrt(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

Scalar exp(const Scalar& x) {
  Scalar r(x.precision());
  mpfr_exp(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

Scalar log(const Scalar& x) {
  Scalar r(x.precision());
  mpfr_log(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

// ---------------------------------------------------------------------------
// Interval

Interval::Interval(Precision bits) : lo_(bits), hi_(bits) {}

Interval::Interval(long value, Precision bits) : lo_(bits), hi_(bits) {
  mpfr_set_si(lo_.raw(), value, MPFR_RNDD);
  mpfr_set_si(hi_.raw(), value, MPFR_RNDU);
}

Interval::Interval(Scalar lo, Scalar hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (mpfr_nan_p(lo_.raw()) || mpfr_nan_p(hi_.raw()) || hi_ < lo_) {
    throw std::invalid_argument("interval requires lo <= hi");
  }
}

Interval Interval::point(const Scalar& value) { return Interval(value, value); }

Interval Interval::rational(long num, long den, Precision bits) {
  if (den == 0) throw DomainError("rational with zero denominator");
  return Interval(num, bits) / Interval(den, bits);
}

Interval Interval::parse(std::string_view text, Precision bits) {
  return Interval(Scalar::parse(text, bits, MPFR_RNDD), Scalar::parse(text, bits, MPFR_RNDU));
}

Interval Interval::hull(const Interval& x, const Interval& y) {
  return Interval(min(x.lo_, y.lo_), max(x.hi_, y.hi_));
}

Interval Interval::whole(Precision bits) {
  return Interval(Scalar::infinity(-1, bits), Scalar::infinity(1, bits));
}

Precision Interval::precision() const { return std::max(lo_.precision(), hi_.precision()); }

Scalar Interval::width() const { return sub_rounded(hi_, lo_, MPFR_RNDU); }

Scalar Interval::midpoint() const {
  Scalar sum = add_rounded(lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(sum.raw(), sum.raw(), 1, MPFR_RNDN);
  return sum;
}

Scalar Interval::magnitude() const { return max(abs(lo_), abs(hi_)); }

Scalar Interval::mignitude() const {
  if (contains_zero()) return Scalar(precision());
  return min(abs(lo_), abs(hi_));
}

bool Interval::contains(long x) const { return mpfr_cmp_si(lo_.raw(), x) <= 0 && mpfr_cmp_si(hi_.raw(), x) >= 0; }

Interval Interval::rounded(Precision bits) const {
  return Interval(lo_.rounded(bits, MPFR_RNDD), hi_.rounded(bits, MPFR_RNDU));
}

Interval& Interval::operator+=(const Interval& y) { return *this = *this + y; }
Interval& Interval::operator-=(const Interval& y) { return *this = *this - y; }
Interval& Interval::operator*=(const Interval& y) { return *this = *this * y; }

Interval operator+(const Interval& x, const Interval& y) {
  return Interval(add_rounded(x.lo(), y.lo(), MPFR_RNDD), add_rounded(x.hi(), y.hi(), MPFR_RNDU));
}

Interval operator-(const Interval& x, const Interval& y) {
  return Interval(sub_rounded(x.lo(), y.hi(), MPFR_RNDD), sub_rounded(x.hi(), y.lo(), MPFR_RNDU));
}

Interval operator-(const Interval& x) { return Interval(-x.hi(), -x.lo()); }

Interval operator*(const Interval& x, const Interval& y) {
  // Sign-case analysis keeps the common nonnegative case to two products.
  if (x.lo().sign() >= 0 && y.lo().sign() >= 0) {
    return Interval(mul_rounded(x.lo(), y.lo(), MPFR_RNDD), mul_rounded(x.hi(), y.hi(), MPFR_RNDU));
  }
  const Scalar* xs[2] = {&x.lo(), &x.hi()};
  const Scalar* ys[2] = {&y.lo(), &y.hi()};
  std::optional<Scalar> lo;
  std::optional<Scalar> hi;
  for (const Scalar* a : xs) {
    for (const Scalar* b : ys) {
      Scalar down = mul_rounded(*a, *b, MPFR_RNDD);
      Scalar up = mul_rounded(*a, *b, MPFR_RNDU);
      // 0 * inf is NaN in MPFR; the true product of bounded reals is 0.
      if (mpfr_nan_p(down.raw())) down = Scalar(down.precision());
      if (mpfr_nan_p(up.raw())) up = Scalar(up.precision());
      if (!lo || down < *lo) lo = std::move(down);
      if (!hi || up > *hi) hi = std::move(up);
    }
  }
  return Interval(std::move(*lo), std::move(*hi));
}

Interval operator/(const Interval& x, const Interval& y) {
  if (y.contains_zero()) throw DomainError("interval division by an interval containing zero");
  if (x.is_point() && y.is_point()) {
    // Single correctly rounded quotient in each direction is tighter.
    return Interval(div_rounded(x.lo(), y.lo(), MPFR_RNDD), div_rounded(x.lo(), y.lo(), MPFR_RNDU));
  }
  if (y.lo().sign() > 0 && x.lo().sign() >= 0) {
    return Interval(div_rounded(x.lo(), y.hi(), MPFR_RNDD), div_rounded(x.hi(), y.lo(), MPFR_RNDU));
  }
  Interval reciprocal(div_rounded(Scalar(1, y.precision()), y.hi(), MPFR_RNDD),
                      div_rounded(Scalar(1, y.precision()), y.lo(), MPFR_RNDU));
  return x * reciprocal;
}

Interval interval_arith(ArithOp op, const Interval& x, const Interval& y) {
  switch (op) {
    case ArithOp::Add: return x + y;
    case ArithOp::Sub: return x - y;
    case ArithOp::Mul: return x * y;
    case ArithOp::Div: return x / y;
    case ArithOp::Neg: return -x;
  }
  throw std::invalid_argument("unknown arithmetic op");
}

Interval interval_exp(const Interval& x) {
  Scalar lo(x.precision());
  Scalar hi(x.precision());
  mpfr_exp(lo.raw(), x.lo().raw(), MPFR_RNDD);
  mpfr_exp(hi.raw(), x.hi().raw(), MPFR_RNDU);
  return Interval(std::move(lo), std::move(hi));
}

Interval interval_ln(const Interval& x) {
  if (x.lo().sign() <= 0) throw DomainError("logarithm of an interval that is not strictly positive");
  Scalar lo(x.precision());
  Scalar hi(x.precision());
  mpfr_log(lo.raw(), x.lo().raw(), MPFR_RNDD);
  mpfr_log(hi.raw(), x.hi().raw(), MPFR_RNDU);
  return Interval(std::move(lo), std::move(hi));
}

Interval interval_sqrt(const Interval& x) {
  if (x.lo().sign() < 0) throw DomainError("square root of an interval with negative part");
  Scalar lo(x.precision());
  Scalar hi(x.precision());
  mpfr_sqrt(lo.raw(), x.lo().raw(), MPFR_RNDD);
  mpfr_sqrt(hi.raw(), x.hi().raw(), MPFR_RNDU);
  return Interval(std::move(lo), std::move(hi));
}

Interval interval_abs(const Interval& x) {
  if (x.lo().sign() >= 0) return x;
  if (x.hi().sign() <= 0) return -x;
  return Interval(Scalar(x.precision()), max(-x.lo(), x.hi()));
}

Interval interval_square(const Interval& x) {
  Interval a = interval_abs(x);
  return Interval(mul_rounded(a.lo(), a.lo(), MPFR_RNDD), mul_rounded(a.hi(), a.hi(), MPFR_RNDU));
}

Interval interval_relu(const Interval& x) {
  Scalar zero(x.precision());
  return Interval(max(zero, x.lo()), max(zero, x.hi()));
}

Interval interval_max(const Interval& x, const Interval& y) {
  return Interval(max(x.lo(), y.lo()), max(x.hi(), y.hi()));
}

Interval interval_pow(const Interval& x, unsigned long k) {
  Interval result(1, x.precision());
  Interval base = x;
  bool first = true;
  while (k > 0) {
    if (k & 1UL) {
      result = first ? base : result * base;
      first = false;
    }
    k >>= 1UL;
    if (k > 0) base = interval_square(base);
  }
  return result;
}

Interval ln2(Precision bits) {
  Scalar lo(bits);
  Scalar hi(bits);
  mpfr_const_log2(lo.raw(), MPFR_RNDD);
  mpfr_const_log2(hi.raw(), MPFR_RNDU);
  return Interval(std::move(lo), std::move(hi));
}

// ---------------------------------------------------------------------------
// Escalation

const char* to_string(Side side) {
  switch (side) {
    case Side::Above: return "above";
    case Side::Below: return "below";
    case Side::Undecidable: return "undecidable";
  }
  return "undecidable";
}

PrecisionPolicy PrecisionPolicy::with_env_cap(Precision start) {
  PrecisionPolicy policy;
  policy.start = std::max(start, kMinPrecision);
  if (const char* env = std::getenv("ERM_LAB_PRECISION_CAP")) {
    char* end = nullptr;
    long long cap = std::strtoll(env, &end, 10);
    if (end != env && cap >= kMinPrecision) policy.cap = static_cast<Precision>(cap);
  }
  policy.start = std::min(policy.start, policy.cap);
  return policy;
}

Side classify(const Interval& statistic, const Interval& threshold) {
  if (statistic.lo() > threshold.hi()) return Side::Above;
  if (statistic.hi() < threshold.lo()) return Side::Below;
  return Side::Undecidable;
}

CertifiedOutcome escalate_precision(const std::function<ThresholdComparison(Precision)>& computation,
                                    const PrecisionPolicy& policy) {
  CertifiedOutcome outcome;
  Precision bits = std::max(policy.start, kMinPrecision);
  for (;;) {
    ThresholdComparison comparison = computation(bits);
    outcome.side = classify(comparison.statistic, comparison.threshold);
    outcome.statistic = std::move(comparison.statistic);
    outcome.threshold = std::move(comparison.threshold);
    outcome.bits_used = bits;
    if (outcome.side != Side::Undecidable || bits >= policy.cap) return outcome;
    bits = std::min(bits * 2, policy.cap);
    ++outcome.escalations;
  }
}

}  // namespace ermlab
