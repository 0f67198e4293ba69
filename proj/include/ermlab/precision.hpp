#pragma once

// Extended-precision scalars and outward-rounded intervals.
//
// Scalar is a value-semantic wrapper around an MPFR number; Interval is a
// pair of Scalars [lo, hi] whose operations always enclose the exact real
// result. The precision of an operation's result is the larger of its
// operands' precisions, so there is no global working-precision state.

#include <mpfr.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ermlab {

using Precision = mpfr_prec_t;

inline constexpr Precision kMinPrecision = 64;
inline constexpr Precision kDefaultPrecisionCap = 1'048'576;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class Scalar {
 public:
  explicit Scalar(Precision bits = kMinPrecision);
  Scalar(long value, Precision bits);
  Scalar(const Scalar& other);
  Scalar(Scalar&& other) noexcept;
  Scalar& operator=(const Scalar& other);
  Scalar& operator=(Scalar&& other) noexcept;
  ~Scalar();

  // Parses a decimal string, rounding in the given direction.
  static Scalar parse(std::string_view text, Precision bits, mpfr_rnd_t rnd = MPFR_RNDN);
  static Scalar from_double(double value, Precision bits);
  static Scalar infinity(int sign, Precision bits);

  Precision precision() const { return mpfr_get_prec(value_); }
  mpfr_ptr raw() { return value_; }
  mpfr_srcptr raw() const { return value_; }

  // Rounds this value into a (possibly different) precision.
  Scalar rounded(Precision bits, mpfr_rnd_t rnd = MPFR_RNDN) const;

  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(value_, MPFR_RNDN); }
  // Decimal rendering with `digits` significant digits, rounded per `rnd`.
  std::string to_string(int digits = 20, mpfr_rnd_t rnd = MPFR_RNDN) const;

  bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  bool is_finite() const { return mpfr_number_p(value_) != 0; }
  int sign() const { return mpfr_sgn(value_); }

  friend int compare(const Scalar& x, const Scalar& y) { return mpfr_cmp(x.value_, y.value_); }
  friend bool operator==(const Scalar& x, const Scalar& y) { return mpfr_equal_p(x.value_, y.value_) != 0; }
  friend bool operator<(const Scalar& x, const Scalar& y) { return mpfr_less_p(x.value_, y.value_) != 0; }
  friend bool operator<=(const Scalar& x, const Scalar& y) { return mpfr_lessequal_p(x.value_, y.value_) != 0; }
  friend bool operator>(const Scalar& x, const Scalar& y) { return mpfr_greater_p(x.value_, y.value_) != 0; }
  friend bool operator>=(const Scalar& x, const Scalar& y) { return mpfr_greaterequal_p(x.value_, y.value_) != 0; }

  // Round-to-nearest arithmetic at max(prec(x), prec(y)).
  friend Scalar operator+(const Scalar& x, const Scalar& y);
  friend Scalar operator-(const Scalar& x, const Scalar& y);
  friend Scalar operator*(const Scalar& x, const Scalar& y);
  friend Scalar operator/(const Scalar& x, const Scalar& y);
  friend Scalar operator-(const Scalar& x);
  Scalar& operator+=(const Scalar& y);
  Scalar& operator-=(const Scalar& y);
  Scalar& operator*=(const Scalar& y);

 private:
  mpfr_t value_;
};

Scalar abs(const Scalar& x);
Scalar max(const Scalar& x, const Scalar& y);
Scalar min(const Scalar& x, const Scalar& y);
Scalar sqrt(const Scalar& x);
Scalar exp(const Scalar& x);
Scalar log(const Scalar& x);

// Directed-rounding helpers used by the certified code paths.
Scalar add_rounded(const Scalar& x, const Scalar& y, mpfr_rnd_t rnd);
Scalar sub_rounded(const Scalar& x, const Scalar& y, mpfr_rnd_t rnd);
Scalar mul_rounded(const Scalar& x, const Scalar& y, mpfr_rnd_t rnd);
Scalar div_rounded(const Scalar& x, const Scalar& y, mpfr_rnd_t rnd);

class Interval {
 public:
  explicit Interval(Precision bits = kMinPrecision);  // [0, 0]
  Interval(long value, Precision bits);                // exact integer point
  Interval(Scalar lo, Scalar hi);                      // requires lo <= hi

  static Interval point(const Scalar& value);
  // Rational p/q enclosed outward.
  static Interval rational(long num, long den, Precision bits);
  // Decimal text enclosed outward (e.g. "0.1" becomes a 1-ulp interval).
  static Interval parse(std::string_view text, Precision bits);
  static Interval hull(const Interval& x, const Interval& y);
  static Interval whole(Precision bits);  // [-inf, +inf]

  const Scalar& lo() const { return lo_; }
  const Scalar& hi() const { return hi_; }
  Precision precision() const;

  // Upper bound on hi - lo.
  Scalar width() const;
  Scalar midpoint() const;
  // Upper bound on max |x| over the interval.
  Scalar magnitude() const;
  // Lower bound on min |x| over the interval.
  Scalar mignitude() const;

  bool contains(const Scalar& x) const { return lo_ <= x && x <= hi_; }
  bool contains(long x) const;
  bool contains(const Interval& inner) const { return lo_ <= inner.lo_ && inner.hi_ <= hi_; }
  bool overlaps(const Interval& other) const { return lo_ <= other.hi_ && other.lo_ <= hi_; }
  bool contains_zero() const { return lo_.sign() <= 0 && hi_.sign() >= 0; }
  bool is_point() const { return lo_ == hi_; }
  // Identical endpoints.
  friend bool operator==(const Interval& x, const Interval& y) { return x.lo_ == y.lo_ && x.hi_ == y.hi_; }

  bool certainly_positive() const { return lo_.sign() > 0; }
  bool certainly_negative() const { return hi_.sign() < 0; }
  bool certainly_less(const Interval& y) const { return hi_ < y.lo_; }
  bool certainly_greater(const Interval& y) const { return lo_ > y.hi_; }

  // Same enclosure re-rounded outward at a new precision.
  Interval rounded(Precision bits) const;

  Interval& operator+=(const Interval& y);
  Interval& operator-=(const Interval& y);
  Interval& operator*=(const Interval& y);

 private:
  Scalar lo_;
  Scalar hi_;
};

Interval operator+(const Interval& x, const Interval& y);
Interval operator-(const Interval& x, const Interval& y);
Interval operator*(const Interval& x, const Interval& y);
Interval operator/(const Interval& x, const Interval& y);  // DomainError if 0 in y
Interval operator-(const Interval& x);

enum class ArithOp { Add, Sub, Mul, Div, Neg };
// Dispatching form; `y` is ignored for Neg.
Interval interval_arith(ArithOp op, const Interval& x, const Interval& y);

Interval interval_exp(const Interval& x);
Interval interval_ln(const Interval& x);  // DomainError unless lo > 0
Interval interval_sqrt(const Interval& x);
Interval interval_abs(const Interval& x);
Interval interval_square(const Interval& x);
Interval interval_relu(const Interval& x);
Interval interval_max(const Interval& x, const Interval& y);
Interval interval_pow(const Interval& x, unsigned long k);  // repeated squaring
Interval ln2(Precision bits);

// ---------------------------------------------------------------------------
// Precision escalation

enum class Side { Above, Below, Undecidable };

const char* to_string(Side side);

struct PrecisionPolicy {
  Precision start = 128;
  Precision cap = kDefaultPrecisionCap;

  // Applies ERM_LAB_PRECISION_CAP when set.
  static PrecisionPolicy with_env_cap(Precision start);
};

// A statistic and the threshold band it is compared against, both evaluated
// at one precision. The band is [no_bound, yes_bound]; a point threshold has
// no_bound == yes_bound.
struct ThresholdComparison {
  Interval statistic;
  Interval threshold;
};

struct CertifiedOutcome {
  Side side = Side::Undecidable;
  Interval statistic;
  Interval threshold;
  Precision bits_used = 0;
  int escalations = 0;
};

// Above iff statistic.lo > threshold.hi, Below iff statistic.hi < threshold.lo.
Side classify(const Interval& statistic, const Interval& threshold);

// Reruns `computation` with doubled precision until the statistic strictly
// clears the threshold band or the cap is reached. Ties end as Undecidable.
CertifiedOutcome escalate_precision(const std::function<ThresholdComparison(Precision)>& computation,
                                    const PrecisionPolicy& policy);

}  // namespace ermlab
