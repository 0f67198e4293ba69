#pragma once

// Gaussian kernel k(x, y) = exp(-C * hamming(x, y)) on binary vectors, with
// C = multiplier * ln(n_ref).

#include <cstddef>
#include <string>
#include <vector>

#include "ermlab/instances.hpp"
#include "ermlab/linalg.hpp"
#include "ermlab/precision.hpp"

namespace ermlab {

struct KernelParams {
  Interval C;
  std::string multiplier = "100";  // decimal text, kept for reports
  std::size_t n_ref = 2;

  // C = multiplier * ln(n_ref) enclosed at `bits`. Requires C > 0.
  static KernelParams standard(std::size_t n_ref, const std::string& multiplier, Precision bits);
  // Explicit bandwidth (tests, degenerate studies).
  static KernelParams with_C(const Interval& C);

  Precision precision() const { return C.precision(); }
  // exp(-C * h) for integer h >= 0.
  Interval decay(std::size_t h) const;
};

// Cache of exp(-C h) for h = 0..max_h.
class DecayTable {
 public:
  DecayTable(const KernelParams& params, std::size_t max_h);
  const Interval& operator()(std::size_t h) const;
  std::size_t max_h() const { return values_.size() - 1; }

 private:
  std::vector<Interval> values_;
};

struct KernelMatrix {
  IntervalMatrix entries;
  bool symmetric = false;

  std::size_t rows() const { return entries.rows(); }
  std::size_t cols() const { return entries.cols(); }
  const Interval& operator()(std::size_t i, std::size_t j) const { return entries(i, j); }
};

Interval gaussian_kernel(const BitVector& x, const BitVector& y, const KernelParams& params);

KernelMatrix gram(const std::vector<BitVector>& rows, const std::vector<BitVector>& cols, const KernelParams& params);
// Self-Gram, marked symmetric; diagonal exactly 1.
KernelMatrix gram(const std::vector<BitVector>& points, const KernelParams& params);

Interval entry_sum(const IntervalMatrix& m);
inline Interval entry_sum(const KernelMatrix& k) { return entry_sum(k.entries); }

// Diagonal contains 1 and every off-diagonal magnitude is at most eps.hi.
bool almost_identity_check(const IntervalMatrix& m, const Interval& eps);
inline bool almost_identity_check(const KernelMatrix& k, const Interval& eps) {
  return almost_identity_check(k.entries, eps);
}

}  // namespace ermlab
