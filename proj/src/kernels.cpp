#include "ermlab/kernels.hpp"

#include <stdexcept>

#include "ermlab/oracles.hpp"

namespace ermlab {

KernelParams KernelParams::standard(std::size_t n_ref, const std::string& multiplier, Precision bits) {
  if (n_ref < 2) throw DomainError("kernel reference size must be at least 2 so that ln(n_ref) > 0");
  KernelParams p;
  p.multiplier = multiplier;
  p.n_ref = n_ref;
  Interval mult = Interval::parse(multiplier, bits);
  p.C = mult * interval_ln(Interval(static_cast<long>(n_ref), bits));
  if (!p.C.certainly_positive()) throw DomainError("kernel parameter C must be positive");
  return p;
}

KernelParams KernelParams::with_C(const Interval& C) {
  if (!C.certainly_positive()) throw DomainError("kernel parameter C must be positive");
  KernelParams p;
  p.C = C;
  p.multiplier = "";
  p.n_ref = 0;
  return p;
}

Interval KernelParams::decay(std::size_t h) const {
  if (h == 0) return Interval(1, precision());
  return interval_exp(-(C * Interval(static_cast<long>(h), precision())));
}

DecayTable::DecayTable(const KernelParams& params, std::size_t max_h) {
  values_.reserve(max_h + 1);
  for (std::size_t h = 0; h <= max_h; ++h) values_.push_back(params.decay(h));
}

const Interval& DecayTable::operator()(std::size_t h) const {
  if (h >= values_.size()) throw std::out_of_range("decay table index");
  return values_[h];
}

Interval gaussian_kernel(const BitVector& x, const BitVector& y, const KernelParams& params) {
  return params.decay(hamming(x, y));
}

KernelMatrix gram(const std::vector<BitVector>& rows, const std::vector<BitVector>& cols, const KernelParams& params) {
  std::size_t max_h = 0;
  for (const auto& v : rows) max_h = std::max(max_h, v.dim());
  for (const auto& v : cols) max_h = std::max(max_h, v.dim());
  const DecayTable table(params, max_h);
  KernelMatrix k;
  k.entries = IntervalMatrix(rows.size(), cols.size(), Interval(params.precision()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) k.entries(i, j) = table(hamming(rows[i], cols[j]));
  return k;
}

KernelMatrix gram(const std::vector<BitVector>& points, const KernelParams& params) {
  std::size_t max_h = 0;
  for (const auto& v : points) max_h = std::max(max_h, v.dim());
  const DecayTable table(params, max_h);
  const std::size_t n = points.size();
  KernelMatrix k;
  k.symmetric = true;
  k.entries = IntervalMatrix(n, n, Interval(params.precision()));
  for (std::size_t i = 0; i < n; ++i) {
    k.entries(i, i) = Interval(1, params.precision());
    for (std::size_t j = i + 1; j < n; ++j) {
      k.entries(i, j) = table(hamming(points[i], points[j]));
      k.entries(j, i) = k.entries(i, j);
    }
  }
  return k;
}

Interval entry_sum(const IntervalMatrix& m) {
  Interval acc(m.rows() * m.cols() == 0 ? kMinPrecision : m(0, 0).precision());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j);
  return acc;
}

bool almost_identity_check(const IntervalMatrix& m, const Interval& eps) {
  if (!m.square()) throw std::invalid_argument("almost_identity_check needs a square matrix");
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (i == j) {
        if (!m(i, i).contains(1L)) return false;
      } else if (m(i, j).magnitude() > eps.hi()) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace ermlab
