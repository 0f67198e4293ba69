#include "ermlab/oracles.hpp"

#include <bit>
#include <limits>
#include <stdexcept>

namespace ermlab {

namespace {

void check_dims(const BitVector& a, const BitVector& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
}

}  // namespace

std::size_t hamming(const BitVector& a, const BitVector& b) {
  check_dims(a, b);
  std::size_t total = 0;
  const auto& x = a.words();
  const auto& y = b.words();
  for (std::size_t k = 0; k < x.size(); ++k) total += static_cast<std::size_t>(std::popcount(x[k] ^ y[k]));
  return total;
}

std::size_t inner_product(const BitVector& a, const BitVector& b) {
  check_dims(a, b);
  std::size_t total = 0;
  const auto& x = a.words();
  const auto& y = b.words();
  for (std::size_t k = 0; k < x.size(); ++k) total += static_cast<std::size_t>(std::popcount(x[k] & y[k]));
  return total;
}

std::size_t complement_product(const BitVector& a, const BitVector& b) {
  check_dims(a, b);
  return a.count() - inner_product(a, b);
}

OracleVerdict solve_ovp(const VectorPairInstance& inst) {
  if (inst.kind != ProblemKind::OVP) throw std::invalid_argument("solve_ovp needs an OVP instance");
  OracleVerdict verdict;
  for (std::size_t i = 0; i < inst.A.size(); ++i) {
    for (std::size_t j = 0; j < inst.B.size(); ++j) {
      if (inner_product(inst.A[i], inst.B[j]) != 0) continue;
      if (!verdict.witness) verdict.witness = {i, j};
      ++verdict.extremal_value;
    }
  }
  verdict.has_pair = verdict.extremal_value > 0;
  return verdict;
}

OracleVerdict solve_bhcp(const VectorPairInstance& inst) {
  if (inst.kind != ProblemKind::BHCP || !inst.t) throw std::invalid_argument("solve_bhcp needs a BHCP instance with t");
  OracleVerdict verdict;
  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::pair<std::size_t, std::size_t> where{0, 0};
  for (std::size_t i = 0; i < inst.A.size(); ++i) {
    for (std::size_t j = 0; j < inst.B.size(); ++j) {
      const std::size_t h = hamming(inst.A[i], inst.B[j]);
      if (h < best) {
        best = h;
        where = {i, j};
      }
    }
  }
  if (inst.A.empty() || inst.B.empty()) return verdict;
  verdict.extremal_value = static_cast<long>(best);
  verdict.has_pair = best < static_cast<std::size_t>(*inst.t);
  if (verdict.has_pair) verdict.witness = where;
  return verdict;
}

OracleVerdict solve(const VectorPairInstance& inst) {
  return inst.kind == ProblemKind::OVP ? solve_ovp(inst) : solve_bhcp(inst);
}

}  // namespace ermlab
