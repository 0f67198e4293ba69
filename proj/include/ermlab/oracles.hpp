#pragma once

// Brute-force deciders for OVP and BHCP.

#include <cstddef>
#include <optional>
#include <utility>

#include "ermlab/instances.hpp"

namespace ermlab {

struct OracleVerdict {
  bool has_pair = false;
  std::optional<std::pair<std::size_t, std::size_t>> witness;
  // BHCP: minimum Hamming distance. OVP: number of orthogonal pairs.
  long extremal_value = 0;
};

std::size_t hamming(const BitVector& a, const BitVector& b);
std::size_t inner_product(const BitVector& a, const BitVector& b);
// Number of coordinates where both a and the complement of b are 1.
std::size_t complement_product(const BitVector& a, const BitVector& b);

OracleVerdict solve_ovp(const VectorPairInstance& inst);
OracleVerdict solve_bhcp(const VectorPairInstance& inst);
// Dispatches on inst.kind.
OracleVerdict solve(const VectorPairInstance& inst);

}  // namespace ermlab
