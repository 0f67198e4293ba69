#pragma once

// Dense bounded-variable primal simplex over extended-precision scalars:
// maximize c^T x subject to E x = b, 0 <= x <= upper, started from a given
// feasible basis. Bland's rule guards against cycling on degenerate vertices.

#include <cstddef>
#include <vector>

#include "ermlab/linalg.hpp"

namespace ermlab {

struct BoundedLp {
  ScalarMatrix e;  // m x N
  ScalarVector b;  // m
  ScalarVector c;  // N
  ScalarVector upper;  // N, lower bounds are 0
  std::vector<std::size_t> basis;  // m column indices; nonbasic columns start at 0
};

struct LpResult {
  ScalarVector x;
  ScalarVector multipliers;  // y with B^T y = c_B at the final basis
  Scalar value;
  long pivots = 0;
  bool optimal = false;
};

LpResult maximize_bounded(const BoundedLp& lp, long max_pivots = 20000);

}  // namespace ermlab
