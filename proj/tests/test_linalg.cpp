#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ermlab/linalg.hpp"
#include "ermlab/simplex.hpp"
#include "support/reference.hpp"

using namespace ermlab;

namespace {

// Unit diagonal plus off-diagonal entries in [-spread, spread].
ScalarMatrix near_identity(std::size_t n, double spread, std::mt19937_64& rng, Precision bits) {
  std::uniform_real_distribution<double> u(-spread, spread);
  ScalarMatrix m(n, n, Scalar(bits));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = i == j ? Scalar(1, bits) : Scalar::from_double(u(rng), bits);
  return m;
}

}  // namespace

TEST_CASE("certified inverse encloses an independent inverse") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const ScalarMatrix a = near_identity(n, 0.6 / static_cast<double>(n), rng, 256);
    const IntervalMatrix enclosure = certified_inverse(to_interval(a));
    const ScalarMatrix oracle = ref::unpivoted_inverse(a);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        // The oracle itself carries rounding error far below the enclosure widths used here.
        const Interval fuzzed(sub_rounded(enclosure(i, j).lo(), Scalar::from_double(1e-60, 256), MPFR_RNDD),
                              add_rounded(enclosure(i, j).hi(), Scalar::from_double(1e-60, 256), MPFR_RNDU));
        REQUIRE(fuzzed.contains(oracle(i, j)));
        REQUIRE(enclosure(i, j).width() < Scalar::from_double(1e-50, 256));
      }
    }
  }
}

TEST_CASE("certified inverse rejects a singular matrix") {
  IntervalMatrix a(2, 2, Interval(1, 128));
  CHECK_THROWS_AS(certified_inverse(a), SingularMatrixError);
}

TEST_CASE("varah margin and infinity norm") {
  IntervalMatrix a = identity_matrix(3, 128);
  a(0, 1) = Interval::rational(1, 4, 128);
  a(2, 0) = Interval::rational(-1, 2, 128);
  CHECK(std::abs(varah_margin(a).to_double() - 0.5) < 1e-30);
  CHECK(std::abs(norm_inf(a).to_double() - 1.5) < 1e-30);
  a(1, 0) = Interval(2, 128);
  CHECK(varah_margin(a).sign() <= 0);
}

TEST_CASE("cholesky solve reproduces the right-hand side") {
  std::mt19937_64 rng(8);
  ScalarMatrix a = near_identity(5, 0.1, rng, 192);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i);
  const ScalarVector rhs = {Scalar(1, 192), Scalar(2, 192), Scalar(-1, 192), Scalar(0, 192), Scalar(3, 192)};
  const ScalarVector x = cholesky_solve(cholesky(a), rhs);
  for (std::size_t i = 0; i < 5; ++i) {
    Scalar r(192);
    for (std::size_t j = 0; j < 5; ++j) r += a(i, j) * x[j];
    REQUIRE(std::abs((r - rhs[i]).to_double()) < 1e-50);
  }
  ScalarMatrix indefinite(2, 2, Scalar(1, 64));
  indefinite(1, 1) = Scalar(-1, 64);
  CHECK_THROWS_AS(cholesky(indefinite), SingularMatrixError);
}

TEST_CASE("matrix shape mismatch") {
  CHECK_THROWS_AS(identity_matrix(2, 64) * identity_matrix(3, 64), std::invalid_argument);
}

TEST_CASE("bounded simplex on a two-variable LP") {
  // max 3 x1 + 2 x2 with x1 + x2 <= 4, x1 + 3 x2 <= 9, x1 <= 3, x2 <= 10.
  const Precision bits = 128;
  BoundedLp lp;
  lp.e = ScalarMatrix(2, 4, Scalar(bits));
  lp.e(0, 0) = Scalar(1, bits);
  lp.e(0, 1) = Scalar(1, bits);
  lp.e(0, 2) = Scalar(1, bits);
  lp.e(1, 0) = Scalar(1, bits);
  lp.e(1, 1) = Scalar(3, bits);
  lp.e(1, 3) = Scalar(1, bits);
  lp.b = {Scalar(4, bits), Scalar(9, bits)};
  lp.c = {Scalar(3, bits), Scalar(2, bits), Scalar(bits), Scalar(bits)};
  lp.upper = {Scalar(3, bits), Scalar(10, bits), Scalar(100, bits), Scalar(100, bits)};
  lp.basis = {2, 3};
  const LpResult r = maximize_bounded(lp);
  REQUIRE(r.optimal);
  CHECK(r.value == Scalar(11, bits));
  CHECK(r.x[0] == Scalar(3, bits));
  CHECK(r.x[1] == Scalar(1, bits));
  CHECK(r.x[3] == Scalar(3, bits));
  CHECK(r.multipliers[0] == Scalar(2, bits));
  CHECK(r.multipliers[1].is_zero());
}
