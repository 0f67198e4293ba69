#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ermlab/kpca.hpp"
#include "ermlab/oracles.hpp"
#include "support/reference.hpp"

using namespace ermlab;

namespace {

VectorPairInstance bhcp(std::size_t n, std::uint64_t seed, Planted planted) {
  GenerateParams p;
  p.kind = ProblemKind::BHCP;
  p.n = n;
  p.d = default_dimension(n);
  p.t = default_threshold(p.d);
  p.seed = seed;
  p.planted = planted;
  return generate(p);
}

}  // namespace

TEST_CASE("centered trace of trivial matrices") {
  CHECK(centered_trace(identity_matrix(1, 128)) == Interval(0, 128));
  CHECK(centered_trace_direct(identity_matrix(1, 128)).contains(Scalar(0, 128)));
  CHECK(centered_trace(identity_matrix(5, 128)) == Interval(4, 128));
}

TEST_CASE("centered trace matches the explicit product and the eigenvalue sum") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const VectorPairInstance inst = bhcp(6, seed, Planted::Random);
    std::vector<BitVector> all = inst.A;
    all.insert(all.end(), inst.B.begin(), inst.B.end());
    const KernelMatrix k = gram(all, KernelParams::standard(6, "0.5", 256));
    const Interval fast = centered_trace(k.entries);
    REQUIRE(fast.overlaps(centered_trace_direct(k.entries)));

    const std::size_t n = all.size();
    ScalarMatrix p(n, n, Scalar(256));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        p(i, j) = Scalar(i == j ? 1 : 0, 256) - Scalar(1, 256) / Scalar(static_cast<long>(n), 256);
    const ScalarMatrix km = midpoints(k.entries);
    ScalarMatrix centered(n, n, Scalar(256));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) centered(i, j) += p(i, a) * km(a, b) * p(b, j);
    Scalar eigen_sum(256);
    for (const auto& e : ref::jacobi_eigenvalues(centered)) eigen_sum += e;
    REQUIRE(std::abs((eigen_sum - fast.midpoint()).to_double()) < 1e-40);
  }
}

TEST_CASE("case separation at the default bandwidth") {
  for (std::size_t n : {2, 4, 8, 16, 24}) {
    const KernelParams kp = KernelParams::standard(n, "100", 2048);
    for (std::size_t t = 2; t < 6; ++t) {
      const Interval ratio = interval_pow(Interval(static_cast<long>(n), 2048), 10) * kp.decay(t);
      REQUIRE(kp.decay(t - 1).lo() >= ratio.hi());
    }
  }
}

TEST_CASE("KPCA verdicts agree with the oracle") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t n = seed < 5 ? 4 : 8;
    const VectorPairInstance inst = bhcp(n, seed, seed % 2 ? Planted::No : Planted::Yes);
    const KpcaReductionDetail d = kpca_reduction(inst, {});
    const bool yes = solve(inst).has_pair;
    REQUIRE(d.verdict.answer == (yes ? Answer::Yes : Answer::No));
    if (yes) {
      REQUIRE(d.s.lo() >= d.yes_bound.lo());
    } else {
      REQUIRE(d.s.hi() <= d.no_bound.hi());
    }
  }
}

TEST_CASE("KPCA refuses an unseparated bandwidth") {
  ReductionOptions opts;
  opts.c_multiplier = "1";
  CHECK_THROWS_AS(kpca_distinguisher(bhcp(4, 1, Planted::No), opts), ParameterError);
}
