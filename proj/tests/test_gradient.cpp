#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ermlab/nn.hpp"
#include "ermlab/oracles.hpp"
#include "support/reference.hpp"

using namespace ermlab;

namespace {

VectorPairInstance ovp(std::size_t n, std::uint64_t seed, Planted planted) {
  GenerateParams p;
  p.kind = ProblemKind::OVP;
  p.n = n;
  p.d = default_dimension(n);
  p.seed = seed;
  p.planted = planted;
  return generate(p);
}

VectorPairInstance single_pair() {
  VectorPairInstance inst;
  inst.A = {BitVector::parse("1100"), BitVector::parse("0110")};
  inst.B = {BitVector::parse("0011"), BitVector::parse("0101")};
  inst.d = 4;
  return inst;
}

}  // namespace

TEST_CASE("relu gadget counts orthogonal pairs exactly") {
  const GradientReductionDetail yes = gradient_reduction(single_pair(), Gadget::Relu, {});
  REQUIRE(yes.count.has_value());
  CHECK(*yes.count == 1);
  CHECK(yes.verdict.answer == Answer::Yes);

  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 4 + seed % 4 * 4;
    const VectorPairInstance inst = ovp(n, seed, seed % 2 ? Planted::No : Planted::Yes);
    for (const char* loss : {"logistic", "hinge"}) {
      ReductionOptions opts;
      opts.gradient_loss = loss;
      const GradientReductionDetail d = gradient_reduction(inst, Gadget::Relu, opts);
      REQUIRE(d.count.has_value());
      REQUIRE(*d.count == ref::ovp_count_transposed(inst));
      REQUIRE(d.verdict.answer == (*d.count > 0 ? Answer::Yes : Answer::No));
    }
  }
}

TEST_CASE("gradient entries follow the direct double loop") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const VectorPairInstance inst = ovp(6, seed, Planted::Random);
    for (Gadget gadget : {Gadget::Relu, Gadget::Sigmoid}) {
      const NiceLoss loss = make_loss(LossKind::Logistic);
      const GradientResult g = loss_gradient_at_zero(inst, loss, gadget, 256);
      Interval total(256);
      for (std::size_t j = 0; j < inst.m(); ++j) {
        Interval col(256);
        for (const auto& a : inst.A) col += gadget_value(gadget, ref::dot_bitwise(a, inst.B[j]), inst.n(), 256);
        REQUIRE(g.gradient[j].overlaps(loss.derivative_at_zero(256) * col));
        total += col;
      }
      REQUIRE(g.entry_sum.overlaps(loss.derivative_at_zero(256) * total));
    }
  }
}

TEST_CASE("sigmoid gadget magnitudes separate YES from NO") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 5 + seed % 3 * 5;
    const Planted planted = seed % 2 ? Planted::No : Planted::Yes;
    const VectorPairInstance inst = ovp(n, seed, planted);
    const GradientReductionDetail d = gradient_reduction(inst, Gadget::Sigmoid, {});
    const Interval mag = interval_abs(d.gradient.entry_sum);
    const Interval lp = interval_abs(d.l_prime);
    const Precision bits = lp.precision();
    if (planted == Planted::Yes) {
      REQUIRE(mag.lo() >= (lp * Interval::rational(1, 2, bits)).hi());
      REQUIRE(d.verdict.answer == Answer::Yes);
    } else {
      REQUIRE(mag.hi() <= (lp / Interval(static_cast<long>(n), bits)).lo());
      REQUIRE(d.verdict.answer == Answer::No);
    }
  }
}

TEST_CASE("analytic gradient matches central differences") {
  const Precision bits = 256;
  Scalar step(1, bits);
  mpfr_div_2ui(step.raw(), step.raw(), bits / 4, MPFR_RNDN);
  const Interval hs = Interval::point(step);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const VectorPairInstance inst = ovp(5, seed, seed % 2 ? Planted::No : Planted::Yes);
    for (Gadget gadget : {Gadget::Relu, Gadget::Sigmoid}) {
      const NiceLoss loss = make_loss(LossKind::Logistic);
      const GradientResult g = loss_gradient_at_zero(inst, loss, gadget, bits);
      for (std::size_t j = 0; j < inst.m(); ++j) {
        auto f = [&](const Interval& x) {
          IntervalVector alpha(inst.m(), Interval(bits));
          alpha[j] = x;
          return gadget_loss(inst, loss, gadget, alpha, bits);
        };
        const Interval fd = ref::central_difference(f, hs);
        // Truncation error h^2 |f'''| / 6 with |f'''| <= n^4 for these gadgets.
        const Interval slack = interval_square(hs) * Interval(625, bits);
        REQUIRE(interval_abs(fd - g.gradient[j]).hi() <= slack.hi());
        REQUIRE(fd.width() < Scalar::from_double(1e-30, bits));
      }
    }
  }
}
