#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ermlab/nn.hpp"
#include "ermlab/oracles.hpp"
#include "support/reference.hpp"

using namespace ermlab;

namespace {

VectorPairInstance normalized_ovp(std::size_t n, std::uint64_t seed, Planted planted) {
  GenerateParams p;
  p.kind = ProblemKind::OVP;
  p.n = n;
  p.d = default_dimension(n);
  p.seed = seed;
  p.planted = planted;
  return normalize(generate(p));
}

Interval n_pow_neg(long n, long T, Precision bits) {
  return Interval(1, bits) / interval_pow(Interval(n, bits), static_cast<unsigned long>(T));
}

ErmMatrixInstance tiny_erm(IntervalMatrix m, std::vector<int> labels, LossKind kind) {
  ErmMatrixInstance erm;
  erm.n = m.cols();
  erm.M = std::move(m);
  erm.labels = std::move(labels);
  erm.loss = make_loss(kind);
  return erm;
}

}  // namespace

TEST_CASE("relu thresholds for T = 2, n = 10") {
  const NiceActivation a = activation_thresholds(ActivationKind::Relu, 2, 10, 128);
  CHECK(a.v0 == Interval(1, 128));
  CHECK(a.v1.overlaps(Interval::rational(1, 100, 128)));
  CHECK(a.v2.overlaps(Interval::rational(-98, 100, 128)));
  CHECK(a.v1.width() < Scalar::from_double(1e-35, 128));
}

TEST_CASE("threshold ordering, midpoint identity and S(v1) = n^-T") {
  for (ActivationKind kind : {ActivationKind::Relu, ActivationKind::Sigmoid}) {
    for (long n : {2L, 4L, 10L, 24L}) {
      for (long T : {1L, 2L, 8L, 1000L}) {
        const Precision bits = static_cast<Precision>(T * 5) + 256;
        const NiceActivation a = activation_thresholds(kind, T, static_cast<std::size_t>(n), bits);
        REQUIRE(a.v0.certainly_greater(a.v1));
        REQUIRE(a.v1.certainly_greater(a.v2));
        REQUIRE(((a.v0 + a.v2) * Interval::rational(1, 2, bits)).overlaps(a.v1));
        const Interval s1 = a.apply(a.v1);
        const Interval target = n_pow_neg(n, T, bits);
        REQUIRE(s1.overlaps(target));
        REQUIRE((s1.width() / target.lo()).to_double() < 1e-30);
        // S(v0) is order one and S(v2) is at most n^-T times a small factor.
        REQUIRE(a.apply(a.v0).lo() >= Scalar::from_double(0.5, bits));
        REQUIRE(a.apply(a.v2).hi() <= target.hi());
      }
    }
  }
  CHECK_THROWS_AS(activation_thresholds(ActivationKind::Relu, 0, 4, 128), ParameterError);
  CHECK_THROWS_AS(activation_thresholds(ActivationKind::Relu, 2, 1, 128), ParameterError);
}

TEST_CASE("activations are non-decreasing and non-negative") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-40, 40);
  for (ActivationKind kind : {ActivationKind::Relu, ActivationKind::Sigmoid}) {
    const NiceActivation a = activation_thresholds(kind, 4, 8, 256);
    for (int trial = 0; trial < 200; ++trial) {
      double x = u(rng), y = u(rng);
      if (x > y) std::swap(x, y);
      const Interval sx = a.apply(Interval::point(Scalar::from_double(x, 256)));
      const Interval sy = a.apply(Interval::point(Scalar::from_double(y, 256)));
      REQUIRE(sx.lo().sign() >= 0);
      REQUIRE(sx.lo() <= sy.hi());
    }
  }
}

TEST_CASE("layer matrix entries and labels") {
  const VectorPairInstance inst = normalized_ovp(6, 3, Planted::Yes);
  const std::size_t n = inst.n();
  const Precision bits = 512;
  for (ActivationKind kind : {ActivationKind::Relu, ActivationKind::Sigmoid}) {
    const NiceActivation act = activation_thresholds(kind, 8, n, bits);
    const ErmMatrixInstance erm = build_layer_matrix(inst, make_loss(LossKind::Hinge), act);
    REQUIRE(erm.M.rows() == 3 * n);
    REQUIRE(erm.M.cols() == n);
    for (std::size_t i = 0; i < 3 * n; ++i) REQUIRE(erm.labels[i] == (i < 2 * n ? 1 : -1));
    const Interval s0 = act.apply(act.v0);
    const Interval s1 = act.apply(act.v1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (ref::dot_bitwise(inst.A[i], inst.B[j]) == 0) {
          REQUIRE(erm.M(i, j).overlaps(s0));
        } else if (kind == ActivationKind::Relu) {
          REQUIRE(erm.M(i, j) == Interval(bits));
        } else {
          REQUIRE(erm.M(i, j).hi() <= s1.hi());
        }
        REQUIRE(erm.M(n + i, j) == erm.M(2 * n + i, j));
      }
      REQUIRE(erm.M(n + i, i).overlaps(n_pow_neg(static_cast<long>(n), 8, bits)));
    }
  }
}

TEST_CASE("layer matrix needs a normalized OVP instance") {
  GenerateParams p;
  p.n = 4;
  p.d = 4;
  const VectorPairInstance raw = generate(p);
  const NiceActivation act = activation_thresholds(ActivationKind::Relu, 4, 4, 128);
  CHECK_THROWS_AS(build_layer_matrix(raw, make_loss(LossKind::Hinge), act), ParameterError);
}

TEST_CASE("matrix entries equal the network's activations") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const VectorPairInstance inst = normalized_ovp(5, seed, Planted::Random);
    for (ActivationKind kind : {ActivationKind::Relu, ActivationKind::Sigmoid}) {
      const NiceActivation act = activation_thresholds(kind, 6, inst.n(), 256);
      const ErmMatrixInstance erm = build_layer_matrix(inst, make_loss(LossKind::Logistic), act);
      REQUIRE(erm.examples.size() == erm.M.rows());
      REQUIRE(erm.weights.size() == erm.M.cols());
      for (std::size_t i = 0; i < erm.M.rows(); ++i)
        for (std::size_t j = 0; j < erm.M.cols(); ++j)
          REQUIRE(act.apply(dot(erm.examples[i], erm.weights[j])).overlaps(erm.M(i, j)));
    }
  }
}

TEST_CASE("zero matrix has value 3n l(0) everywhere") {
  const std::size_t n = 2;
  for (LossKind kind : {LossKind::Logistic, LossKind::Hinge}) {
    const ErmMatrixInstance erm = tiny_erm(IntervalMatrix(3 * n, n, Interval(128)), {1, 1, 1, 1, -1, -1}, kind);
    const ErmSolution sol = solve_final_layer(erm, Interval::rational(1, 100, 128));
    CHECK(sol.objective.overlaps(Interval(6, 128)));
    CHECK(sol.lower_bound.lo() <= Scalar(6, 128));
    const ScalarVector other = {Scalar(5, 128), Scalar(-3, 128)};
    CHECK(erm_objective(erm, other).overlaps(Interval(6, 128)));
  }
}

TEST_CASE("one-by-one hinge problem reaches zero") {
  const ErmMatrixInstance erm = tiny_erm(IntervalMatrix(1, 1, Interval(1, 128)), {1}, LossKind::Hinge);
  const ErmSolution sol = solve_final_layer(erm, Interval::rational(1, 100, 128));
  CHECK(sol.objective.hi() <= Scalar::from_double(1e-30, 128));
  CHECK(sol.alpha[0] >= Scalar::from_double(1 - 1e-30, 128));
}

TEST_CASE("objective is midpoint convex along random segments") {
  const VectorPairInstance inst = normalized_ovp(4, 11, Planted::Random);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-20, 20);
  int segments = 0;
  for (LossKind loss : {LossKind::Logistic, LossKind::Hinge}) {
    for (ActivationKind kind : {ActivationKind::Relu, ActivationKind::Sigmoid}) {
      const Precision bits = 256;
      const ErmMatrixInstance erm = build_layer_matrix(inst, make_loss(loss), activation_thresholds(kind, 4, 4, bits));
      for (int trial = 0; trial < 25; ++trial, ++segments) {
        IntervalVector x, y, mid;
        for (std::size_t j = 0; j < inst.n(); ++j) {
          x.push_back(Interval::point(Scalar::from_double(u(rng) * 300, bits)));
          y.push_back(Interval::point(Scalar::from_double(u(rng) * 300, bits)));
          mid.push_back((x.back() + y.back()) * Interval::rational(1, 2, bits));
        }
        const Interval chord = (erm_objective(erm, x) + erm_objective(erm, y)) * Interval::rational(1, 2, bits);
        REQUIRE(erm_objective(erm, mid).lo() <= chord.hi());
      }
    }
  }
  CHECK(segments == 100);
}

TEST_CASE("huge weights make the objective explode on NO instances") {
  for (std::uint64_t seed = 1; seed < 6; seed += 2) {
    const VectorPairInstance inst = normalized_ovp(4, seed, Planted::No);
    const long n = static_cast<long>(inst.n());
    for (LossKind loss : {LossKind::Hinge, LossKind::Logistic}) {
      const Precision bits = 256;
      const ActivationKind kind = loss == LossKind::Hinge ? ActivationKind::Relu : ActivationKind::Sigmoid;
      const ErmMatrixInstance erm = build_layer_matrix(inst, make_loss(loss), activation_thresholds(kind, 1000, 4, bits));
      const Scalar huge = interval_pow(Interval(n, bits), 1000000).hi();
      for (std::size_t j = 0; j < inst.n(); ++j) {
        for (int sign : {1, -1}) {
          ScalarVector alpha(inst.n(), Scalar(1, bits));
          alpha[j] = sign > 0 ? huge : -huge;
          REQUIRE(erm_objective(erm, alpha).lo() > Scalar(4 * n, bits));
        }
      }
    }
  }
}

TEST_CASE("certificate and lower bound with the default exponent") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const std::size_t n = seed < 4 ? 4 : 8;
    const Planted planted = seed % 2 ? Planted::No : Planted::Yes;
    const VectorPairInstance inst = normalized_ovp(n, seed, planted);
    for (LossKind loss : {LossKind::Hinge, LossKind::Logistic}) {
      const NnReductionDetail d = nn_reduction(inst, loss, {});
      const Precision bits = d.l0.precision();
      const Interval three_n(3 * static_cast<long>(n), bits);
      const Interval tenth = d.l0 / Interval(10, bits);
      if (planted == Planted::Yes) {
        REQUIRE(d.certificate_value.hi() <= ((three_n - Interval(1, bits)) * d.l0 + tenth).hi());
        REQUIRE(d.verdict.answer == Answer::Yes);
      } else {
        REQUIRE(d.lower_bound.lo() >= (three_n * d.l0 - tenth).lo());
        REQUIRE(d.certificate_value.lo() >= d.theta.hi());
        REQUIRE(d.verdict.answer == Answer::No);
      }
      REQUIRE(d.lower_bound.lo() <= d.optimizer_value.hi());
    }
  }
}

TEST_CASE("both activations work with both losses") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const VectorPairInstance inst = normalized_ovp(4, seed, seed % 2 ? Planted::No : Planted::Yes);
    const Answer expected = solve(inst).has_pair ? Answer::Yes : Answer::No;
    for (LossKind loss : {LossKind::Hinge, LossKind::Logistic}) {
      for (const char* act : {"relu", "sigmoid"}) {
        ReductionOptions opts;
        opts.activation = act;
        REQUIRE(nn_distinguisher(inst, loss, opts).answer == expected);
      }
    }
  }
}

TEST_CASE("loss functions") {
  const Precision bits = 200;
  const NiceLoss hinge = make_loss(LossKind::Hinge);
  const NiceLoss logistic = make_loss(LossKind::Logistic);
  CHECK(hinge.value(Interval(0, bits)) == Interval(1, bits));
  CHECK(hinge.value(Interval(3, bits)) == Interval(0, bits));
  CHECK(logistic.value(Interval(0, bits)).overlaps(Interval(1, bits)));
  CHECK(std::abs(logistic.derivative_at_zero(bits).midpoint().to_double() + 0.7213475204444817) < 1e-15);
  // Large negative margins stay finite and grow linearly.
  const Interval far = logistic.value(Interval(-100000, bits));
  CHECK(std::abs(far.midpoint().to_double() - 100000 / std::log(2.0)) < 1e-6);
  // Fenchel-Young: l(z) + l*(u) >= u z on a grid.
  for (int k = 0; k <= 10; ++k) {
    const Scalar u = (logistic.conjugate_floor(bits) * Interval::rational(k, 10, bits)).midpoint();
    for (int z = -5; z <= 5; ++z) {
      const Interval lhs = logistic.value(Interval(z, bits)) - logistic.neg_conjugate(u);
      REQUIRE(lhs.hi() >= (Interval::point(u) * Interval(z, bits)).lo());
    }
  }
  CHECK_THROWS_AS(make_loss(LossKind::Hinge, 0), ParameterError);
  CHECK_THROWS_AS(hinge.neg_conjugate(Scalar(1, bits)), DomainError);
}
