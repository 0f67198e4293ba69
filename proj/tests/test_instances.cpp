#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "ermlab/instances.hpp"
#include "ermlab/oracles.hpp"
#include "support/reference.hpp"

using namespace ermlab;

namespace {

VectorPairInstance ovp(std::vector<std::string> a, std::vector<std::string> b) {
  VectorPairInstance inst;
  inst.kind = ProblemKind::OVP;
  for (const auto& s : a) inst.A.push_back(BitVector::parse(s));
  for (const auto& s : b) inst.B.push_back(BitVector::parse(s));
  inst.d = inst.A.front().dim();
  return inst;
}

std::vector<std::pair<std::size_t, std::size_t>> orthogonal_pairs(const VectorPairInstance& inst) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < inst.n(); ++i)
    for (std::size_t j = 0; j < inst.m(); ++j)
      if (ref::dot_bitwise(inst.A[i], inst.B[j]) == 0) out.emplace_back(i, j);
  return out;
}

}  // namespace

TEST_CASE("bit vectors") {
  const BitVector v = BitVector::parse("0110");
  CHECK(v.dim() == 4);
  CHECK(v.count() == 2);
  CHECK(v.to_string() == "0110");
  CHECK(v.complement().to_string() == "1001");
  CHECK(v.padded(3, 2).to_string() == "0110110");
  BitVector wide(130);
  wide.set(129, true);
  wide.flip(0);
  CHECK(wide.count() == 2);
  CHECK(wide.complement().count() == 128);
  CHECK_THROWS_AS(BitVector::parse("012"), ParseError);
}

TEST_CASE("planted OVP yes with n = 1, d = 2") {
  GenerateParams p;
  p.kind = ProblemKind::OVP;
  p.n = 1;
  p.d = 2;
  p.planted = Planted::Yes;
  p.seed = 3;
  const VectorPairInstance inst = generate(p);
  CHECK(inst.n() == 1);
  CHECK(ref::ovp_count_transposed(inst) == 1);
}

TEST_CASE("planted BHCP no with n = 4, d = 8, t = 3, seed 7") {
  GenerateParams p;
  p.kind = ProblemKind::BHCP;
  p.n = 4;
  p.d = 8;
  p.t = 3;
  p.planted = Planted::No;
  p.seed = 7;
  const VectorPairInstance inst = generate(p);
  CHECK(ref::min_hamming_transposed(inst) >= 3);
  CHECK_FALSE(solve(inst).has_pair);
}

TEST_CASE("planted labels hold across seeds and sizes") {
  for (ProblemKind kind : {ProblemKind::OVP, ProblemKind::BHCP}) {
    for (std::size_t n : {2, 4, 8, 16}) {
      for (Planted planted : {Planted::Yes, Planted::No}) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
          GenerateParams p;
          p.kind = kind;
          p.n = n;
          p.d = default_dimension(n);
          p.t = default_threshold(p.d);
          p.planted = planted;
          p.seed = seed;
          const VectorPairInstance inst = generate(p);
          REQUIRE_NOTHROW(inst.validate());
          const bool yes = kind == ProblemKind::OVP ? ref::ovp_count_transposed(inst) > 0
                                                    : ref::min_hamming_transposed(inst) <= static_cast<std::size_t>(p.t - 1);
          REQUIRE(yes == (planted == Planted::Yes));
        }
      }
    }
  }
}

TEST_CASE("generation is a pure function of the parameters") {
  GenerateParams p;
  p.kind = ProblemKind::BHCP;
  p.n = 12;
  p.d = 16;
  p.t = 4;
  p.seed = 99;
  CHECK(generate(p) == generate(p));
  CHECK(to_json(generate(p)) == to_json(generate(p)));
  p.seed = 100;
  GenerateParams q = p;
  q.seed = 99;
  CHECK_FALSE(generate(p) == generate(q));
}

TEST_CASE("infeasible planted-no fails after bounded retries") {
  GenerateParams p;
  p.kind = ProblemKind::BHCP;
  p.n = 40;
  p.d = 4;
  p.t = 4;
  p.planted = Planted::No;
  CHECK_THROWS_AS(generate(p), GenerationError);
  p.t = 1;
  CHECK_THROWS_AS(generate(p), GenerationError);
  p.d = 1;
  CHECK_THROWS_AS(generate(p), GenerationError);
}

TEST_CASE("normalize pads B to weight d in the lowest appended slots") {
  const VectorPairInstance out = normalize(ovp({"11"}, {"10"}));
  CHECK(out.d == 4);
  CHECK(out.normalized);
  CHECK(out.B[0].to_string() == "1010");
  CHECK(out.A[0].to_string() == "1100");
}

TEST_CASE("normalize rejects duplicate B vectors") {
  CHECK_THROWS_AS(normalize(ovp({"01"}, {"10", "10"})), ValidationError);
}

TEST_CASE("normalize preserves the orthogonal-pair set") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    GenerateParams p;
    p.n = 8;
    p.d = 9;
    p.seed = seed;
    const VectorPairInstance raw = generate(p);
    const VectorPairInstance norm = normalize(raw);
    REQUIRE(orthogonal_pairs(raw) == orthogonal_pairs(norm));
    REQUIRE(solve(raw).extremal_value == solve(norm).extremal_value);
    for (const auto& b : norm.B) REQUIRE(b.count() == raw.d);
  }
}

TEST_CASE("defaults") {
  CHECK(default_dimension(2) == 4);
  CHECK(default_dimension(16) == 16);
  CHECK(default_dimension(24) == 22);
  CHECK(default_threshold(4) == 2);
  CHECK(default_threshold(22) == 5);
}

TEST_CASE("JSON round trip is byte identical") {
  GenerateParams p;
  p.kind = ProblemKind::BHCP;
  p.n = 6;
  p.d = 9;
  p.t = 3;
  p.seed = 5;
  const VectorPairInstance inst = generate(p);
  const std::string text = to_json(inst);
  CHECK(from_json(text) == inst);
  CHECK(to_json(from_json(text)) == text);
  CHECK(digest(from_json(text)) == digest(inst));

  const auto path = std::filesystem::temp_directory_path() / "ermlab_instance_roundtrip.json";
  write_instance(inst, path.string());
  CHECK(read_instance(path.string()) == inst);
  std::filesystem::remove(path);
}

TEST_CASE("parse errors name the field") {
  const std::string bad_bit = R"({"kind":"ovp","d":2,"A":["12"],"B":["01"]})";
  try {
    from_json(bad_bit);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("A[0]") != std::string::npos);
  }
  CHECK_THROWS_AS(from_json(R"({"kind":"ovp","d":3,"A":["10"],"B":["01"]})"), ValidationError);
  CHECK_THROWS_AS(from_json(R"({"kind":"ovp","A":["10"],"B":["01"]})"), ParseError);
  CHECK_THROWS_AS(from_json("not json"), ParseError);
  CHECK_THROWS_AS(from_json(R"({"kind":"tsp","d":2,"A":["10"],"B":["01"]})"), ParseError);
  CHECK_THROWS_AS(read_instance("/nonexistent/dir/x.json"), IoError);
}
