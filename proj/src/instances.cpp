#include "ermlab/instances.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ermlab/oracles.hpp"

namespace ermlab {

namespace {

std::size_t word_count(std::size_t dim) { return (dim + 63) / 64; }

}  // namespace

BitVector::BitVector(std::size_t dim) : dim_(dim), words_(word_count(dim), 0) {}

BitVector BitVector::parse(std::string_view bits) {
  BitVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      v.set(i, true);
    } else if (bits[i] != '0') {
      throw ParseError("bit character '" + std::string(1, bits[i]) + "' at position " + std::to_string(i));
    }
  }
  return v;
}

void BitVector::set(std::size_t i, bool value) {
  const std::uint64_t mask = std::uint64_t{1} << (i & 63U);
  if (value) {
    words_[i >> 6] |= mask;
  } else {
    words_[i >> 6] &= ~mask;
  }
}

std::size_t BitVector::count() const {
  std::size_t total = 0;
  for (std::uint64_t w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

BitVector BitVector::complement() const {
  BitVector out(dim_);
  for (std::size_t k = 0; k < words_.size(); ++k) out.words_[k] = ~words_[k];
  if (dim_ % 64 != 0 && !out.words_.empty()) out.words_.back() &= (std::uint64_t{1} << (dim_ % 64)) - 1;
  return out;
}

BitVector BitVector::padded(std::size_t extra, std::size_t ones) const {
  BitVector out(dim_ + extra);
  for (std::size_t i = 0; i < dim_; ++i) {
    if (get(i)) out.set(i, true);
  }
  for (std::size_t i = 0; i < ones && i < extra; ++i) out.set(dim_ + i, true);
  return out;
}

std::string BitVector::to_string() const {
  std::string s(dim_, '0');
  for (std::size_t i = 0; i < dim_; ++i) {
    if (get(i)) s[i] = '1';
  }
  return s;
}

bool operator<(const BitVector& x, const BitVector& y) {
  if (x.dim_ != y.dim_) return x.dim_ < y.dim_;
  return x.words_ < y.words_;
}

const char* to_string(ProblemKind kind) { return kind == ProblemKind::OVP ? "OVP" : "BHCP"; }

ProblemKind parse_kind(std::string_view text) {
  if (text == "OVP" || text == "ovp") return ProblemKind::OVP;
  if (text == "BHCP" || text == "bhcp") return ProblemKind::BHCP;
  throw ParseError("kind: unknown problem kind '" + std::string(text) + "'");
}

const char* to_string(Planted planted) {
  switch (planted) {
    case Planted::Yes: return "yes";
    case Planted::No: return "no";
    case Planted::Random: return "random";
  }
  return "random";
}

Planted parse_planted(std::string_view text) {
  if (text == "yes") return Planted::Yes;
  if (text == "no") return Planted::No;
  if (text == "random") return Planted::Random;
  throw ParseError("planted: expected yes, no or random, got '" + std::string(text) + "'");
}

void VectorPairInstance::validate() const {
  if (d == 0) throw ValidationError("d must be positive");
  for (const auto* set : {&A, &B}) {
    for (std::size_t i = 0; i < set->size(); ++i) {
      if ((*set)[i].dim() != d) {
        throw ValidationError(std::string(set == &A ? "A" : "B") + "[" + std::to_string(i) + "] has dimension " +
                              std::to_string((*set)[i].dim()) + ", expected d=" + std::to_string(d));
      }
    }
  }
  if (kind == ProblemKind::BHCP) {
    if (!t) throw ValidationError("BHCP instance requires t");
    if (*t < 2 || static_cast<std::size_t>(*t) > d) {
      throw ValidationError("t=" + std::to_string(*t) + " outside {2, ..., d}");
    }
  }
  if (normalized && !B.empty()) {
    const std::size_t weight = B.front().count();
    std::set<BitVector> seen;
    for (std::size_t j = 0; j < B.size(); ++j) {
      if (B[j].count() != weight) throw ValidationError("normalized instance: B vectors differ in weight");
      if (!seen.insert(B[j]).second) {
        throw ValidationError("normalized instance: duplicate vector B[" + std::to_string(j) + "]");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Generation

namespace {

class BitSource {
 public:
  explicit BitSource(std::uint64_t seed) : engine_(seed) {}

  BitVector random_vector(std::size_t d) {
    BitVector v(d);
    for (std::size_t i = 0; i < d; i += 64) {
      std::uint64_t w = engine_();
      for (std::size_t k = 0; k < 64 && i + k < d; ++k) v.set(i + k, (w >> k) & 1U);
    }
    return v;
  }

  // Uniform index in [0, bound) by rejection; avoids library-specific
  // distribution implementations so output is portable.
  std::size_t below(std::size_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return static_cast<std::size_t>(x % bound);
  }

  // Uniformly random subset of `k` coordinates among `d`.
  std::vector<std::size_t> choose(std::size_t d, std::size_t k) {
    std::vector<std::size_t> idx(d);
    for (std::size_t i = 0; i < d; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + below(d - i)]);
    idx.resize(k);
    return idx;
  }

 private:
  std::mt19937_64 engine_;
};

bool contains(const std::vector<BitVector>& set, const BitVector& v) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

std::optional<VectorPairInstance> attempt_ovp(const GenerateParams& p, std::size_t m, BitSource& rng) {
  VectorPairInstance inst;
  inst.kind = ProblemKind::OVP;
  inst.d = p.d;
  inst.seed = p.seed;
  // Nonzero a vectors; a zero vector would be orthogonal to every b.
  for (std::size_t i = 0; i < p.n; ++i) {
    BitVector a = rng.random_vector(p.d);
    int tries = 0;
    while (a.count() == 0 || (p.planted == Planted::Yes && i == 0 && a.count() == p.d)) {
      if (++tries > kMaxGenerationRetries) return std::nullopt;
      a = rng.random_vector(p.d);
    }
    inst.A.push_back(std::move(a));
  }
  std::size_t plant_i = 0;
  std::size_t plant_j = 0;
  if (p.planted == Planted::Yes) {
    plant_i = rng.below(p.n);
    plant_j = rng.below(m);
    // The planted a must leave room for a nonzero orthogonal b.
    std::swap(inst.A[0], inst.A[plant_i]);
  }
  for (std::size_t j = 0; j < m; ++j) {
    int tries = 0;
    for (;;) {
      if (++tries > kMaxGenerationRetries) return std::nullopt;
      BitVector b(p.d);
      if (p.planted == Planted::Yes && j == plant_j) {
        BitVector free = inst.A[plant_i].complement();
        BitVector r = rng.random_vector(p.d);
        for (std::size_t k = 0; k < p.d; ++k) b.set(k, free.get(k) && r.get(k));
      } else {
        b = rng.random_vector(p.d);
      }
      if (contains(inst.B, b)) continue;
      if (p.planted == Planted::No) {
        bool orthogonal = false;
        for (const auto& a : inst.A) orthogonal = orthogonal || inner_product(a, b) == 0;
        if (orthogonal) continue;
      }
      inst.B.push_back(std::move(b));
      break;
    }
  }
  return inst;
}

std::optional<VectorPairInstance> attempt_bhcp(const GenerateParams& p, std::size_t m, BitSource& rng) {
  VectorPairInstance inst;
  inst.kind = ProblemKind::BHCP;
  inst.d = p.d;
  inst.t = p.t;
  inst.seed = p.seed;
  const auto t = static_cast<std::size_t>(p.t);
  for (std::size_t i = 0; i < p.n; ++i) {
    int tries = 0;
    BitVector a = rng.random_vector(p.d);
    while (contains(inst.A, a)) {
      if (++tries > kMaxGenerationRetries) return std::nullopt;
      a = rng.random_vector(p.d);
    }
    inst.A.push_back(std::move(a));
  }
  std::size_t plant_i = 0;
  std::size_t plant_j = 0;
  if (p.planted == Planted::Yes) {
    plant_i = rng.below(p.n);
    plant_j = rng.below(m);
  }
  for (std::size_t j = 0; j < m; ++j) {
    int tries = 0;
    for (;;) {
      if (++tries > kMaxGenerationRetries) return std::nullopt;
      BitVector b(p.d);
      if (p.planted == Planted::Yes && j == plant_j) {
        b = inst.A[plant_i];
        for (std::size_t k : rng.choose(p.d, t - 1)) b.flip(k);
      } else {
        b = rng.random_vector(p.d);
      }
      if (contains(inst.A, b) || contains(inst.B, b)) continue;
      if (p.planted == Planted::No) {
        bool close = false;
        for (const auto& a : inst.A) close = close || hamming(a, b) < t;
        if (close) continue;
      }
      inst.B.push_back(std::move(b));
      break;
    }
  }
  return inst;
}

}  // namespace

VectorPairInstance generate(const GenerateParams& params) {
  const std::size_t m = params.m.value_or(params.n);
  if (params.d < 2) throw GenerationError("dimension d must be at least 2");
  if (params.n == 0 || m == 0) throw GenerationError("instance sizes must be positive");
  if (params.kind == ProblemKind::BHCP && (params.t < 2 || static_cast<std::size_t>(params.t) > params.d)) {
    throw GenerationError("BHCP threshold t must lie in {2, ..., d}");
  }
  BitSource rng(params.seed);
  for (int attempt = 0; attempt < kMaxGenerationRetries; ++attempt) {
    auto inst = params.kind == ProblemKind::OVP ? attempt_ovp(params, m, rng) : attempt_bhcp(params, m, rng);
    if (!inst) continue;
    const OracleVerdict truth = solve(*inst);
    if (params.planted == Planted::Yes && !truth.has_pair) continue;
    if (params.planted == Planted::No && truth.has_pair) continue;
    inst->validate();
    return std::move(*inst);
  }
  throw GenerationError(std::string("could not generate a planted=") + to_string(params.planted) + " " +
                        to_string(params.kind) + " instance with n=" + std::to_string(params.n) +
                        ", d=" + std::to_string(params.d) + " after " + std::to_string(kMaxGenerationRetries) +
                        " attempts");
}

VectorPairInstance normalize(const VectorPairInstance& inst) {
  inst.validate();
  std::set<BitVector> seen;
  for (std::size_t j = 0; j < inst.B.size(); ++j) {
    if (!seen.insert(inst.B[j]).second) {
      throw ValidationError("normalize: duplicate vector B[" + std::to_string(j) + "]");
    }
  }
  VectorPairInstance out = inst;
  const std::size_t d = inst.d;
  out.d = 2 * d;
  out.normalized = true;
  for (auto& a : out.A) a = a.padded(d, 0);
  std::set<BitVector> padded_seen;
  for (std::size_t j = 0; j < out.B.size(); ++j) {
    out.B[j] = out.B[j].padded(d, d - out.B[j].count());
    if (!padded_seen.insert(out.B[j]).second) {
      throw ValidationError("normalize: padding makes B[" + std::to_string(j) + "] a duplicate");
    }
  }
  return out;
}

std::size_t default_dimension(std::size_t n) {
  const double l = std::log2(static_cast<double>(std::max<std::size_t>(n, 1)));
  return std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(l * l - 1e-9)));
}

int default_threshold(std::size_t d) { return std::max(2, static_cast<int>(d / 4)); }

// ---------------------------------------------------------------------------
// JSON

std::string to_json(const VectorPairInstance& inst) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(inst.kind);
  j["n"] = inst.n();
  j["m"] = inst.m();
  j["d"] = inst.d;
  j["t"] = inst.t ? nlohmann::ordered_json(*inst.t) : nlohmann::ordered_json(nullptr);
  j["normalized"] = inst.normalized;
  j["seed"] = inst.seed ? nlohmann::ordered_json(*inst.seed) : nlohmann::ordered_json(nullptr);
  auto& a = j["A"] = nlohmann::ordered_json::array();
  for (const auto& v : inst.A) a.push_back(v.to_string());
  auto& b = j["B"] = nlohmann::ordered_json::array();
  for (const auto& v : inst.B) b.push_back(v.to_string());
  return j.dump(2) + "\n";
}

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) throw ParseError(std::string(name) + ": missing field");
  return j.at(name);
}

std::size_t size_field(const nlohmann::json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw ParseError(std::string(name) + ": expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<BitVector> vector_field(const nlohmann::json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_array()) throw ParseError(std::string(name) + ": expected an array of bitstrings");
  std::vector<BitVector> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) throw ParseError(std::string(name) + "[" + std::to_string(i) + "]: expected a string");
    try {
      out.push_back(BitVector::parse(v[i].get<std::string>()));
    } catch (const ParseError& e) {
      throw ParseError(std::string(name) + "[" + std::to_string(i) + "]: " + e.what());
    }
  }
  return out;
}

}  // namespace

VectorPairInstance from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("instance file must hold a JSON object");
  VectorPairInstance inst;
  const auto& kind = field(j, "kind");
  if (!kind.is_string()) throw ParseError("kind: expected a string");
  inst.kind = parse_kind(kind.get<std::string>());
  inst.d = size_field(j, "d");
  if (j.contains("t") && !j["t"].is_null()) {
    if (!j["t"].is_number_integer()) throw ParseError("t: expected an integer");
    inst.t = j["t"].get<int>();
  }
  if (j.contains("normalized")) {
    if (!j["normalized"].is_boolean()) throw ParseError("normalized: expected a boolean");
    inst.normalized = j["normalized"].get<bool>();
  }
  if (j.contains("seed") && !j["seed"].is_null()) {
    if (!j["seed"].is_number_unsigned()) throw ParseError("seed: expected a non-negative integer");
    inst.seed = j["seed"].get<std::uint64_t>();
  }
  inst.A = vector_field(j, "A");
  inst.B = vector_field(j, "B");
  if (j.contains("n") && size_field(j, "n") != inst.A.size()) throw ValidationError("n does not match the size of A");
  if (j.contains("m") && size_field(j, "m") != inst.B.size()) throw ValidationError("m does not match the size of B");
  inst.validate();
  return inst;
}

VectorPairInstance read_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open instance file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

void write_instance(const VectorPairInstance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write instance file '" + path + "'");
  out << to_json(inst);
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::uint64_t digest(const VectorPairInstance& inst) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : to_json(inst)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace ermlab
