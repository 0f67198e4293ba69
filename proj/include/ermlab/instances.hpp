#pragma once

// Binary vectors and OVP/BHCP instances: generation, normalization, JSON I/O.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ermlab {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fixed-dimension bit vector packed into 64-bit words. Bits past `dim` in
// the last word are kept zero so word-level popcounts are exact.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t dim);

  // '0'/'1' characters, index 0 = first coordinate.
  static BitVector parse(std::string_view bits);

  std::size_t dim() const { return dim_; }
  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63U)) & 1U; }
  void set(std::size_t i, bool value);
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63U); }
  std::size_t count() const;
  const std::vector<std::uint64_t>& words() const { return words_; }

  BitVector complement() const;
  // This vector followed by `extra` coordinates, the first `ones` of which are 1.
  BitVector padded(std::size_t extra, std::size_t ones) const;

  std::string to_string() const;

  friend bool operator==(const BitVector& x, const BitVector& y) = default;
  friend bool operator<(const BitVector& x, const BitVector& y);

 private:
  std::size_t dim_ = 0;
  std::vector<std::uint64_t> words_;
};

enum class ProblemKind { OVP, BHCP };

const char* to_string(ProblemKind kind);
ProblemKind parse_kind(std::string_view text);

struct VectorPairInstance {
  ProblemKind kind = ProblemKind::OVP;
  std::vector<BitVector> A;
  std::vector<BitVector> B;
  std::size_t d = 0;
  std::optional<int> t;
  bool normalized = false;
  std::optional<std::uint64_t> seed;

  std::size_t n() const { return A.size(); }
  std::size_t m() const { return B.size(); }

  // Throws ValidationError when an invariant is broken.
  void validate() const;

  friend bool operator==(const VectorPairInstance&, const VectorPairInstance&) = default;
};

enum class Planted { Yes, No, Random };

const char* to_string(Planted planted);
Planted parse_planted(std::string_view text);

struct GenerateParams {
  ProblemKind kind = ProblemKind::OVP;
  std::size_t n = 4;
  std::optional<std::size_t> m;  // defaults to n
  std::size_t d = 4;
  int t = 2;                     // BHCP only
  Planted planted = Planted::Random;
  std::uint64_t seed = 0;
};

inline constexpr int kMaxGenerationRetries = 1000;

// Deterministic in (params). BHCP instances have A and B pairwise distinct as
// one set; OVP instances have distinct B vectors and nonzero A vectors.
VectorPairInstance generate(const GenerateParams& params);

// Doubles the dimension: A gets d zeros, each b gets ones in the lowest
// appended slots until it has exactly d ones.
VectorPairInstance normalize(const VectorPairInstance& inst);

// max(4, ceil(log2(n)^2)) and max(2, floor(d/4)).
std::size_t default_dimension(std::size_t n);
int default_threshold(std::size_t d);

std::string to_json(const VectorPairInstance& inst);
VectorPairInstance from_json(std::string_view text);
VectorPairInstance read_instance(const std::string& path);
void write_instance(const VectorPairInstance& inst, const std::string& path);

// FNV-1a over the canonical JSON text.
std::uint64_t digest(const VectorPairInstance& inst);

}  // namespace ermlab
