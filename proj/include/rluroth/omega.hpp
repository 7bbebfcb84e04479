#pragma once

#include "rluroth/rational.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rluroth {

/// A finite omega word ran out before the requested number of steps.
class OmegaExhausted : public DomainError {
 public:
  using DomainError::DomainError;
};

/// splitmix64 step; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed of the stream with index `index` under master seed `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Uniform on [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1p-53;
}

/// An omega bit: 0 with probability p.
inline int bernoulli_bit(std::mt19937_64& gen, double p) {
  return uniform01(gen) < p ? 0 : 1;
}

/// A binary path omega: a finite word, an eventually periodic word, or a
/// seeded Bernoulli(p) stream.
class OmegaSource {
 public:
  static OmegaSource word(std::vector<int> bits);
  static OmegaSource periodic(std::vector<int> pre, std::vector<int> period);
  static OmegaSource bernoulli(double p, std::uint64_t seed);

  /// "011" is a finite word, "0(01)" means 0(01)^infinity, "(011)" is purely
  /// periodic.
  static OmegaSource parse(std::string_view text);

  /// Next bit. Throws OmegaExhausted past the end of a finite word.
  int next();

  std::size_t consumed() const { return pos_; }
  std::string describe() const;

 private:
  struct Word {
    std::vector<int> bits;
  };
  struct Periodic {
    std::vector<int> pre, period;
  };
  struct Bernoulli {
    double p;
    std::uint64_t seed;
    std::mt19937_64 gen;
  };

  explicit OmegaSource(std::variant<Word, Periodic, Bernoulli> kind) : kind_(std::move(kind)) {}

  std::variant<Word, Periodic, Bernoulli> kind_;
  std::size_t pos_ = 0;
};

}  // namespace rluroth
