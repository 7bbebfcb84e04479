#include "rluroth/omega.hpp"

namespace rluroth {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t state = seed;
  std::uint64_t a = splitmix64(state);
  state = a ^ (index * 0xD1B54A32D192ED03ULL);
  splitmix64(state);
  return splitmix64(state);
}

namespace {

void check_bits(const std::vector<int>& bits) {
  for (int b : bits)
    if (b != 0 && b != 1) throw DomainError("omega bits must be 0 or 1");
}

std::vector<int> parse_bits(std::string_view text) {
  std::vector<int> bits;
  for (char ch : text) {
    if (ch != '0' && ch != '1')
      throw DomainError("bad omega word: unexpected '" + std::string(1, ch) + "'");
    bits.push_back(ch - '0');
  }
  return bits;
}

}  // namespace

OmegaSource OmegaSource::word(std::vector<int> bits) {
  check_bits(bits);
  return OmegaSource(Word{std::move(bits)});
}

OmegaSource OmegaSource::periodic(std::vector<int> pre, std::vector<int> period) {
  check_bits(pre);
  check_bits(period);
  if (period.empty()) throw DomainError("omega period word must be nonempty");
  return OmegaSource(Periodic{std::move(pre), std::move(period)});
}

OmegaSource OmegaSource::bernoulli(double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("omega probability must lie in [0,1]");
  return OmegaSource(Bernoulli{p, seed, std::mt19937_64(seed)});
}

OmegaSource OmegaSource::parse(std::string_view text) {
  const auto open = text.find('(');
  if (open == std::string_view::npos) return word(parse_bits(text));
  if (text.back() != ')' || text.find('(', open + 1) != std::string_view::npos)
    throw DomainError("bad omega word: expected PRE(PERIOD)");
  return periodic(parse_bits(text.substr(0, open)),
                  parse_bits(text.substr(open + 1, text.size() - open - 2)));
}

int OmegaSource::next() {
  const std::size_t i = pos_;
  int bit = 0;
  if (auto* w = std::get_if<Word>(&kind_)) {
    if (i >= w->bits.size())
      throw OmegaExhausted("omega word exhausted after " + std::to_string(i) + " bits");
    bit = w->bits[i];
  } else if (auto* q = std::get_if<Periodic>(&kind_)) {
    bit = i < q->pre.size() ? q->pre[i] : q->period[(i - q->pre.size()) % q->period.size()];
  } else {
    auto& b = std::get<Bernoulli>(kind_);
    bit = bernoulli_bit(b.gen, b.p);
  }
  ++pos_;
  return bit;
}

std::string OmegaSource::describe() const {
  auto join = [](const std::vector<int>& bits) {
    std::string s;
    for (int b : bits) s += static_cast<char>('0' + b);
    return s;
  };
  if (auto* w = std::get_if<Word>(&kind_)) return join(w->bits);
  if (auto* q = std::get_if<Periodic>(&kind_)) return join(q->pre) + "(" + join(q->period) + ")";
  const auto& b = std::get<Bernoulli>(kind_);
  return "bernoulli(p=" + std::to_string(b.p) + ",seed=" + std::to_string(b.seed) + ")";
}

}  // namespace rluroth
