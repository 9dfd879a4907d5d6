#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "dhsp/bigint.hpp"

namespace dhsp {

// All randomness flows through explicit handles of this engine.
using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream key for (seed, tag...). Order of tags matters; trial order does not.
inline std::uint64_t stream_key(std::uint64_t seed,
                                std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t t : tags) h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags = {}) {
  const std::uint64_t key = stream_key(seed, tags);
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

// Cheap counter-based engine for short-lived child streams.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t key) : state_(key) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64(state_);
  }

 private:
  std::uint64_t state_;
};

// Child stream split off a running generator.
inline Rng split(Rng& parent, std::uint64_t tag) { return make_stream(parent(), {tag}); }

template <class Engine>
std::uint64_t uniform_index(Engine& rng, std::uint64_t n) {
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

inline bool coin(Rng& rng) { return (rng() >> 63) != 0; }

// Uniform on [0, 2^bits).
inline BigInt uniform_bits(Rng& rng, std::size_t bits) {
  BigInt r = 0;
  std::size_t remaining = bits;
  while (remaining > 0) {
    const std::size_t take = remaining >= 64 ? 64 : remaining;
    std::uint64_t word = rng();
    if (take < 64) word &= (std::uint64_t{1} << take) - 1;
    r <<= take;
    r += from_u64(word);
    remaining -= take;
  }
  return r;
}

// Uniform on [0, bound), bound > 0.
inline BigInt uniform_below(Rng& rng, const BigInt& bound) {
  const std::size_t bits = bit_length(bound - 1);
  for (;;) {
    BigInt r = uniform_bits(rng, bits);
    if (r < bound) return r;
  }
}

}  // namespace dhsp
