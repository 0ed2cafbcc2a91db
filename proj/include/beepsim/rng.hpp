#pragma once

#include <cstdint>

namespace beepsim {

// splitmix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ mix64(b + 0x632be59bd9b4e019ULL));
}

// Counter-based private random stream keyed on (seed, vertex, slot, domain).
// An automaton holding one can draw from it but cannot read the key back, so
// the stream never leaks the vertex index.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t vertex, std::uint64_t slot,
            std::uint64_t domain = 0)
      : vertex_key_(mix64(seed, vertex)),
        base_(mix64(mix64(vertex_key_, slot), domain)) {}

  std::uint64_t next() { return mix64(base_ + ++counter_ * 0xd1b54a32d192ed03ULL); }

  bool bit() { return (next() >> 63) != 0; }

  // True with probability exactly 2^-exponent.
  bool coin_pow2(unsigned exponent) {
    while (exponent >= 64) {
      if (next() != 0) return false;
      exponent -= 64;
    }
    if (exponent == 0) return true;
    return (next() >> (64 - exponent)) == 0;
  }

  // Uniform in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
      std::uint64_t x = next();
      if (x >= threshold) return x % bound;
    }
  }

  // Same (seed, vertex) key, fresh stream for another slot/domain.
  // at(0, s) yields the stream the engine hands out for slot s.
  StreamRng at(std::uint64_t domain, std::uint64_t slot) const {
    return StreamRng(vertex_key_, mix64(mix64(vertex_key_, slot), domain));
  }

 private:
  StreamRng(std::uint64_t vertex_key, std::uint64_t base)
      : vertex_key_(vertex_key), base_(base) {}

  std::uint64_t vertex_key_;
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

}  // namespace beepsim
