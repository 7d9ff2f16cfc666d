#pragma once

// Counter-based generator: output i of stream s is a pure function of (s, i),
// so any shard of work can reproduce its numbers without shared state.

#include <cstdint>
#include <initializer_list>

namespace primlat {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Mixes several keys into one stream id.
constexpr std::uint64_t derive_stream(std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k));
  return h;
}

class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t stream, std::uint64_t counter = 0) : stream_(stream), counter_(counter) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return splitmix64(stream_ ^ splitmix64(counter_++)); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * bound) >> 64);
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t stream_;
  std::uint64_t counter_;
};

}  // namespace primlat
