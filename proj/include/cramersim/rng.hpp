#pragma once

#include <cmath>
#include <cstdint>

namespace cramersim {

// 64-bit avalanche mix (SplitMix64 finalizer). Bijective on uint64.
inline constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// Key derivation for independent streams: two mixing rounds keep nearby
// (master, stream) pairs decorrelated.
inline constexpr std::uint64_t derive_key(std::uint64_t master,
                                          std::uint64_t stream) noexcept {
  return mix64(mix64(master + kGolden) ^ mix64(stream * kGolden + 0x6a09e667f3bcc909ull));
}

// Random-access draw: value number `index` of the stream identified by `key`.
inline constexpr std::uint64_t u64_at(std::uint64_t key, std::uint64_t index) noexcept {
  return mix64(key + index * kGolden);
}

// Uniform in [0,1) with 53 random bits.
inline double unit_at(std::uint64_t key, std::uint64_t index) noexcept {
  return static_cast<double>(u64_at(key, index) >> 11) * 0x1.0p-53;
}

// Counter-based generator. State is (key, counter); identical keys give
// identical sequences on every platform. Streams derived from a master seed
// via derive_key are safe to run in parallel, and merging replica results is
// order-independent because no generator state is shared.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static CounterRng for_replica(std::uint64_t master_seed, std::uint64_t replica) {
    return CounterRng(derive_key(master_seed, replica));
  }

  std::uint64_t next_u64() { return u64_at(key_, ctr_++); }

  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Marsaglia's polar method (no trig, pairs cached).
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_unit() - 1.0;
      v = 2.0 * next_unit() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double r = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * r;
    have_spare_ = true;
    return u * r;
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace cramersim
