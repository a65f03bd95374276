#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cramersim {

// Sieve of Eratosthenes over the odd integers, one bit per odd number
// (bit i <-> 2i+1; set = prime). Per-word cumulative counts make pi(x) an
// O(1) lookup. Builds run segmented above 1e8 to stay cache-friendly.
class PrimeTable {
 public:
  static constexpr std::uint64_t kMaxLimit = 1000000000ull;

  static PrimeTable sieve(std::uint64_t limit) {
    if (limit < 2) throw std::domain_error("PrimeTable: limit must be >= 2");
    if (limit > kMaxLimit) throw std::length_error("PrimeTable: limit exceeds 1e9 memory guard");
    PrimeTable t;
    t.limit_ = limit;
    const std::uint64_t nbits = limit / 2 + 1;  // index of odd m is (m-1)/2; index 0 <-> 1
    t.bits_.assign((nbits + 63) / 64, ~0ull);
    t.clear_bit(0);  // 1 is not prime
    const std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit)));

    // base primes up to sqrt(limit) by a plain odd sieve
    std::vector<std::uint32_t> base;
    {
      std::vector<std::uint8_t> small((root / 2) + 2, 1);
      for (std::uint64_t i = 1; (2 * i + 1) * (2 * i + 1) <= root; ++i)
        if (small[i])
          for (std::uint64_t j = (2 * i + 1) * (2 * i + 1) / 2; j < small.size(); j += 2 * i + 1)
            small[j] = 0;
      for (std::uint64_t i = 1; 2 * i + 1 <= root; ++i)
        if (small[i]) base.push_back(static_cast<std::uint32_t>(2 * i + 1));
    }

    const std::uint64_t segment = (limit > 100000000ull) ? (1ull << 21) : nbits;
    for (std::uint64_t lo = 1; lo < nbits; lo += segment) {
      const std::uint64_t hi = std::min(nbits, lo + segment);  // bit indices [lo, hi)
      for (std::uint32_t p : base) {
        // first odd multiple of p at bit >= lo, starting from p*p
        std::uint64_t start = (static_cast<std::uint64_t>(p) * p) / 2;
        if (start < lo) {
          const std::uint64_t m = (2 * lo + 1 + p - 1) / p;  // first multiplier
          std::uint64_t mm = std::max<std::uint64_t>(m | 1, p);       // odd, >= p
          start = (static_cast<std::uint64_t>(p) * mm) / 2;
          if (start < lo) start += p;
        }
        for (std::uint64_t b = start; b < hi; b += p) t.clear_bit(b);
      }
    }

    t.build_counts();
    return t;
  }

  std::uint64_t limit() const { return limit_; }

  bool is_prime(std::uint64_t m) const {
    if (m > limit_) throw std::domain_error("PrimeTable: query beyond limit");
    if (m == 2) return true;
    if (m < 2 || m % 2 == 0) return false;
    return test_bit(m / 2);
  }

  // pi(x): number of primes <= x.
  std::uint64_t count_leq(std::uint64_t x) const {
    if (x > limit_) throw std::domain_error("PrimeTable: query beyond limit");
    if (x < 2) return 0;
    if (x == 2) return 1;
    const std::uint64_t b = (x - 1) / 2;  // last odd bit index to include: odd <= x
    const std::uint64_t w = b / 64;
    const std::uint64_t mask = (b % 64 == 63) ? ~0ull : ((1ull << (b % 64 + 1)) - 1);
    return 1 + cum_[w] + static_cast<std::uint64_t>(std::popcount(bits_[w] & mask));
  }

  // Enumerate primes in [lo, hi] in increasing order.
  void for_primes_in(std::uint64_t lo, std::uint64_t hi,
                     const std::function<void(std::uint64_t)>& fn) const {
    if (hi > limit_) throw std::domain_error("PrimeTable: range beyond limit");
    if (lo <= 2 && hi >= 2) fn(2);
    std::uint64_t p = std::max<std::uint64_t>(lo | 1, 3);
    for (; p <= hi; p += 2)
      if (test_bit(p / 2)) fn(p);
  }

  std::vector<std::uint64_t> primes_in(std::uint64_t lo, std::uint64_t hi) const {
    std::vector<std::uint64_t> out;
    for_primes_in(lo, hi, [&](std::uint64_t p) { out.push_back(p); });
    return out;
  }

  // Versioned binary dump: 16-byte header (magic, version, limit), then the
  // odd-number bitmask little-endian.
  void save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("PrimeTable::save: cannot open " + path);
    const char magic[4] = {'C', 'S', 'P', 'T'};
    f.write(magic, 4);
    write_u32(f, kFormatVersion);
    write_u64(f, limit_);
    for (std::uint64_t w : bits_) write_u64(f, w);
    if (!f) throw std::runtime_error("PrimeTable::save: write failed");
  }

  static PrimeTable load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("PrimeTable::load: cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "CSPT", 4) != 0)
      throw std::runtime_error("PrimeTable::load: bad magic");
    if (read_u32(f) != kFormatVersion) throw std::runtime_error("PrimeTable::load: bad version");
    PrimeTable t;
    t.limit_ = read_u64(f);
    const std::uint64_t nbits = t.limit_ / 2 + 1;
    t.bits_.resize((nbits + 63) / 64);
    for (auto& w : t.bits_) w = read_u64(f);
    if (!f) throw std::runtime_error("PrimeTable::load: truncated file");
    t.build_counts();
    return t;
  }

 private:
  static constexpr std::uint32_t kFormatVersion = 1;

  void clear_bit(std::uint64_t i) { bits_[i / 64] &= ~(1ull << (i % 64)); }
  bool test_bit(std::uint64_t i) const { return (bits_[i / 64] >> (i % 64)) & 1; }

  void build_counts() {
    // mask out bits beyond the last representable odd number
    const std::uint64_t nbits = limit_ / 2 + 1;
    if (nbits % 64 != 0) bits_.back() &= (1ull << (nbits % 64)) - 1;
    cum_.resize(bits_.size());
    std::uint64_t c = 0;
    for (std::size_t w = 0; w < bits_.size(); ++w) {
      cum_[w] = c;
      c += static_cast<std::uint64_t>(std::popcount(bits_[w]));
    }
  }

  static void write_u32(std::ofstream& f, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    f.write(b, 4);
  }
  static void write_u64(std::ofstream& f, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    f.write(b, 8);
  }
  static std::uint32_t read_u32(std::ifstream& f) {
    unsigned char b[4];
    f.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  static std::uint64_t read_u64(std::ifstream& f) {
    unsigned char b[8];
    f.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }

  std::uint64_t limit_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint64_t> cum_;
};

// Smallest prime factor P^-(m), by trial division over the sieved primes up
// to sqrt(m). Returns nullopt for m in {0, 1}: both count as quasiprime for
// every threshold (the gcd(1, .) = 1 convention; P^-(0), P^-(1) = +infinity).
inline std::optional<std::uint64_t> smallest_prime_factor(std::uint64_t m,
                                                          const PrimeTable& table) {
  if (m <= 1) return std::nullopt;
  if (m % 2 == 0) return 2;
  const std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(m)));
  if (root > table.limit())
    throw std::domain_error("smallest_prime_factor: sqrt(m) beyond sieve limit");
  for (std::uint64_t p = 3; p <= root; p += 2)
    if (table.is_prime(p) && m % p == 0) return p;
  return m;  // m itself is prime
}

// m is zeta-quasiprime iff gcd(m, prod of primes <= zeta) = 1, i.e. P^-(m) > zeta.
inline bool is_quasiprime(std::uint64_t m, double zeta, const PrimeTable& table) {
  const auto spf = smallest_prime_factor(m, table);
  if (!spf) return true;
  return static_cast<double>(*spf) > zeta;
}

// Discrete Riemann-Stieltjes integral of the Gaussian kernel against d pi(t):
// sum over primes p in [m - half_width, m + half_width] of the N(m, B) density.
inline double gaussian_prime_sum(double m, double B, double half_width,
                                 const PrimeTable& table) {
  if (!(B > 0.0)) throw std::domain_error("gaussian_prime_sum: B must be positive");
  const double lo = m - half_width;
  const double hi = m + half_width;
  if (lo < 2.0 || hi > static_cast<double>(table.limit()))
    throw std::domain_error("gaussian_prime_sum: window outside sieve");
  const double norm = 1.0 / std::sqrt(2.0 * M_PI * B);
  double sum = 0.0;
  table.for_primes_in(static_cast<std::uint64_t>(std::ceil(lo)),
                      static_cast<std::uint64_t>(std::floor(hi)),
                      [&](std::uint64_t p) {
                        const double d = static_cast<double>(p) - m;
                        sum += norm * std::exp(-d * d / (2.0 * B));
                      });
  return sum;
}

// An increasing sequence of primes, as an explicit list. Factories cover the
// spec'd forms: full prime range, or predicate + range.
class PrimeSet {
 public:
  PrimeSet() = default;

  static PrimeSet from_list(std::vector<std::uint64_t> primes, const PrimeTable& table) {
    for (std::size_t i = 0; i < primes.size(); ++i) {
      if (i > 0 && primes[i] <= primes[i - 1])
        throw std::invalid_argument("PrimeSet: list must be strictly increasing");
      if (!table.is_prime(primes[i]))
        throw std::invalid_argument("PrimeSet: non-prime member");
    }
    PrimeSet s;
    s.members_ = std::move(primes);
    return s;
  }

  static PrimeSet all_primes(const PrimeTable& table, std::uint64_t up_to) {
    PrimeSet s;
    s.members_ = table.primes_in(2, up_to);
    return s;
  }

  static PrimeSet filtered(const PrimeTable& table, std::uint64_t up_to,
                           const std::function<bool(std::uint64_t)>& keep) {
    PrimeSet s;
    table.for_primes_in(2, up_to, [&](std::uint64_t p) {
      if (keep(p)) s.members_.push_back(p);
    });
    return s;
  }

  bool contains(std::uint64_t p) const {
    return std::binary_search(members_.begin(), members_.end(), p);
  }

  std::uint64_t count_in(std::uint64_t lo, std::uint64_t hi) const {
    auto a = std::lower_bound(members_.begin(), members_.end(), lo);
    auto b = std::upper_bound(members_.begin(), members_.end(), hi);
    return static_cast<std::uint64_t>(b - a);
  }

  const std::vector<std::uint64_t>& members() const { return members_; }
  bool empty() const { return members_.empty(); }

 private:
  std::vector<std::uint64_t> members_;
};

}  // namespace cramersim
