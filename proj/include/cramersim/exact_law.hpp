#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cramersim/model.hpp"

namespace cramersim {

// Exact distribution of S_n computed by the convolution recurrence
//   q_j(k) = q_{j-1}(k) (1 - p_j) + q_{j-1}(k-1) p_j.
// Support is {0, ..., n - start + 1}; for n - start > 5000 the stored window
// is truncated where the cumulative tail mass falls below kTailMass on both
// sides, which keeps the effective width O(sqrt(B_n log(1/eps))).
struct ExactLaw {
  std::int64_t n = 0;
  std::int64_t support_begin = 0;
  std::vector<double> probs;  // probs[i] = P{S_n = support_begin + i}

  static constexpr double kTailMass = 1e-18;

  std::int64_t support_end() const {  // inclusive
    return support_begin + static_cast<std::int64_t>(probs.size()) - 1;
  }

  double prob(std::int64_t k) const {
    if (k < support_begin || k > support_end()) return 0.0;
    return probs[static_cast<std::size_t>(k - support_begin)];
  }

  double total_mass() const {
    detail::CompensatedSum s;
    for (double q : probs) s.add(q);
    return s.value();
  }

  double mean() const {
    detail::CompensatedSum s;
    for (std::size_t i = 0; i < probs.size(); ++i)
      s.add(probs[i] * static_cast<double>(support_begin + static_cast<std::int64_t>(i)));
    return s.value();
  }

  double variance() const {
    const double m = mean();
    detail::CompensatedSum s;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      const double d = static_cast<double>(support_begin + static_cast<std::int64_t>(i)) - m;
      s.add(probs[i] * d * d);
    }
    return s.value();
  }
};

namespace detail {

inline void trim_tails(ExactLaw& law) {
  double head = 0.0;
  std::size_t lo = 0;
  while (lo + 1 < law.probs.size() && head + law.probs[lo] < ExactLaw::kTailMass) {
    head += law.probs[lo];
    ++lo;
  }
  double tail = 0.0;
  std::size_t hi = law.probs.size();
  while (hi > lo + 1 && tail + law.probs[hi - 1] < ExactLaw::kTailMass) {
    tail += law.probs[hi - 1];
    --hi;
  }
  if (lo == 0 && hi == law.probs.size()) return;
  std::vector<double> kept(law.probs.begin() + static_cast<std::ptrdiff_t>(lo),
                           law.probs.begin() + static_cast<std::ptrdiff_t>(hi));
  law.probs = std::move(kept);
  law.support_begin += static_cast<std::int64_t>(lo);
}

}  // namespace detail

// One convolution step: the law of X + Bernoulli(p).
inline ExactLaw convolve_bernoulli(const ExactLaw& law, double p) {
  ExactLaw next;
  next.n = law.n + 1;
  next.support_begin = law.support_begin;
  next.probs.assign(law.probs.size() + 1, 0.0);
  const double q = 1.0 - p;
  for (std::size_t i = 0; i < law.probs.size(); ++i) {
    next.probs[i] += law.probs[i] * q;
    next.probs[i + 1] += law.probs[i] * p;
  }
  return next;
}

inline ExactLaw exact_law(const ModelSpec& spec, std::int64_t n) {
  if (n < spec.start_index) throw std::domain_error("exact_law: n below start_index");
  if (n - spec.start_index > 20000)
    throw std::length_error("exact_law: n - start_index exceeds the 20000 cost guard");
  const bool truncate = (n - spec.start_index) > 5000;
  ExactLaw law;
  law.n = spec.start_index - 1;
  law.support_begin = 0;
  law.probs = {1.0};
  for (std::int64_t j = spec.start_index; j <= n; ++j) {
    law = convolve_bernoulli(law, spec.weight(j));
    law.n = j;
    if (truncate) detail::trim_tails(law);
  }
  return law;
}

// Residue-class law: entry r is P{S_n == r (mod d)}. O(n d) time, O(d) space.
inline std::vector<double> exact_law_mod(const ModelSpec& spec, std::int64_t n,
                                         std::int64_t d) {
  if (d < 1) throw std::domain_error("exact_law_mod: d must be >= 1");
  if (n < spec.start_index) throw std::domain_error("exact_law_mod: n below start_index");
  if (n * d > 1000000000LL)
    throw std::length_error("exact_law_mod: n*d exceeds the 1e9 cost guard");
  std::vector<double> cur(static_cast<std::size_t>(d), 0.0);
  std::vector<double> next(static_cast<std::size_t>(d), 0.0);
  cur[0] = 1.0;
  for (std::int64_t j = spec.start_index; j <= n; ++j) {
    const double p = spec.weight(j);
    const double q = 1.0 - p;
    const std::size_t dd = static_cast<std::size_t>(d);
    for (std::size_t r = 0; r < dd; ++r) {
      const std::size_t r1 = (r + 1 == dd) ? 0 : r + 1;
      next[r1] = cur[r1] * q + cur[r] * p;
    }
    std::swap(cur, next);
  }
  return cur;
}

// Fold a full law mod d (oracle-side helper for consistency checks).
inline std::vector<double> fold_mod(const ExactLaw& law, std::int64_t d) {
  std::vector<double> out(static_cast<std::size_t>(d), 0.0);
  for (std::size_t i = 0; i < law.probs.size(); ++i) {
    const std::int64_t k = law.support_begin + static_cast<std::int64_t>(i);
    out[static_cast<std::size_t>(k % d)] += law.probs[i];
  }
  return out;
}

}  // namespace cramersim
