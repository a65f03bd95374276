#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cramersim/model.hpp"
#include "cramersim/ou.hpp"
#include "cramersim/trajectory.hpp"

namespace cramersim {

// Amplitude window for block k with modulating function f_c(t) = (log t)^c:
// walk events read indices J = {j : e^k <= B_j < e^k * k^c}, path events read
// the OU time window [k, k + c log k].
struct AmplitudeWindow {
  double c = 1.0;
  double z = 1.0;
  int k = 1;

  double block_base() const { return std::exp(static_cast<double>(k)); }
  double block_top() const {
    return block_base() * std::pow(static_cast<double>(k), c);
  }
  double path_duration() const { return c * std::log(static_cast<double>(k)); }
};

namespace detail {

// first index j with B_j >= v (sweep.n_max()+1 when none)
inline std::int64_t first_index_with_variance_geq(const MomentSweep& sweep, double v) {
  std::int64_t lo = sweep.start(), hi = sweep.n_max() + 1;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (sweep.variance(mid) >= v)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

}  // namespace detail

// One sample of the walk event B_k(f_c, z): the normalized deviation stays
// within z over the whole block.
inline bool walk_amplitude_event(const Trajectory& traj, const MomentSweep& sweep,
                                 const AmplitudeWindow& window) {
  if (window.k < 1) throw std::domain_error("walk_amplitude_event: k must be >= 1");
  if (traj.n_max > sweep.n_max())
    throw std::domain_error("walk_amplitude_event: sweep shorter than trajectory");
  const double base = window.block_base();
  const double top = window.block_top();
  if (sweep.variance(traj.n_max) < top)
    throw std::domain_error("walk_amplitude_event: horizon too short for the window");
  const std::int64_t j_lo = detail::first_index_with_variance_geq(sweep, base);
  const std::int64_t j_hi = detail::first_index_with_variance_geq(sweep, top) - 1;
  for (std::int64_t j = j_lo; j <= j_hi; ++j) {
    const double dev = std::abs(static_cast<double>(traj.sum_at(j)) - sweep.mean(j)) /
                       std::sqrt(sweep.variance(j));
    if (dev > window.z) return false;
  }
  return true;
}

// Counting N = sum_k 1{A_k(f_c, z)} along one OU path per replica, with the
// two candidate comparison series (the two exponent conventions for the
// survival rate; which one Theorem-level counting follows is measured, not
// assumed).
struct AmplitudeCounting {
  double c = 0.0;
  double z = 0.0;
  int k_min = 0;
  int k_max = 0;
  std::int64_t replicas = 0;
  std::uint64_t master_seed = 0;
  double dt = 0.0;
  std::vector<int> counts;                      // per replica: N = sum_k 1{A_k}
  std::vector<std::int64_t> per_k_occurrences;  // per block k: replicas with A_k
  double mean_count = 0.0;
  double series_lambda = 0.0;       // sum_k k^{-c lambda}
  double series_half_lambda = 0.0;  // sum_k k^{-c lambda/2}
};

namespace detail {

inline double power_partial_sum(int k_min, int k_max, double s) {
  CompensatedSum acc;
  for (int k = k_min; k <= k_max; ++k) acc.add(std::pow(static_cast<double>(k), -s));
  return acc.value();
}

}  // namespace detail

inline AmplitudeCounting amplitude_counting(double c, double z, int k_min, int k_max,
                                            std::int64_t replicas, std::uint64_t master_seed,
                                            double dt, double lambda_z) {
  if (!(c > 0.0)) throw std::domain_error("amplitude_counting: c must be positive");
  if (k_min < 2 || k_max < k_min) throw std::domain_error("amplitude_counting: bad k range");
  AmplitudeCounting out;
  out.c = c;
  out.z = z;
  out.k_min = k_min;
  out.k_max = k_max;
  out.replicas = replicas;
  out.master_seed = master_seed;
  out.dt = dt;
  out.counts.assign(static_cast<std::size_t>(replicas), 0);
  const std::size_t blocks = static_cast<std::size_t>(k_max - k_min + 1);
  std::vector<std::uint8_t> occurred(static_cast<std::size_t>(replicas) * blocks, 0);
  const double horizon = static_cast<double>(k_max) +
                         c * std::log(static_cast<double>(k_max)) + dt;
  parallel_for(replicas, [&](std::int64_t r) {
    const auto path = simulate_ou(dt, horizon, derive_key(master_seed, static_cast<std::uint64_t>(r)));
    int count = 0;
    for (int k = k_min; k <= k_max; ++k) {
      const std::size_t lo = static_cast<std::size_t>(std::llround(static_cast<double>(k) / dt));
      const std::size_t hi = static_cast<std::size_t>(
          std::llround((static_cast<double>(k) + c * std::log(static_cast<double>(k))) / dt));
      bool inside = true;
      for (std::size_t i = lo; i <= hi && i < path.samples.size(); ++i) {
        if (std::abs(path.samples[i]) > z) {
          inside = false;
          break;
        }
      }
      count += inside;
      occurred[static_cast<std::size_t>(r) * blocks + static_cast<std::size_t>(k - k_min)] = inside;
    }
    out.counts[static_cast<std::size_t>(r)] = count;
  });
  out.per_k_occurrences.assign(blocks, 0);
  for (std::int64_t r = 0; r < replicas; ++r)
    for (std::size_t b = 0; b < blocks; ++b)
      out.per_k_occurrences[b] += occurred[static_cast<std::size_t>(r) * blocks + b];
  std::int64_t total = 0;
  for (int v : out.counts) total += v;
  out.mean_count = static_cast<double>(total) / static_cast<double>(replicas);
  out.series_lambda = detail::power_partial_sum(k_min, k_max, c * lambda_z);
  out.series_half_lambda = detail::power_partial_sum(k_min, k_max, c * lambda_z / 2.0);
  return out;
}

// ---------------------------------------------------------------------------
// Subsequence LIL normalizer phi_N. With I_0 = (0, M], I_k = (M^k, M^{k+1}]
// and kappa_p the p-th interval index (p = 0, 1, ...) whose interval meets N,
// phi_N(n) = sqrt(2 log(p+2)) for n in N within interval kappa_p.
// ---------------------------------------------------------------------------

namespace detail {

inline std::int64_t geometric_interval_index(std::int64_t n, double M) {
  if (n < 1) throw std::domain_error("interval index: n must be >= 1");
  if (!(M > 1.0)) throw std::domain_error("interval index: M must exceed 1");
  if (static_cast<double>(n) <= M) return 0;
  std::int64_t k = static_cast<std::int64_t>(
      std::floor(std::log(static_cast<double>(n)) / std::log(M)));
  while (k > 0 && std::pow(M, static_cast<double>(k)) >= static_cast<double>(n)) --k;
  while (std::pow(M, static_cast<double>(k + 1)) < static_cast<double>(n)) ++k;
  return k;
}

// Interval indices hit by an increasing member sequence. Indices are
// nondecreasing along the members, so one forward cursor suffices; boundary
// tests reuse std::pow(M, k+1) to stay consistent with the random-access
// index above.
inline std::vector<std::int64_t> intersecting_intervals(const std::vector<std::int64_t>& members,
                                                        double M) {
  std::vector<std::int64_t> ks;
  std::int64_t k = -1;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i > 0 && members[i] <= members[i - 1])
      throw std::invalid_argument("subsequence members must be strictly increasing");
    if (k < 0)
      k = geometric_interval_index(members[i], M);
    else
      while (std::pow(M, static_cast<double>(k + 1)) < static_cast<double>(members[i])) ++k;
    if (ks.empty() || ks.back() != k) ks.push_back(k);
  }
  return ks;
}

}  // namespace detail

// members must be strictly increasing; n must be a member.
inline double subseq_normalizer(const std::vector<std::int64_t>& members, double M,
                                std::int64_t n) {
  if (!std::binary_search(members.begin(), members.end(), n))
    throw std::domain_error("subseq_normalizer: n is not a member of the sequence");
  const auto ks = detail::intersecting_intervals(members, M);
  const std::int64_t kn = detail::geometric_interval_index(n, M);
  const auto it = std::lower_bound(ks.begin(), ks.end(), kn);
  const std::int64_t p = it - ks.begin();
  return std::sqrt(2.0 * std::log(static_cast<double>(p) + 2.0));
}

// Running max over n in N, n <= n_max of |S_n - m_n| / (sqrt(B_n) phi_N(n)).
// Deterministic functional of the trajectory; only used in statistical smoke
// tests (the underlying statement is an a.s. limsup). One forward pass: the
// interval rank p advances exactly when a member lands in a new interval.
inline double lil_subseq_statistic(const Trajectory& traj, const MomentSweep& sweep,
                                   const std::vector<std::int64_t>& members, double M) {
  double stat = 0.0;
  std::int64_t k = -1;
  std::int64_t p = -1;
  std::int64_t prev_k = std::numeric_limits<std::int64_t>::min();
  double phi = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const std::int64_t n = members[i];
    if (i > 0 && n <= members[i - 1])
      throw std::invalid_argument("subsequence members must be strictly increasing");
    if (k < 0)
      k = detail::geometric_interval_index(n, M);
    else
      while (std::pow(M, static_cast<double>(k + 1)) < static_cast<double>(n)) ++k;
    if (k != prev_k) {
      ++p;
      prev_k = k;
      phi = std::sqrt(2.0 * std::log(static_cast<double>(p) + 2.0));
    }
    if (n < traj.start() || n > traj.n_max) continue;
    const double dev = std::abs(static_cast<double>(traj.sum_at(n)) - sweep.mean(n)) /
                       (std::sqrt(sweep.variance(n)) * phi);
    stat = std::max(stat, dev);
  }
  return stat;
}

// ---------------------------------------------------------------------------
// Large-gap machinery: the events E_m = {xi_{m+j} = 0, 1 <= j <= c log^2 m}.
// ---------------------------------------------------------------------------

struct GapConfig {
  double c = 1.0;

  // m_1 = 2, m_{r+1} = m_r + floor(c log^2 m_r) + 1
  std::vector<std::int64_t> grid_up_to(std::int64_t horizon) const {
    std::vector<std::int64_t> ms;
    std::int64_t m = 2;
    while (m <= horizon) {
      ms.push_back(m);
      m += gap_window_length(m, c) + 1;
    }
    return ms;
  }

  static std::int64_t gap_window_length(std::int64_t m, double c) {
    const double lm = std::log(static_cast<double>(m));
    return static_cast<std::int64_t>(std::floor(c * lm * lm));
  }
};

// P{E_m} = prod_{1 <= j <= c log^2 m} (1 - 1/log(m+j)), exactly (finite
// product; empty product is 1). Defined for m >= 2 so every factor lies in
// (0,1); the m_1 = 2 grid point has an empty window for c <= 2.
inline double gap_event_prob(std::int64_t m, double c) {
  if (m < 2) throw std::domain_error("gap_event_prob: m must be >= 2");
  const std::int64_t len = GapConfig::gap_window_length(m, c);
  double prod = 1.0;
  for (std::int64_t j = 1; j <= len; ++j)
    prod *= 1.0 - 1.0 / std::log(static_cast<double>(m + j));
  return prod;
}

struct GapStatistics {
  double max_ratio = 0.0;      // max over jumps of (P_{nu+1} - P_nu) / log^2 P_nu
  double max_ratio_tail = 0.0; // same, restricted to P_nu >= kTailFloor
  std::int64_t events = 0;     // N_J: count of E_{m_r} occurring
  std::int64_t grid_size = 0;  // J
  double expected = 0.0;       // sum_r P{E_{m_r}}
  double be_normalized = 0.0;  // (N_J - expected) / sqrt(sum P(1-P))

  // The full max is dominated by the first few jumps, where log^2 P_nu is
  // tiny and the limsup asymptotics have not set in; the tail variant is the
  // one comparable with the limsup constant.
  static constexpr std::int64_t kTailFloor = 100;
};

inline GapStatistics gap_statistics(const Trajectory& traj, double c) {
  const auto js = jump_instants(traj);
  if (js.instants.size() < 2)
    throw std::domain_error("gap_statistics: need at least two jumps");
  GapStatistics g;
  for (std::size_t i = 0; i + 1 < js.instants.size(); ++i) {
    const double lp = std::log(static_cast<double>(js.instants[i]));
    const double ratio = static_cast<double>(js.instants[i + 1] - js.instants[i]) / (lp * lp);
    g.max_ratio = std::max(g.max_ratio, ratio);
    if (js.instants[i] >= GapStatistics::kTailFloor)
      g.max_ratio_tail = std::max(g.max_ratio_tail, ratio);
  }
  double var_sum = 0.0;
  for (std::int64_t m = 2; m + GapConfig::gap_window_length(m, c) <= traj.n_max;
       m += GapConfig::gap_window_length(m, c) + 1) {
    const std::int64_t len = GapConfig::gap_window_length(m, c);
    ++g.grid_size;
    const bool occurred = traj.sum_at(m + len) == traj.sum_at(m);
    g.events += occurred;
    const double p = gap_event_prob(m, c);
    g.expected += p;
    var_sum += p * (1.0 - p);
  }
  g.be_normalized = (static_cast<double>(g.events) - g.expected) / std::sqrt(var_sum);
  return g;
}

}  // namespace cramersim
