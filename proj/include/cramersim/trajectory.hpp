#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cramersim/model.hpp"
#include "cramersim/rng.hpp"

namespace cramersim {

// One sample path of the walk S_n = sum_{j=start}^{n} xi_j.
// bits[j - start] is xi_j, sums[j - start] is S_j.
struct Trajectory {
  ModelSpec spec;
  std::uint64_t seed = 0;
  std::int64_t n_max = 0;
  std::vector<std::uint8_t> bits;
  std::vector<std::uint32_t> sums;

  std::int64_t start() const { return spec.start_index; }

  std::uint8_t bit(std::int64_t j) const { return bits[offset(j)]; }

  // S_j; zero below the first random index.
  std::uint32_t sum_at(std::int64_t j) const {
    if (j < spec.start_index) return 0;
    return sums[offset(j)];
  }

 private:
  std::size_t offset(std::int64_t j) const {
    if (j < spec.start_index || j > n_max)
      throw std::domain_error("Trajectory: index out of range");
    return static_cast<std::size_t>(j - spec.start_index);
  }
};

// Draw xi_j by comparing one uniform against p_j. The uniform for index j is
// u64_at(key, j), so the path is a pure function of (spec, n_max, seed) no
// matter how it is traversed.
inline Trajectory sample_trajectory(const ModelSpec& spec, std::int64_t n_max,
                                    std::uint64_t seed) {
  if (n_max < spec.start_index)
    throw std::domain_error("sample_trajectory: n_max below start_index");
  Trajectory t;
  t.spec = spec;
  t.seed = seed;
  t.n_max = n_max;
  const std::size_t count = static_cast<std::size_t>(n_max - spec.start_index + 1);
  t.bits.resize(count);
  t.sums.resize(count);
  const std::uint64_t key = derive_key(seed, 0);
  std::uint32_t s = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const std::int64_t j = spec.start_index + static_cast<std::int64_t>(i);
    const std::uint8_t bit = unit_at(key, static_cast<std::uint64_t>(j)) < spec.weight(j);
    t.bits[i] = bit;
    s += bit;
    t.sums[i] = s;
  }
  return t;
}

// Same path, with p_j read from a prebuilt sweep (hot loops; identical output).
inline Trajectory sample_trajectory(const MomentSweep& sweep, std::int64_t n_max,
                                    std::uint64_t seed) {
  if (n_max > sweep.n_max())
    throw std::domain_error("sample_trajectory: n_max beyond sweep");
  Trajectory t;
  t.spec = sweep.spec();
  t.seed = seed;
  t.n_max = n_max;
  const std::int64_t start = sweep.start();
  const std::size_t count = static_cast<std::size_t>(n_max - start + 1);
  t.bits.resize(count);
  t.sums.resize(count);
  const std::uint64_t key = derive_key(seed, 0);
  std::uint32_t s = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const std::int64_t j = start + static_cast<std::int64_t>(i);
    const std::uint8_t bit = unit_at(key, static_cast<std::uint64_t>(j)) < sweep.p(j);
    t.bits[i] = bit;
    s += bit;
    t.sums[i] = s;
  }
  return t;
}

// Jump instants P_1 < P_2 < ... of a trajectory: P_nu is the nu-th index j
// with xi_j = 1. For the fair-coin walk the instants are the Delta_k of the
// Bernoulli model and the first differences are the gaps delta_l.
struct JumpSequence {
  std::vector<std::int64_t> instants;
  std::vector<std::int64_t> gaps;        // fair coin only: delta_l
  std::vector<std::int64_t> cumulative;  // fair coin only: Delta_k (== instants)
};

inline JumpSequence jump_instants(const Trajectory& traj) {
  JumpSequence js;
  for (std::size_t i = 0; i < traj.bits.size(); ++i)
    if (traj.bits[i]) js.instants.push_back(traj.start() + static_cast<std::int64_t>(i));
  if (traj.spec.kind == ModelKind::fair_coin) {
    js.cumulative = js.instants;
    std::int64_t prev = 0;
    js.gaps.reserve(js.instants.size());
    for (std::int64_t p : js.instants) {
      js.gaps.push_back(p - prev);
      prev = p;
    }
  }
  return js;
}

}  // namespace cramersim
