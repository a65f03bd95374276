#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cramersim/mc.hpp"
#include "cramersim/rng.hpp"

namespace cramersim {

// Stationary Ornstein-Uhlenbeck process U(t) = W(e^t) e^{-t/2}: standard
// normal marginals, covariance e^{-|tau|/2}. Grid samples use the exact
// transition
//     U(s + dt) = e^{-dt/2} U(s) + sqrt(1 - e^{-dt}) Z,
// so there is no discretization error in law at the grid points. Suprema are
// taken over grid points only; the resulting survival bias is one-sided
// (crossings between grid points are missed) and O(sqrt(dt)).

struct OUPath {
  double dt = 0.0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> samples;  // U(0), U(dt), ...
};

namespace detail {

inline void check_ou_args(double dt, double T) {
  if (!(dt > 0.0 && dt <= 0.1)) throw std::domain_error("ou: need 0 < dt <= 0.1");
  if (!(T >= 0.0 && T <= 10000.0)) throw std::domain_error("ou: need 0 <= T <= 1e4");
}

}  // namespace detail

inline OUPath simulate_ou(double dt, double T, std::uint64_t seed) {
  detail::check_ou_args(dt, T);
  OUPath path;
  path.dt = dt;
  path.horizon = T;
  path.seed = seed;
  const std::size_t steps = static_cast<std::size_t>(std::llround(T / dt));
  path.samples.resize(steps + 1);
  CounterRng rng(derive_key(seed, 0));
  const double a = std::exp(-dt / 2.0);
  const double s = std::sqrt(1.0 - std::exp(-dt));
  double u = rng.next_gaussian();
  path.samples[0] = u;
  for (std::size_t i = 1; i <= steps; ++i) {
    u = a * u + s * rng.next_gaussian();
    path.samples[i] = u;
  }
  return path;
}

// Plain Monte Carlo estimate of P{ sup_{grid in [0,T]} |U| <= z } with a
// Wilson interval. Adequate while the probability is not microscopic; the
// deep-tail curve below covers the rest.
inline McReport ou_survival_prob(double z, double T, double dt, std::int64_t replicas,
                                 std::uint64_t master_seed) {
  if (!(z > 0.0)) throw std::domain_error("ou_survival_prob: z must be positive");
  detail::check_ou_args(dt, T);
  const std::int64_t steps = std::llround(T / dt);
  const double a = std::exp(-dt / 2.0);
  const double s = std::sqrt(1.0 - std::exp(-dt));
  return mc_estimate("ou_survival", {{"z", z}, {"T", T}, {"dt", dt}}, replicas, master_seed,
                     [=](CounterRng& rng) {
                       double u = rng.next_gaussian();
                       if (std::abs(u) > z) return false;
                       for (std::int64_t i = 0; i < steps; ++i) {
                         u = a * u + s * rng.next_gaussian();
                         if (std::abs(u) > z) return false;
                       }
                       return true;
                     });
}

// Survival probabilities at a ladder of horizons from one fixed-population
// splitting run: particles evolve level by level, survivors are cloned back
// to full population, and the estimate is the product of per-level survival
// fractions. Reaches e^{-100}-scale probabilities at fixed cost. Variance of
// log P is accumulated per level (resampling correlations ignored), and the
// reported interval is exp(log P +- 1.96 sigma).
struct SurvivalCurvePoint {
  double time = 0.0;
  double log_prob = 0.0;  // -inf once the population dies out
  double log_sd = 0.0;
};

struct SurvivalCurve {
  double z = 0.0;
  double dt = 0.0;
  double level_width = 0.0;
  std::int64_t particles = 0;
  std::uint64_t master_seed = 0;
  std::vector<SurvivalCurvePoint> points;
};

inline SurvivalCurve ou_survival_curve(double z, const std::vector<double>& horizons,
                                       double dt, std::int64_t particles,
                                       std::uint64_t master_seed, double level_width) {
  if (!(z > 0.0)) throw std::domain_error("ou_survival_curve: z must be positive");
  if (horizons.empty()) throw std::invalid_argument("ou_survival_curve: no horizons");
  if (particles < 1000) throw std::domain_error("ou_survival_curve: need >= 1000 particles");
  detail::check_ou_args(dt, horizons.back());
  const std::int64_t steps_per_level = std::llround(level_width / dt);
  if (steps_per_level < 1 ||
      std::abs(steps_per_level * dt - level_width) > 1e-9 * level_width)
    throw std::domain_error("ou_survival_curve: level_width must be a multiple of dt");
  for (double T : horizons) {
    const double levels = T / level_width;
    if (std::abs(levels - std::round(levels)) > 1e-9)
      throw std::domain_error("ou_survival_curve: horizons must sit on level boundaries");
  }

  SurvivalCurve curve;
  curve.z = z;
  curve.dt = dt;
  curve.level_width = level_width;
  curve.particles = particles;
  curve.master_seed = master_seed;

  const double a = std::exp(-dt / 2.0);
  const double s = std::sqrt(1.0 - std::exp(-dt));
  const std::size_t n = static_cast<std::size_t>(particles);
  std::vector<double> state(n), next_state(n);
  std::vector<std::uint8_t> alive(n);

  // level 0: stationary start, survivors of the t = 0 test
  parallel_for(particles, [&](std::int64_t i) {
    CounterRng rng(derive_key(derive_key(master_seed, 0), static_cast<std::uint64_t>(i)));
    const double u = rng.next_gaussian();
    state[static_cast<std::size_t>(i)] = u;
    alive[static_cast<std::size_t>(i)] = std::abs(u) <= z;
  });

  double log_p = 0.0;
  double log_var = 0.0;
  bool dead = false;
  const std::int64_t total_levels = std::llround(horizons.back() / level_width);
  std::size_t next_horizon = 0;

  auto compact_and_record = [&](std::int64_t level, double time) {
    std::int64_t survivors = 0;
    for (std::uint8_t f : alive) survivors += f;
    if (survivors == 0) {
      dead = true;
    } else {
      const double p = static_cast<double>(survivors) / static_cast<double>(particles);
      log_p += std::log(p);
      log_var += (1.0 - p) / (static_cast<double>(particles) * p);
      // clone survivors (in index order) back to the full population
      std::vector<double> pool;
      pool.reserve(static_cast<std::size_t>(survivors));
      for (std::size_t i = 0; i < n; ++i)
        if (alive[i]) pool.push_back(state[i]);
      for (std::size_t i = 0; i < n; ++i) state[i] = pool[i % pool.size()];
    }
    while (next_horizon < horizons.size() &&
           std::llround(horizons[next_horizon] / level_width) == level) {
      curve.points.push_back({time, dead ? -std::numeric_limits<double>::infinity() : log_p,
                              std::sqrt(log_var)});
      ++next_horizon;
    }
  };

  compact_and_record(0, 0.0);

  for (std::int64_t level = 1; level <= total_levels && !dead; ++level) {
    parallel_for(particles, [&](std::int64_t i) {
      CounterRng rng(derive_key(derive_key(master_seed, static_cast<std::uint64_t>(level)),
                                static_cast<std::uint64_t>(i)));
      double u = state[static_cast<std::size_t>(i)];
      bool ok = true;
      for (std::int64_t st = 0; st < steps_per_level; ++st) {
        u = a * u + s * rng.next_gaussian();
        if (std::abs(u) > z) {
          ok = false;
          break;
        }
      }
      next_state[static_cast<std::size_t>(i)] = u;
      alive[static_cast<std::size_t>(i)] = ok;
    });
    std::swap(state, next_state);
    compact_and_record(level, static_cast<double>(level) * level_width);
  }
  while (next_horizon < horizons.size()) {  // population died before later horizons
    curve.points.push_back({horizons[next_horizon],
                            -std::numeric_limits<double>::infinity(), 0.0});
    ++next_horizon;
  }
  return curve;
}

// dt-halving control for the grid-crossing bias: halve dt until the estimate
// moves by less than one CI width, and return the finest-grid report.
inline McReport ou_survival_prob_controlled(double z, double T, double dt0,
                                            std::int64_t replicas, std::uint64_t master_seed,
                                            int max_halvings = 3) {
  McReport prev = ou_survival_prob(z, T, dt0, replicas, master_seed);
  double dt = dt0;
  for (int h = 0; h < max_halvings; ++h) {
    dt /= 2.0;
    McReport cur = ou_survival_prob(z, T, dt, replicas, master_seed + 1 + static_cast<std::uint64_t>(h));
    const double width = prev.ci_high - prev.ci_low;
    const bool settled = std::abs(cur.estimate - prev.estimate) < width;
    prev = cur;
    if (settled) break;
  }
  return prev;
}

}  // namespace cramersim
