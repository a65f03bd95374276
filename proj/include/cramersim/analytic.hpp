#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cramersim/exact_law.hpp"
#include "cramersim/model.hpp"
#include "cramersim/primes.hpp"

namespace cramersim {

// Euler's constant, 20 digits.
inline constexpr double kEulerGamma = 0.57721566490153286061;

// ---------------------------------------------------------------------------
// Characteristic function of S_n, Phi_n(t) = prod_j (1 - p_j + p_j e^{2 pi i t}),
// together with the explicit bounds
//   |Phi_n(t)|  <= exp(-2 B_n sin^2 pi t)
//   Phi_n(t)     = exp(2 pi i t m_n - 2 B_n (pi t)^2 + E_n),  |E_n| <= 12 m_n (pi|t|)^3,
// the latter valid where the per-factor expansion applies (small |t|).
// ---------------------------------------------------------------------------

struct CharFuncValue {
  double t = 0.0;
  std::complex<double> value;
  double modulus_bound = 0.0;
  double phase_error_bound = 0.0;
};

inline CharFuncValue char_func_exact(const ModelSpec& spec, std::int64_t n, double t) {
  if (n < spec.start_index) throw std::domain_error("char_func_exact: n below start_index");
  const std::complex<double> e = std::polar(1.0, 2.0 * M_PI * t);
  std::complex<double> prod = 1.0;
  double m = 0.0, b = 0.0;
  for (std::int64_t j = spec.start_index; j <= n; ++j) {
    const double p = spec.weight(j);
    prod *= (1.0 - p) + p * e;
    m += p;
    b += p * (1.0 - p);
  }
  CharFuncValue v;
  v.t = t;
  v.value = prod;
  const double s = std::sin(M_PI * t);
  v.modulus_bound = std::exp(-2.0 * b * s * s);
  v.phase_error_bound = 12.0 * m * std::pow(M_PI * std::abs(t), 3);
  return v;
}

inline CharFuncValue char_func_gaussian(const ModelSpec& spec, std::int64_t n, double t) {
  const Moments mo = moments(spec, n);
  CharFuncValue v;
  v.t = t;
  const double re = -2.0 * mo.variance * (M_PI * t) * (M_PI * t);
  const double im = 2.0 * M_PI * t * mo.mean;
  v.value = std::exp(std::complex<double>(re, im));
  const double s = std::sin(M_PI * t);
  v.modulus_bound = std::exp(-2.0 * mo.variance * s * s);
  v.phase_error_bound = 12.0 * mo.mean * std::pow(M_PI * std::abs(t), 3);
  return v;
}

// ---------------------------------------------------------------------------
// Local limit theorem: Gaussian density at an integer point with the
// (log n)^{3/2} / n error scale, valid for |kappa - m_n| <= c_win n^{3/4}/log n.
// ---------------------------------------------------------------------------

struct LltEstimate {
  std::int64_t kappa = 0;
  double density = 0.0;
  double error_scale = 0.0;
  bool in_validity_window = false;
};

inline LltEstimate llt_gaussian(const ModelSpec& spec, std::int64_t n, std::int64_t kappa,
                                double c_win = 1.0) {
  const Moments mo = moments(spec, n);
  LltEstimate e;
  e.kappa = kappa;
  const double d = static_cast<double>(kappa) - mo.mean;
  e.density = std::exp(-d * d / (2.0 * mo.variance)) / std::sqrt(2.0 * M_PI * mo.variance);
  const double ln = std::log(static_cast<double>(n));
  e.error_scale = std::pow(ln, 1.5) / static_cast<double>(n);
  e.in_validity_window = std::abs(d) <= c_win * std::pow(static_cast<double>(n), 0.75) / ln;
  return e;
}

// Gaussian density for the same mean/variance, reusable against a sweep.
inline double gaussian_density(double x, double mean, double variance) {
  const double d = x - mean;
  return std::exp(-d * d / (2.0 * variance)) / std::sqrt(2.0 * M_PI * variance);
}

// Smoothness characteristic of a lattice law: sum_k min(P{X=v_k}, P{X=v_{k+1}}).
// The law is passed as the ordered vector of masses on consecutive lattice
// points (zero mass off the ends is implicit).
inline double lattice_span_characteristic(const std::vector<double>& masses) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < masses.size(); ++i) s += std::min(masses[i], masses[i + 1]);
  return s;
}

// ---------------------------------------------------------------------------
// Jump-instant laws of the Bernoulli(1/2) walk.
//   P{delta_l = m}  = 2^{-m}
//   P{Delta_k = m}  = C(m-1, k-1) / 2^m = (1/2) P{B_{m-1} = k-1}
// Binomial masses go through log-gamma; the direct product underflows near
// m ~ 1e3.
// ---------------------------------------------------------------------------

inline double log_binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(k + 1)) -
         std::lgamma(static_cast<double>(n - k + 1));
}

inline double delta_law(std::int64_t k, std::int64_t m) {
  if (k < 1) throw std::domain_error("delta_law: k must be >= 1");
  if (m < k) return 0.0;
  const double lg = log_binomial(m - 1, k - 1) - static_cast<double>(m) * std::log(2.0);
  return std::exp(lg);
}

struct DeltaLlt {
  double density = 0.0;
  double error_scale = 0.0;  // O(1/k) absolute scale
};

inline DeltaLlt delta_llt(std::int64_t k, std::int64_t n) {
  if (k < 1) throw std::domain_error("delta_llt: k must be >= 1");
  const double kk = static_cast<double>(k);
  const double d = static_cast<double>(n) - 2.0 * kk;
  DeltaLlt r;
  r.density = std::exp(-d * d / (4.0 * kk)) / (2.0 * std::sqrt(M_PI * kk));
  r.error_scale = 1.0 / kk;
  return r;
}

// ---------------------------------------------------------------------------
// Elliptic theta series for divisibility of the walks.
//
// theta(d, m, B) is the one-sided series
//     sum_{l >= 0} cos(2 m pi l / d) exp(-B pi^2 l^2 / (2 d^2)),
// the l = 0 term counted once; theta_two_sided doubles every l >= 1 term
// (i.e. the sum over l in Z of the same summand).
//
// The Gaussian periodization that matches P{d | S_n} is the two-sided series
// evaluated at (mean, 4 * variance): by Poisson summation,
//     theta_two_sided(d, mu, 4 sigma^2) / d
//       = sum_{z == 0 (mod d)} N(z; mu, sigma^2) density.
// For the Bernoulli walk (mu = n/2, sigma^2 = n/4) this is exactly the
// Theta(d, n) = sum_{l in Z} e^{i n pi l / d - n pi^2 l^2 / (2 d^2)} of the
// divisibility theorem.
// ---------------------------------------------------------------------------

struct ThetaValue {
  std::int64_t d = 1;
  double location = 0.0;
  double scale = 0.0;
  double value = 0.0;
  double truncation_bound = 0.0;
  int terms = 0;
};

namespace detail {

inline ThetaValue theta_series(std::int64_t d, double location, double scale, bool two_sided) {
  if (d < 1) throw std::domain_error("theta: d must be >= 1");
  if (!(scale > 0.0)) throw std::domain_error("theta: scale must be positive");
  const double dd = static_cast<double>(d);
  const double decay = scale * M_PI * M_PI / (2.0 * dd * dd);
  const double phase = 2.0 * location * M_PI / dd;
  const double weight = two_sided ? 2.0 : 1.0;
  ThetaValue tv;
  tv.d = d;
  tv.location = location;
  tv.scale = scale;
  double sum = 1.0;  // l = 0
  int l = 1;
  double env = std::exp(-decay);
  while (env >= 1e-18) {
    sum += weight * std::cos(phase * l) * env;
    ++l;
    env = std::exp(-decay * static_cast<double>(l) * static_cast<double>(l));
    if (l > 100000) throw std::runtime_error("theta: series did not truncate");
  }
  tv.value = sum;
  tv.truncation_bound = weight * env / std::max(1.0 - std::exp(-decay * (2.0 * l + 1.0)), 1e-300);
  tv.terms = l;
  return tv;
}

}  // namespace detail

inline ThetaValue theta(std::int64_t d, double location, double scale) {
  return detail::theta_series(d, location, scale, false);
}

inline ThetaValue theta_two_sided(std::int64_t d, double location, double scale) {
  return detail::theta_series(d, location, scale, true);
}

// Theta(d, n) of the Bernoulli divisibility theorem (two-sided convention).
inline double theta_fair_coin(std::int64_t d, std::int64_t n) {
  return theta_two_sided(d, static_cast<double>(n) / 2.0, static_cast<double>(n)).value;
}

// Closed-form estimate of P{d | S_n} as Theta/d, using the Gaussian
// periodization at the model's (mean, 4 variance). For the fair coin this is
// the literal Theta(d, n)/d.
inline double divisibility_estimate(const ModelSpec& spec, std::int64_t d, std::int64_t n) {
  if (d < 2 || d > n) throw std::domain_error("divisibility_estimate: need 2 <= d <= n");
  if (spec.kind == ModelKind::fair_coin)
    return theta_fair_coin(d, n) / static_cast<double>(d);
  const Moments mo = moments(spec, n);
  return theta_two_sided(d, mo.mean, 4.0 * mo.variance).value / static_cast<double>(d);
}

// ---------------------------------------------------------------------------
// Quasiprime density and prime-probability estimators.
// ---------------------------------------------------------------------------

// Mertens-type limit: P{P^-(B_k) > zeta} -> e^{-gamma} / log zeta.
inline double quasiprime_asymptotic(double zeta) {
  if (!(zeta > 1.0)) throw std::domain_error("quasiprime_asymptotic: zeta must exceed 1");
  return std::exp(-kEulerGamma) / std::log(zeta);
}

struct SnPrimeEstimate {
  double estimate = 0.0;
  double half_width = 0.0;
  double error_scale = 0.0;  // (log n)^{3/2} / sqrt(n)
};

// Main term of the prime-probability formula: Gaussian window integral
// against d pi(t) over [m_n +- sqrt(2 b B_n log n)].
inline SnPrimeEstimate sn_prime_estimate(const ModelSpec& spec, std::int64_t n, double b,
                                         const PrimeTable& table) {
  if (!(b > 0.5)) throw std::domain_error("sn_prime_estimate: b must exceed 1/2");
  const Moments mo = moments(spec, n);
  const double ln = std::log(static_cast<double>(n));
  SnPrimeEstimate r;
  r.half_width = std::sqrt(2.0 * b * mo.variance * ln);
  if (mo.mean + r.half_width > static_cast<double>(table.limit()))
    throw std::domain_error("sn_prime_estimate: sieve too small for the window");
  if (mo.mean - r.half_width >= 2.0) {
    r.estimate = gaussian_prime_sum(mo.mean, mo.variance, r.half_width, table);
  } else {
    // window clipped at 2 for small n; same kernel, same upper edge
    const double norm = 1.0 / std::sqrt(2.0 * M_PI * mo.variance);
    double sum = 0.0;
    table.for_primes_in(2, static_cast<std::uint64_t>(std::floor(mo.mean + r.half_width)),
                        [&](std::uint64_t p) {
                          const double d = static_cast<double>(p) - mo.mean;
                          sum += norm * std::exp(-d * d / (2.0 * mo.variance));
                        });
    r.estimate = sum;
  }
  r.error_scale = std::pow(ln, 1.5) / std::sqrt(static_cast<double>(n));
  return r;
}

// P{Delta_k in P} = (1/2) sum_{nu in P, nu >= k} P{B_{nu-1} = k-1}
//                 = sum_{nu in P, nu >= k} delta_law(k, nu),
// truncated once the un-summed Delta_k mass drops below tail_eps.
inline double delta_prime_hit_prob(std::int64_t k, const PrimeSet& primes, double tail_eps) {
  if (k < 1) throw std::domain_error("delta_prime_hit_prob: k must be >= 1");
  if (primes.empty()) return 0.0;
  double hit = 0.0;
  double covered = 0.0;
  const std::int64_t hard_cap = k + 64 * (k + 64);  // far beyond any usable tail
  for (std::int64_t nu = k; nu <= hard_cap; ++nu) {
    const double mass = delta_law(k, nu);
    covered += mass;
    if (primes.contains(static_cast<std::uint64_t>(nu))) hit += mass;
    if (1.0 - covered < tail_eps) break;
  }
  return hit;
}

// ---------------------------------------------------------------------------
// Zeta partial sums: sum_{k<=n} k^{-s} plus the closed asymptotic form
//   n^{1-s}/(1-s) + zeta(s)    (0 < s < 1)
//   log n + gamma              (s = 1)
// with zeta(s) computed from its defining limit
//   zeta(s) = lim_x (sum_{n<=x} n^{-s} - x^{1-s}/(1-s)),
// Richardson-accelerated to ~1e-10.
// ---------------------------------------------------------------------------

inline double zeta_limit_def(double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("zeta_limit_def: need 0 < s < 1");
  // remainder R(x) = zeta + x^{-s}/2 - (s/12) x^{-s-1} + O(x^{-s-3})
  const int levels = 4;
  double R[levels];
  double x = 65536.0;
  {
    detail::CompensatedSum sum;
    std::int64_t n = 1;
    for (int i = 0; i < levels; ++i) {
      for (; n <= static_cast<std::int64_t>(x); ++n)
        sum.add(std::pow(static_cast<double>(n), -s));
      R[i] = sum.value() - std::pow(x, 1.0 - s) / (1.0 - s);
      x *= 2.0;
    }
  }
  const double expo[levels - 1] = {s, s + 1.0, s + 3.0};
  for (int lvl = 0; lvl < levels - 1; ++lvl) {
    const double w = std::pow(2.0, -expo[lvl]);
    for (int i = 0; i < levels - 1 - lvl; ++i) R[i] = (R[i + 1] - w * R[i]) / (1.0 - w);
  }
  return R[0];
}

struct ZetaPartialSum {
  double sum = 0.0;
  double asymptotic = 0.0;
};

inline ZetaPartialSum zeta_partial_sum(std::int64_t n, double s) {
  if (n < 1) throw std::domain_error("zeta_partial_sum: n must be >= 1");
  if (!(s > 0.0 && s <= 1.0)) throw std::domain_error("zeta_partial_sum: need 0 < s <= 1");
  detail::CompensatedSum sum;
  for (std::int64_t k = 1; k <= n; ++k) sum.add(std::pow(static_cast<double>(k), -s));
  ZetaPartialSum r;
  r.sum = sum.value();
  if (s == 1.0)
    r.asymptotic = std::log(static_cast<double>(n)) + kEulerGamma;
  else
    r.asymptotic = std::pow(static_cast<double>(n), 1.0 - s) / (1.0 - s) + zeta_limit_def(s);
  return r;
}

}  // namespace cramersim
