#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "cramersim/experiments.hpp"

namespace cramersim {

// The acceptance battery: every release gate as one pass/fail line. The
// tolerances below are fixed here, not tuned at run time; constants that a
// deterministic oracle can reproduce are measured at their stated calibration
// point inside the criterion itself.

struct CriterionResult {
  int number = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  std::int64_t elapsed_ms = 0;
};

namespace detail {

class CriterionTimer {
 public:
  CriterionTimer() : t0_(std::chrono::steady_clock::now()) {}
  std::int64_t ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

inline std::string fmt(double v) { return shortest_double(v); }

}  // namespace detail

// 1. Exact-law sanity.
inline CriterionResult criterion_exact_law() {
  detail::CriterionTimer timer;
  CriterionResult r{1, "exact-law sanity"};
  std::ostringstream d;
  bool ok = true;

  const auto two = exact_law(ModelSpec::fair_coin(), 2);
  ok &= two.probs.size() == 3 && two.prob(0) == 0.25 && two.prob(1) == 0.5 && two.prob(2) == 0.25;
  d << "fair2=(" << two.prob(0) << "," << two.prob(1) << "," << two.prob(2) << ")";

  const auto spec = ModelSpec::cramer();
  for (std::int64_t n : {100, 1000, 2000}) {
    const auto law = exact_law(spec, n);
    const auto mo = moments(spec, n);
    const bool mean_ok = std::abs(law.mean() - mo.mean) <= 1e-9;
    const bool var_ok = std::abs(law.variance() - mo.variance) <= 1e-6 * mo.variance;
    ok &= mean_ok && var_ok;
    if (!(mean_ok && var_ok)) d << " n=" << n << " moment mismatch";
  }
  r.pass = ok;
  r.detail = d.str();
  r.elapsed_ms = timer.ms();
  return r;
}

// 2. Characteristic-function inequalities with the stated explicit constants.
inline CriterionResult criterion_char_func() {
  detail::CriterionTimer timer;
  CriterionResult r{2, "char-func explicit bounds"};
  const auto spec = ModelSpec::cramer();
  const std::int64_t n = 1000;
  bool modulus_ok = true, phase_ok = true;
  double worst_modulus = 0.0, worst_phase = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double t = std::fmod(0.5 + i * 0.6180339887498949, 1.0) - 0.5;
    const auto v = char_func_exact(spec, n, t);
    const double excess = std::abs(v.value) / (v.modulus_bound * (1.0 + 1e-12));
    worst_modulus = std::max(worst_modulus, excess);
    modulus_ok &= excess <= 1.0;
  }
  for (int i = 1; i <= 100; ++i) {
    const double t = 0.005 * static_cast<double>(i) / 100.0 * ((i % 2) ? 1.0 : -1.0);
    const auto ex = char_func_exact(spec, n, t);
    const auto ga = char_func_gaussian(spec, n, t);
    const double gap = std::abs(std::log(ex.value) - std::log(ga.value));
    worst_phase = std::max(worst_phase, gap / ga.phase_error_bound);
    phase_ok &= gap <= ga.phase_error_bound;
  }
  r.pass = modulus_ok && phase_ok;
  r.detail = "max|Phi|/bound=" + detail::fmt(worst_modulus) +
             " maxE/bound=" + detail::fmt(worst_phase);
  r.elapsed_ms = timer.ms();
  return r;
}

// 3. Sharp LLT rate stability.
inline CriterionResult criterion_llt_rate() {
  detail::CriterionTimer timer;
  CriterionResult r{3, "sharp LLT rate"};
  const auto spec = ModelSpec::cramer();
  auto scaled_sup = [&](std::int64_t n) {
    const auto law = exact_law(spec, n);
    const auto mo = moments(spec, n);
    const double window = calibration::kLltWindowConstant *
                          std::pow(static_cast<double>(n), 0.75) /
                          std::log(static_cast<double>(n));
    double sup = 0.0;
    for (std::int64_t k = static_cast<std::int64_t>(mo.mean - window);
         k <= static_cast<std::int64_t>(mo.mean + window); ++k)
      sup = std::max(sup, std::abs(law.prob(k) -
                                   gaussian_density(static_cast<double>(k), mo.mean, mo.variance)));
    return sup * static_cast<double>(n) / std::pow(std::log(static_cast<double>(n)), 1.5);
  };
  const double K = scaled_sup(500);
  bool ok = true;
  std::ostringstream d;
  d << "K(500)=" << detail::fmt(K) << " scaled:";
  for (std::int64_t n : {500, 1000, 2000, 4000}) {
    const double v = scaled_sup(n);
    d << " " << detail::fmt(v);
    ok &= v >= K / 2.0 && v <= 2.0 * K;
  }
  r.pass = ok;
  r.detail = d.str();
  r.elapsed_ms = timer.ms();
  return r;
}

// 4. Jump-instant laws.
inline CriterionResult criterion_delta_laws(std::uint64_t seed) {
  detail::CriterionTimer timer;
  CriterionResult r{4, "jump-instant laws"};
  const auto out = delta_suite(1000000, seed);
  r.pass = out.pass;
  r.detail = "marginals=" + std::string(out.marginals_pass ? "ok" : "FAIL") +
             " chi2_p=" + detail::fmt(out.chi_square_pvalue_10) +
             " k*err@50=" + detail::fmt(out.scaled_err_50) +
             " k*err@200=" + detail::fmt(out.scaled_err_200) + " (K=" +
             detail::fmt(out.calibrated_k) + ")";
  r.elapsed_ms = timer.ms();
  return r;
}

// 5. Theta divisibility: Poisson identity, rate stability, sharp small-d bound.
inline CriterionResult criterion_theta() {
  detail::CriterionTimer timer;
  CriterionResult r{5, "theta divisibility"};
  bool ok = true;
  std::ostringstream d;

  for (auto [dd, nn] : {std::pair<std::int64_t, std::int64_t>{3, 100}, {17, 1000}}) {
    const double lhs = theta_fair_coin(dd, nn) / static_cast<double>(dd);
    double rhs = 0.0;
    for (std::int64_t z = -100 * dd; z <= nn + 100 * dd; z += dd)
      rhs += std::exp(-std::pow(2.0 * static_cast<double>(z) - static_cast<double>(nn), 2) /
                      (2.0 * static_cast<double>(nn)));
    rhs *= std::sqrt(2.0 / (M_PI * static_cast<double>(nn)));
    ok &= std::abs(lhs - rhs) <= 1e-12;
    d << "poisson(" << dd << "," << nn << ")=" << detail::fmt(std::abs(lhs - rhs)) << " ";
  }

  const std::vector<std::int64_t> ds = {2, 3, 5, 17, 97};
  const auto fair = ModelSpec::fair_coin();
  double base = 0.0;
  for (std::int64_t n : {100, 1000, 10000}) {
    double worst = 0.0;
    for (std::int64_t dd : ds) {
      const auto mod = exact_law_mod(fair, n, dd);
      worst = std::max(worst, std::abs(divisibility_estimate(fair, dd, n) - mod[0]));
    }
    const double scaled = worst * std::pow(static_cast<double>(n), 1.5) /
                          std::pow(std::log(static_cast<double>(n)), 2.5);
    if (n == 100) base = scaled;
    ok &= scaled <= 2.0 * base;
    d << "scaled(" << n << ")=" << detail::fmt(scaled) << " ";
  }

  bool a15 = true;
  for (std::int64_t n : {100, 1000, 10000}) {
    for (std::int64_t dd = 2; dd * dd <= n; ++dd) {
      const double lhs = std::abs(theta_fair_coin(dd, n) - 1.0) / static_cast<double>(dd);
      const double rhs = 3.0 / static_cast<double>(dd) *
                         std::exp(-static_cast<double>(n) * M_PI * M_PI /
                                  (2.0 * static_cast<double>(dd * dd)));
      a15 &= lhs <= rhs;
    }
  }
  ok &= a15;
  d << "A15(K=3)=" << (a15 ? "ok" : "FAIL");
  r.pass = ok;
  r.detail = d.str();
  r.elapsed_ms = timer.ms();
  return r;
}

// 6. Sturm-Liouville eigenvalue.
inline CriterionResult criterion_sturm_liouville() {
  detail::CriterionTimer timer;
  CriterionResult r{6, "Sturm-Liouville eigenvalue"};
  bool ok = true;
  std::ostringstream d;

  const auto unit = principal_eigenvalue({1.0, 20001});
  ok &= std::abs(unit.lambda - 2.0) <= 1e-6;
  double dev = 0.0;
  for (std::size_t i = 0; i < unit.grid.size(); ++i)
    dev = std::max(dev, std::abs(unit.eigenfunction[i] - (1.0 - unit.grid[i] * unit.grid[i])));
  ok &= dev <= 1e-5;
  d << "lambda(1)=" << detail::fmt(unit.lambda) << " psi_dev=" << detail::fmt(dev);

  const auto small = principal_eigenvalue({0.05, 20001});
  ok &= small.asymptotic_ratio >= 0.99 && small.asymptotic_ratio <= 1.01;
  d << " ratio(0.05)=" << detail::fmt(small.asymptotic_ratio);

  std::vector<double> zs;
  for (int i = 0; i <= 20; ++i) zs.push_back(0.1 + 2.9 * i / 20.0);
  const auto curve = lambda_curve(zs, 8001);
  bool mono = true;
  for (std::size_t i = 1; i < curve.size(); ++i) mono &= curve[i].lambda < curve[i - 1].lambda;
  ok &= mono;
  d << " monotone21=" << (mono ? "ok" : "FAIL");

  r.pass = ok;
  r.detail = d.str();
  r.elapsed_ms = timer.ms();
  return r;
}

// 7. OU spectrum link.
inline CriterionResult criterion_ou_spectrum(std::uint64_t seed, std::int64_t particles) {
  detail::CriterionTimer timer;
  CriterionResult r{7, "OU spectrum link"};
  const auto out = ou_spectrum_experiment({0.5, 1.0, 1.5, 2.0}, particles, 0.01, seed);
  std::ostringstream d;
  d << "convention=" << (out.convention == 2 ? "lambda/2" : out.convention == 1 ? "lambda" : "mixed");
  for (const auto& row : out.rows)
    d << " z=" << row.z << ":" << detail::fmt(row.slope_extrapolated) << "/"
      << detail::fmt(row.lambda / 2.0) << " (raw " << detail::fmt(row.slope_raw) << ")";
  r.pass = out.pass;
  r.detail = d.str();
  r.elapsed_ms = timer.ms();
  return r;
}

// 8. Primality of S_n at desk scale.
inline CriterionResult criterion_sn_prime(std::uint64_t seed, const PrimeTable& table) {
  detail::CriterionTimer timer;
  CriterionResult r{8, "S_n primality"};
  const auto e = sn_prime_experiment(3000, 1.0, 100000, seed, table);
  const auto sweep = sn_prime_sweep(500, 5000, 500, table);
  r.pass = e.analytic_vs_exact.pass && e.mc_vs_exact.pass && sweep.pass;
  r.detail = "exact=" + detail::fmt(e.exact) + " analytic=" + detail::fmt(e.analytic) +
             " K=" + detail::fmt(e.calibrated_k) + " mc=" + detail::fmt(e.mc_vs_exact.estimate) +
             " sweep_frac=" + detail::fmt(sweep.estimate);
  r.elapsed_ms = timer.ms();
  return r;
}

// 9. Quasiprimality.
inline CriterionResult criterion_quasiprime(std::uint64_t seed, const PrimeTable& table) {
  detail::CriterionTimer timer;
  CriterionResult r{9, "quasiprimality"};
  std::ostringstream d;
  const auto q = quasiprime_experiment(100000, 10.0, 10000, seed, table);
  bool ok = q.pass;
  d << "S'_1e5 zeta=10: " << detail::fmt(q.estimate) << "/" << detail::fmt(q.predicted);
  for (double zeta : {5.0, 10.0, 20.0}) {
    const auto f = fair_coin_quasiprime_experiment(100000, zeta, 10000, seed + 1, table);
    ok &= f.pass;
    d << " B zeta=" << zeta << ": " << detail::fmt(std::abs(f.estimate - f.predicted)) << "<="
      << detail::fmt(calibration::kFairCoinQuasiprimeC0 / (std::log(zeta) * std::log(zeta)));
  }
  r.pass = ok;
  r.detail = d.str();
  r.elapsed_ms = timer.ms();
  return r;
}

// 10. Prime-set hits of the jump instants.
inline CriterionResult criterion_avoidance(std::uint64_t seed, const PrimeTable& table) {
  detail::CriterionTimer timer;
  CriterionResult r{10, "jump-instant prime hits"};
  const auto out = avoidance_experiment(6, 1000000, seed, table);
  std::ostringstream d;
  for (const auto& mc : out.mc_checks)
    d << "k=" << mc.params[0].second << ": mc=" << detail::fmt(mc.estimate) << " exact="
      << detail::fmt(mc.predicted) << " ";
  d << "decay_max=" << detail::fmt(out.decay.estimate) << " hyp_sup="
    << detail::fmt(out.hypothesis_sup);
  r.pass = out.pass;
  r.detail = d.str();
  r.elapsed_ms = timer.ms();
  return r;
}

// 11. Gap machinery.
inline CriterionResult criterion_gaps(std::uint64_t seed) {
  detail::CriterionTimer timer;
  CriterionResult r{11, "gap machinery"};
  const auto out = gaps_experiment(10000000, 20, seed);
  r.pass = out.pass;
  r.detail = "scaling=" + std::string(out.scaling_pass ? "ok" : "FAIL") +
             " median_tail_ratio=" + detail::fmt(out.median_max_ratio_tail) +
             " (full " + detail::fmt(out.median_max_ratio) + ")" +
             " count_ratio=" + detail::fmt(out.median_count_ratio);
  r.elapsed_ms = timer.ms();
  return r;
}

// 12. Determinism across worker counts.
inline CriterionResult criterion_determinism(std::uint64_t seed, const PrimeTable& table) {
  detail::CriterionTimer timer;
  CriterionResult r{12, "worker-count determinism"};

  auto run_battery = [&] {
    std::string blob;
    blob += to_json(quasiprime_experiment(20000, 10.0, 1000, seed, table), false).dump();
    const auto sn = sn_prime_experiment(1500, 1.0, 5000, seed, table);
    blob += to_json(sn.analytic_vs_exact, false).dump();
    blob += to_json(sn.mc_vs_exact, false).dump();
    const auto curve = ou_survival_curve(1.0, {2.0, 4.0}, 0.02, 20000, seed, 0.5);
    for (const auto& pt : curve.points) blob += shortest_double(pt.log_prob) + ";";
    const auto amp = amplitude_experiment(0.35, 1.0, {10}, 300, seed, 0.02);
    blob += shortest_double(amp.ratio_half_lambda[0]) + ";";
    const auto gaps = gaps_experiment(1000000, 6, seed);
    blob += shortest_double(gaps.median_max_ratio_tail) + ";";
    const auto ds = delta_suite(200000, seed);
    blob += shortest_double(ds.chi_square_pvalue_10);
    return blob;
  };

  const char* old = std::getenv("CRAMERSIM_WORKERS");
  const std::string saved = old ? old : "";
  setenv("CRAMERSIM_WORKERS", "1", 1);
  const std::string one = run_battery();
  setenv("CRAMERSIM_WORKERS", "3", 1);
  const std::string three = run_battery();
  if (old)
    setenv("CRAMERSIM_WORKERS", saved.c_str(), 1);
  else
    unsetenv("CRAMERSIM_WORKERS");

  r.pass = one == three;
  r.detail = r.pass ? "byte-identical across worker counts 1 and 3"
                    : "reports differ across worker counts";
  r.elapsed_ms = timer.ms();
  return r;
}

// Full battery. report_dir, when nonempty, receives one JSON report per
// criterion.
inline std::vector<CriterionResult> run_acceptance(std::uint64_t master_seed,
                                                   const std::string& report_dir = "",
                                                   std::int64_t ou_particles = 1000000) {
  const auto table = PrimeTable::sieve(2000000);
  std::vector<CriterionResult> results;
  results.push_back(criterion_exact_law());
  results.push_back(criterion_char_func());
  results.push_back(criterion_llt_rate());
  results.push_back(criterion_delta_laws(master_seed));
  results.push_back(criterion_theta());
  results.push_back(criterion_sturm_liouville());
  results.push_back(criterion_ou_spectrum(master_seed, ou_particles));
  results.push_back(criterion_sn_prime(master_seed, table));
  results.push_back(criterion_quasiprime(master_seed, table));
  results.push_back(criterion_avoidance(master_seed, table));
  results.push_back(criterion_gaps(master_seed));
  results.push_back(criterion_determinism(master_seed, table));

  if (!report_dir.empty()) {
    std::filesystem::create_directories(report_dir);
    for (const auto& res : results) {
      nlohmann::ordered_json j;
      j["criterion"] = res.number;
      j["name"] = res.name;
      j["verdict"] = res.pass ? "pass" : "fail";
      j["detail"] = res.detail;
      j["master_seed"] = master_seed;
      j["elapsed_ms"] = res.elapsed_ms;
      write_json_file(report_dir + "/criterion_" + std::to_string(res.number) + ".json", j);
    }
  }
  return results;
}

}  // namespace cramersim
