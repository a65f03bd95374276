#include <gtest/gtest.h>

#include <cstdlib>

#include "cramersim/experiments.hpp"
#include "cramersim/report.hpp"

using namespace cramersim;

namespace {

// run fn under a forced worker count, restoring the environment afterwards
template <class Fn>
auto with_workers(int workers, Fn&& fn) {
  const char* old = std::getenv("CRAMERSIM_WORKERS");
  const std::string saved = old ? old : "";
  setenv("CRAMERSIM_WORKERS", std::to_string(workers).c_str(), 1);
  auto result = fn();
  if (old)
    setenv("CRAMERSIM_WORKERS", saved.c_str(), 1);
  else
    unsetenv("CRAMERSIM_WORKERS");
  return result;
}

}  // namespace

TEST(McEstimate, ConstantEventAndDeterminism) {
  const auto r = mc_estimate("const", {}, 1000, 1, [](CounterRng&) { return true; });
  EXPECT_DOUBLE_EQ(r.estimate, 1.0);
  EXPECT_DOUBLE_EQ(r.ci_high, 1.0);
  EXPECT_THROW(mc_estimate("few", {}, 99, 1, [](CounterRng&) { return true; }),
               std::domain_error);
}

TEST(McEstimate, FairCoinBand) {
  int passes = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = mc_estimate("coin", {}, 1000000, seed,
                               [](CounterRng& rng) { return rng.next_unit() < 0.5; });
    if (r.estimate >= 0.498 && r.estimate <= 0.502) ++passes;
  }
  EXPECT_GE(passes, 19);
}

TEST(McEstimate, WorkerCountInvariance) {
  auto run = [] {
    return mc_estimate("inv", {{"p", 0.3}}, 50000, 77,
                       [](CounterRng& rng) { return rng.next_unit() < 0.3; });
  };
  const auto r1 = with_workers(1, run);
  const auto r4 = with_workers(4, run);
  EXPECT_EQ(to_json(r1, false).dump(), to_json(r4, false).dump());
}

TEST(Samplers, BinomialHalfMatchesMoments) {
  CounterRng rng(derive_key(5, 0));
  const std::int64_t k = 1000, reps = 20000;
  double sum = 0.0, sum2 = 0.0;
  for (std::int64_t i = 0; i < reps; ++i) {
    const double s = static_cast<double>(sample_binomial_half(k, rng));
    sum += s;
    sum2 += s * s;
  }
  const double mean = sum / reps;
  const double var = sum2 / reps - mean * mean;
  EXPECT_NEAR(mean, 500.0, 4.0 * std::sqrt(250.0 / reps));
  EXPECT_NEAR(var, 250.0, 0.05 * 250.0);
}

TEST(Samplers, DeltaMatchesExactLaw) {
  // chi-square of the geometric-gap sampler against C(m-1,k-1)/2^m
  CounterRng rng(derive_key(6, 0));
  const std::int64_t k = 4, reps = 200000;
  std::vector<double> hist(40, 0.0);
  for (std::int64_t i = 0; i < reps; ++i)
    hist[std::min<std::uint64_t>(sample_delta(k, rng), 39)] += 1.0;
  std::vector<double> obs, expd;
  double o = 0.0, e = 0.0, cum = 0.0;
  for (std::size_t m = 0; m < 40; ++m) {
    const double q = (m == 39) ? 1.0 - cum : delta_law(k, static_cast<std::int64_t>(m));
    cum += (m == 39) ? 0.0 : q;
    o += hist[m];
    e += q * reps;
    if (e >= 10.0) {
      obs.push_back(o);
      expd.push_back(e);
      o = e = 0.0;
    }
  }
  obs.back() += o;
  expd.back() += e;
  const double p =
      chi_square_pvalue(chi_square_statistic(obs, expd), static_cast<double>(obs.size() - 1));
  EXPECT_GT(p, 0.001);
}

TEST(Quasiprime, RangeGuard) {
  const auto table = PrimeTable::sieve(1000);
  EXPECT_THROW(quasiprime_experiment(100000, 1.9, 100, 1, table), std::domain_error);
  EXPECT_THROW(quasiprime_experiment(100000, 1e6, 100, 1, table), std::domain_error);
}

TEST(Quasiprime, SmallRunBrackets) {
  const auto table = PrimeTable::sieve(100000);
  // zeta = 10: small enough to sample cheaply, large enough that the Mertens
  // product sits inside the [0.8, 1.5] bracket of the asymptotic
  const auto r = quasiprime_experiment(20000, 10.0, 2000, 42, table);
  EXPECT_TRUE(r.pass) << r.estimate << " vs " << r.predicted;
  const auto f = fair_coin_quasiprime_experiment(20000, 5.0, 2000, 42, table);
  EXPECT_TRUE(f.pass) << f.estimate << " vs " << f.predicted;
}

TEST(SnPrime, ExperimentPasses) {
  const auto table = PrimeTable::sieve(10000);
  const auto e = sn_prime_experiment(2000, 1.0, 20000, 7, table);
  EXPECT_TRUE(e.analytic_vs_exact.pass)
      << "analytic=" << e.analytic << " exact=" << e.exact << " K=" << e.calibrated_k;
  EXPECT_TRUE(e.mc_vs_exact.pass);
  EXPECT_GT(e.exact, 0.0);
}

TEST(SnPrime, SweepReportsFraction) {
  const auto table = PrimeTable::sieve(10000);
  const auto r = sn_prime_sweep(500, 2000, 500, table);
  EXPECT_GE(r.estimate, 0.0);
  EXPECT_LE(r.estimate, 1.0);
}

TEST(Nonprime, BoundsHold) {
  const auto table = PrimeTable::sieve(1000000);
  // schedule chosen past the hump of log log x / log x (x > e^e)
  const auto out = nonprime_subsequence_experiment({512, 4096, 65536}, 2000, 11, table);
  EXPECT_TRUE(out.pass);
  // partial Borel-Cantelli bounds decrease along the schedule
  for (std::size_t i = 1; i < out.borel_cantelli_bounds.size(); ++i)
    EXPECT_LT(out.borel_cantelli_bounds[i], out.borel_cantelli_bounds[i - 1]);
}

TEST(Avoidance, ExperimentPasses) {
  const auto table = PrimeTable::sieve(200000);
  const auto out = avoidance_experiment(6, 100000, 13, table);
  EXPECT_TRUE(out.hypothesis_ok) << out.hypothesis_sup;
  EXPECT_TRUE(out.decay.pass) << out.decay.estimate;
  for (const auto& mc : out.mc_checks) EXPECT_TRUE(mc.pass) << mc.estimate;
  EXPECT_TRUE(out.pass);
}

TEST(Avoidance, EmptySetHitsNothing) {
  const auto table = PrimeTable::sieve(1000);
  EXPECT_DOUBLE_EQ(delta_prime_hit_prob(10, PrimeSet(), 1e-12), 0.0);
}

TEST(DeltaSuiteTest, SmallReplicaRun) {
  const auto out = delta_suite(200000, 3);
  EXPECT_TRUE(out.marginals_pass);
  EXPECT_GT(out.chi_square_pvalue_10, 0.001);
  EXPECT_LE(out.scaled_err_200, out.calibrated_k);
  EXPECT_TRUE(out.pass);
}

TEST(OuSpectrum, ReducedGridSelectsHalfLambda) {
  // trimmed particle counts; the full-size run is the acceptance suite's job
  const auto out = ou_spectrum_experiment({1.0}, 200000, 0.01, 19);
  ASSERT_EQ(out.rows.size(), 1u);
  EXPECT_EQ(out.rows[0].matched_convention, 2) << out.rows[0].slope_extrapolated;
  EXPECT_LE(out.rows[0].matched_rel_err, 0.10);
  EXPECT_TRUE(out.pass);
}

TEST(AmplitudeExperimentTest, RatioBandHolds) {
  const auto out = amplitude_experiment(0.35, 1.0, {10, 20}, 500, 23, 0.02);
  EXPECT_TRUE(out.pass) << out.ratio_half_lambda[0] << " " << out.ratio_half_lambda[1];
}

TEST(Reports, JsonShapeAndElapsedExclusion) {
  ComparisonReport r;
  r.experiment = "demo";
  r.params = {{"n", 10.0}};
  r.master_seed = 3;
  r.replicas = 100;
  r.estimate = 0.5;
  r.ci_low = 0.4;
  r.ci_high = 0.6;
  r.predicted = 0.55;
  r.rule = "|x - y| <= t";
  r.pass = true;
  r.elapsed_ms = 1234;
  const auto with = to_json(r, true);
  const auto without = to_json(r, false);
  EXPECT_TRUE(with.contains("elapsed_ms"));
  EXPECT_FALSE(without.contains("elapsed_ms"));
  EXPECT_EQ(with["verdict"], "pass");
  EXPECT_EQ(with["params"]["n"], 10.0);
}

TEST(Reports, CsvShortestRoundTrip) {
  CsvTable t({"z", "lambda"});
  t.add_row({0.1, 2.0});
  t.add_row({0.25, 246.25});
  EXPECT_EQ(t.str(), "z,lambda\n0.1,2\n0.25,246.25\n");
  EXPECT_THROW(t.add_row({1.0}), std::invalid_argument);
}

TEST(Determinism, ExperimentsAcrossWorkerCounts) {
  const auto table = PrimeTable::sieve(100000);
  auto run_all = [&] {
    std::string blob;
    blob += to_json(quasiprime_experiment(20000, 5.0, 1000, 99, table), false).dump();
    const auto sn = sn_prime_experiment(1500, 1.0, 5000, 99, table);
    blob += to_json(sn.analytic_vs_exact, false).dump();
    blob += to_json(sn.mc_vs_exact, false).dump();
    const auto curve = ou_survival_curve(1.0, {2.0, 4.0}, 0.02, 20000, 99, 0.5);
    for (const auto& pt : curve.points) blob += shortest_double(pt.log_prob) + ";";
    const auto amp = amplitude_experiment(0.35, 1.0, {10}, 300, 99, 0.02);
    blob += shortest_double(amp.ratio_half_lambda[0]);
    return blob;
  };
  const auto a = with_workers(1, run_all);
  const auto b = with_workers(3, run_all);
  EXPECT_EQ(a, b);
}
