// Command-line front end: every experiment and closed-form evaluation behind
// reproducible flags. Exit codes: 0 pass/success, 1 verdict fail, 2 usage or
// domain error.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cramersim/acceptance.hpp"
#include "cramersim/experiments.hpp"

using namespace cramersim;

namespace {

struct OutputSink {
  std::string path;  // empty = stdout

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      if (text.empty() || text.back() != '\n') std::cout << '\n';
      return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open output path " + path);
    f << text;
    if (text.empty() || text.back() != '\n') f << '\n';
  }

  void write(const nlohmann::ordered_json& j) const { write(j.dump(2)); }
};

// every report echoes the effective configuration
void echo_config(nlohmann::ordered_json& j, const std::vector<std::pair<std::string, double>>& numeric,
                 const std::string& model, std::uint64_t seed) {
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  if (!model.empty()) cfg["model"] = model;
  for (const auto& [k, v] : numeric) cfg[k] = v;
  cfg["master_seed"] = seed;
  j["config"] = cfg;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"cramersim: simulation and closed-form checks for random models of primes"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value configuration file; flags win on conflict");
  app.allow_config_extras(CLI::config_extras_mode::ignore_all);

  std::string model = "cramer";
  std::string out_path;
  std::string format = "json";
  std::uint64_t seed = 42;
  std::int64_t n = 1000;
  std::int64_t d = 3;
  std::int64_t k = 10;
  std::int64_t m = -1;
  std::int64_t replicas = 10000;
  double z = 1.0, c = 1.0, b = 1.0, zeta = 10.0, T = 5.0, dt = 0.01;
  double location = 0.0, scale = 1.0, t_freq = 0.01;
  std::int64_t horizon = 1000000;
  int seeds = 20;
  std::int64_t kappa = -1;
  std::string out_dir = "reports";
  std::string z_grid_spec;
  std::int64_t sieve_limit = 2000000;

  bool fair_variant = false;
  int schedule_points = 6;
  int grid_points = 20001;
  int k_max = 20;
  std::string curve_spec;
  std::int64_t particles = 1000000;

  // Every option lives on the top-level app so that the flat key=value
  // --config file covers all of them; subcommands are bare verbs and flags
  // fall through from them.
  app.add_option("--model", model, "cramer | cramer_doubled | fair_coin")->capture_default_str();
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--format", format, "json | csv")->capture_default_str();
  app.add_option("--seed", seed, "master seed")->capture_default_str();
  app.add_option("--replicas", replicas, "Monte Carlo replicas")->capture_default_str();
  app.add_option("--sieve-limit", sieve_limit, "prime table limit")->capture_default_str();
  app.add_option("--n", n, "walk horizon / law index")->capture_default_str();
  app.add_option("--d", d, "modulus")->capture_default_str();
  app.add_option("--k", k, "jump index")->capture_default_str();
  app.add_option("--m", m, "point of the delta law, or fold modulus for exact-law");
  app.add_option("--kappa", kappa, "LLT point (default: round(m_n))");
  app.add_option("--t", t_freq, "frequency in (-1/2, 1/2)")->capture_default_str();
  app.add_option("--z", z, "barrier / half-width")->capture_default_str();
  app.add_option("--c", c, "modulating exponent f_c = log^c")->capture_default_str();
  app.add_option("--b", b, "prime window constant (> 1/2)")->capture_default_str();
  app.add_option("--zeta", zeta, "quasiprime threshold")->capture_default_str();
  app.add_option("--T", T, "OU horizon")->capture_default_str();
  app.add_option("--dt", dt, "OU step")->capture_default_str();
  app.add_option("--location", location, "theta location")->capture_default_str();
  app.add_option("--scale", scale, "theta scale")->capture_default_str();
  app.add_option("--horizon", horizon, "trajectory horizon")->capture_default_str();
  app.add_option("--seeds", seeds, "number of seeds for medians")->capture_default_str();
  app.add_flag("--fair-coin", fair_variant, "Bernoulli variant of quasiprime");
  app.add_option("--points", schedule_points, "cubic schedule length")->capture_default_str();
  app.add_option("--grid-points", grid_points, "eigen solver grid")->capture_default_str();
  app.add_option("--z-grid", z_grid_spec, "lo:hi:step -> CSV eigenvalue curve");
  app.add_option("--curve", curve_spec, "comma-separated horizons -> survival CSV");
  app.add_option("--out-dir", out_dir, "suite report directory")->capture_default_str();
  app.add_option("--particles", particles, "OU spectrum particle count")->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "sample one trajectory and its jump instants");
  auto* mom = app.add_subcommand("moments", "mean and variance of S_n");
  auto* law = app.add_subcommand("exact-law", "exact distribution of S_n (DP oracle)");
  auto* llt = app.add_subcommand("llt", "Gaussian local limit estimate at kappa");
  auto* cf = app.add_subcommand("charfunc", "characteristic function and explicit bounds");
  auto* th = app.add_subcommand("theta", "elliptic theta series");
  auto* dv = app.add_subcommand("divisibility", "P{d | S_n}: theta estimate vs residue DP");
  auto* dl = app.add_subcommand("delta-law", "law of the k-th fair-coin jump instant");
  auto* pp = app.add_subcommand("prime-prob", "P{S_n prime}: exact, analytic, Monte Carlo");
  auto* qp = app.add_subcommand("quasiprime", "P{S'_n zeta-quasiprime} vs e^-gamma/log zeta");
  auto* av = app.add_subcommand("avoidance", "prime-set hits of the jump instants");
  auto* ei = app.add_subcommand("eigen", "principal Sturm-Liouville eigenvalue");
  auto* ou = app.add_subcommand("ou-survival", "P{sup |U| <= z} over [0, T]");
  auto* am = app.add_subcommand("amplitude", "counting of small-amplitude blocks A_k");
  auto* gp = app.add_subcommand("gaps", "large-gap statistics of the Cramer walk");
  auto* ll = app.add_subcommand("lil-subseq", "subsequence LIL statistic medians");
  auto* su = app.add_subcommand("suite", "full acceptance battery");
  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints usage on the diagnostic stream
    return 2;
  }

  const OutputSink sink{out_path};
  const auto spec = ModelSpec::from_name(model);

  if (sim->parsed()) {
    const auto traj = sample_trajectory(spec, n, seed);
    const auto js = jump_instants(traj);
    nlohmann::ordered_json j;
    echo_config(j, {{"n", static_cast<double>(n)}}, model, seed);
    j["final_sum"] = traj.sums.back();
    j["jumps"] = js.instants.size();
    nlohmann::ordered_json first = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < js.instants.size() && i < 20; ++i) first.push_back(js.instants[i]);
    j["first_instants"] = first;
    if (!js.gaps.empty()) {
      nlohmann::ordered_json gaps = nlohmann::ordered_json::array();
      for (std::size_t i = 0; i < js.gaps.size() && i < 20; ++i) gaps.push_back(js.gaps[i]);
      j["first_gaps"] = gaps;
    }
    sink.write(j);
    return 0;
  }

  if (mom->parsed()) {
    const auto mo = moments(spec, n);
    nlohmann::ordered_json j;
    echo_config(j, {{"n", static_cast<double>(n)}}, model, seed);
    j["mean"] = mo.mean;
    j["variance"] = mo.variance;
    sink.write(j);
    return 0;
  }

  if (law->parsed()) {
    if (m >= 1) {
      const auto probs = exact_law_mod(spec, n, m);
      if (format == "csv") {
        CsvTable t({"residue", "probability"});
        for (std::size_t rr = 0; rr < probs.size(); ++rr)
          t.add_row({static_cast<double>(rr), probs[rr]});
        sink.write(t.str());
      } else {
        nlohmann::ordered_json j;
        echo_config(j, {{"n", static_cast<double>(n)}, {"mod", static_cast<double>(m)}}, model, seed);
        j["probabilities"] = probs;
        sink.write(j);
      }
      return 0;
    }
    const auto el = exact_law(spec, n);
    if (format == "csv") {
      CsvTable t({"k", "probability"});
      for (std::size_t i = 0; i < el.probs.size(); ++i)
        t.add_row({static_cast<double>(el.support_begin + static_cast<std::int64_t>(i)), el.probs[i]});
      sink.write(t.str());
    } else {
      nlohmann::ordered_json j;
      echo_config(j, {{"n", static_cast<double>(n)}}, model, seed);
      j["support_begin"] = el.support_begin;
      j["mean"] = el.mean();
      j["variance"] = el.variance();
      j["probabilities"] = el.probs;
      sink.write(j);
    }
    return 0;
  }

  if (llt->parsed()) {
    const auto mo = moments(spec, n);
    const std::int64_t point = kappa >= 0 ? kappa : static_cast<std::int64_t>(std::lround(mo.mean));
    const auto e = llt_gaussian(spec, n, point, calibration::kLltWindowConstant);
    nlohmann::ordered_json j;
    echo_config(j, {{"n", static_cast<double>(n)}, {"kappa", static_cast<double>(point)}}, model, seed);
    j["density"] = e.density;
    j["error_scale"] = e.error_scale;
    j["in_validity_window"] = e.in_validity_window;
    sink.write(j);
    return 0;
  }

  if (cf->parsed()) {
    const auto ex = char_func_exact(spec, n, t_freq);
    const auto ga = char_func_gaussian(spec, n, t_freq);
    nlohmann::ordered_json j;
    echo_config(j, {{"n", static_cast<double>(n)}, {"t", t_freq}}, model, seed);
    j["exact_re"] = ex.value.real();
    j["exact_im"] = ex.value.imag();
    j["modulus"] = std::abs(ex.value);
    j["modulus_bound"] = ex.modulus_bound;
    j["gaussian_re"] = ga.value.real();
    j["gaussian_im"] = ga.value.imag();
    j["phase_error_bound"] = ga.phase_error_bound;
    sink.write(j);
    return 0;
  }

  if (th->parsed()) {
    const auto tv = theta(d, location, scale);
    nlohmann::ordered_json j;
    echo_config(j, {{"d", static_cast<double>(d)}, {"location", location}, {"scale", scale}},
                "", seed);
    j["value"] = tv.value;
    j["terms"] = tv.terms;
    j["truncation_bound"] = tv.truncation_bound;
    j["two_sided_value"] = theta_two_sided(d, location, scale).value;
    sink.write(j);
    return 0;
  }

  if (dv->parsed()) {
    const double est = divisibility_estimate(spec, d, n);
    nlohmann::ordered_json j;
    echo_config(j, {{"d", static_cast<double>(d)}, {"n", static_cast<double>(n)}}, model, seed);
    j["theta_over_d"] = est;
    if (n * d <= 1000000000LL) {
      const auto mod = exact_law_mod(spec, n, d);
      j["exact"] = mod[0];
      j["abs_error"] = std::abs(est - mod[0]);
    }
    sink.write(j);
    return 0;
  }

  if (dl->parsed()) {
    if (m >= 1) {
      nlohmann::ordered_json j;
      echo_config(j, {{"k", static_cast<double>(k)}, {"m", static_cast<double>(m)}}, "", seed);
      j["probability"] = delta_law(k, m);
      j["gaussian"] = delta_llt(k, m).density;
      sink.write(j);
    } else {
      CsvTable t({"m", "probability", "gaussian"});
      for (std::int64_t mm = k; mm <= 4 * k + 40; ++mm)
        t.add_row({static_cast<double>(mm), delta_law(k, mm), delta_llt(k, mm).density});
      sink.write(t.str());
    }
    return 0;
  }

  if (pp->parsed()) {
    const auto table = PrimeTable::sieve(static_cast<std::uint64_t>(sieve_limit));
    const auto e = sn_prime_experiment(n, b, replicas, seed, table);
    nlohmann::ordered_json j;
    echo_config(j, {{"n", static_cast<double>(n)}, {"b", b},
                    {"replicas", static_cast<double>(replicas)}}, "cramer", seed);
    j["exact"] = e.exact;
    j["analytic"] = e.analytic;
    j["calibrated_k"] = e.calibrated_k;
    j["analytic_vs_exact"] = to_json(e.analytic_vs_exact);
    j["mc_vs_exact"] = to_json(e.mc_vs_exact);
    sink.write(j);
    return (e.analytic_vs_exact.pass && e.mc_vs_exact.pass) ? 0 : 1;
  }

  if (qp->parsed()) {
    const auto table = PrimeTable::sieve(static_cast<std::uint64_t>(sieve_limit));
    const auto r = fair_variant
                       ? fair_coin_quasiprime_experiment(n, zeta, replicas, seed, table)
                       : quasiprime_experiment(n, zeta, replicas, seed, table);
    sink.write(to_json(r));
    return r.pass ? 0 : 1;
  }

  if (av->parsed()) {
    const auto table = PrimeTable::sieve(static_cast<std::uint64_t>(sieve_limit));
    const auto out = avoidance_experiment(schedule_points, replicas, seed, table);
    nlohmann::ordered_json j;
    echo_config(j, {{"points", static_cast<double>(schedule_points)},
                    {"replicas", static_cast<double>(replicas)}}, "fair_coin", seed);
    j["hypothesis_sup"] = out.hypothesis_sup;
    j["decay"] = to_json(out.decay);
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& mc : out.mc_checks) arr.push_back(to_json(mc));
    j["mc_checks"] = arr;
    sink.write(j);
    return out.pass ? 0 : 1;
  }

  if (ei->parsed()) {
    if (!z_grid_spec.empty()) {
      double lo = 0.1, hi = 3.0, step = 0.1;
      if (std::sscanf(z_grid_spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3)
        throw CLI::ValidationError("--z-grid expects lo:hi:step");
      std::vector<double> zs;
      for (double zz = lo; zz <= hi + 1e-12; zz += step) zs.push_back(zz);
      const auto rows = lambda_curve(zs, grid_points);
      CsvTable t({"z", "lambda", "residual", "asymptotic_ratio"});
      for (const auto& row : rows)
        t.add_row({row.z, row.lambda, row.residual, row.asymptotic_ratio});
      sink.write(t.str());
      return 0;
    }
    const auto r = principal_eigenvalue({z, grid_points});
    nlohmann::ordered_json j;
    echo_config(j, {{"z", z}, {"grid_points", static_cast<double>(grid_points)}}, "", seed);
    j["lambda"] = r.lambda;
    j["residual"] = r.residual;
    j["asymptotic_ratio"] = r.asymptotic_ratio;
    j["lambda_asymptotic"] = lambda_asymptotic(z);
    sink.write(j);
    return 0;
  }

  if (ou->parsed()) {
    if (!curve_spec.empty()) {
      std::vector<double> horizons;
      std::stringstream ss(curve_spec);
      std::string tok;
      while (std::getline(ss, tok, ',')) horizons.push_back(std::stod(tok));
      const auto curve = ou_survival_curve(z, horizons, dt, replicas, seed, 0.25);
      CsvTable t({"T", "survival", "ci_low", "ci_high"});
      for (const auto& pt : curve.points) {
        const double p = std::exp(pt.log_prob);
        t.add_row({pt.time, p, std::exp(pt.log_prob - 1.959963984540054 * pt.log_sd),
                   std::exp(pt.log_prob + 1.959963984540054 * pt.log_sd)});
      }
      sink.write(t.str());
      return 0;
    }
    const auto r = ou_survival_prob(z, T, dt, replicas, seed);
    sink.write(to_json(r));
    return 0;
  }

  if (am->parsed()) {
    const double lambda = principal_eigenvalue({z, 20001}).lambda;
    const auto out = amplitude_counting(c, z, 2, k_max, replicas, seed, dt, lambda);
    if (format == "csv") {
      CsvTable t({"k", "count"});
      for (std::size_t i = 0; i < out.per_k_occurrences.size(); ++i)
        t.add_row({static_cast<double>(out.k_min + static_cast<int>(i)),
                   static_cast<double>(out.per_k_occurrences[i])});
      sink.write(t.str());
      return 0;
    }
    nlohmann::ordered_json j;
    echo_config(j, {{"c", c}, {"z", z}, {"k_max", static_cast<double>(k_max)},
                    {"replicas", static_cast<double>(replicas)}, {"dt", dt}}, "", seed);
    j["mean_count"] = out.mean_count;
    j["series_lambda"] = out.series_lambda;
    j["series_half_lambda"] = out.series_half_lambda;
    j["lambda"] = lambda;
    sink.write(j);
    return 0;
  }

  if (gp->parsed()) {
    const auto out = gaps_experiment(horizon, seeds, seed);
    nlohmann::ordered_json j;
    echo_config(j, {{"horizon", static_cast<double>(horizon)}, {"seeds", static_cast<double>(seeds)},
                    {"c", c}}, "cramer", seed);
    j["median_max_ratio"] = out.median_max_ratio;
    j["median_max_ratio_tail"] = out.median_max_ratio_tail;
    j["median_count_ratio"] = out.median_count_ratio;
    j["scaling_pass"] = out.scaling_pass;
    j["verdict"] = out.pass ? "pass" : "fail";
    sink.write(j);
    return out.pass ? 0 : 1;
  }

  if (ll->parsed()) {
    const auto out = lil_experiment(horizon, seeds, seed);
    nlohmann::ordered_json j;
    echo_config(j, {{"horizon", static_cast<double>(horizon)}, {"seeds", static_cast<double>(seeds)}},
                "cramer", seed);
    j["median_statistic"] = out.median_stat;
    j["verdict"] = out.pass ? "pass" : "fail";
    sink.write(j);
    return out.pass ? 0 : 1;
  }

  if (su->parsed()) {
    const auto results = run_acceptance(seed, out_dir, particles);
    bool all = true;
    for (const auto& res : results) {
      std::printf("criterion %2d %-28s %s  (%lld ms)\n", res.number, res.name.c_str(),
                  res.pass ? "PASS" : "FAIL", static_cast<long long>(res.elapsed_ms));
      all = all && res.pass;
    }
    return all ? 0 : 1;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
