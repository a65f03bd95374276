#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace cramersim {

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// Wilson score interval for a binomial proportion (default 95%).
inline Interval wilson_interval(std::int64_t successes, std::int64_t trials,
                                double zscore = 1.959963984540054) {
  if (trials <= 0) throw std::domain_error("wilson_interval: trials must be positive");
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = zscore * zscore;
  const double denom = 1.0 + z2 / n;
  const double center = phat + z2 / (2.0 * n);
  const double half = zscore * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  return {(center - half) / denom, (center + half) / denom};
}

namespace detail {

// Regularized lower incomplete gamma P(a, x); series for x < a+1, Lentz
// continued fraction otherwise. Plain double precision, good to ~1e-13.
inline double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - lg);
  }
  double b = x + 1.0 - a;
  double c = 1e300;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + a * std::log(x) - lg) * h;
  return 1.0 - q;
}

}  // namespace detail

// Upper-tail p-value of a chi-square statistic with `dof` degrees of freedom.
inline double chi_square_pvalue(double statistic, double dof) {
  if (statistic <= 0.0) return 1.0;
  return 1.0 - detail::gamma_p(dof / 2.0, statistic / 2.0);
}

// Pearson chi-square against expected counts; bins with tiny expectation must
// be merged by the caller.
inline double chi_square_statistic(const std::vector<double>& observed,
                                   const std::vector<double>& expected) {
  if (observed.size() != expected.size())
    throw std::invalid_argument("chi_square_statistic: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) throw std::domain_error("chi_square_statistic: nonpositive expectation");
    const double d = observed[i] - expected[i];
    s += d * d / expected[i];
  }
  return s;
}

inline double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Kolmogorov-Smirnov distance between an empirical sample and a continuous CDF.
inline double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

// Asymptotic KS p-value (Kolmogorov distribution tail).
inline double ks_pvalue(double d, std::int64_t n) {
  const double t = (std::sqrt(static_cast<double>(n)) + 0.12 + 0.11 / std::sqrt(static_cast<double>(n))) * d;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * t * t);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("least_squares: need >= 2 matching points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::domain_error("least_squares: degenerate abscissae");
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return (v.size() % 2 == 1) ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace cramersim
