#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cramersim {

enum class ModelKind { cramer, cramer_doubled, fair_coin, general };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::cramer: return "cramer";
    case ModelKind::cramer_doubled: return "cramer_doubled";
    case ModelKind::fair_coin: return "fair_coin";
    case ModelKind::general: return "general";
  }
  return "?";
}

// A sequence of independent 0/1 summands xi_j, j >= start_index, with
// P{xi_j = 1} = p_j. The named kinds fix p_j implicitly:
//   cramer          p_j = 1/log j,  start 3   (1/log 3 < 1)
//   cramer_doubled  p_j = 2/log j,  start 8   (2/log 8 < 1)
//   fair_coin       p_j = 1/2,      start 1
// Logs are natural throughout.
struct ModelSpec {
  ModelKind kind = ModelKind::cramer;
  std::int64_t start_index = 3;
  std::vector<double> general_weights;  // general only; weight i is p_{start_index + i}

  static ModelSpec cramer() { return {ModelKind::cramer, 3, {}}; }
  static ModelSpec cramer_doubled() { return {ModelKind::cramer_doubled, 8, {}}; }
  static ModelSpec fair_coin() { return {ModelKind::fair_coin, 1, {}}; }

  static ModelSpec general(std::int64_t start, std::vector<double> weights) {
    if (start < 1) throw std::domain_error("general model: start_index must be >= 1");
    for (double p : weights)
      if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("general model: weights must lie in (0,1)");
    return {ModelKind::general, start, std::move(weights)};
  }

  static ModelSpec from_name(const std::string& name) {
    if (name == "cramer") return cramer();
    if (name == "cramer_doubled") return cramer_doubled();
    if (name == "fair_coin") return fair_coin();
    throw std::domain_error("unknown model kind: " + name);
  }

  double weight(std::int64_t j) const {
    if (j < start_index) throw std::domain_error("weight: index below start_index");
    switch (kind) {
      case ModelKind::cramer: return 1.0 / std::log(static_cast<double>(j));
      case ModelKind::cramer_doubled: return 2.0 / std::log(static_cast<double>(j));
      case ModelKind::fair_coin: return 0.5;
      case ModelKind::general: {
        const std::size_t i = static_cast<std::size_t>(j - start_index);
        if (i >= general_weights.size())
          throw std::domain_error("general model: weight not defined at requested index");
        return general_weights[i];
      }
    }
    return 0.0;
  }
};

struct Moments {
  std::int64_t n = 0;
  double mean = 0.0;      // m_n = sum p_j
  double variance = 0.0;  // B_n = sum p_j (1 - p_j)
};

namespace detail {

// Neumaier-compensated accumulator; keeps prefix sums reproducible to ~1e-16
// relative even for sweeps past 1e6 terms.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace detail

inline Moments moments(const ModelSpec& spec, std::int64_t n) {
  if (n < spec.start_index) throw std::domain_error("moments: n below start_index");
  detail::CompensatedSum m, b;
  for (std::int64_t j = spec.start_index; j <= n; ++j) {
    const double p = spec.weight(j);
    m.add(p);
    b.add(p * (1.0 - p));
  }
  return {n, m.value(), b.value()};
}

// Prefix tables of p_j, m_j, B_j over [start_index, n_max]. One O(n) build
// serves every lookup of a sweep; the hot simulation loops also read p_j from
// here instead of recomputing logs.
class MomentSweep {
 public:
  MomentSweep(const ModelSpec& spec, std::int64_t n_max) : spec_(spec), n_max_(n_max) {
    if (n_max < spec.start_index) throw std::domain_error("MomentSweep: n_max below start_index");
    const std::size_t count = static_cast<std::size_t>(n_max - spec.start_index + 1);
    p_.resize(count);
    m_.resize(count);
    b_.resize(count);
    detail::CompensatedSum m, b;
    for (std::size_t i = 0; i < count; ++i) {
      const double p = spec_.weight(spec.start_index + static_cast<std::int64_t>(i));
      p_[i] = p;
      m.add(p);
      b.add(p * (1.0 - p));
      m_[i] = m.value();
      b_[i] = b.value();
    }
  }

  const ModelSpec& spec() const { return spec_; }
  std::int64_t start() const { return spec_.start_index; }
  std::int64_t n_max() const { return n_max_; }

  double p(std::int64_t j) const { return p_[index(j)]; }
  double mean(std::int64_t j) const { return m_[index(j)]; }
  double variance(std::int64_t j) const { return b_[index(j)]; }

  // Largest j with B_j <= v, or start-1 when even B_start exceeds v.
  std::int64_t last_index_with_variance_leq(double v) const {
    auto it = std::upper_bound(b_.begin(), b_.end(), v);
    return start() + static_cast<std::int64_t>(it - b_.begin()) - 1;
  }

 private:
  std::size_t index(std::int64_t j) const {
    if (j < spec_.start_index || j > n_max_)
      throw std::domain_error("MomentSweep: index out of range");
    return static_cast<std::size_t>(j - spec_.start_index);
  }

  ModelSpec spec_;
  std::int64_t n_max_;
  std::vector<double> p_, m_, b_;
};

}  // namespace cramersim
