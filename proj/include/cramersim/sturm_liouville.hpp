#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cramersim {

// Principal eigenvalue of
//     psi'' - x psi' = -lambda psi   on [-z, z],   psi(-z) = psi(z) = 0.
//
// Multiplying by w(x) = e^{-x^2/2} turns the operator self-adjoint,
// (w psi')' = -lambda w psi, which discretizes to a symmetric-definite
// tridiagonal pencil. The smallest eigenvalue comes from Sturm-sequence
// bisection, the eigenfunction from inverse iteration, and one Richardson
// step over grids N and 2N-1 lifts the O(h^2) discretization to O(h^4).
//
// Closed-form anchor: z = 1 has lambda = 2 with psi = 1 - x^2; as z -> 0,
// lambda ~ pi^2 / (4 z^2).

struct EigenProblem {
  double z = 1.0;
  int grid_points = 20001;  // must be odd so the grid passes through 0
};

struct EigenResult {
  double lambda = 0.0;
  std::vector<double> grid;           // abscissae including endpoints
  std::vector<double> eigenfunction;  // max-normalized, positive, zero at ends
  double residual = 0.0;              // max |psi'' - x psi' + lambda psi| inside
  double asymptotic_ratio = 0.0;      // lambda * 4 z^2 / pi^2
};

inline double lambda_asymptotic(double z) {
  if (!(z > 0.0)) throw std::domain_error("lambda_asymptotic: z must be positive");
  return M_PI * M_PI / (4.0 * z * z);
}

namespace detail {

struct Tridiag {
  std::vector<double> diag;  // length n
  std::vector<double> off;   // length n-1
};

// Number of eigenvalues of the symmetric tridiagonal below sigma (Sturm count
// via the LDL^T pivots).
inline int sturm_count(const Tridiag& T, double sigma) {
  int count = 0;
  double d = T.diag[0] - sigma;
  if (d < 0.0) ++count;
  for (std::size_t i = 1; i < T.diag.size(); ++i) {
    if (d == 0.0) d = 1e-300;
    d = (T.diag[i] - sigma) - T.off[i - 1] * T.off[i - 1] / d;
    if (d < 0.0) ++count;
  }
  return count;
}

inline double smallest_eigenvalue(const Tridiag& T) {
  // Gershgorin bracket
  double lo = T.diag[0], hi = T.diag[0];
  for (std::size_t i = 0; i < T.diag.size(); ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(T.off[i - 1]);
    if (i < T.off.size()) r += std::abs(T.off[i]);
    lo = std::min(lo, T.diag[i] - r);
    hi = std::max(hi, T.diag[i] + r);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (sturm_count(T, mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Solve (T - sigma I) x = b for a symmetric tridiagonal, LU with partial
// pivoting (bandwidth grows to 2 above the diagonal; near-singular shifts are
// exactly the inverse-iteration use case).
inline std::vector<double> shifted_tridiag_solve(const Tridiag& T, double sigma,
                                                 std::vector<double> b) {
  const std::size_t n = T.diag.size();
  std::vector<double> d(n), e(n, 0.0), f(n, 0.0), sub(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i] = T.diag[i] - sigma;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    e[i] = T.off[i];
    sub[i] = T.off[i];
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(sub[i]) > std::abs(d[i])) {
      std::swap(d[i], sub[i]);
      std::swap(e[i], d[i + 1]);
      if (i + 2 < n) {
        f[i] = e[i + 1];
        e[i + 1] = 0.0;
      }
      std::swap(b[i], b[i + 1]);
    }
    if (d[i] == 0.0) d[i] = 1e-300;
    const double m = sub[i] / d[i];
    d[i + 1] -= m * e[i];
    if (i + 2 < n) e[i + 1] -= m * f[i];
    b[i + 1] -= m * b[i];
  }
  if (d[n - 1] == 0.0) d[n - 1] = 1e-300;
  std::vector<double> x(n);
  x[n - 1] = b[n - 1] / d[n - 1];
  if (n >= 2) x[n - 2] = (b[n - 2] - e[n - 2] * x[n - 1]) / d[n - 2];
  for (std::size_t k = n; k-- > 2;) {
    const std::size_t i = k - 2;
    x[i] = (b[i] - e[i] * x[i + 1] - f[i] * x[i + 2]) / d[i];
  }
  return x;
}

struct GridSolve {
  double lambda = 0.0;
  std::vector<double> x;    // interior + endpoints
  std::vector<double> psi;  // with endpoint zeros
};

inline GridSolve solve_on_grid(double z, int N) {
  const int n = N - 2;  // interior nodes
  const double h = 2.0 * z / static_cast<double>(N - 1);
  const int mid = (N - 1) / 2;
  std::vector<double> x(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i)
    x[static_cast<std::size_t>(i)] = h * static_cast<double>(i - mid);  // symmetric grid

  // weights at nodes and midpoints
  auto w = [](double t) { return std::exp(-t * t / 2.0); };
  Tridiag T;
  T.diag.resize(static_cast<std::size_t>(n));
  T.off.resize(static_cast<std::size_t>(n - 1));
  std::vector<double> wi(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const double xm = 0.5 * (x[static_cast<std::size_t>(i - 1)] + x[static_cast<std::size_t>(i)]);
    const double xp = 0.5 * (x[static_cast<std::size_t>(i)] + x[static_cast<std::size_t>(i + 1)]);
    const double wc = w(x[static_cast<std::size_t>(i)]);
    wi[static_cast<std::size_t>(i - 1)] = wc;
    T.diag[static_cast<std::size_t>(i - 1)] = (w(xm) + w(xp)) / (h * h * wc);
  }
  for (int i = 1; i < n; ++i) {
    const double xp = 0.5 * (x[static_cast<std::size_t>(i)] + x[static_cast<std::size_t>(i + 1)]);
    T.off[static_cast<std::size_t>(i - 1)] =
        -w(xp) / (h * h * std::sqrt(wi[static_cast<std::size_t>(i - 1)] *
                                    wi[static_cast<std::size_t>(i)]));
  }

  GridSolve g;
  g.lambda = smallest_eigenvalue(T);
  g.x = x;

  // Inverse iteration on the symmetrized matrix, started from a positive bump.
  // The shift sits 1e-3 below lambda relatively: close enough that three
  // iterations isolate the principal mode (the start vector is even, so the
  // nearest odd mode never enters), far enough that the solves stay well
  // conditioned and do not seed grid-scale noise into the eigenvector.
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i)
    v[static_cast<std::size_t>(i - 1)] = std::cos(M_PI * x[static_cast<std::size_t>(i)] / (2.0 * z));
  const double shift = g.lambda * (1.0 - 1e-3);
  for (int it = 0; it < 3; ++it) {
    v = shifted_tridiag_solve(T, shift, std::move(v));
    double norm = 0.0;
    for (double c : v) norm = std::max(norm, std::abs(c));
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw std::runtime_error("sturm_liouville: inverse iteration failed at z=" + std::to_string(z));
    for (double& c : v) c /= norm;
  }

  // undo the symmetrizing similarity: psi_i = v_i / sqrt(w_i)
  g.psi.assign(static_cast<std::size_t>(N), 0.0);
  double peak = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double p = v[static_cast<std::size_t>(i - 1)] / std::sqrt(wi[static_cast<std::size_t>(i - 1)]);
    g.psi[static_cast<std::size_t>(i)] = p;
    if (std::abs(p) > std::abs(peak)) peak = p;
  }
  for (double& p : g.psi) p /= peak;  // max-normalized and positive
  return g;
}

}  // namespace detail

inline EigenResult principal_eigenvalue(const EigenProblem& prob) {
  if (!(prob.z >= 0.01 && prob.z <= 10.0))
    throw std::domain_error("principal_eigenvalue: z outside [0.01, 10]");
  if (prob.grid_points < 3 || prob.grid_points % 2 == 0)
    throw std::domain_error("principal_eigenvalue: grid_points must be odd and >= 3");

  const auto coarse = detail::solve_on_grid(prob.z, prob.grid_points);
  const auto fine = detail::solve_on_grid(prob.z, 2 * prob.grid_points - 1);

  EigenResult r;
  r.lambda = fine.lambda + (fine.lambda - coarse.lambda) / 3.0;  // O(h^4)
  r.grid = fine.x;
  r.eigenfunction = fine.psi;
  r.asymptotic_ratio = r.lambda * 4.0 * prob.z * prob.z / (M_PI * M_PI);

  // residual of the raw (non-symmetric) form on interior nodes
  const double h = r.grid[1] - r.grid[0];
  double res = 0.0;
  for (std::size_t i = 1; i + 1 < r.grid.size(); ++i) {
    const double d2 = (r.eigenfunction[i + 1] - 2.0 * r.eigenfunction[i] + r.eigenfunction[i - 1]) / (h * h);
    const double d1 = (r.eigenfunction[i + 1] - r.eigenfunction[i - 1]) / (2.0 * h);
    res = std::max(res, std::abs(d2 - r.grid[i] * d1 + r.lambda * r.eigenfunction[i]));
  }
  r.residual = res;
  return r;
}

struct LambdaCurveRow {
  double z = 0.0;
  double lambda = 0.0;
  double residual = 0.0;
  double asymptotic_ratio = 0.0;
};

inline std::vector<LambdaCurveRow> lambda_curve(const std::vector<double>& z_grid,
                                                int grid_points = 20001) {
  std::vector<LambdaCurveRow> rows;
  rows.reserve(z_grid.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    if (i > 0 && z_grid[i] <= prev)
      throw std::domain_error("lambda_curve: grid must be strictly increasing");
    prev = z_grid[i];
    const auto r = principal_eigenvalue({z_grid[i], grid_points});
    rows.push_back({z_grid[i], r.lambda, r.residual, r.asymptotic_ratio});
  }
  return rows;
}

}  // namespace cramersim
