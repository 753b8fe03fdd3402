#include "sepspec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sepspec/parallel.hpp"

namespace sepspec {

namespace {

// Outermost |x| with V(x) = level on each side; confinement guarantees one.
double confinement_radius(const PotentialModel& V, double level) {
  Polynomial p = V.poly - level;
  const double bound = std::max(p.root_bound(), V.domain_hint);
  double r = 0.0;
  for (const auto& root : p.real_roots(-bound, bound)) r = std::max(r, std::fabs(root.x));
  if (r == 0.0) throw std::runtime_error("oracle: potential never reaches the confinement level");
  return r;
}

}  // namespace

TridiagonalOperator discretize(const PotentialModel& V, double h, const Grid& grid) {
  if (grid.points < 3 || grid.half_width <= 0.0)
    throw std::invalid_argument("oracle grid needs half_width > 0 and N >= 3");
  TridiagonalOperator T;
  const double s = grid.step();
  const double kinetic = h * h / (s * s);
  T.diagonal.resize(grid.points);
  T.offdiagonal.assign(grid.points - 1, -0.5 * kinetic);
  for (int i = 0; i < grid.points; ++i) T.diagonal[i] = kinetic + V.poly.eval(grid.x(i));
  return T;
}

int sturm_count(const TridiagonalOperator& T, double mu) {
  const int n = T.size();
  double max_off2 = 0.0;
  for (double b : T.offdiagonal) max_off2 = std::max(max_off2, b * b);
  const double pivmin =
      std::max(max_off2, 1.0) * std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  int count = 0;
  double d = T.diagonal[0] - mu;
  if (std::fabs(d) < pivmin) d = -pivmin;
  if (d < 0.0) ++count;
  for (int i = 1; i < n; ++i) {
    d = (T.diagonal[i] - mu) - T.offdiagonal[i - 1] * T.offdiagonal[i - 1] / d;
    if (std::fabs(d) < pivmin) d = -pivmin;
    if (d < 0.0) ++count;
  }
  return count;
}

std::vector<double> eigen_window(const TridiagonalOperator& T, double a, double b, double tol) {
  if (!(a < b) || !(tol > 0.0)) throw std::invalid_argument("eigen_window: need a < b and tol > 0");
  const int na = sturm_count(T, a);
  const int nb = sturm_count(T, b);
  const int m = nb - na;
  if (m <= 0) return {};
  if (m > 1'000'000) throw std::runtime_error("eigen_window: more than 1e6 eigenvalues requested");

  std::vector<double> out(static_cast<size_t>(m));
  parallel_for(static_cast<size_t>(m), [&](size_t j) {
    const int k = na + static_cast<int>(j);  // global index of this eigenvalue
    double lo = a, hi = b;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;  // interval below ULP resolution
      if (sturm_count(T, mid) >= k + 1)
        hi = mid;
      else
        lo = mid;
    }
    out[j] = 0.5 * (lo + hi);
  });
  return out;
}

double eigenvector_parity(const TridiagonalOperator& T, double lambda) {
  const int n = T.size();
  // Inverse iteration with a slightly shifted tridiagonal solve.
  const double shift = lambda + 1e-11 * std::max(1.0, std::fabs(lambda));
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> c(n), dvec(n);
  for (int pass = 0; pass < 3; ++pass) {
    // Thomas solve of (T - shift) w = v.
    double d0 = T.diagonal[0] - shift;
    if (d0 == 0.0) d0 = 1e-300;
    c[0] = T.offdiagonal[0] / d0;
    dvec[0] = v[0] / d0;
    for (int i = 1; i < n; ++i) {
      double m = (T.diagonal[i] - shift) - T.offdiagonal[i - 1] * c[i - 1];
      if (m == 0.0) m = 1e-300;
      c[i] = (i + 1 < n) ? T.offdiagonal[i] / m : 0.0;
      dvec[i] = (v[i] - T.offdiagonal[i - 1] * dvec[i - 1]) / m;
    }
    v[n - 1] = dvec[n - 1];
    for (int i = n - 2; i >= 0; --i) v[i] = dvec[i] - c[i] * v[i + 1];
    double norm = 0.0;
    for (double w : v) norm += w * w;
    norm = std::sqrt(norm);
    for (double& w : v) w /= norm;
  }
  double overlap = 0.0;
  for (int i = 0; i < n; ++i) overlap += v[i] * v[n - 1 - i];
  return overlap;
}

OracleSpectrum solve(const PotentialModel& V, double h, double window_lo, double window_hi,
                     double tol) {
  if (!(window_lo < window_hi) || !(tol > 0.0) || !(h > 0.0))
    throw std::invalid_argument("oracle solve: bad window or tolerances");

  const double level = window_hi + 10.0 * h;
  const double L = confinement_radius(V, level);

  // Resolve the shortest local de Broglie wavelength with ~20 points to give
  // the first Richardson pair a fighting chance.
  double v_floor = V.poly.eval(0.0);
  for (int i = 0; i <= 256; ++i) {
    double x = -L + 2.0 * L * i / 256.0;
    v_floor = std::min(v_floor, V.poly.eval(x));
  }
  const double p_max = std::sqrt(2.0 * std::max(level - v_floor, 1e-12));
  const double wavelength = 2.0 * M_PI * h / p_max;
  int n0 = static_cast<int>(std::ceil(2.0 * L / (wavelength / 20.0)));
  n0 = std::max(n0, 64);

  const double pad = 0.02 * (window_hi - window_lo) + 10.0 * tol;
  const double a = window_lo - pad, b = window_hi + pad;
  const double bisect_tol = tol / 100.0;
  const int n_cap = 1 << 20;

  OracleSpectrum out;
  std::vector<double> prev;
  for (int n = n0; n <= n_cap; n *= 2) {
    Grid grid{L, n};
    TridiagonalOperator T = discretize(V, h, grid);
    std::vector<double> cur = eigen_window(T, a, b, bisect_tol);
    if (!prev.empty() && cur.size() == prev.size() && !cur.empty()) {
      std::vector<double> extrap(cur.size()), err(cur.size());
      double worst = 0.0;
      for (size_t j = 0; j < cur.size(); ++j) {
        err[j] = std::fabs(cur[j] - prev[j]) / 3.0;
        extrap[j] = cur[j] + (cur[j] - prev[j]) / 3.0;
        // Only eigenvalues inside the unpadded window gate convergence.
        if (extrap[j] >= window_lo && extrap[j] <= window_hi) worst = std::max(worst, err[j]);
      }
      out.eigenvalues.clear();
      out.richardson_error.clear();
      for (size_t j = 0; j < cur.size(); ++j) {
        if (extrap[j] < window_lo || extrap[j] > window_hi) continue;
        out.eigenvalues.push_back(extrap[j]);
        out.richardson_error.push_back(err[j]);
      }
      out.grid = grid;
      if (worst < tol) {
        out.converged = true;
        return out;
      }
    }
    prev = std::move(cur);
  }
  out.converged = false;  // best estimates, honestly flagged
  return out;
}

}  // namespace sepspec
