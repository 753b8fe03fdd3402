#ifndef SEPSPEC_ORACLE_HPP
#define SEPSPEC_ORACLE_HPP

#include <cstdint>
#include <vector>

#include "sepspec/potential.hpp"

namespace sepspec {

/// Uniform Dirichlet grid on [-L, L] with N interior points.
struct Grid {
  double half_width = 0.0;
  int points = 0;
  double step() const { return 2.0 * half_width / (points + 1); }
  double x(int i) const { return -half_width + (i + 1) * step(); }
};

/// Symmetric tridiagonal discretization of -(h^2/2) u'' + V u.
struct TridiagonalOperator {
  std::vector<double> diagonal;      // h^2/step^2 + V(x_i)
  std::vector<double> offdiagonal;   // -h^2 / (2 step^2), strictly negative
  int size() const { return static_cast<int>(diagonal.size()); }
};

struct OracleSpectrum {
  std::vector<double> eigenvalues;        // sorted, Richardson extrapolated
  std::vector<double> richardson_error;   // per-eigenvalue discretization estimate
  Grid grid;                              // finest grid used
  bool converged = false;
};

TridiagonalOperator discretize(const PotentialModel& V, double h, const Grid& grid);

/// Number of eigenvalues strictly below mu (Sturm / LDL^T inertia count).
int sturm_count(const TridiagonalOperator& T, double mu);

/// All eigenvalues in [a, b), each isolated by bisection to width tol.
/// Deterministic for any worker count.
std::vector<double> eigen_window(const TridiagonalOperator& T, double a, double b, double tol);

/// Full oracle: picks the domain from the confinement margin
/// V(+/-L) >= window_max + 10 h, then doubles N with Richardson control
/// until every eigenvalue in the window is resolved to tol (N capped at 2^20).
OracleSpectrum solve(const PotentialModel& V, double h, double window_lo, double window_hi,
                     double tol);

/// Parity indicator of the eigenvector at eigenvalue lambda via inverse
/// iteration: +1 symmetric, -1 antisymmetric (meaningful for even V).
double eigenvector_parity(const TridiagonalOperator& T, double lambda);

}  // namespace sepspec

#endif
