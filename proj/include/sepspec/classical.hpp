#ifndef SEPSPEC_CLASSICAL_HPP
#define SEPSPEC_CLASSICAL_HPP

#include <optional>
#include <vector>

#include "sepspec/potential.hpp"

namespace sepspec {

struct PhasePoint {
  double x = 0.0;
  double xi = 0.0;
};

enum class Side { left, right, both };

struct TurningPointSet {
  double energy = 0.0;
  Side side = Side::both;
  std::vector<double> roots;  // sorted, sign-change roots of V - E only
};

struct ActionPair {
  double a_plus = 0.0;
  double a_minus = 0.0;
  double energy = 0.0;
};

struct FlowTrace {
  std::vector<std::pair<double, PhasePoint>> samples;
  double energy_drift = 0.0;
  std::optional<double> period;
};

struct PeriodFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

double hamiltonian(const PhasePoint& pt, const PotentialModel& V);

TurningPointSet turning_points(const PotentialModel& V, double E, Side side);

/// Phase-space area enclosed by the energy-E orbit of the +/- well.
/// For E < 0 this is 2 * integral sqrt(2(E-V)) over the allowed interval;
/// for E >= 0 the loop is closed along the xi-axis (half-plane convention)
/// so the inner endpoint is x = 0.  The sqrt endpoint singularity is absorbed
/// by the substitution x = x2 - (x2-x1) sin^2 u before Gauss-Legendre
/// quadrature with node doubling.
double well_action(const PotentialModel& V, double E, Side side, double rel_tol = 1e-10);

ActionPair action_pair(const PotentialModel& V, double E, double rel_tol = 1e-10);

/// Classical cross check: dA/dE by central finite difference against the
/// orbit period from flow integration.
struct ActionDerivativeCheck {
  double dA_dE = 0.0;
  double orbit_period = 0.0;
};
ActionDerivativeCheck action_derivative_check(const PotentialModel& V, double E, Side side);

/// Linearized normal-form coordinate E / sqrt(-V''(0)).
double epsilon0(double E, const PotentialModel& V);

/// Adaptive Dormand-Prince 5(4) integration of xdot = xi, xidot = -V'(x).
FlowTrace flow_integrate(const PotentialModel& V, PhasePoint start, double t_max, double tol);

/// Period of the orbit through (sqrt(h), 0); section {xi = 0} with the
/// starting crossing direction, localized by bisection.
double return_period(const PotentialModel& V, double h, double tol = 1e-12);

/// Least-squares fit of return_period(h) against |ln h|.
PeriodFit period_slope_fit(const PotentialModel& V, const std::vector<double>& h_list,
                           double tol = 1e-12);

}  // namespace sepspec

#endif
