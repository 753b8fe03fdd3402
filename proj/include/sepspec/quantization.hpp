#ifndef SEPSPEC_QUANTIZATION_HPP
#define SEPSPEC_QUANTIZATION_HPP

#include <complex>
#include <string>
#include <vector>

#include "sepspec/classical.hpp"
#include "sepspec/potential.hpp"

namespace sepspec {

struct SemiclassicalParams {
  double h = 1e-2;
  double alpha = 0.5;          // window exponent, in [1/2, 1)
  double mu_plus = M_PI;       // constant branch phase offsets absorbing the
  double mu_minus = M_PI;      // uncomputed higher-order action corrections
  double quad_tol = 1e-10;
  double root_tol = 1e-11;

  double window_halfwidth() const;
  /// Throws on invalid fields; returns warnings (e.g. h above desk scale).
  std::vector<std::string> check() const;
};

/// Per-energy bundle entering the singular quantization condition.
struct SingularPhaseData {
  double energy = 0.0;
  double eps = 0.0;       // linearized normal-form coordinate
  double a_plus = 0.0;    // well actions
  double a_minus = 0.0;
  double s_plus = 0.0;    // singular actions A + eps ln|eps| - eps + h mu
  double s_minus = 0.0;
  double theta_plus = 0.0;   // S / h
  double theta_minus = 0.0;
  double f = 0.0;  // -(th+ + th-)/2 + pi/2 + (eps/h) ln h + arg Gamma(1/2 + i eps/h)
  double g = 0.0;  // (th+ - th-)/2
};

enum class MatrixKind { Q, T_of_E };

struct TransferMatrix {
  std::complex<double> m[2][2];
  std::complex<double> e_factor;
  MatrixKind kind = MatrixKind::Q;
};

enum class Branch { A, B };  // A: Y-family (alpha_k), B: Z-family (beta_l)

struct BranchRoot {
  Branch branch = Branch::A;
  long index = 0;        // the integer k with Y (or Z) = 2 pi k
  double lambda = 0.0;   // energy / h^alpha
  double energy = 0.0;
  double residual = 0.0;  // quantization-condition residual at the root
};

struct EnumerationAnomaly {
  Branch branch;
  long index;
  std::string message;
};

struct SpectrumWindow {
  SemiclassicalParams params;
  std::vector<BranchRoot> family_a;  // sorted by index; energies strictly decreasing
  std::vector<BranchRoot> family_b;
  std::vector<BranchRoot> merged;    // both families sorted by ascending energy
  std::vector<EnumerationAnomaly> anomalies;
  double max_clamp = 0.0;  // largest arccos-argument clamp encountered
};

SingularPhaseData phase_data(double E, const PotentialModel& V, const SemiclassicalParams& p);

/// cos(f) - cos(g) / sqrt(1 + exp(2 pi eps / h)), overflow safe.
double cdvp_residual(double E, const PotentialModel& V, const SemiclassicalParams& p);
double cdvp_residual(const SingularPhaseData& d, const SemiclassicalParams& p);

double y_of_lambda(double lambda, const PotentialModel& V, const SemiclassicalParams& p);
double z_of_lambda(double lambda, const PotentialModel& V, const SemiclassicalParams& p);

/// Overflow-safe 1 / sqrt(1 + exp(w)).
double inv_sqrt_one_plus_exp(double w);

TransferMatrix transfer_q(double eps_over_h, double h);
TransferMatrix transfer_t(const SingularPhaseData& d, const SemiclassicalParams& p);

/// |det(T(E) - I)|.
double det_condition(double E, const PotentialModel& V, const SemiclassicalParams& p);

/// Solves Y = 2 pi k and Z = 2 pi l over the singular window [-h^a, h^a].
SpectrumWindow enumerate_window(const PotentialModel& V, const SemiclassicalParams& p);

/// Same root hunt over an arbitrary energy range (used to follow the
/// condition out of the singular window toward the regular zones).
SpectrumWindow enumerate_energy_range(const PotentialModel& V, const SemiclassicalParams& p,
                                      double e_lo, double e_hi);

/// Regular Bohr-Sommerfeld roots above the barrier: total action
/// A(E) = 2 pi h (n + offset), default offset 1/2.
std::vector<double> regular_bs_top(const PotentialModel& V, double h, double e_lo, double e_hi,
                                   double offset = 0.5, double quad_tol = 1e-10);

struct RegularBottomModes {
  std::vector<double> plus_well;
  std::vector<double> minus_well;
};

/// Regular Bohr-Sommerfeld roots below the barrier, one ladder per well:
/// A_{+/-}(E) = 2 pi h (n + offset).
RegularBottomModes regular_bs_bottom(const PotentialModel& V, double h, double e_lo, double e_hi,
                                     double offset = 0.5, double quad_tol = 1e-10);

}  // namespace sepspec

#endif
