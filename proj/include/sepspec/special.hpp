#ifndef SEPSPEC_SPECIAL_HPP
#define SEPSPEC_SPECIAL_HPP

namespace sepspec {

/// log Gamma(1/2 + iy) split into real part and continuously unwrapped
/// argument (arg Gamma(1/2) = 0 fixes the branch).
struct GammaLineValue {
  double y = 0.0;
  double log_modulus = 0.0;
  double argument = 0.0;
};

/// Lanczos (g = 7, 9 coefficients) for |y| <= 20, Stirling with four Binet
/// correction terms beyond; the two regimes agree to ~1e-12 at the switch.
GammaLineValue gamma_line(double y);

/// Leading Stirling form of the argument: y ln|y| - y, with the y = 0 limit 0.
double stirling_arg(double y);

}  // namespace sepspec

#endif
