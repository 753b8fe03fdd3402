#ifndef SEPSPEC_POLYNOMIAL_HPP
#define SEPSPEC_POLYNOMIAL_HPP

#include <string>
#include <vector>

namespace sepspec {

/// Real root of a polynomial together with the parity of its multiplicity.
/// Only odd-parity roots correspond to sign changes of the polynomial.
struct PolyRoot {
  double x = 0.0;
  bool odd_multiplicity = true;
};

/// Dense univariate polynomial with real coefficients, c[k] multiplying x^k.
class Polynomial {
public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  const std::vector<double>& coefficients() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  /// Horner evaluation of the order-th derivative (order in 0..3 for callers
  /// in this project, but any order >= 0 works).
  double eval(double x, int order = 0) const;

  Polynomial derivative() const;

  /// Adds a constant offset to the polynomial.
  Polynomial operator-(double constant) const;

  /// Taylor shift: returns q with q(x) = p(x + x0).
  Polynomial shifted(double x0) const;

  /// All real roots in [lo, hi], sorted ascending, polished to about 1e-13
  /// relative accuracy.  Roots of even multiplicity are located through the
  /// derivative and flagged.
  std::vector<PolyRoot> real_roots(double lo, double hi) const;

  /// Cauchy-type bound: all real roots lie in [-B, B].
  double root_bound() const;

  /// Canonical text form that parse_potential reads back bit-exactly.
  std::string to_string() const;

private:
  std::vector<double> c_;
};

}  // namespace sepspec

#endif
