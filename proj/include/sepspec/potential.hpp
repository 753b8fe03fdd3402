#ifndef SEPSPEC_POTENTIAL_HPP
#define SEPSPEC_POTENTIAL_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sepspec/polynomial.hpp"

namespace sepspec {

/// Syntax error in a potential expression; column is 1-based.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, int column)
      : std::runtime_error(msg + " (column " + std::to_string(column) + ")"), column_(column) {}
  int column() const { return column_; }

private:
  int column_;
};

/// Polynomial double-well potential candidate V(x) = sum c_k x^k.
struct PotentialModel {
  Polynomial poly;
  double domain_hint = 0.0;  // half-width where the well structure is checked

  const std::vector<double>& coefficients() const { return poly.coefficients(); }
  int degree() const { return poly.degree(); }
  double operator()(double x) const { return poly.eval(x); }
  std::string to_string() const { return poly.to_string(); }
};

struct ValidationCheck {
  std::string name;
  std::string detail;
};

struct ValidationReport {
  bool passed = false;
  std::vector<ValidationCheck> violations;
  double barrier_curvature = 0.0;                  // sqrt(-V''(0))
  std::vector<std::pair<double, double>> well_minima;  // (x, V(x)), left then right
  double v_min = 0.0;
};

/// Parses `c x^k` sums with operators + - * ^; whitespace insensitive.
/// Rejects degree < 4 and odd degree outright (not a confining double-well
/// candidate); everything else is left to validate_double_well.
PotentialModel parse_potential(const std::string& expression);

/// Checks every double-well hypothesis numerically and reports each failure.
ValidationReport validate_double_well(const PotentialModel& V);

/// V, V', V'', V''' at x (order 0..3).
double eval(const PotentialModel& V, double x, int order);

/// Affine renormalization: shifts x so the unique local maximum sits at the
/// origin and subtracts its value.  Throws if there is no unique maximum.
PotentialModel recenter(const PotentialModel& V);

/// Default half-width: twice the largest critical-point magnitude plus one.
double default_domain_hint(const Polynomial& poly);

}  // namespace sepspec

#endif
