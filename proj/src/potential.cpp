#include "sepspec/potential.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace sepspec {

namespace {

struct Cursor {
  const std::string& s;
  size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  int column() const { return static_cast<int>(pos) + 1; }
};

double parse_number(Cursor& cur) {
  cur.skip_ws();
  const char* begin = cur.s.c_str() + cur.pos;
  if (!(std::isdigit(static_cast<unsigned char>(*begin)) || *begin == '.'))
    throw ParseError("expected a decimal coefficient", cur.column());
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin) throw ParseError("malformed decimal coefficient", cur.column());
  cur.pos += static_cast<size_t>(end - begin);
  return v;
}

int parse_exponent(Cursor& cur) {
  cur.skip_ws();
  if (cur.pos >= cur.s.size() || !std::isdigit(static_cast<unsigned char>(cur.s[cur.pos])))
    throw ParseError("expected an integer exponent after '^'", cur.column());
  int v = 0;
  while (cur.pos < cur.s.size() && std::isdigit(static_cast<unsigned char>(cur.s[cur.pos]))) {
    v = v * 10 + (cur.s[cur.pos] - '0');
    if (v > 64) throw ParseError("exponent too large", cur.column());
    ++cur.pos;
  }
  return v;
}

// term := coeff ('*'? 'x' ('^' int)?)? | 'x' ('^' int)?
void parse_term(Cursor& cur, double sign, std::vector<double>& coeffs) {
  double coeff = 1.0;
  bool have_coeff = false;
  char c = cur.peek();
  if (c != 'x') {
    coeff = parse_number(cur);
    have_coeff = true;
  }
  int power = 0;
  c = cur.peek();
  if (c == '*' || c == 'x') {
    if (c == '*') {
      ++cur.pos;
      if (cur.peek() != 'x') throw ParseError("expected 'x' after '*'", cur.column());
    }
    ++cur.pos;  // consume 'x'
    power = 1;
    if (cur.peek() == '^') {
      ++cur.pos;
      power = parse_exponent(cur);
    }
  } else if (!have_coeff) {
    throw ParseError("expected a term", cur.column());
  }
  if (static_cast<size_t>(power) >= coeffs.size()) coeffs.resize(static_cast<size_t>(power) + 1, 0.0);
  coeffs[static_cast<size_t>(power)] += sign * coeff;
}

}  // namespace

PotentialModel parse_potential(const std::string& expression) {
  Cursor cur{expression};
  std::vector<double> coeffs(1, 0.0);
  double sign = 1.0;
  char c = cur.peek();
  if (c == '+' || c == '-') {
    sign = (c == '-') ? -1.0 : 1.0;
    ++cur.pos;
  }
  if (cur.done()) throw ParseError("empty expression", cur.column());
  parse_term(cur, sign, coeffs);
  while (!cur.done()) {
    c = cur.peek();
    if (c == '+' || c == '-') {
      ++cur.pos;
      parse_term(cur, c == '-' ? -1.0 : 1.0, coeffs);
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", cur.column());
    }
  }

  Polynomial poly(std::move(coeffs));
  const int d = poly.degree();
  if (d < 4)
    throw std::invalid_argument("degree " + std::to_string(d) +
                                " < 4: not a confining double-well candidate");
  if (d % 2 != 0)
    throw std::invalid_argument("odd degree " + std::to_string(d) +
                                ": not a confining double-well candidate");
  PotentialModel model;
  model.domain_hint = default_domain_hint(poly);
  model.poly = std::move(poly);
  return model;
}

double default_domain_hint(const Polynomial& poly) {
  Polynomial dp = poly.derivative();
  double bound = dp.root_bound();
  double largest = 0.0;
  for (const auto& r : dp.real_roots(-bound, bound)) largest = std::max(largest, std::fabs(r.x));
  return 2.0 * largest + 1.0;
}

double eval(const PotentialModel& V, double x, int order) {
  if (order < 0 || order > 3) throw std::invalid_argument("eval order must be in 0..3");
  return V.poly.eval(x, order);
}

ValidationReport validate_double_well(const PotentialModel& V) {
  ValidationReport rep;
  const auto& c = V.coefficients();
  auto fail = [&rep](const std::string& name, const std::string& detail) {
    rep.violations.push_back({name, detail});
  };
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };

  const int d = V.degree();
  if (d < 4 || d % 2 != 0) fail("confinement", "degree " + std::to_string(d) + " is not even and >= 4");
  if (!c.empty() && c.back() <= 0.0)
    fail("confinement", "leading coefficient " + fmt(c.back()) + " is not positive");
  if (c.size() > 0 && c[0] != 0.0) fail("origin_value", "V(0) = " + fmt(c[0]) + " != 0");
  if (c.size() > 1 && c[1] != 0.0) fail("origin_slope", "V'(0) = " + fmt(c[1]) + " != 0");
  const double v2 = V.poly.eval(0.0, 2);
  if (v2 >= 0.0) fail("barrier", "V''(0) = " + fmt(v2) + " >= 0 (no non-degenerate maximum)");
  else rep.barrier_curvature = std::sqrt(-v2);

  // Critical-point structure inside the hinted domain.
  const double dh = V.domain_hint > 0.0 ? V.domain_hint : default_domain_hint(V.poly);
  Polynomial dp = V.poly.derivative();
  auto crit = dp.real_roots(-dh, dh);
  std::vector<double> left_minima, right_minima;
  int maxima = 0;
  for (const auto& r : crit) {
    double curv = V.poly.eval(r.x, 2);
    if (std::fabs(r.x) < 1e-9) {
      if (curv < 0.0) ++maxima;
      continue;
    }
    if (curv < 0.0) {
      ++maxima;
      fail("single_maximum", "extra local maximum at x = " + fmt(r.x));
    } else if (curv > 0.0) {
      (r.x < 0.0 ? left_minima : right_minima).push_back(r.x);
    }
  }
  if (left_minima.size() != 1)
    fail("left_well", "expected exactly one local minimum in (-" + fmt(dh) + ", 0), found " +
                          std::to_string(left_minima.size()));
  if (right_minima.size() != 1)
    fail("right_well", "expected exactly one local minimum in (0, " + fmt(dh) + "), found " +
                           std::to_string(right_minima.size()));

  if (left_minima.size() == 1 && right_minima.size() == 1) {
    double xl = left_minima[0], xr = right_minima[0];
    rep.well_minima = {{xl, V.poly.eval(xl)}, {xr, V.poly.eval(xr)}};
    rep.v_min = std::min(rep.well_minima[0].second, rep.well_minima[1].second);
    for (const auto& [x, vx] : rep.well_minima)
      if (vx >= 0.0) fail("well_depth", "well at x = " + fmt(x) + " has V = " + fmt(vx) + " >= 0");
  }

  rep.passed = rep.violations.empty();
  return rep;
}

PotentialModel recenter(const PotentialModel& V) {
  Polynomial dp = V.poly.derivative();
  double bound = dp.root_bound();
  auto crit = dp.real_roots(-bound, bound);
  std::vector<double> maxima;
  for (const auto& r : crit)
    if (V.poly.eval(r.x, 2) < 0.0) maxima.push_back(r.x);
  if (maxima.size() != 1)
    throw std::runtime_error("recenter: potential has " + std::to_string(maxima.size()) +
                             " local maxima, need exactly one");
  const double x0 = maxima[0];
  Polynomial shifted = V.poly.shifted(x0);
  std::vector<double> cs = shifted.coefficients();
  // The shifted constant and slope are zero up to roundoff; snap them.
  cs[0] = 0.0;
  if (cs.size() > 1) cs[1] = 0.0;
  PotentialModel out;
  out.poly = Polynomial(std::move(cs));
  out.domain_hint = default_domain_hint(out.poly);
  return out;
}

}  // namespace sepspec
