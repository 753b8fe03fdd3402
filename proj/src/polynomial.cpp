#include "sepspec/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace sepspec {

namespace {

void trim_leading_zeros(std::vector<double>& c) {
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
}

double eval_coeffs(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (size_t i = c.size(); i-- > 0;) v = v * x + c[i];
  return v;
}

// Sturm chain built from normalized polynomial remainders.  Each member is
// rescaled to unit max coefficient so the chain stays well conditioned.
std::vector<std::vector<double>> sturm_chain(const std::vector<double>& poly) {
  std::vector<std::vector<double>> chain;
  auto normalize = [](std::vector<double> p) {
    trim_leading_zeros(p);
    double m = 0.0;
    for (double v : p) m = std::max(m, std::fabs(v));
    if (m > 0.0)
      for (double& v : p) v /= m;
    return p;
  };
  std::vector<double> p0 = normalize(poly);
  chain.push_back(p0);
  if (p0.size() <= 1) return chain;
  std::vector<double> p1(p0.size() - 1);
  for (size_t k = 1; k < p0.size(); ++k) p1[k - 1] = p0[k] * static_cast<double>(k);
  p1 = normalize(p1);
  chain.push_back(p1);

  std::vector<double> a = p0, b = p1;
  while (b.size() > 1) {
    // remainder of a / b
    std::vector<double> r = a;
    while (r.size() >= b.size() && r.size() > 1) {
      double q = r.back() / b.back();
      size_t shift = r.size() - b.size();
      for (size_t k = 0; k < b.size(); ++k) r[k + shift] -= q * b[k];
      r.pop_back();
      trim_leading_zeros(r);
      if (r.size() < b.size()) break;
    }
    // An exactly zero remainder ends the chain at the gcd (multiple roots);
    // small nonzero remainders are kept, they encode nearly-degenerate roots.
    double m = 0.0;
    for (double v : r) m = std::max(m, std::fabs(v));
    if (m == 0.0) break;
    for (double& v : r) v = -v / m;
    chain.push_back(r);
    a = std::move(b);
    b = chain.back();
  }
  return chain;
}

int sign_variations(const std::vector<std::vector<double>>& chain, double x) {
  int vars = 0, last = 0;
  for (const auto& p : chain) {
    double v = eval_coeffs(p, x);
    int s = (v > 0.0) - (v < 0.0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++vars;
    last = s;
  }
  return vars;
}

// Polishes a simple root bracketed by [lo, hi] (f(lo) and f(hi) of opposite
// sign) with bisection plus Newton steps, to ~1e-13 relative.
double polish_bracketed(const std::vector<double>& c, const std::vector<double>& dc,
                        double lo, double hi) {
  double flo = eval_coeffs(c, lo);
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double f = eval_coeffs(c, x);
    if (f == 0.0) return x;
    double df = eval_coeffs(dc, x);
    double xn = x;
    bool newton_ok = false;
    if (df != 0.0) {
      xn = x - f / df;
      newton_ok = (xn > lo && xn < hi);
    }
    if (!newton_ok) xn = 0.5 * (lo + hi);
    double fn = eval_coeffs(c, xn);
    if (fn == 0.0) return xn;
    if ((fn > 0.0) == (flo > 0.0)) {
      lo = xn;
      flo = fn;
    } else {
      hi = xn;
    }
    double scale = std::max({std::fabs(lo), std::fabs(hi), 1e-30});
    if (std::fabs(hi - lo) <= 1e-13 * scale) break;
    x = xn;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Polynomial::Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty()) c_.push_back(0.0);
  trim_leading_zeros(c_);
}

double Polynomial::eval(double x, int order) const {
  if (order < 0) throw std::invalid_argument("polynomial derivative order must be >= 0");
  if (order == 0) return eval_coeffs(c_, x);
  if (order > degree()) return 0.0;
  // Horner on the derivative coefficients, built on the fly.
  std::vector<double> d = c_;
  for (int o = 0; o < order; ++o) {
    for (size_t k = 1; k < d.size(); ++k) d[k - 1] = d[k] * static_cast<double>(k);
    d.pop_back();
  }
  return eval_coeffs(d, x);
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial({0.0});
  std::vector<double> d(c_.size() - 1);
  for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
  return Polynomial(std::move(d));
}

Polynomial Polynomial::operator-(double constant) const {
  std::vector<double> d = c_;
  d[0] -= constant;
  return Polynomial(std::move(d));
}

Polynomial Polynomial::shifted(double x0) const {
  // Repeated synthetic division by (x - (-x0)) yields the Taylor coefficients.
  std::vector<double> d = c_;
  const size_t n = d.size();
  for (size_t j = 0; j < n; ++j)
    for (size_t k = n - 1; k-- > j;) d[k] += x0 * d[k + 1];
  return Polynomial(std::move(d));
}

double Polynomial::root_bound() const {
  const double lead = std::fabs(c_.back());
  if (lead == 0.0) return 1.0;
  double m = 0.0;
  for (size_t k = 0; k + 1 < c_.size(); ++k) m = std::max(m, std::fabs(c_[k]));
  return 1.0 + m / lead;
}

std::vector<PolyRoot> Polynomial::real_roots(double lo, double hi) const {
  std::vector<PolyRoot> out;
  if (degree() < 1 || lo >= hi) return out;
  auto chain = sturm_chain(c_);
  std::vector<double> dc(c_.size() - 1);
  for (size_t k = 1; k < c_.size(); ++k) dc[k - 1] = c_[k] * static_cast<double>(k);

  // Sturm counting needs evaluation points that are not roots themselves;
  // nudge any split point that lands exactly on one (symmetric intervals
  // otherwise bisect straight onto a symmetric root).
  auto safe_point = [&](double a, double b) {
    static const double fractions[] = {0.5, 0.4921875, 0.5078125, 0.46875, 0.53125};
    for (double t : fractions) {
      double m = a + (b - a) * t;
      if (eval_coeffs(c_, m) != 0.0) return m;
    }
    return a + (b - a) * 0.497;
  };
  if (eval_coeffs(c_, lo) == 0.0) lo -= 1e-12 * std::max(1.0, std::fabs(lo));
  if (eval_coeffs(c_, hi) == 0.0) hi += 1e-12 * std::max(1.0, std::fabs(hi));

  struct Interval {
    double a, b;
    int count;
  };
  std::vector<Interval> stack{{lo, hi, sign_variations(chain, lo) - sign_variations(chain, hi)}};
  std::vector<std::pair<double, double>> isolated;  // intervals holding one distinct root
  while (!stack.empty()) {
    Interval iv = stack.back();
    stack.pop_back();
    if (iv.count <= 0) continue;
    double width = iv.b - iv.a;
    if (iv.count == 1 || width < 1e-13 * std::max(1.0, std::fabs(iv.a))) {
      isolated.emplace_back(iv.a, iv.b);
      continue;
    }
    double mid = safe_point(iv.a, iv.b);
    int vm = sign_variations(chain, mid);
    int left = sign_variations(chain, iv.a) - vm;
    stack.push_back({iv.a, mid, left});
    stack.push_back({mid, iv.b, iv.count - left});
  }

  for (auto [a, b] : isolated) {
    double fa = eval_coeffs(c_, a), fb = eval_coeffs(c_, b);
    if ((fa > 0.0) != (fb > 0.0)) {
      out.push_back({polish_bracketed(c_, dc, a, b), true});
    } else {
      // Even multiplicity: the root is a critical point of the polynomial.
      Polynomial d = derivative();
      auto droots = d.real_roots(a, b);
      double best = 0.5 * (a + b), bestv = std::fabs(eval(best));
      for (const auto& r : droots) {
        double v = std::fabs(eval(r.x));
        if (v < bestv) {
          best = r.x;
          bestv = v;
        }
      }
      out.push_back({best, false});
    }
  }
  std::sort(out.begin(), out.end(), [](const PolyRoot& u, const PolyRoot& v) { return u.x < v.x; });
  return out;
}

std::string Polynomial::to_string() const {
  std::string s;
  char buf[64];
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    double v = c_[static_cast<size_t>(k)];
    if (v == 0.0 && !(first && k == 0)) continue;
    double mag = std::fabs(v);
    if (first) {
      if (v < 0.0) s += "-";
      first = false;
    } else {
      s += (v < 0.0) ? " - " : " + ";
    }
    std::snprintf(buf, sizeof buf, "%.17g", mag);
    if (k == 0) {
      s += buf;
    } else {
      if (mag != 1.0) {
        s += buf;
        s += "*";
      }
      s += "x";
      if (k != 1) {
        std::snprintf(buf, sizeof buf, "^%d", k);
        s += buf;
      }
    }
  }
  if (s.empty()) s = "0";
  return s;
}

}  // namespace sepspec
