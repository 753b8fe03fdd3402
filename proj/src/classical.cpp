#include "sepspec/classical.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

#include "sepspec/fit.hpp"

namespace sepspec {

namespace {

// ---------------------------------------------------------------- quadrature

const std::vector<std::pair<double, double>>& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, std::vector<std::pair<double, double>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  // Nodes/weights on [-1, 1] by Newton on the Legendre recurrence.
  std::vector<std::pair<double, double>> nw(static_cast<size_t>(n));
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    nw[static_cast<size_t>(i)] = {-x, w};
    nw[static_cast<size_t>(n - 1 - i)] = {x, w};
  }
  return cache.emplace(n, std::move(nw)).first->second;
}

double side_well_minimum(const PotentialModel& V, Side side, double* x_min_out = nullptr) {
  Polynomial dp = V.poly.derivative();
  const double b = std::max(dp.root_bound(), V.domain_hint);
  double lo = (side == Side::right) ? 1e-12 : -b;
  double hi = (side == Side::right) ? b : -1e-12;
  double best_x = 0.0, best_v = 0.0;
  bool found = false;
  for (const auto& r : dp.real_roots(lo, hi)) {
    if (V.poly.eval(r.x, 2) <= 0.0) continue;
    double v = V.poly.eval(r.x);
    if (!found || v < best_v) {
      best_x = r.x;
      best_v = v;
      found = true;
    }
  }
  if (!found) throw std::domain_error("no well minimum on the requested side");
  if (x_min_out) *x_min_out = best_x;
  return best_v;
}

// Allowed interval [x1, x2] of the energy-E orbit in the requested half plane.
std::pair<double, double> orbit_interval(const PotentialModel& V, double E, Side side) {
  if (side == Side::both) throw std::invalid_argument("well_action: side must be left or right");
  const double sgn = (side == Side::right) ? 1.0 : -1.0;
  // Energies within roundoff of the barrier top are treated as the
  // separatrix itself; the inner endpoint then sits at the origin and the
  // area error is O(|E|), far below the quadrature tolerance.
  const double barrier_eps = 1e-18 * (1.0 + std::fabs(V.poly.eval(0.0, 2)));
  if (E >= -barrier_eps) {
    auto tp = turning_points(V, std::max(E, 0.0), side);
    if (tp.roots.empty()) throw std::domain_error("no outer turning point at this energy");
    double outer = (side == Side::right) ? tp.roots.back() : tp.roots.front();
    return (sgn > 0) ? std::make_pair(0.0, outer) : std::make_pair(outer, 0.0);
  }
  double x_min = 0.0;
  const double v_min = side_well_minimum(V, side, &x_min);
  if (E < v_min) throw std::domain_error("energy below the well minimum");
  if (E == v_min) return {x_min, x_min};
  auto tp = turning_points(V, E, side);
  // Pick consecutive roots bracketing the well minimum.
  for (size_t i = 0; i + 1 < tp.roots.size(); ++i)
    if (tp.roots[i] <= x_min && x_min <= tp.roots[i + 1]) return {tp.roots[i], tp.roots[i + 1]};
  throw std::domain_error("no classically allowed interval around the well at this energy");
}

// --------------------------------------------------------------- flow (DP54)

struct State {
  double x, xi;
};

struct StepResult {
  State y;
  double error;  // scaled error estimate
};

class Dopri5 {
public:
  explicit Dopri5(const PotentialModel& V) : V_(V) {}

  State deriv(const State& s) const { return {s.xi, -V_.poly.eval(s.x, 1)}; }

  StepResult step(const State& y0, double dt, double tol) const {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    auto axpy = [](const State& y, double c, const State& k) {
      return State{y.x + c * k.x, y.xi + c * k.xi};
    };
    State k1 = deriv(y0);
    State k2 = deriv(axpy(y0, dt * a21, k1));
    State k3 = deriv({y0.x + dt * (a31 * k1.x + a32 * k2.x), y0.xi + dt * (a31 * k1.xi + a32 * k2.xi)});
    State k4 = deriv({y0.x + dt * (a41 * k1.x + a42 * k2.x + a43 * k3.x),
                      y0.xi + dt * (a41 * k1.xi + a42 * k2.xi + a43 * k3.xi)});
    State k5 = deriv({y0.x + dt * (a51 * k1.x + a52 * k2.x + a53 * k3.x + a54 * k4.x),
                      y0.xi + dt * (a51 * k1.xi + a52 * k2.xi + a53 * k3.xi + a54 * k4.xi)});
    State k6 = deriv({y0.x + dt * (a61 * k1.x + a62 * k2.x + a63 * k3.x + a64 * k4.x + a65 * k5.x),
                      y0.xi + dt * (a61 * k1.xi + a62 * k2.xi + a63 * k3.xi + a64 * k4.xi + a65 * k5.xi)});
    State y1{y0.x + dt * (b1 * k1.x + b3 * k3.x + b4 * k4.x + b5 * k5.x + b6 * k6.x),
             y0.xi + dt * (b1 * k1.xi + b3 * k3.xi + b4 * k4.xi + b5 * k5.xi + b6 * k6.xi)};
    State k7 = deriv(y1);
    double ex = dt * (e1 * k1.x + e3 * k3.x + e4 * k4.x + e5 * k5.x + e6 * k6.x + e7 * k7.x);
    double exi = dt * (e1 * k1.xi + e3 * k3.xi + e4 * k4.xi + e5 * k5.xi + e6 * k6.xi + e7 * k7.xi);
    double sx = tol * (1.0 + std::max(std::fabs(y0.x), std::fabs(y1.x)));
    double sxi = tol * (1.0 + std::max(std::fabs(y0.xi), std::fabs(y1.xi)));
    double err = std::sqrt(0.5 * ((ex / sx) * (ex / sx) + (exi / sxi) * (exi / sxi)));
    return {y1, err};
  }

  // Advances from (t, y) to exactly t_end with adaptive steps; optional
  // callback sees every accepted step.
  template <typename Callback>
  void integrate(double& t, State& y, double t_end, double tol, Callback&& cb) const {
    double dt = std::min(1e-3, (t_end - t) * 0.1);
    if (dt <= 0.0) return;
    while (t < t_end) {
      dt = std::min(dt, t_end - t);
      if (dt < 1e-14 * std::max(1.0, std::fabs(t)))
        throw std::runtime_error("flow integration: step-size underflow at t = " + std::to_string(t));
      StepResult r = step(y, dt, tol);
      if (r.error <= 1.0) {
        double t_prev = t;
        State y_prev = y;
        t += dt;
        y = r.y;
        cb(t_prev, y_prev, t, y);
        dt *= std::clamp(0.9 * std::pow(std::max(r.error, 1e-10), -0.2), 1.0, 5.0);
      } else {
        dt *= std::max(0.9 * std::pow(r.error, -0.2), 0.2);
      }
    }
  }

private:
  const PotentialModel& V_;
};

// First crossing of {xi = 0} with the same crossing direction as the start
// point leaves it with.  Returns the crossing time or nothing before t_max.
std::optional<double> detect_section_return(const PotentialModel& V, PhasePoint start, double tol,
                                            double t_max) {
  const double dir = -V.poly.eval(start.x, 1);  // xidot at start
  if (dir == 0.0) throw std::domain_error("period detection: start point is an equilibrium");
  const bool upward = dir > 0.0;
  Dopri5 ode(V);

  double t = 0.0;
  State y{start.x, start.xi};
  std::optional<double> hit;
  double ta = 0.0, tb = 0.0;
  State ya{};
  bool bracketed = false;
  try {
    ode.integrate(t, y, t_max, tol, [&](double t0, const State& y0, double t1, const State& y1) {
      if (bracketed) return;
      bool crossing = upward ? (y0.xi < 0.0 && y1.xi >= 0.0) : (y0.xi > 0.0 && y1.xi <= 0.0);
      if (crossing && t0 > 0.0) {
        ta = t0;
        tb = t1;
        ya = y0;
        bracketed = true;
      }
    });
  } catch (const std::runtime_error&) {
    if (!bracketed) throw;
  }
  if (!bracketed) return std::nullopt;

  // Bisection on the section; each midpoint is reached by a fresh adaptive
  // integration of the shrinking subinterval, so no interpolant error enters.
  while (tb - ta > 1e-12 * std::max(1.0, tb)) {
    double tm = 0.5 * (ta + tb);
    double tc = ta;
    State yc = ya;
    ode.integrate(tc, yc, tm, tol, [](double, const State&, double, const State&) {});
    bool before = upward ? (yc.xi < 0.0) : (yc.xi > 0.0);
    if (before) {
      ta = tm;
      ya = yc;
    } else {
      tb = tm;
    }
  }
  hit = 0.5 * (ta + tb);
  return hit;
}

}  // namespace

double hamiltonian(const PhasePoint& pt, const PotentialModel& V) {
  return 0.5 * pt.xi * pt.xi + V.poly.eval(pt.x);
}

TurningPointSet turning_points(const PotentialModel& V, double E, Side side) {
  TurningPointSet out;
  out.energy = E;
  out.side = side;
  Polynomial p = V.poly - E;
  const double bound = std::max(p.root_bound(), V.domain_hint);
  double glo = -bound, ghi = bound;

  // Below both wells there is nothing to intersect.
  Polynomial dp = V.poly.derivative();
  double v_min_glob = std::min(V.poly.eval(glo), V.poly.eval(ghi));
  for (const auto& r : dp.real_roots(glo, ghi)) v_min_glob = std::min(v_min_glob, V.poly.eval(r.x));
  if (E < v_min_glob) throw std::domain_error("below both wells");

  for (const auto& r : p.real_roots(glo, ghi)) {
    if (!r.odd_multiplicity) continue;  // tangency (e.g. the saddle at the separatrix)
    if (side == Side::right && r.x <= 0.0) continue;
    if (side == Side::left && r.x >= 0.0) continue;
    out.roots.push_back(r.x);
  }
  return out;
}

double well_action(const PotentialModel& V, double E, Side side, double rel_tol) {
  auto [x1, x2] = orbit_interval(V, E, side);
  if (x2 <= x1) return 0.0;
  const double span = x2 - x1;
  auto integrand = [&](double u) {
    double s = std::sin(u);
    double x = x2 - span * s * s;
    double k = 2.0 * (E - V.poly.eval(x));
    if (k < 0.0) k = 0.0;  // roundoff at the endpoints
    return std::sqrt(k) * span * std::sin(2.0 * u);
  };
  const double half_pi = 0.5 * M_PI;
  double prev = 0.0;
  for (int n = 16; n <= 8192; n *= 2) {
    double sum = 0.0;
    for (const auto& [node, w] : gauss_legendre(n)) {
      double u = 0.5 * half_pi * (node + 1.0);
      sum += w * integrand(u);
    }
    double I = 0.5 * half_pi * sum;
    if (n > 16 && std::fabs(I - prev) <= rel_tol * std::fabs(I) + 1e-300) return 2.0 * I;
    prev = I;
  }
  throw std::runtime_error("well_action: quadrature did not converge");
}

ActionPair action_pair(const PotentialModel& V, double E, double rel_tol) {
  return {well_action(V, E, Side::right, rel_tol), well_action(V, E, Side::left, rel_tol), E};
}

ActionDerivativeCheck action_derivative_check(const PotentialModel& V, double E, Side side) {
  const double v_min = side_well_minimum(V, side);
  if (!(E > v_min && E < 0.0))
    throw std::domain_error("action_derivative_check needs a regular well orbit (v_min < E < 0)");
  const double delta = 1e-5 * std::fabs(E - v_min);
  ActionDerivativeCheck out;
  out.dA_dE = (well_action(V, E + delta, side) - well_action(V, E - delta, side)) / (2.0 * delta);
  auto [x1, x2] = orbit_interval(V, E, side);
  PhasePoint start{x2, 0.0};  // outer turning point
  auto period = detect_section_return(V, start, 1e-12, 1e4);
  if (!period) throw std::runtime_error("orbit period detection failed");
  out.orbit_period = *period;
  return out;
}

double epsilon0(double E, const PotentialModel& V) {
  const double v2 = V.poly.eval(0.0, 2);
  if (v2 >= 0.0) throw std::domain_error("epsilon0: V''(0) must be negative");
  return E / std::sqrt(-v2);
}

FlowTrace flow_integrate(const PotentialModel& V, PhasePoint start, double t_max, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("flow tolerance must be positive");
  Dopri5 ode(V);
  FlowTrace trace;
  const double E0 = hamiltonian(start, V);
  trace.samples.push_back({0.0, start});
  double t = 0.0;
  State y{start.x, start.xi};
  ode.integrate(t, y, t_max, tol, [&](double, const State&, double t1, const State& y1) {
    trace.samples.push_back({t1, PhasePoint{y1.x, y1.xi}});
    double drift = std::fabs(hamiltonian({y1.x, y1.xi}, V) - E0);
    trace.energy_drift = std::max(trace.energy_drift, drift);
  });
  return trace;
}

double return_period(const PotentialModel& V, double h, double tol) {
  if (h <= 0.0) throw std::invalid_argument("return_period: h must be positive");
  if (tol <= 0.0) throw std::invalid_argument("return_period: tol must be positive");
  const double x0 = std::sqrt(h);
  if (V.poly.eval(x0) >= 0.0)
    throw std::domain_error("return_period: start (sqrt(h), 0) is not inside the right well");
  const double t_max = 50.0 * std::fabs(std::log(h));
  auto period = detect_section_return(V, {x0, 0.0}, tol, t_max);
  if (!period) throw std::runtime_error("period detection failed within t_max");
  return *period;
}

PeriodFit period_slope_fit(const PotentialModel& V, const std::vector<double>& h_list, double tol) {
  if (h_list.size() < 4) throw std::invalid_argument("period_slope_fit: need >= 4 values of h");
  double lo = *std::min_element(h_list.begin(), h_list.end());
  double hi = *std::max_element(h_list.begin(), h_list.end());
  if (std::log10(hi / lo) < 3.0)
    throw std::invalid_argument("period_slope_fit: h values must span >= 3 decades");
  std::vector<double> xs, ys;
  for (double h : h_list) {
    xs.push_back(std::fabs(std::log(h)));
    ys.push_back(return_period(V, h, tol));
  }
  LinearFit f = linear_fit(xs, ys);
  return {f.slope, f.intercept, f.r2};
}

}  // namespace sepspec
