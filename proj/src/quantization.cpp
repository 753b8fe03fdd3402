#include "sepspec/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sepspec/special.hpp"

namespace sepspec {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double arg_gamma_half_line(double y) {
  return std::fabs(y) <= 1e8 ? gamma_line(y).argument : stirling_arg(y);
}

double clamped_arccos_arg(const SingularPhaseData& d, const SemiclassicalParams& p,
                          double* clamp_amount = nullptr) {
  const double w = kTwoPi * d.eps / p.h;
  double raw = std::cos(d.g) * inv_sqrt_one_plus_exp(w);
  double c = std::clamp(raw, -1.0, 1.0);
  if (clamp_amount) *clamp_amount = std::fabs(raw - c);
  return c;
}

struct YZ {
  double y, z, clamp;
};

// arccos(cos(g) / sqrt(1 + e^w)) without the cancellation that rounds the
// argument to +/-1 for deep quasi-doublets: 1 -/+ c is assembled from
// 2 sin^2(g/2) (resp. cos^2) and e^w / (sqrt(1+e^w)(1+sqrt(1+e^w))), both
// computable at full relative precision for w <= 0.
double stable_arccos_branch(double g, double w, double c) {
  if (c > 0.9 && w <= 0.0) {
    const double u = std::exp(w);
    const double root = std::sqrt(1.0 + u);
    const double one_minus_q = u / (root * (1.0 + root));
    const double s = std::sin(0.5 * g);
    const double D = 2.0 * s * s + std::cos(g) * one_minus_q;
    return 2.0 * std::asin(std::sqrt(std::max(0.0, 0.5 * D)));
  }
  if (c < -0.9 && w <= 0.0) {
    const double u = std::exp(w);
    const double root = std::sqrt(1.0 + u);
    const double one_minus_q = u / (root * (1.0 + root));
    const double cc = std::cos(0.5 * g);
    const double Dp = 2.0 * cc * cc / root + one_minus_q;
    return M_PI - 2.0 * std::asin(std::sqrt(std::max(0.0, 0.5 * Dp)));
  }
  return std::acos(c);
}

YZ yz_from(const SingularPhaseData& d, const SemiclassicalParams& p) {
  double clamp = 0.0;
  const double c = clamped_arccos_arg(d, p, &clamp);
  const double arc = stable_arccos_branch(d.g, kTwoPi * d.eps / p.h, c);
  return {d.f - arc, d.f + arc, clamp};
}

}  // namespace

double SemiclassicalParams::window_halfwidth() const { return std::pow(h, alpha); }

std::vector<std::string> SemiclassicalParams::check() const {
  if (!(h > 0.0)) throw std::invalid_argument("params: h must be positive");
  if (!(alpha >= 0.5 && alpha < 1.0)) throw std::invalid_argument("params: alpha must lie in [1/2, 1)");
  if (!(quad_tol > 0.0 && root_tol > 0.0))
    throw std::invalid_argument("params: tolerances must be positive");
  std::vector<std::string> warnings;
  if (h > 0.1) warnings.push_back("h > 0.1: asymptotic window may be unreliable at this scale");
  return warnings;
}

double inv_sqrt_one_plus_exp(double w) {
  if (w >= 0.0) return std::exp(-0.5 * w) / std::sqrt(1.0 + std::exp(-w));
  return 1.0 / std::sqrt(1.0 + std::exp(w));
}

SingularPhaseData phase_data(double E, const PotentialModel& V, const SemiclassicalParams& p) {
  SingularPhaseData d;
  d.energy = E;
  d.eps = epsilon0(E, V);
  d.a_plus = well_action(V, E, Side::right, p.quad_tol);
  d.a_minus = well_action(V, E, Side::left, p.quad_tol);
  const double eps_log = (d.eps == 0.0) ? 0.0 : d.eps * std::log(std::fabs(d.eps));
  d.s_plus = d.a_plus + eps_log - d.eps + p.h * p.mu_plus;
  d.s_minus = d.a_minus + eps_log - d.eps + p.h * p.mu_minus;
  d.theta_plus = d.s_plus / p.h;
  d.theta_minus = d.s_minus / p.h;
  const double y = d.eps / p.h;
  d.f = -0.5 * (d.theta_plus + d.theta_minus) + 0.5 * M_PI + y * std::log(p.h) +
        arg_gamma_half_line(y);
  d.g = 0.5 * (d.theta_plus - d.theta_minus);
  return d;
}

double cdvp_residual(const SingularPhaseData& d, const SemiclassicalParams& p) {
  const double w = kTwoPi * d.eps / p.h;
  return std::cos(d.f) - std::cos(d.g) * inv_sqrt_one_plus_exp(w);
}

double cdvp_residual(double E, const PotentialModel& V, const SemiclassicalParams& p) {
  return cdvp_residual(phase_data(E, V, p), p);
}

double y_of_lambda(double lambda, const PotentialModel& V, const SemiclassicalParams& p) {
  return yz_from(phase_data(lambda * p.window_halfwidth(), V, p), p).y;
}

double z_of_lambda(double lambda, const PotentialModel& V, const SemiclassicalParams& p) {
  return yz_from(phase_data(lambda * p.window_halfwidth(), V, p), p).z;
}

TransferMatrix transfer_q(double eps_over_h, double h) {
  const double y = eps_over_h;
  TransferMatrix q;
  q.kind = MatrixKind::Q;
  const double phase = arg_gamma_half_line(y) + y * std::log(h);
  const double diag_mod = inv_sqrt_one_plus_exp(-kTwoPi * y);   // |E|
  const double off_mod = inv_sqrt_one_plus_exp(kTwoPi * y);     // |E| e^{-pi y}
  q.e_factor = std::polar(diag_mod, phase);
  const std::complex<double> diag = std::polar(diag_mod, phase);
  const std::complex<double> off = std::polar(off_mod, phase + 0.5 * M_PI);  // i e^{-pi y} E
  q.m[0][0] = diag;
  q.m[0][1] = off;
  q.m[1][0] = off;
  q.m[1][1] = diag;
  return q;
}

TransferMatrix transfer_t(const SingularPhaseData& d, const SemiclassicalParams& p) {
  TransferMatrix q = transfer_q(d.eps / p.h, p.h);
  const std::complex<double> ep = std::polar(1.0, -std::remainder(d.theta_plus, kTwoPi));
  const std::complex<double> em = std::polar(1.0, -std::remainder(d.theta_minus, kTwoPi));
  TransferMatrix t;
  t.kind = MatrixKind::T_of_E;
  t.e_factor = q.e_factor;
  t.m[0][0] = q.m[0][1] * em;
  t.m[0][1] = q.m[0][0] * ep;
  t.m[1][0] = q.m[1][1] * em;
  t.m[1][1] = q.m[1][0] * ep;
  return t;
}

double det_condition(double E, const PotentialModel& V, const SemiclassicalParams& p) {
  TransferMatrix t = transfer_t(phase_data(E, V, p), p);
  const std::complex<double> det =
      (t.m[0][0] - 1.0) * (t.m[1][1] - 1.0) - t.m[0][1] * t.m[1][0];
  return std::abs(det);
}

namespace {

struct SampledCondition {
  std::vector<double> energies;
  std::vector<YZ> values;
};

SampledCondition sample_condition(const PotentialModel& V, const SemiclassicalParams& p,
                                  double e_lo, double e_hi, size_t n) {
  SampledCondition s;
  s.energies.resize(n);
  s.values.resize(n);
  for (size_t i = 0; i < n; ++i) {
    double E = e_lo + (e_hi - e_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    s.energies[i] = E;
    s.values[i] = yz_from(phase_data(E, V, p), p);
  }
  return s;
}

bool strictly_decreasing(const SampledCondition& s, bool family_a) {
  for (size_t i = 0; i + 1 < s.values.size(); ++i) {
    double v0 = family_a ? s.values[i].y : s.values[i].z;
    double v1 = family_a ? s.values[i + 1].y : s.values[i + 1].z;
    if (!(v1 < v0)) return false;
  }
  return true;
}

// Solves (Y or Z)(E) = target inside [ea, eb] by bisection plus a secant
// polish on the phase residual.
BranchRoot solve_target(const PotentialModel& V, const SemiclassicalParams& p, Branch branch,
                        long k, double target, double ea, double eb) {
  auto phi = [&](double E) {
    YZ v = yz_from(phase_data(E, V, p), p);
    return (branch == Branch::A ? v.y : v.z) - target;
  };
  double fa = phi(ea), fb = phi(eb);
  for (int it = 0; it < 20; ++it) {
    double em = 0.5 * (ea + eb);
    double fm = phi(em);
    if ((fm > 0.0) == (fa > 0.0)) {
      ea = em;
      fa = fm;
    } else {
      eb = em;
      fb = fm;
    }
  }
  // Secant with bisection fallback below the bracket scale.
  double x0 = ea, f0 = fa, x1 = eb, f1 = fb;
  double root = 0.5 * (ea + eb);
  for (int it = 0; it < 60; ++it) {
    double x2;
    if (f1 != f0) {
      x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
      if (!(x2 > ea && x2 < eb)) x2 = 0.5 * (ea + eb);
    } else {
      x2 = 0.5 * (ea + eb);
    }
    double f2 = phi(x2);
    if ((f2 > 0.0) == (fa > 0.0)) {
      ea = x2;
      fa = f2;
    } else {
      eb = x2;
      fb = f2;
    }
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = f2;
    root = x2;
    if (std::fabs(f2) < p.root_tol) break;
  }
  BranchRoot r;
  r.branch = branch;
  r.index = k;
  r.energy = root;
  r.lambda = root / p.window_halfwidth();
  r.residual = cdvp_residual(root, V, p);
  return r;
}

void enumerate_family(const PotentialModel& V, const SemiclassicalParams& p,
                      const SampledCondition& s, Branch branch, bool monotone,
                      std::vector<BranchRoot>& out, std::vector<EnumerationAnomaly>& anomalies) {
  auto value = [&](size_t i) { return branch == Branch::A ? s.values[i].y : s.values[i].z; };
  const size_t n = s.values.size();
  double vmax = value(0), vmin = value(0);
  for (size_t i = 1; i < n; ++i) {
    vmax = std::max(vmax, value(i));
    vmin = std::min(vmin, value(i));
  }
  const long k_lo = static_cast<long>(std::ceil(vmin / kTwoPi));
  const long k_hi = static_cast<long>(std::floor(vmax / kTwoPi));
  for (long k = k_hi; k >= k_lo; --k) {
    const double target = kTwoPi * static_cast<double>(k);
    int bracket_count = 0;
    for (size_t i = 0; i + 1 < n; ++i) {
      double v0 = value(i), v1 = value(i + 1);
      if ((v0 - target) == 0.0 || ((v0 - target) > 0.0) != ((v1 - target) > 0.0)) {
        ++bracket_count;
        out.push_back(solve_target(V, p, branch, k, target, s.energies[i], s.energies[i + 1]));
        if (monotone) break;  // a monotone family has exactly one root per target
      }
    }
    if (bracket_count == 0) {
      // Target inside [vmin, vmax] yet not bracketed can only happen with
      // pathological sampling; surface it rather than dropping the index.
      anomalies.push_back({branch, k, "target not bracketed by the sample grid"});
    } else if (bracket_count > 1) {
      anomalies.push_back({branch, k, "multiple roots for one index (non-monotone condition)"});
    }
  }
}

SpectrumWindow enumerate_impl(const PotentialModel& V, const SemiclassicalParams& p, double e_lo,
                              double e_hi) {
  p.check();
  SpectrumWindow win;
  win.params = p;

  size_t n = 64;
  SampledCondition s = sample_condition(V, p, e_lo, e_hi, n);
  bool mono_a = strictly_decreasing(s, true);
  bool mono_b = strictly_decreasing(s, false);
  while ((!mono_a || !mono_b) && n < 8192) {
    n *= 2;
    s = sample_condition(V, p, e_lo, e_hi, n);
    mono_a = strictly_decreasing(s, true);
    mono_b = strictly_decreasing(s, false);
  }
  for (const auto& v : s.values) win.max_clamp = std::max(win.max_clamp, v.clamp);

  enumerate_family(V, p, s, Branch::A, mono_a, win.family_a, win.anomalies);
  enumerate_family(V, p, s, Branch::B, mono_b, win.family_b, win.anomalies);

  // Families are generated from the largest index down, i.e. ascending in
  // energy; store them by ascending index (descending energy).
  std::sort(win.family_a.begin(), win.family_a.end(),
            [](const BranchRoot& u, const BranchRoot& v) { return u.index < v.index; });
  std::sort(win.family_b.begin(), win.family_b.end(),
            [](const BranchRoot& u, const BranchRoot& v) { return u.index < v.index; });

  win.merged = win.family_a;
  win.merged.insert(win.merged.end(), win.family_b.begin(), win.family_b.end());
  // Quasi-doublets can round to bit-equal energies; the Y-family root sits
  // below the Z-family root of the same index, so break ties that way.
  std::sort(win.merged.begin(), win.merged.end(), [](const BranchRoot& u, const BranchRoot& v) {
    if (u.energy != v.energy) return u.energy < v.energy;
    return u.branch == Branch::A && v.branch == Branch::B;
  });
  return win;
}

}  // namespace

SpectrumWindow enumerate_window(const PotentialModel& V, const SemiclassicalParams& p) {
  const double w = p.window_halfwidth();
  return enumerate_impl(V, p, -w, w);
}

SpectrumWindow enumerate_energy_range(const PotentialModel& V, const SemiclassicalParams& p,
                                      double e_lo, double e_hi) {
  if (!(e_lo < e_hi)) throw std::invalid_argument("enumerate_energy_range: empty range");
  return enumerate_impl(V, p, e_lo, e_hi);
}

namespace {

std::vector<double> bs_ladder(const PotentialModel& V, double h, double e_lo, double e_hi,
                              double offset, double quad_tol, Side side, bool total) {
  auto action = [&](double E) {
    if (total)
      return well_action(V, E, Side::right, quad_tol) + well_action(V, E, Side::left, quad_tol);
    return well_action(V, E, side, quad_tol);
  };
  const double a_lo = action(e_lo), a_hi = action(e_hi);
  const double step = kTwoPi * h;
  std::vector<double> roots;
  const long n_lo = static_cast<long>(std::ceil(a_lo / step - offset));
  const long n_hi = static_cast<long>(std::floor(a_hi / step - offset));
  for (long nn = n_lo; nn <= n_hi; ++nn) {
    const double target = step * (static_cast<double>(nn) + offset);
    double lo = e_lo, hi = e_hi;
    double flo = a_lo - target;
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      double fm = action(mid) - target;
      if ((fm > 0.0) == (flo > 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
      if (hi - lo < 1e-13 * std::max(1.0, std::fabs(hi))) break;
    }
    roots.push_back(0.5 * (lo + hi));
  }
  return roots;
}

}  // namespace

std::vector<double> regular_bs_top(const PotentialModel& V, double h, double e_lo, double e_hi,
                                   double offset, double quad_tol) {
  if (!(e_lo > 0.0 && e_hi > e_lo)) throw std::invalid_argument("regular_bs_top: need 0 < e_lo < e_hi");
  return bs_ladder(V, h, e_lo, e_hi, offset, quad_tol, Side::both, true);
}

RegularBottomModes regular_bs_bottom(const PotentialModel& V, double h, double e_lo, double e_hi,
                                     double offset, double quad_tol) {
  if (!(e_hi < 0.0 && e_lo < e_hi))
    throw std::invalid_argument("regular_bs_bottom: need e_lo < e_hi < 0");
  RegularBottomModes modes;
  modes.plus_well = bs_ladder(V, h, e_lo, e_hi, offset, quad_tol, Side::right, false);
  modes.minus_well = bs_ladder(V, h, e_lo, e_hi, offset, quad_tol, Side::left, false);
  return modes;
}

}  // namespace sepspec
