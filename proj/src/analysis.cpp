#include "sepspec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sepspec/fit.hpp"
#include "sepspec/special.hpp"

namespace sepspec {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double wrap_2pi(double x) {
  double w = std::fmod(x, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

// Phase samples with mu = 0; constant offsets enter linearly, so one table
// serves every calibration candidate.
struct PhaseTable {
  std::vector<double> lambda;  // in [-1, 1]
  std::vector<double> f0;      // f at mu = 0
  std::vector<double> g0;      // g at mu = 0
  std::vector<double> wexp;    // 2 pi eps / h
  double halfwidth = 0.0;

  struct Eval {
    double y, z;
  };

  Eval eval(size_t i, double mu_bar, double mu_diff_half) const {
    const double f = f0[i] - mu_bar;
    const double g = g0[i] + mu_diff_half;
    const double arc =
        std::acos(std::clamp(std::cos(g) * inv_sqrt_one_plus_exp(wexp[i]), -1.0, 1.0));
    return {f - arc, f + arc};
  }

  Eval eval_interp(double t, size_t i, double mu_bar, double mu_diff_half) const {
    const double f = f0[i] + t * (f0[i + 1] - f0[i]) - mu_bar;
    const double g = g0[i] + t * (g0[i + 1] - g0[i]) + mu_diff_half;
    const double w = wexp[i] + t * (wexp[i + 1] - wexp[i]);
    const double arc = std::acos(std::clamp(std::cos(g) * inv_sqrt_one_plus_exp(w), -1.0, 1.0));
    return {f - arc, f + arc};
  }
};

PhaseTable build_phase_table(const PotentialModel& V, const SemiclassicalParams& p, size_t n) {
  SemiclassicalParams p0 = p;
  p0.mu_plus = 0.0;
  p0.mu_minus = 0.0;
  PhaseTable t;
  t.halfwidth = p.window_halfwidth();
  t.lambda.resize(n);
  t.f0.resize(n);
  t.g0.resize(n);
  t.wexp.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const double lam = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    SingularPhaseData d = phase_data(lam * t.halfwidth, V, p0);
    t.lambda[i] = lam;
    t.f0[i] = d.f;
    t.g0[i] = d.g;
    t.wexp[i] = kTwoPi * d.eps / p.h;
  }
  return t;
}

// Root energies of both families from the sampled table for one candidate mu.
std::vector<double> table_roots(const PhaseTable& t, double mu_plus, double mu_minus) {
  const double mu_bar = 0.5 * (mu_plus + mu_minus);
  const double mu_diff_half = 0.5 * (mu_plus - mu_minus);
  const size_t n = t.lambda.size();
  std::vector<double> energies;
  for (int family = 0; family < 2; ++family) {
    auto val = [&](size_t i) {
      auto e = t.eval(i, mu_bar, mu_diff_half);
      return family == 0 ? e.y : e.z;
    };
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i) v[i] = val(i);
    const double vmax = v.front(), vmin = v.back();  // decreasing in lambda
    const long k_lo = static_cast<long>(std::ceil(std::min(vmin, vmax) / kTwoPi));
    const long k_hi = static_cast<long>(std::floor(std::max(vmin, vmax) / kTwoPi));
    for (long k = k_lo; k <= k_hi; ++k) {
      const double target = kTwoPi * static_cast<double>(k);
      size_t lo = 0, hi = n - 1;
      if (!(v[lo] >= target && target >= v[hi])) continue;
      while (hi - lo > 1) {
        size_t mid = (lo + hi) / 2;
        (v[mid] >= target ? lo : hi) = mid;
      }
      double ta = 0.0, tb = 1.0;
      for (int it = 0; it < 40; ++it) {
        double tm = 0.5 * (ta + tb);
        auto e = t.eval_interp(tm, lo, mu_bar, mu_diff_half);
        double fm = (family == 0 ? e.y : e.z) - target;
        (fm >= 0.0 ? ta : tb) = tm;
      }
      const double lam = t.lambda[lo] + 0.5 * (ta + tb) * (t.lambda[lo + 1] - t.lambda[lo]);
      energies.push_back(lam * t.halfwidth);
    }
  }
  std::sort(energies.begin(), energies.end());
  return energies;
}

double matching_rms(const std::vector<double>& a, const std::vector<double>& b) {
  auto pairs = monotone_match(a, b);
  if (pairs.empty()) return std::numeric_limits<double>::infinity();
  double ss = 0.0;
  for (auto [i, j] : pairs) {
    const double d = a[i] - b[j];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(pairs.size()));
}

std::vector<double> merged_energies(const SpectrumWindow& win) {
  std::vector<double> out;
  out.reserve(win.merged.size());
  for (const auto& r : win.merged) out.push_back(r.energy);
  return out;
}

std::vector<double> family_gaps(const std::vector<BranchRoot>& family) {
  // Roots are stored by ascending index, i.e. descending energy.
  std::vector<double> gaps;
  for (size_t i = 0; i + 1 < family.size(); ++i)
    gaps.push_back(std::fabs(family[i].energy - family[i + 1].energy));
  return gaps;
}

}  // namespace

bool is_even_potential(const PotentialModel& V) {
  const auto& c = V.coefficients();
  for (size_t k = 1; k < c.size(); k += 2)
    if (c[k] != 0.0) return false;
  return true;
}

std::vector<std::pair<size_t, size_t>> monotone_match(const std::vector<double>& a,
                                                      const std::vector<double>& b) {
  const bool swapped = a.size() > b.size();
  const std::vector<double>& s = swapped ? b : a;  // shorter, fully matched
  const std::vector<double>& l = swapped ? a : b;
  const size_t n = s.size(), m = l.size();
  if (n == 0) return {};

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> dp(n + 1, std::vector<double>(m + 1, inf));
  std::vector<std::vector<char>> take(n + 1, std::vector<char>(m + 1, 0));
  for (size_t j = 0; j <= m; ++j) dp[0][j] = 0.0;
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = i; j <= m; ++j) {
      const double d = s[i - 1] - l[j - 1];
      const double match = dp[i - 1][j - 1] + d * d;
      const double skip = dp[i][j - 1];
      if (match <= skip) {
        dp[i][j] = match;
        take[i][j] = 1;
      } else {
        dp[i][j] = skip;
      }
    }
  }
  std::vector<std::pair<size_t, size_t>> pairs;
  size_t i = n, j = m;
  while (i > 0) {
    if (take[i][j]) {
      pairs.emplace_back(i - 1, j - 1);
      --i;
      --j;
    } else {
      --j;
    }
  }
  std::reverse(pairs.begin(), pairs.end());
  if (swapped)
    for (auto& pr : pairs) std::swap(pr.first, pr.second);
  return pairs;
}

CalibrationResult calibrate(const PotentialModel& V, double h0, const SemiclassicalParams& base,
                            const std::vector<double>& oracle_eigenvalues) {
  SemiclassicalParams p = base;
  p.h = h0;
  const double w = p.window_halfwidth();
  std::vector<double> oracle;
  for (double e : oracle_eigenvalues)
    if (e >= -w && e <= w) oracle.push_back(e);
  std::sort(oracle.begin(), oracle.end());
  if (oracle.size() < 4) throw std::runtime_error("calibrate: insufficient levels in window");

  const PhaseTable table = build_phase_table(V, p, 2048);
  const bool even = is_even_potential(V);
  auto objective = [&](double mp, double mm) { return matching_rms(table_roots(table, mp, mm), oracle); };

  const double grid_step = kTwoPi / 512.0;
  double best_p = 0.0, best_m = 0.0, best_val = std::numeric_limits<double>::infinity();
  if (even) {
    for (int j = 0; j < 512; ++j) {
      const double mu = grid_step * j;
      const double v = objective(mu, mu);
      if (v < best_val) {
        best_val = v;
        best_p = best_m = mu;
      }
    }
  } else {
    // Hierarchical grid: coarse pass, then local passes down to the target
    // resolution (a full 512x512 sweep buys nothing but time).
    double res = kTwoPi / 64.0;
    for (int jp = 0; jp < 64; ++jp)
      for (int jm = 0; jm < 64; ++jm) {
        const double v = objective(res * jp, res * jm);
        if (v < best_val) {
          best_val = v;
          best_p = res * jp;
          best_m = res * jm;
        }
      }
    while (res > grid_step / 2.0) {
      res /= 2.0;
      double cp = best_p, cm = best_m;
      for (int dp = -2; dp <= 2; ++dp)
        for (int dm = -2; dm <= 2; ++dm) {
          const double v = objective(cp + res * dp, cm + res * dm);
          if (v < best_val) {
            best_val = v;
            best_p = cp + res * dp;
            best_m = cm + res * dm;
          }
        }
    }
  }

  // Golden-section refinement around the best grid point.
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  auto golden = [&](auto f, double lo, double hi) {
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 40; ++it) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = f(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = f(x2);
      }
    }
    return 0.5 * (lo + hi);
  };
  if (even) {
    best_p = best_m =
        golden([&](double mu) { return objective(mu, mu); }, best_p - grid_step, best_p + grid_step);
  } else {
    for (int round = 0; round < 3; ++round) {
      best_p = golden([&](double mu) { return objective(mu, best_m); }, best_p - grid_step,
                      best_p + grid_step);
      best_m = golden([&](double mu) { return objective(best_p, mu); }, best_m - grid_step,
                      best_m + grid_step);
    }
  }

  CalibrationResult result;
  result.mu_plus = wrap_2pi(best_p);
  result.mu_minus = wrap_2pi(best_m);
  result.h_calibration = h0;

  // Exact (full quadrature) residuals at the calibrated offsets.
  SemiclassicalParams pc = p;
  pc.mu_plus = result.mu_plus;
  pc.mu_minus = result.mu_minus;
  std::vector<double> exact = merged_energies(enumerate_window(V, pc));
  auto pairs = monotone_match(exact, oracle);
  double ss = 0.0;
  for (auto [i, j] : pairs) {
    const double d = exact[i] - oracle[j];
    result.per_level_residuals.push_back(d);
    ss += d * d;
  }
  result.matching_rms = pairs.empty() ? std::numeric_limits<double>::infinity()
                                      : std::sqrt(ss / static_cast<double>(pairs.size()));
  return result;
}

ComparisonReport compare(const PotentialModel& V, double h, const SemiclassicalParams& params,
                         double oracle_tol) {
  SemiclassicalParams p = params;
  p.h = h;
  const double w = p.window_halfwidth();
  SpectrumWindow win = enumerate_window(V, p);
  OracleSpectrum os = solve(V, h, -w, w, oracle_tol);

  ComparisonReport rep;
  std::vector<double> engine = merged_energies(win);
  auto pairs = monotone_match(engine, os.eigenvalues);
  double ss = 0.0;
  for (auto [i, j] : pairs) {
    const double d = engine[i] - os.eigenvalues[j];
    rep.pairs.push_back({engine[i], os.eigenvalues[j], d});
    rep.max_abs_diff = std::max(rep.max_abs_diff, std::fabs(d));
    ss += d * d;
  }
  rep.rms_diff = pairs.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(pairs.size()));
  rep.unmatched_semiclassical = static_cast<int>(engine.size() - pairs.size());
  rep.unmatched_oracle = static_cast<int>(os.eigenvalues.size() - pairs.size());
  auto ga = family_gaps(win.family_a), gb = family_gaps(win.family_b);
  if (!ga.empty()) rep.median_gap_a = median(ga);
  if (!gb.empty()) rep.median_gap_b = median(gb);
  rep.structure_failure =
      std::abs(static_cast<long>(engine.size()) - static_cast<long>(os.eigenvalues.size())) > 2;
  return rep;
}

ScalingFit gap_scaling(const PotentialModel& V, const SemiclassicalParams& params,
                       const std::vector<double>& h_list) {
  if (h_list.size() < 4) throw std::invalid_argument("gap_scaling: need >= 4 values of h");
  ScalingFit fit;
  fit.quantity = ScalingFit::Quantity::gap;
  std::vector<double> xs, ys;
  for (double h : h_list) {
    SemiclassicalParams p = params;
    p.h = h;
    SpectrumWindow win = enumerate_window(V, p);
    std::vector<double> gaps = family_gaps(win.family_a);
    auto gb = family_gaps(win.family_b);
    gaps.insert(gaps.end(), gb.begin(), gb.end());
    if (gaps.empty()) throw std::runtime_error("gap_scaling: no gaps at h = " + std::to_string(h));
    const double med = median(gaps);
    fit.h_values.push_back(h);
    fit.data.push_back(med);
    xs.push_back(std::log(h / std::fabs(std::log(h))));
    ys.push_back(std::log(med));
  }
  LinearFit lf = linear_fit(xs, ys);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.r2 = lf.r2;
  return fit;
}

ScalingFit count_scaling(const PotentialModel& V, const SemiclassicalParams& params,
                         const std::vector<double>& h_list) {
  if (params.alpha != 0.5) throw std::invalid_argument("count_scaling requires alpha = 1/2");
  if (h_list.size() < 2) throw std::invalid_argument("count_scaling: need >= 2 values of h");
  ScalingFit fit;
  fit.quantity = ScalingFit::Quantity::count;
  std::vector<double> xs, ys;
  for (double h : h_list) {
    SemiclassicalParams p = params;
    p.h = h;
    SpectrumWindow win = enumerate_window(V, p);
    fit.h_values.push_back(h);
    fit.data.push_back(static_cast<double>(win.merged.size()));
    xs.push_back(std::fabs(std::log(h)) / std::sqrt(h));
    ys.push_back(static_cast<double>(win.merged.size()));
  }
  LinearFit lf = linear_fit(xs, ys);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.r2 = lf.r2;
  return fit;
}

std::pair<long, long> count_bracket(const PotentialModel& V, double h, double alpha, double delta) {
  const double v2 = V.poly.eval(0.0, 2);
  if (v2 >= 0.0) throw std::domain_error("count_bracket: V''(0) must be negative");
  const double x = std::pow(h, alpha - 1.0) * std::fabs(std::log(h)) / (M_PI * std::sqrt(-v2));
  const long lower = static_cast<long>(std::floor(alpha * x * (1.0 - delta)));
  const long upper = static_cast<long>(std::floor(x * (1.0 + delta))) + 1;
  return {lower, upper};
}

double DoubletProfile::alternation_ratio_at(double E) const {
  if (differences.size() < 2) throw std::runtime_error("alternation ratio needs >= 2 differences");
  size_t best = 0;
  for (size_t i = 0; i + 1 < differences.size(); ++i)
    if (std::fabs(midpoint_energy[i] - E) < std::fabs(midpoint_energy[best] - E)) best = i;
  const size_t lo = best >= 2 ? best - 2 : 0;
  const size_t hi = std::min(differences.size() - 2, best + 2);
  std::vector<double> ratios;
  for (size_t i = lo; i <= hi; ++i) {
    const double d0 = differences[i].second, d1 = differences[i + 1].second;
    ratios.push_back(std::min(d0, d1) / std::max(d0, d1));
  }
  return median(ratios);
}

double DoubletProfile::smoothed_minimum_energy(int smooth_width) const {
  const int n = static_cast<int>(differences.size());
  if (n == 0) throw std::runtime_error("empty difference series");
  double best_e = midpoint_energy[0];
  double best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    int cnt = 0;
    for (int j = std::max(0, i - smooth_width / 2); j <= std::min(n - 1, i + smooth_width / 2); ++j) {
      sum += differences[j].second;
      ++cnt;
    }
    const double v = sum / cnt;
    if (v < best_v) {
      best_v = v;
      best_e = midpoint_energy[i];
    }
  }
  return best_e;
}

DoubletProfile doublet_profile(const OracleSpectrum& oracle) {
  DoubletProfile prof;
  const auto& ev = oracle.eigenvalues;
  for (size_t i = 0; i + 1 < ev.size(); ++i) {
    prof.differences.emplace_back(static_cast<int>(i), ev[i + 1] - ev[i]);
    prof.midpoint_energy.push_back(0.5 * (ev[i] + ev[i + 1]));
  }
  return prof;
}

}  // namespace sepspec
