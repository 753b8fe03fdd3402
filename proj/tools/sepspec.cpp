// sepspec: semiclassical spectrum toolkit for 1D double-well Schrodinger
// operators near the barrier top, with a finite-difference eigensolver as
// the ground-truth reference.
//
// Exit codes: 0 success, 1 usage/validation error, 2 computation failure,
// 3 structural-property violation.
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sepspec/analysis.hpp"
#include "sepspec/classical.hpp"
#include "sepspec/csv.hpp"
#include "sepspec/fit.hpp"
#include "sepspec/oracle.hpp"
#include "sepspec/potential.hpp"
#include "sepspec/quantization.hpp"

using nlohmann::json;
using namespace sepspec;

namespace {

struct Config {
  std::string expression;
  std::string out_dir = ".";
  bool do_recenter = false;
  int threads = 0;
  double h = 1e-2;
  double h0 = 1e-2;
  double alpha = 0.5;
  double mu_plus = M_PI;
  double mu_minus = M_PI;
  double quad_tol = 1e-10;
  double root_tol = 1e-11;
  double oracle_tol = 1e-7;
  std::vector<double> window{-0.1, 0.1};
  std::vector<double> h_list;
  std::string what = "both";
  double trace_h = 0.0;
};

void load_json_config(const std::string& path, Config& cfg) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  json j = json::parse(is);
  auto get = [&j](const char* key, auto& slot) {
    if (j.contains(key)) slot = j.at(key).template get<std::decay_t<decltype(slot)>>();
  };
  get("potential", cfg.expression);
  get("out", cfg.out_dir);
  get("recenter", cfg.do_recenter);
  get("threads", cfg.threads);
  get("h", cfg.h);
  get("h0", cfg.h0);
  get("alpha", cfg.alpha);
  get("mu_plus", cfg.mu_plus);
  get("mu_minus", cfg.mu_minus);
  get("quad_tol", cfg.quad_tol);
  get("root_tol", cfg.root_tol);
  get("tol", cfg.oracle_tol);
  get("window", cfg.window);
  get("h_list", cfg.h_list);
  get("what", cfg.what);
}

json config_json(const Config& cfg, const std::string& subcommand) {
  json j;
  j["subcommand"] = subcommand;
  j["potential"] = cfg.expression;
  j["out"] = cfg.out_dir;
  j["recenter"] = cfg.do_recenter;
  j["threads"] = cfg.threads;
  j["h"] = cfg.h;
  j["h0"] = cfg.h0;
  j["alpha"] = cfg.alpha;
  j["mu_plus"] = cfg.mu_plus;
  j["mu_minus"] = cfg.mu_minus;
  j["quad_tol"] = cfg.quad_tol;
  j["root_tol"] = cfg.root_tol;
  j["tol"] = cfg.oracle_tol;
  j["window"] = cfg.window;
  j["h_list"] = cfg.h_list;
  j["what"] = cfg.what;
  return j;
}

void write_config_echo(const Config& cfg, const std::string& subcommand) {
  std::filesystem::create_directories(cfg.out_dir);
  write_text_file(cfg.out_dir + "/config_echo.json", config_json(cfg, subcommand).dump(2) + "\n");
}

PotentialModel load_potential(const Config& cfg) {
  PotentialModel V = parse_potential(cfg.expression);
  if (cfg.do_recenter) V = recenter(V);
  return V;
}

PotentialModel load_validated_potential(const Config& cfg) {
  PotentialModel V = load_potential(cfg);
  auto rep = validate_double_well(V);
  if (!rep.passed) {
    std::cerr << "potential fails the double-well hypotheses:\n";
    for (const auto& v : rep.violations) std::cerr << "  [" << v.name << "] " << v.detail << "\n";
    throw CLI::RuntimeError(1);
  }
  return V;
}

SemiclassicalParams params_from(const Config& cfg) {
  SemiclassicalParams p;
  p.h = cfg.h;
  p.alpha = cfg.alpha;
  p.mu_plus = cfg.mu_plus;
  p.mu_minus = cfg.mu_minus;
  p.quad_tol = cfg.quad_tol;
  p.root_tol = cfg.root_tol;
  for (const auto& w : p.check()) std::cerr << "warning: " << w << "\n";
  return p;
}

std::vector<std::vector<std::string>> spectrum_rows(const SpectrumWindow& win) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : win.merged)
    rows.push_back({r.branch == Branch::A ? "A" : "B", std::to_string(r.index), format_g17(r.lambda),
                    format_g17(r.energy), format_g17(r.residual)});
  return rows;
}

int run_validate(const Config& cfg) {
  PotentialModel V = load_potential(cfg);
  auto rep = validate_double_well(V);
  std::cout << "potential: " << V.to_string() << "\n";
  std::cout << "passed: " << (rep.passed ? "yes" : "no") << "\n";
  if (rep.passed) {
    std::cout << "barrier_curvature: " << format_g17(rep.barrier_curvature) << "\n";
    for (const auto& [x, vx] : rep.well_minima)
      std::cout << "well_minimum: x = " << format_g17(x) << ", V = " << format_g17(vx) << "\n";
    std::cout << "v_min: " << format_g17(rep.v_min) << "\n";
  }
  for (const auto& v : rep.violations) std::cerr << "violation [" << v.name << "] " << v.detail << "\n";
  write_config_echo(cfg, "validate");
  return rep.passed ? 0 : 1;
}

int run_spectrum(const Config& cfg) {
  PotentialModel V = load_validated_potential(cfg);
  SemiclassicalParams p = params_from(cfg);
  auto win = enumerate_window(V, p);
  write_config_echo(cfg, "spectrum");
  write_text_file(cfg.out_dir + "/spectrum.csv",
                  csv_table({"branch", "index", "lambda", "energy", "residual"}, spectrum_rows(win)));
  std::cout << "roots: " << win.merged.size() << " (A " << win.family_a.size() << ", B "
            << win.family_b.size() << ") in [" << format_g17(-p.window_halfwidth()) << ", "
            << format_g17(p.window_halfwidth()) << "]\n";
  if (win.max_clamp > 1e-12)
    std::cerr << "warning: arccos argument clamped by " << format_g17(win.max_clamp) << "\n";
  for (const auto& a : win.anomalies)
    std::cerr << "anomaly: branch " << (a.branch == Branch::A ? "A" : "B") << " index " << a.index
              << ": " << a.message << "\n";
  return win.anomalies.empty() ? 0 : 3;
}

int run_oracle(const Config& cfg) {
  PotentialModel V = load_validated_potential(cfg);
  write_config_echo(cfg, "oracle");
  auto os = solve(V, cfg.h, cfg.window.at(0), cfg.window.at(1), cfg.oracle_tol);
  std::vector<std::vector<std::string>> rows;
  for (size_t i = 0; i < os.eigenvalues.size(); ++i)
    rows.push_back({std::to_string(i), format_g17(os.eigenvalues[i]),
                    format_g17(os.richardson_error[i])});
  write_text_file(cfg.out_dir + "/oracle.csv",
                  csv_table({"n", "eigenvalue", "richardson_error"}, rows));
  std::cout << "eigenvalues: " << os.eigenvalues.size() << " (grid N = " << os.grid.points
            << ", L = " << format_g17(os.grid.half_width) << ")\n";
  if (!os.converged) {
    std::cerr << "oracle did not converge to the requested tolerance; best estimates written\n";
    return 2;
  }
  return 0;
}

int run_compare(const Config& cfg) {
  PotentialModel V = load_validated_potential(cfg);
  SemiclassicalParams p = params_from(cfg);
  write_config_echo(cfg, "compare");

  const double w0 = std::pow(cfg.h0, cfg.alpha);
  auto os0 = solve(V, cfg.h0, -w0, w0, cfg.oracle_tol);
  if (!os0.converged) {
    std::cerr << "calibration oracle did not converge\n";
    return 2;
  }
  auto cal = calibrate(V, cfg.h0, p, os0.eigenvalues);
  std::cout << "calibrated mu_plus = " << format_g17(cal.mu_plus)
            << ", mu_minus = " << format_g17(cal.mu_minus)
            << ", rms at h0 = " << format_g17(cal.matching_rms) << "\n";
  p.mu_plus = cal.mu_plus;
  p.mu_minus = cal.mu_minus;

  auto rep = compare(V, cfg.h, p, cfg.oracle_tol);
  std::vector<std::vector<std::string>> rows;
  for (const auto& pr : rep.pairs)
    rows.push_back({format_g17(pr.semiclassical), format_g17(pr.oracle), format_g17(pr.difference)});
  write_text_file(cfg.out_dir + "/compare.csv",
                  csv_table({"semiclassical", "oracle", "difference"}, rows));
  std::cout << "pairs: " << rep.pairs.size() << ", rms = " << format_g17(rep.rms_diff)
            << ", max = " << format_g17(rep.max_abs_diff) << ", unmatched = ("
            << rep.unmatched_semiclassical << ", " << rep.unmatched_oracle << ")\n";
  std::cout << "median same-family gaps: A " << format_g17(rep.median_gap_a) << ", B "
            << format_g17(rep.median_gap_b) << "\n";
  if (rep.structure_failure) {
    std::cerr << "structure failure: semiclassical and oracle counts differ by more than 2\n";
    return 3;
  }
  return 0;
}

int run_period(const Config& cfg) {
  PotentialModel V = load_validated_potential(cfg);
  if (cfg.h_list.size() < 4) {
    std::cerr << "period study needs --h-list with at least 4 values\n";
    return 1;
  }
  write_config_echo(cfg, "period");
  std::vector<std::vector<std::string>> rows;
  for (double h : cfg.h_list)
    rows.push_back({format_g17(h), format_g17(return_period(V, h))});
  write_text_file(cfg.out_dir + "/period.csv", csv_table({"h", "tau"}, rows));
  auto fit = period_slope_fit(V, cfg.h_list);
  std::cout << "tau(h) ~ a |ln h| + b: a = " << format_g17(fit.slope)
            << ", b = " << format_g17(fit.intercept) << ", r2 = " << format_g17(fit.r2) << "\n";
  if (cfg.trace_h > 0.0) {
    auto trace = flow_integrate(V, {std::sqrt(cfg.trace_h), 0.0},
                                2.0 * return_period(V, cfg.trace_h), 1e-12);
    std::vector<std::vector<std::string>> trows;
    for (const auto& [t, pt] : trace.samples)
      trows.push_back({format_g17(t), format_g17(pt.x), format_g17(pt.xi)});
    write_text_file(cfg.out_dir + "/trace.csv", csv_table({"t", "x", "xi"}, trows));
  }
  return 0;
}

int run_scaling(const Config& cfg) {
  PotentialModel V = load_validated_potential(cfg);
  SemiclassicalParams p = params_from(cfg);
  if (cfg.h_list.size() < 4) {
    std::cerr << "scaling study needs --h-list with at least 4 values\n";
    return 1;
  }
  write_config_echo(cfg, "scaling");
  std::vector<std::vector<std::string>> fit_rows;
  if (cfg.what == "gap" || cfg.what == "both") {
    auto fit = gap_scaling(V, p, cfg.h_list);
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < fit.h_values.size(); ++i) {
      const double h = fit.h_values[i];
      rows.push_back({format_g17(h), format_g17(fit.data[i]),
                      format_g17(fit.data[i] * std::fabs(std::log(h)) / h)});
    }
    write_text_file(cfg.out_dir + "/gap_scaling.csv",
                    csv_table({"h", "median_gap", "gap_lnh_over_h"}, rows));
    fit_rows.push_back({"gap", format_g17(fit.slope), format_g17(fit.intercept), format_g17(fit.r2)});
    std::cout << "gap law: slope = " << format_g17(fit.slope) << ", r2 = " << format_g17(fit.r2)
              << "\n";
  }
  if (cfg.what == "count" || cfg.what == "both") {
    auto fit = count_scaling(V, p, cfg.h_list);
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < fit.h_values.size(); ++i) {
      SemiclassicalParams ph = p;
      ph.h = fit.h_values[i];
      auto win = enumerate_window(V, ph);
      rows.push_back({format_g17(fit.h_values[i]), format_g17(fit.data[i]),
                      std::to_string(win.family_a.size()), std::to_string(win.family_b.size())});
    }
    write_text_file(cfg.out_dir + "/count_scaling.csv",
                    csv_table({"h", "count_total", "count_a", "count_b"}, rows));
    fit_rows.push_back(
        {"count", format_g17(fit.slope), format_g17(fit.intercept), format_g17(fit.r2)});
    std::cout << "counting law: slope = " << format_g17(fit.slope) << ", r2 = " << format_g17(fit.r2)
              << "\n";
  }
  write_text_file(cfg.out_dir + "/fits.csv",
                  csv_table({"quantity", "slope", "intercept", "r2"}, fit_rows));
  return 0;
}

int run_figures(const Config& cfg) {
  PotentialModel V = load_validated_potential(cfg);
  write_config_echo(cfg, "figures");
  auto os = solve(V, cfg.h, cfg.window.at(0), cfg.window.at(1), cfg.oracle_tol);
  if (!os.converged) {
    std::cerr << "oracle did not converge; figure data written from best estimates\n";
  }
  std::vector<std::vector<std::string>> f7;
  SvgSeries s7{"eigenvalue", {}};
  for (size_t i = 0; i < os.eigenvalues.size(); ++i) {
    f7.push_back({std::to_string(i), format_g17(os.eigenvalues[i])});
    s7.points.emplace_back(static_cast<double>(i), os.eigenvalues[i]);
  }
  write_text_file(cfg.out_dir + "/fig7.csv", csv_table({"index", "eigenvalue"}, f7));
  write_text_file(cfg.out_dir + "/fig7.svg",
                  svg_line_plot({s7}, "eigenvalues by index", "index", "energy"));

  auto prof = doublet_profile(os);
  std::vector<std::vector<std::string>> f8;
  SvgSeries s8{"consecutive difference", {}};
  for (const auto& [idx, diff] : prof.differences) {
    f8.push_back({std::to_string(idx), format_g17(diff)});
    s8.points.emplace_back(static_cast<double>(idx), diff);
  }
  write_text_file(cfg.out_dir + "/fig8.csv", csv_table({"index", "difference"}, f8));
  write_text_file(cfg.out_dir + "/fig8.svg",
                  svg_line_plot({s8}, "consecutive eigenvalue differences", "index", "difference"));
  std::cout << "figure data for " << os.eigenvalues.size() << " eigenvalues written to "
            << cfg.out_dir << "\n";
  return os.converged ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  // The config file provides defaults; explicit flags win on conflict.
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") {
      try {
        load_json_config(argv[i + 1], cfg);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
      }
    }

  CLI::App app{"semiclassical double-well spectrum toolkit"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print usage");  // frees -h / --h for the parameter
  std::string config_path;  // consumed above; registered so CLI11 accepts it

  auto add_common = [&](CLI::App* sub, bool needs_expr = true) {
    sub->set_help_flag("--help", "print usage");
    if (needs_expr) sub->add_option("expression", cfg.expression, "potential polynomial in x")->required(cfg.expression.empty());
    sub->add_option("--config", config_path, "JSON config file with defaults");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_flag("--recenter", cfg.do_recenter, "shift the unique maximum to the origin first");
    sub->add_option("--threads", cfg.threads, "worker cap (also SEPSPEC_THREADS)");
    sub->add_option("--alpha", cfg.alpha, "window exponent in [1/2, 1)");
    sub->add_option("--mu-plus", cfg.mu_plus, "constant phase offset, + branch");
    sub->add_option("--mu-minus", cfg.mu_minus, "constant phase offset, - branch");
    sub->add_option("--quad-tol", cfg.quad_tol, "action quadrature relative tolerance");
    sub->add_option("--root-tol", cfg.root_tol, "root phase residual tolerance");
  };

  auto* validate = app.add_subcommand("validate", "check the double-well hypotheses");
  add_common(validate);

  auto* spectrum = app.add_subcommand("spectrum", "semiclassical window spectrum to CSV");
  add_common(spectrum);
  spectrum->add_option("--h", cfg.h, "semiclassical parameter");

  auto* oracle = app.add_subcommand("oracle", "finite-difference eigenvalues to CSV");
  add_common(oracle);
  oracle->add_option("--h", cfg.h, "semiclassical parameter");
  oracle->add_option("--window", cfg.window, "energy window lo hi")->expected(2);
  oracle->add_option("--tol", cfg.oracle_tol, "per-eigenvalue tolerance");

  auto* compare_cmd = app.add_subcommand("compare", "calibrate then match engine vs oracle");
  add_common(compare_cmd);
  compare_cmd->add_option("--h", cfg.h, "comparison h");
  compare_cmd->add_option("--h0", cfg.h0, "calibration h");
  compare_cmd->add_option("--tol", cfg.oracle_tol, "oracle tolerance");

  auto* period = app.add_subcommand("period", "hyperbolic return-period study");
  add_common(period);
  period->add_option("--h-list", cfg.h_list, "h values")->delimiter(',');
  period->add_option("--dump-trace", cfg.trace_h, "also write one flow trace at this h");

  auto* scaling = app.add_subcommand("scaling", "gap/count scaling fits");
  add_common(scaling);
  scaling->add_option("--h-list", cfg.h_list, "h values")->delimiter(',');
  scaling->add_option("--what", cfg.what, "gap, count, or both")
      ->check(CLI::IsMember({"gap", "count", "both"}));

  auto* figures = app.add_subcommand("figures", "oracle spectrum figure data and SVG plots");
  add_common(figures);
  figures->add_option("--h", cfg.h, "semiclassical parameter");
  figures->add_option("--window", cfg.window, "energy window lo hi")->expected(2);
  figures->add_option("--tol", cfg.oracle_tol, "per-eigenvalue tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 1 : 0;
  }

  if (cfg.threads > 0) setenv("SEPSPEC_THREADS", std::to_string(cfg.threads).c_str(), 1);

  try {
    if (*validate) return run_validate(cfg);
    if (*spectrum) return run_spectrum(cfg);
    if (*oracle) return run_oracle(cfg);
    if (*compare_cmd) return run_compare(cfg);
    if (*period) return run_period(cfg);
    if (*scaling) return run_scaling(cfg);
    if (*figures) return run_figures(cfg);
  } catch (const CLI::RuntimeError& e) {
    return e.get_exit_code();
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "computation failed: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
