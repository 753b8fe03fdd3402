#ifndef SEPSPEC_ANALYSIS_HPP
#define SEPSPEC_ANALYSIS_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "sepspec/oracle.hpp"
#include "sepspec/quantization.hpp"

namespace sepspec {

struct CalibrationResult {
  double mu_plus = 0.0;   // radians in [0, 2 pi)
  double mu_minus = 0.0;
  double matching_rms = 0.0;
  double h_calibration = 0.0;
  std::vector<double> per_level_residuals;
};

struct ComparisonReport {
  struct Pair {
    double semiclassical;
    double oracle;
    double difference;
  };
  std::vector<Pair> pairs;            // monotone (order-preserving) matching
  double max_abs_diff = 0.0;
  double rms_diff = 0.0;
  int unmatched_semiclassical = 0;
  int unmatched_oracle = 0;
  double median_gap_a = 0.0;          // per-family consecutive-gap medians
  double median_gap_b = 0.0;
  bool structure_failure = false;     // count mismatch beyond tolerance
};

struct ScalingFit {
  enum class Quantity { gap, count, period };
  Quantity quantity = Quantity::gap;
  std::vector<double> h_values;
  std::vector<double> data;           // per-h median gap or total count
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Order-preserving matching of the shorter list into the longer one,
/// minimizing the sum of squared differences (unique, deterministic).
std::vector<std::pair<size_t, size_t>> monotone_match(const std::vector<double>& a,
                                                      const std::vector<double>& b);

/// One-time fit of the constant phase offsets mu against oracle eigenvalues
/// at h0: 2 pi / 512 grid search then golden-section refinement, one
/// parameter for even V, two otherwise.
CalibrationResult calibrate(const PotentialModel& V, double h0, const SemiclassicalParams& base,
                            const std::vector<double>& oracle_eigenvalues);

/// Engine vs oracle inside [-h^alpha, h^alpha].
ComparisonReport compare(const PotentialModel& V, double h, const SemiclassicalParams& params,
                         double oracle_tol);

/// Median same-family gap per h, fitted log-log against h / |ln h|.
ScalingFit gap_scaling(const PotentialModel& V, const SemiclassicalParams& params,
                       const std::vector<double>& h_list);

/// Total root count per h, fitted against |ln h| / sqrt(h); alpha must be 1/2.
ScalingFit count_scaling(const PotentialModel& V, const SemiclassicalParams& params,
                         const std::vector<double>& h_list);

/// Counting-function brackets for one family at given h (slack delta),
/// evaluated from the curvature of the barrier.
std::pair<long, long> count_bracket(const PotentialModel& V, double h, double alpha, double delta);

struct DoubletProfile {
  std::vector<std::pair<int, double>> differences;  // (index, lambda_{i+1} - lambda_i)
  std::vector<double> midpoint_energy;              // energy at each difference
  /// small-gap / large-gap alternation ratio near energy E (sliding window)
  double alternation_ratio_at(double E) const;
  /// location of the minimum of the smoothed difference series
  double smoothed_minimum_energy(int smooth_width = 5) const;
};

DoubletProfile doublet_profile(const OracleSpectrum& oracle);

bool is_even_potential(const PotentialModel& V);

}  // namespace sepspec

#endif
