#pragma once

#include <array>
#include <string>
#include <vector>

#include "locrel/config.hpp"
#include "locrel/radiomap.hpp"

namespace locrel {

/// Phase-averaged localization std, tabulated on the map grid and queried by
/// linear interpolation. Evaluation points are clamped into the open BS
/// segment where the position CRLB is identifiable.
struct SigmaBarTable {
  double x0 = 0.0;
  double step = 0.0;
  std::vector<double> values;

  static SigmaBarTable build(const RadioMap& map, const SystemConfig& cfg,
                             unsigned n_threads = 0);
  double at(double xhat) const;
};

/// Calibrated oracle rates on the map grid, nearest-point lookup.
struct OracleTable {
  double x0 = 0.0;
  double step = 0.0;
  std::vector<std::array<double, 2>> rates;

  double rate(double xhat, int bs) const;
  bool empty() const { return rates.empty(); }
};

/// A calibrated rate-selection rule.
struct RateSelector {
  enum class Kind { backoff, conf_interval, oracle };
  Kind kind = Kind::backoff;
  double eps = 1e-3;
  double k = 1.0;       ///< backoff factor, (0,1]
  double alpha = 0.5;   ///< CI miss level, (0,1)
  OracleTable table;    ///< oracle only

  static RateSelector backoff(double k, double eps);
  static RateSelector conf_interval(double alpha, double eps);
  static RateSelector oracle(OracleTable table, double eps);
};

/// Calibration domain and target.
struct CalibrationSpec {
  double delta = 1e-3;  ///< meta-probability bound
  double x_min = 45.0;
  double x_max = 955.0;
  double x_step = 5.0;

  std::vector<double> grid() const;
  void validate(const RadioMap& map) const;
};

/// Shared selector-evaluation state: the map plus the sigma-bar table.
struct SelectorContext {
  const RadioMap& map;
  const SystemConfig& cfg;
  SigmaBarTable sigma_bar;

  SelectorContext(const RadioMap& m, const SystemConfig& c, unsigned n_threads = 0);
  double rate(const RateSelector& sel, double xhat, int bs) const;
};

/// k * F^-1(eps; xhat, i), xhat clamped into the map.
double backoff_rate(double xhat, int bs, double k, double eps, const RadioMap& map);

/// Minimum quantile over the confidence interval
/// [xhat - q_{1-a/2} sigma_bar(xhat), xhat + q_{1-a/2} sigma_bar(xhat)].
double ci_rate(double xhat, int bs, double alpha, double eps, const RadioMap& map,
               const SigmaBarTable& sigma_bar);

/// Same with sigma_bar evaluated exactly at xhat (slow; for spot checks).
double ci_rate(double xhat, int bs, double alpha, double eps, const RadioMap& map,
               const SystemConfig& cfg);

double oracle_rate(double xhat, int bs, const OracleTable& table);

class ReliabilityEvaluator;

/// Largest k in (0,1] with max meta-probability over the spec grid <= delta.
/// Bisection to 1e-3 in k.
double calibrate_backoff(const CalibrationSpec& spec, double eps,
                         const ReliabilityEvaluator& ev, unsigned n_threads = 0);

/// Largest feasible alpha, bisection on log alpha to a factor 1.5.
double calibrate_ci(const CalibrationSpec& spec, double eps,
                    const ReliabilityEvaluator& ev, unsigned n_threads = 0);

/// Greedy exhaustive search: per map cell and BS the largest rate from a
/// geometric candidate ladder (ratio 1.01, ceiling F^-1(eps)) that keeps
/// max meta-probability <= delta, with the global constraint re-checked
/// incrementally after every step.
OracleTable calibrate_oracle(const CalibrationSpec& spec, double eps,
                             const ReliabilityEvaluator& ev, unsigned n_threads = 0);

/// Calibration record round-trip (JSON).
void save_selector(const RateSelector& sel, const CalibrationSpec& spec,
                   const std::string& map_hash, const std::string& path);
RateSelector load_selector(const std::string& path);

}  // namespace locrel
