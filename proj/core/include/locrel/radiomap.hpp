#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "locrel/channel.hpp"
#include "locrel/config.hpp"
#include "locrel/rng.hpp"

namespace locrel {

/// Sorted MAR draws at one location for one BS.
struct MarSampleSet {
  double location = 0.0;
  int bs = 0;
  std::vector<double> rates;  ///< ascending

  std::int64_t n_samples() const { return static_cast<std::int64_t>(rates.size()); }

  /// Lower order statistic ceil(eps * n). eps below 1/n is unresolvable.
  double quantile(double eps) const;
};

/// Instantaneous maximum achievable rate for an explicit scatter draw:
/// sum_j log2(1 + P_tx |h_j|^2 / sigma_n^2).
double mar_sample(double x, int bs, std::complex<double> a_scatter,
                  const SystemConfig& cfg);

/// Draws n MAR samples (fresh scatter each, no noise term) and sorts them.
MarSampleSet build_cdf(double x, int bs, std::int64_t n, const SystemConfig& cfg,
                       RngStream& rng);

/// Monte-Carlo frequency of each BS winning the received-power comparison
/// over n_mc independent ping pairs. Entries sum to one exactly.
std::array<double, 2> bs_selection_prob(double x, std::int64_t n_mc,
                                        const SystemConfig& cfg, RngStream& rng);

/// Location-indexed rate statistics: per grid point and BS a quantile table
/// over a fixed order-statistic ladder, plus BS-selection probabilities.
/// Low order statistics (k <= 1024) are stored exactly; above that the
/// ladder is geometric with ratio 1.01 and queries interpolate.
class RadioMap {
 public:
  /// Builds the map over numerics.grid_* with numerics.map_samples draws
  /// per point. Per-point streams derive from the seed and the point's
  /// position, so rebuilding with the same seed is byte-identical and grid
  /// refinement reuses draws at coincident points. Distances are clamped to
  /// min_bs_distance so every grid point is populated.
  static RadioMap build(const SystemConfig& cfg, unsigned n_threads = 0);

  /// F^-1(eps; x, bs): order-statistic quantile at grid points, linear
  /// interpolation in x between them.
  double eps_quantile(double eps, double x, int bs) const;

  /// Same, but x outside the grid clamps to the nearest edge.
  double eps_quantile_clamped(double eps, double x, int bs) const;

  /// F(rate; x, bs): interpolated empirical CDF in [0, 1].
  double outage_prob(double rate, double x, int bs) const;

  /// {p1, p2} interpolated in x; sums to one.
  std::array<double, 2> selection_prob(double x) const;

  /// min of eps_quantile over the grid points inside [lo, hi] plus both
  /// interpolated endpoints (the piecewise-linear minimum over the interval).
  double min_quantile_between(double eps, double lo, double hi, int bs) const;

  const std::vector<double>& grid() const { return grid_; }
  double grid_min() const { return grid_.front(); }
  double grid_max() const { return grid_.back(); }
  double grid_step() const { return step_; }
  std::size_t nearest_index(double x) const;

  std::int64_t n_samples() const { return n_samples_; }
  std::int64_t n_select() const { return n_select_; }
  double eps_min() const { return 1.0 / static_cast<double>(n_samples_); }
  std::uint64_t seed() const { return seed_; }
  const std::string& config_hash() const { return hash_; }

  void save(const std::string& path) const;
  static RadioMap load(const std::string& path);

 private:
  double point_quantile(std::size_t idx, int bs, double eps) const;
  double point_cdf(std::size_t idx, int bs, double rate) const;
  const double* ladder_rates(std::size_t idx, int bs) const;

  std::vector<double> grid_;
  double step_ = 0.0;
  std::vector<std::uint32_t> ladder_;  ///< order-statistic ks, ascending
  std::vector<double> rates_;          ///< [point][bs][ladder]
  std::vector<double> psel1_;          ///< per point
  std::int64_t n_samples_ = 0;
  std::int64_t n_select_ = 0;
  std::uint64_t seed_ = 0;
  std::string hash_;
};

/// Spec-level aliases over the map queries.
inline double outage_prob(double rate, double x, int bs, const RadioMap& map) {
  return map.outage_prob(rate, x, bs);
}
inline double eps_quantile(double eps, double x, int bs, const RadioMap& map) {
  return map.eps_quantile(eps, x, bs);
}
RadioMap build_map(const SystemConfig& cfg, unsigned n_threads = 0);

}  // namespace locrel
