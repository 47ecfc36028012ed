#pragma once

#include <array>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "locrel/localization.hpp"
#include "locrel/quadrature.hpp"
#include "locrel/radiomap.hpp"
#include "locrel/rateselect.hpp"
#include "locrel/rng.hpp"

namespace locrel {

/// Estimated-location interval where the selector over-shoots the true
/// location's rate. `multi_crossing` flags a non-monotone selector whose
/// region collapsed to its hull via a dense scan.
struct OutageInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty = true;
  bool multi_crossing = false;
};

/// Disjoint intervals, ascending; general regions arise from oracle tables.
using OutageRegion = std::vector<OutageInterval>;

/// Per-location reliability summary.
struct ReliabilityReport {
  double x = 0.0;
  double meta_prob = 0.0;
  std::array<double, 2> per_bs_meta{0.0, 0.0};
  std::array<double, 2> selection_weight{0.0, 0.0};
  double throughput_ratio = 0.0;
  double meta_quadrature_err = 0.0;  ///< |64^2 vs 32^2| phase-grid difference
};

/// Gaussian mass of a region under the phase-mixed estimate model:
/// mean over the sigma grid of sum_intervals Q((lo-x)/s) - Q((hi-x)/s).
double gaussian_region_mass(double x, const OutageRegion& region,
                            std::span<const double> sigma_grid);

/// F(R_sel(xhat); x, i): outage probability at the true location for the
/// rate chosen at the estimated one.
double outage_prob_given_estimate(double x, double xhat, int bs,
                                  const RateSelector& sel, const SelectorContext& ctx);

/// Evaluates outage regions, meta-probabilities and throughput ratios for a
/// fixed map and config. Phase-conditioned CRLB grids are cached per
/// location, so sweeps over many selectors or calibration iterations reuse
/// them.
class ReliabilityEvaluator {
 public:
  ReliabilityEvaluator(const RadioMap& map, const SystemConfig& cfg,
                       unsigned n_threads = 0);

  /// Threshold-distance interval around the BS (selectors monotone in the
  /// distance to the serving BS); bisection to 1e-2 m.
  OutageInterval outage_interval(double x, int bs, const RateSelector& sel,
                                 double eps) const;

  /// Region for any selector; oracle tables give a union of grid cells.
  OutageRegion outage_region(double x, int bs, const RateSelector& sel,
                             double eps) const;

  double meta_prob_bs(double x, int bs, const RateSelector& sel, double eps) const;

  /// BS-averaged meta-probability with MC selection weights from the map.
  ReliabilityReport meta_prob(double x, const RateSelector& sel, double eps) const;

  double throughput_ratio(double x, const RateSelector& sel, double eps) const;

  /// Full report (meta + throughput + diagnostics).
  ReliabilityReport report(double x, const RateSelector& sel, double eps) const;

  /// Direct hierarchical Monte-Carlo for meta_prob_bs: draws phases, then an
  /// estimate, and counts region hits. Oracle for the quadrature path.
  double meta_prob_bs_mc(double x, int bs, const RateSelector& sel, double eps,
                         std::int64_t n_draws, RngStream& rng) const;

  /// Precomputes (in parallel) the sigma grids for a sweep.
  void precompute_sigma(std::span<const double> xs, unsigned n_threads = 0) const;

  const SelectorContext& ctx() const { return ctx_; }
  const CrlbEvaluator& crlb() const { return crlb_; }

  /// Cached sigma(x; phi) on the n x n phase grid, row-major.
  std::span<const double> sigma_grid(double x, int n_nodes) const;

 private:
  OutageRegion scan_region(double x, int bs, const RateSelector& sel, double eps) const;
  double throughput_with_sigma(double x, std::span<const double> sigma_grid,
                               const RateSelector& sel, double eps) const;
  friend double throughput_ratio_with_sigma(double, std::span<const double>,
                                            const RateSelector&, double,
                                            const ReliabilityEvaluator&);

  SelectorContext ctx_;
  CrlbEvaluator crlb_;
  GaussHermite hermite_;
  mutable std::map<std::pair<std::int64_t, int>, std::vector<double>> sigma_cache_;
  mutable std::mutex cache_mutex_;
};

/// Throughput with an explicit sigma grid (e.g. all zeros for the
/// perfect-localization limit).
double throughput_ratio_with_sigma(double x, std::span<const double> sigma_grid,
                                   const RateSelector& sel, double eps,
                                   const ReliabilityEvaluator& ev);

}  // namespace locrel
