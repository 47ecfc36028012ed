#include "locrel/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "locrel/errors.hpp"
#include "locrel/gaussian.hpp"
#include "locrel/parallel.hpp"

namespace locrel {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEdgeTolM = 1e-2;

double interval_mass(double x, double lo, double hi, double sigma) {
  const double zl = (lo - x) / sigma;
  const double zh = (hi - x) / sigma;
  // Mirror when both ends sit left of x, else 1-tiny differences cancel.
  if (zl + zh >= 0.0) return q_function(zl) - q_function(zh);
  return q_function(-zh) - q_function(-zl);
}
}  // namespace

double gaussian_region_mass(double x, const OutageRegion& region,
                            std::span<const double> sigma_grid) {
  if (region.empty() || sigma_grid.empty()) return 0.0;
  double acc = 0.0;
  for (double s : sigma_grid) {
    double m = 0.0;
    for (const auto& iv : region) {
      if (iv.empty) continue;
      if (s == 0.0) {
        m += (x >= iv.lo && x <= iv.hi) ? 1.0 : 0.0;
      } else {
        m += interval_mass(x, iv.lo, iv.hi, s);
      }
    }
    acc += m;
  }
  return acc / static_cast<double>(sigma_grid.size());
}

double outage_prob_given_estimate(double x, double xhat, int bs, const RateSelector& sel,
                                  const SelectorContext& ctx) {
  return ctx.map.outage_prob(ctx.rate(sel, xhat, bs), x, bs);
}

ReliabilityEvaluator::ReliabilityEvaluator(const RadioMap& map, const SystemConfig& cfg,
                                           unsigned n_threads)
    : ctx_(map, cfg, n_threads),
      crlb_(cfg),
      hermite_(GaussHermite::rule(cfg.numerics.hermite_nodes)) {}

std::span<const double> ReliabilityEvaluator::sigma_grid(double x, int n_nodes) const {
  const std::pair<std::int64_t, int> key{std::llround(x * 1e6), n_nodes};
  {
    std::lock_guard lock(cache_mutex_);
    auto it = sigma_cache_.find(key);
    if (it != sigma_cache_.end()) return it->second;
  }
  std::vector<double> grid = crlb_.sigma_grid(x, n_nodes);
  std::lock_guard lock(cache_mutex_);
  auto [it, inserted] = sigma_cache_.emplace(key, std::move(grid));
  return it->second;
}

void ReliabilityEvaluator::precompute_sigma(std::span<const double> xs,
                                            unsigned n_threads) const {
  const int meta_nodes = ctx_.cfg.numerics.phase_nodes_meta;
  const int thr_nodes = ctx_.cfg.numerics.phase_nodes_throughput;
  parallel_for(xs.size(), n_threads, [&](std::size_t i) {
    sigma_grid(xs[i], meta_nodes);
    sigma_grid(xs[i], thr_nodes);
  });
}

OutageRegion ReliabilityEvaluator::scan_region(double x, int bs, const RateSelector& sel,
                                               double eps) const {
  // Sign scan of rate(xhat) - threshold over the map grid, boundaries
  // refined by bisection. Rate lookups clamp beyond the grid, so the
  // outermost runs extend to +-infinity when the edge stays positive.
  const double thr = ctx_.map.eps_quantile(eps, x, bs);
  const auto g = [&](double xh) { return ctx_.rate(sel, xh, bs) - thr; };
  const auto& grid = ctx_.map.grid();
  const std::size_t n = grid.size();

  auto refine = [&](double lo, double hi, bool rising) {
    while (hi - lo > kEdgeTolM) {
      const double mid = 0.5 * (lo + hi);
      if ((g(mid) > 0.0) == rising)
        hi = mid;
      else
        lo = mid;
    }
    return 0.5 * (lo + hi);
  };

  OutageRegion region;
  bool prev = g(grid[0]) > 0.0;
  double open_lo = prev ? -std::numeric_limits<double>::infinity() : 0.0;
  bool open = prev;
  for (std::size_t i = 1; i < n; ++i) {
    const bool cur = g(grid[i]) > 0.0;
    if (cur != prev) {
      const double edge = refine(grid[i - 1], grid[i], cur);
      if (cur) {
        open_lo = edge;
        open = true;
      } else {
        region.push_back(OutageInterval{open_lo, edge, false, false});
        open = false;
      }
      prev = cur;
    }
  }
  if (open)
    region.push_back(OutageInterval{
        open_lo, std::numeric_limits<double>::infinity(), false, false});
  return region;
}

OutageInterval ReliabilityEvaluator::outage_interval(double x, int bs,
                                                     const RateSelector& sel,
                                                     double eps) const {
  if (bs < 0 || bs > 1) throw InvalidDomain("bs index must be 0 or 1");
  const OutageRegion region = scan_region(x, bs, sel, eps);
  if (region.empty()) return OutageInterval{};
  OutageInterval out = region.front();
  if (region.size() > 1) {
    // non-monotone selector: report the hull with a diagnostic
    out.hi = region.back().hi;
    out.multi_crossing = true;
  }
  return out;
}

OutageRegion ReliabilityEvaluator::outage_region(double x, int bs, const RateSelector& sel,
                                                 double eps) const {
  if (sel.kind != RateSelector::Kind::oracle) {
    return scan_region(x, bs, sel, eps);
  }
  // Oracle tables are piecewise constant on cells around the grid points;
  // the region is the union of cells whose rate exceeds the threshold, with
  // the outermost cells extending to +-infinity (lookups clamp).
  const double thr = ctx_.map.eps_quantile(eps, x, bs);
  const auto& tab = sel.table;
  const std::size_t n = tab.rates.size();
  OutageRegion region;
  auto cell_lo = [&](std::size_t i) {
    return i == 0 ? -std::numeric_limits<double>::infinity()
                  : tab.x0 + (static_cast<double>(i) - 0.5) * tab.step;
  };
  auto cell_hi = [&](std::size_t i) {
    return i + 1 == n ? std::numeric_limits<double>::infinity()
                      : tab.x0 + (static_cast<double>(i) + 0.5) * tab.step;
  };
  std::size_t i = 0;
  while (i < n) {
    if (tab.rates[i][static_cast<std::size_t>(bs)] > thr) {
      std::size_t j = i;
      while (j + 1 < n && tab.rates[j + 1][static_cast<std::size_t>(bs)] > thr) ++j;
      region.push_back(OutageInterval{cell_lo(i), cell_hi(j), false, false});
      i = j + 1;
    } else {
      ++i;
    }
  }
  return region;
}

double ReliabilityEvaluator::meta_prob_bs(double x, int bs, const RateSelector& sel,
                                          double eps) const {
  const OutageRegion region = outage_region(x, bs, sel, eps);
  if (region.empty()) return 0.0;
  return gaussian_region_mass(x, region,
                              sigma_grid(x, ctx_.cfg.numerics.phase_nodes_meta));
}

ReliabilityReport ReliabilityEvaluator::meta_prob(double x, const RateSelector& sel,
                                                  double eps) const {
  ReliabilityReport rep;
  rep.x = x;
  const auto w = ctx_.map.selection_prob(x);
  rep.selection_weight = w;
  for (int bs = 0; bs < 2; ++bs) {
    rep.per_bs_meta[static_cast<std::size_t>(bs)] = meta_prob_bs(x, bs, sel, eps);
    rep.meta_prob += w[static_cast<std::size_t>(bs)] *
                     rep.per_bs_meta[static_cast<std::size_t>(bs)];
  }
  return rep;
}

double ReliabilityEvaluator::throughput_with_sigma(double x,
                                                   std::span<const double> sig,
                                                   const RateSelector& sel,
                                                   double eps) const {
  const auto w = ctx_.map.selection_prob(x);
  double num = 0.0;
  double den = 0.0;
  for (int bs = 0; bs < 2; ++bs) {
    const double pw = w[static_cast<std::size_t>(bs)];
    if (pw > 0.0) {
      double acc = 0.0;
      for (double s : sig) {
        acc += hermite_.gaussian_mean(x, s, [&](double xhat) {
          const double r = ctx_.rate(sel, xhat, bs);
          return r * (1.0 - ctx_.map.outage_prob(r, x, bs));
        });
      }
      num += pw * acc / static_cast<double>(sig.size());
    }
    den += pw * ctx_.map.eps_quantile(eps, x, bs);
  }
  return num / (den * (1.0 - eps));
}

double ReliabilityEvaluator::throughput_ratio(double x, const RateSelector& sel,
                                              double eps) const {
  return throughput_with_sigma(
      x, sigma_grid(x, ctx_.cfg.numerics.phase_nodes_throughput), sel, eps);
}

double throughput_ratio_with_sigma(double x, std::span<const double> sigma_grid,
                                   const RateSelector& sel, double eps,
                                   const ReliabilityEvaluator& ev) {
  return ev.throughput_with_sigma(x, sigma_grid, sel, eps);
}

ReliabilityReport ReliabilityEvaluator::report(double x, const RateSelector& sel,
                                               double eps) const {
  ReliabilityReport rep = meta_prob(x, sel, eps);
  rep.throughput_ratio = throughput_ratio(x, sel, eps);
  // quadrature diagnostic: meta on the half-resolution phase grid
  const int half = std::max(1, ctx_.cfg.numerics.phase_nodes_meta / 2);
  double meta_half = 0.0;
  const auto w = rep.selection_weight;
  for (int bs = 0; bs < 2; ++bs) {
    const OutageRegion region = outage_region(x, bs, sel, eps);
    if (!region.empty())
      meta_half += w[static_cast<std::size_t>(bs)] *
                   gaussian_region_mass(x, region, sigma_grid(x, half));
  }
  rep.meta_quadrature_err = std::abs(meta_half - rep.meta_prob);
  return rep;
}

double ReliabilityEvaluator::meta_prob_bs_mc(double x, int bs, const RateSelector& sel,
                                             double eps, std::int64_t n_draws,
                                             RngStream& rng) const {
  const OutageRegion region = outage_region(x, bs, sel, eps);
  if (region.empty()) return 0.0;
  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < n_draws; ++s) {
    const PhasePair phi{rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)};
    const double sigma = std::sqrt(crlb_.variance(x, phi));
    const double xhat = x + sigma * rng.normal();
    for (const auto& iv : region) {
      if (!iv.empty && xhat >= iv.lo && xhat <= iv.hi) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(n_draws);
}

}  // namespace locrel
