#include "doctest.h"
#include "locrel/analytic.hpp"
#include "locrel/errors.hpp"
#include "locrel/gaussian.hpp"
#include "locrel/reliability.hpp"
#include "test_support.hpp"

#include <cmath>
#include <limits>

using namespace locrel;
using locrel::testing::small_cfg;
using locrel::testing::small_map;

namespace {
const ReliabilityEvaluator& evaluator() {
  static const ReliabilityEvaluator ev(small_map(), small_cfg(), 2);
  return ev;
}
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

TEST_SUITE_BEGIN("reliability");

TEST_CASE("region mass closed cases") {
  const std::vector<double> sig(16, 2.0);
  CHECK(gaussian_region_mass(10.0, {OutageInterval{-kInf, kInf, false, false}}, sig) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gaussian_region_mass(10.0, {}, sig) == 0.0);
  // symmetric interval of half width w: 1 - 2 Q(w / sigma)
  const double w = 3.0;
  CHECK(gaussian_region_mass(10.0, {OutageInterval{10.0 - w, 10.0 + w, false, false}},
                             sig) ==
        doctest::Approx(1.0 - 2.0 * q_function(w / 2.0)).epsilon(1e-13));
  // far-right intervals keep their tiny mass (no cancellation)
  const double far = gaussian_region_mass(
      100.0, {OutageInterval{0.0, 20.0, false, false}}, sig);
  CHECK(far == doctest::Approx(q_function(40.0) - q_function(50.0)).epsilon(1e-10));
  CHECK(far > 0.0);
}

TEST_CASE("outage probability given an estimate") {
  const auto& ev = evaluator();
  const double eps = 1e-3;
  const double n = static_cast<double>(small_map().n_samples());
  // perfect estimate at the ideal rate: outage equals eps up to granularity
  const RateSelector ideal = RateSelector::backoff(1.0, eps);
  CHECK(std::abs(outage_prob_given_estimate(300.0, 300.0, 0, ideal, ev.ctx()) - eps) <=
        2.0 / n);
  // conservative rate can only reduce it
  const RateSelector cons = RateSelector::backoff(0.5, eps);
  CHECK(outage_prob_given_estimate(300.0, 300.0, 0, cons, ev.ctx()) <= eps);
  // estimating on top of the BS picks a wildly optimistic rate
  const RateSelector quarter = RateSelector::backoff(0.25, eps);
  CHECK(outage_prob_given_estimate(300.0, 0.0, 0, quarter, ev.ctx()) > eps);
}

TEST_CASE("outage interval structure") {
  const auto& ev = evaluator();
  const double eps = 1e-3;
  const RateSelector sel = RateSelector::backoff(0.25, eps);
  const OutageInterval iv = ev.outage_interval(300.0, 0, sel, eps);
  REQUIRE(!iv.empty);
  CHECK(!iv.multi_crossing);
  // symmetric about the serving BS at the origin
  CHECK(std::abs(iv.lo + iv.hi) < 0.5);
  CHECK(iv.hi > 50.0);
  CHECK(iv.hi < 300.0);
  // the true location stays outside its own outage region for k < 1
  CHECK(300.0 > iv.hi);
  // tiny k: the region collapses entirely
  const RateSelector tiny = RateSelector::backoff(1e-3, eps);
  CHECK(ev.outage_interval(300.0, 0, tiny, eps).empty);
}

TEST_CASE("single-subcarrier interval edge matches the closed form") {
  const SystemConfig& cfg = locrel::testing::single_carrier_cfg();
  const RadioMap& map = locrel::testing::single_carrier_map();
  const ReliabilityEvaluator ev(map, cfg, 2);
  const double eps = 1e-3;
  const double k = 0.25;
  const OutageInterval iv =
      ev.outage_interval(300.0, 0, RateSelector::backoff(k, eps), eps);
  REQUIRE(!iv.empty);
  const double edge_closed = 300.0 - edge_exact(300.0, k, eps, cfg);
  // MC quantile noise at the 1e-3 level moves the edge a few percent
  CHECK(iv.hi == doctest::Approx(edge_closed).epsilon(0.04));
  CHECK(iv.lo == doctest::Approx(-edge_closed).epsilon(0.04));
  // the linearized offset is x(1 - sqrt(k)) and should be close here
  CHECK(300.0 - iv.hi == doctest::Approx(edge_approx(300.0, k)).epsilon(0.05));
}

TEST_CASE("non-monotone tables fall back to the hull with a diagnostic") {
  const auto& ev = evaluator();
  OracleTable tab;
  tab.x0 = small_map().grid_min();
  tab.step = small_map().grid_step();
  tab.rates.assign(small_map().grid().size(), {0.0, 0.0});
  // two separated bumps of absurdly high rate around BS 1
  const std::size_t c0 = small_map().nearest_index(-50.0);
  const std::size_t c1 = small_map().nearest_index(75.0);
  tab.rates[c0][0] = 1e4;
  tab.rates[c1][0] = 1e4;
  const RateSelector sel = RateSelector::oracle(tab, 1e-3);
  const OutageRegion region = ev.outage_region(300.0, 0, sel, 1e-3);
  CHECK(region.size() == 2);
  const OutageInterval hull = ev.outage_interval(300.0, 0, sel, 1e-3);
  CHECK(hull.multi_crossing);
  CHECK(hull.lo < -40.0);
  CHECK(hull.hi > 60.0);
}

TEST_CASE("meta probability mixes the BS terms with the selection weights") {
  const auto& ev = evaluator();
  const double eps = 1e-3;
  const RateSelector sel = RateSelector::backoff(0.25, eps);
  // deep on the BS1 side the selection weight is exactly one
  const ReliabilityReport rep = ev.meta_prob(45.0, sel, eps);
  CHECK(rep.selection_weight[0] == 1.0);
  CHECK(rep.meta_prob == doctest::Approx(rep.per_bs_meta[0]).epsilon(1e-12));
  CHECK(rep.meta_prob >= 0.0);
  CHECK(rep.meta_prob <= 1.0);
  // at the midpoint with the identity selector both regions touch x and the
  // per-BS masses are equal by symmetry up to map noise
  const RateSelector ident = RateSelector::backoff(1.0, eps);
  const ReliabilityReport mid = ev.meta_prob(500.0, ident, eps);
  CHECK(mid.per_bs_meta[0] == doctest::Approx(0.5).epsilon(0.25));
  CHECK(std::abs(mid.per_bs_meta[0] - mid.per_bs_meta[1]) < 0.1);
}

TEST_CASE("larger backoff factors never shrink the meta probability") {
  const auto& ev = evaluator();
  const double eps = 1e-3;
  for (double x : {75.0, 150.0, 420.0}) {
    double prev = -1.0;
    for (double k : {0.2, 0.4, 0.6, 0.8, 1.0}) {
      const double m = ev.meta_prob(x, RateSelector::backoff(k, eps), eps).meta_prob;
      CHECK(m >= prev);
      prev = m;
    }
  }
}

TEST_CASE("quadrature meta agrees with hierarchical Monte-Carlo") {
  const auto& ev = evaluator();
  const double eps = 1e-3;
  const RateSelector sel = RateSelector::backoff(0.3, eps);
  for (double x : {60.0, 100.0}) {
    const double quad = ev.meta_prob_bs(x, 0, sel, eps);
    RngStream rng(4242);
    const std::int64_t n = 200000;
    const double mc = ev.meta_prob_bs_mc(x, 0, sel, eps, n, rng);
    const double se = std::sqrt(std::max(mc * (1.0 - mc), 1e-12) / n);
    CHECK(std::abs(quad - mc) < 3.0 * se + 1e-9);
  }
}

TEST_CASE("throughput ratio reaches one with perfect localization") {
  const auto& ev = evaluator();
  const double eps = 1e-3;
  const std::vector<double> zero_sigma(64, 0.0);
  const double ratio = throughput_ratio_with_sigma(
      300.0, zero_sigma, RateSelector::backoff(1.0, eps), eps, ev);
  CHECK(ratio == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("throughput ratio is bounded and converges in the phase nodes") {
  const auto& ev = evaluator();
  const double eps = 1e-3;
  const RateSelector sel = RateSelector::backoff(0.3, eps);
  for (double x : {150.0, 300.0, 500.0}) {
    const double full = throughput_ratio_with_sigma(
        x, ev.sigma_grid(x, small_cfg().numerics.phase_nodes_throughput), sel, eps, ev);
    CHECK(full >= 0.0);
    CHECK(full <= 1.02);
    const double half = throughput_ratio_with_sigma(
        x, ev.sigma_grid(x, small_cfg().numerics.phase_nodes_throughput / 2), sel, eps,
        ev);
    CHECK(std::abs(full - half) / full < 5e-3);
  }
}

TEST_CASE("report carries diagnostics") {
  const auto& ev = evaluator();
  const ReliabilityReport rep = ev.report(75.0, RateSelector::backoff(0.3, 1e-3), 1e-3);
  CHECK(rep.throughput_ratio > 0.0);
  CHECK(rep.meta_quadrature_err >= 0.0);
  CHECK(rep.meta_quadrature_err < 0.5 * std::max(rep.meta_prob, 1e-12));
}

TEST_SUITE_END();
