#include "doctest.h"
#include "locrel/analytic.hpp"
#include "locrel/channel.hpp"
#include "locrel/errors.hpp"
#include "locrel/rng.hpp"

#include <cmath>

using namespace locrel;

namespace {
SystemConfig table_cfg() {
  SystemConfig cfg;
  cfg.validate();
  return cfg;
}
}  // namespace

TEST_SUITE_BEGIN("analytic");

TEST_CASE("tail constants against high-precision references") {
  const SystemConfig cfg = table_cfg();
  const TailConstants tc = tail_constants(1e-3, cfg);
  CHECK(tc.psi == doctest::Approx(2097.2873272577056).epsilon(1e-12));
  CHECK(tc.psi_prime == doctest::Approx(47.680639033257474).epsilon(1e-12));
  CHECK(tc.psi > 0.0);
  CHECK(tc.psi_prime > 0.0);
}

TEST_CASE("tail cdf is the rician small-power limit") {
  const SystemConfig cfg = table_cfg();
  // identity with the envelope parameters: (y/A)(1+K)exp(-K)
  for (double x : {100.0, 300.0, 770.0}) {
    const RicianParams rp = rician_params(x, 0, cfg);
    const double y = 1e-16;
    const double via_params = y / rp.avg_power * (1.0 + rp.k_factor) *
                              std::exp(-rp.k_factor);
    CHECK(tail_cdf(y, x, cfg) == doctest::Approx(via_params).epsilon(1e-12));
  }
  CHECK(tail_cdf(0.0, 300.0, cfg) == 0.0);
  CHECK(tail_cdf(1e-15, 600.0, cfg) ==
        doctest::Approx(4.0 * tail_cdf(1e-15, 300.0, cfg)).epsilon(1e-13));
  CHECK_THROWS_AS(tail_cdf(1e-15, -5.0, cfg), InvalidDomain);
  CHECK_THROWS_AS(tail_cdf(-1e-15, 5.0, cfg), InvalidDomain);
}

TEST_CASE("tail cdf against brute-force fading draws") {
  const SystemConfig cfg = table_cfg();
  const RicianParams rp = rician_params(300.0, 0, cfg);
  const double inv_sqrt_k = 1.0 / std::sqrt(rp.k_factor);
  const double pl = path_gain(300.0, cfg);
  RngStream rng(20240);
  // normalized gain G = |1 + u/sqrt(K)|^2 with u standard complex normal;
  // |h|^2 = P_L * G, so P(|h|^2 <= y) = P(G <= y / P_L)
  const std::int64_t n = 100000000;
  const double y_spec = 1e-15;   // ~19 expected hits: Poisson-limited check
  const double y_wide = 1e-13;   // ~1.9e3 expected hits: 5% check
  const double g_spec = y_spec / pl;
  const double g_wide = y_wide / pl;
  std::int64_t hits_spec = 0, hits_wide = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double ur = rng.normal() * 0.70710678118654752440;
    const double ui = rng.normal() * 0.70710678118654752440;
    const double re = 1.0 + ur * inv_sqrt_k;
    const double im = ui * inv_sqrt_k;
    const double g = re * re + im * im;
    if (g <= g_wide) {
      ++hits_wide;
      if (g <= g_spec) ++hits_spec;
    }
  }
  const double p_spec = tail_cdf(y_spec, 300.0, cfg);
  const double p_wide = tail_cdf(y_wide, 300.0, cfg);
  // the spec-level point is Poisson-limited: ~19 events in 1e8 draws
  const double se_spec = std::sqrt(p_spec / static_cast<double>(n));
  CHECK(std::abs(static_cast<double>(hits_spec) / n - p_spec) < 3.0 * se_spec);
  // two decades up there is enough mass for a 5% comparison
  CHECK(static_cast<double>(hits_wide) / n == doctest::Approx(p_wide).epsilon(0.05));
}

TEST_CASE("analytic outage capacity") {
  const SystemConfig cfg = table_cfg();
  CHECK(analytic_outage_capacity(1e-3, 100.0, cfg) ==
        doctest::Approx(6.8625146641213955e-3).epsilon(1e-12));
  CHECK(analytic_outage_capacity(1e-3, 300.0, cfg) ==
        doctest::Approx(7.6411562585663717e-4).epsilon(1e-12));
  CHECK(analytic_outage_capacity(1e-3, 600.0, cfg) ==
        doctest::Approx(1.9106685134848972e-4).epsilon(1e-12));
  // vanishes at long range, grows with eps
  CHECK(analytic_outage_capacity(1e-3, 1e6, cfg) < 1e-10);
  CHECK(analytic_outage_capacity(1e-3, 1e6, cfg) > 0.0);
  CHECK(analytic_outage_capacity(2e-3, 300.0, cfg) >
        analytic_outage_capacity(1e-3, 300.0, cfg));
  CHECK_THROWS_AS(analytic_outage_capacity(0.05, 300.0, cfg), InvalidDomain);
  CHECK_THROWS_AS(analytic_outage_capacity(1e-3, 0.0, cfg), InvalidDomain);
}

TEST_CASE("outage-region edge offsets") {
  const SystemConfig cfg = table_cfg();
  // no backoff, no offset
  CHECK(std::abs(edge_exact(300.0, 1.0, 1e-3, cfg)) < 1e-9 * 300.0);
  CHECK(edge_approx(300.0, 1.0) == 0.0);
  CHECK(edge_approx(300.0, 0.25) == doctest::Approx(150.0).epsilon(1e-15));
  // substitute the exact edge back into the outage condition
  for (double k : {0.1, 0.25, 0.6, 0.9}) {
    const double dx = edge_exact(300.0, k, 1e-3, cfg);
    const double lhs = k * analytic_outage_capacity(1e-3, 300.0 - dx, cfg);
    const double rhs = analytic_outage_capacity(1e-3, 300.0, cfg);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
  }
  // linearized form differs negligibly under the reference settings
  CHECK(std::abs(edge_exact(300.0, 0.25, 1e-3, cfg) - edge_approx(300.0, 0.25)) /
            300.0 <
        1e-3);
  // the linear offset never references the configuration at all
  for (double k : {0.25, 0.5, 0.81}) {
    CHECK(edge_approx(123.0, k) / 123.0 ==
          doctest::Approx(1.0 - std::sqrt(k)).epsilon(1e-15));
  }
  // domain guard: the tail model breaks when psi'/x^2 reaches one
  CHECK_THROWS_AS(edge_exact(5.0, 0.25, 1e-3, cfg), InvalidDomain);
  CHECK_THROWS_AS(edge_exact(300.0, 0.0, 1e-3, cfg), InvalidDomain);
}

TEST_CASE("exact edge converges to the linear edge as the tail weakens") {
  SystemConfig cfg = table_cfg();
  double prev_gap = 1e300;
  for (double dbm : {10.0, 0.0, -10.0, -20.0, -30.0}) {
    cfg.tx_power_dbm = dbm;
    cfg.validate();
    const double gap =
        std::abs(edge_exact(300.0, 0.25, 1e-3, cfg) - edge_approx(300.0, 0.25));
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_SUITE_END();
