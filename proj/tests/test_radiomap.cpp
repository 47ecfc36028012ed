#include "doctest.h"
#include "locrel/analytic.hpp"
#include "locrel/errors.hpp"
#include "locrel/radiomap.hpp"
#include "test_support.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace locrel;
using locrel::testing::small_cfg;
using locrel::testing::small_map;

namespace fs = std::filesystem;

TEST_SUITE_BEGIN("radiomap");

TEST_CASE("mar sample closed cases") {
  const SystemConfig cfg = [] {
    SystemConfig c;
    c.validate();
    return c;
  }();
  // single path: every subcarrier contributes the same term
  const double snr = cfg.tx_power_w * path_gain(300.0, cfg) / cfg.noise_power_w;
  CHECK(mar_sample(300.0, 0, 0.0, cfg) ==
        doctest::Approx(cfg.n_subcarriers * std::log2(1.0 + snr)).epsilon(1e-12));
  CHECK(mar_sample(300.0, 0, 0.0, cfg) >= 0.0);
  // one subcarrier: plain scalar formula with an explicit coefficient
  SystemConfig one = cfg;
  one.n_subcarriers = 1;
  one.validate();
  const std::complex<double> a2{3e-6, -1e-5};
  const auto h0 = los_coefficient(300.0, 0, one) + a2;
  CHECK(mar_sample(300.0, 0, a2, one) ==
        doctest::Approx(std::log2(1.0 + one.tx_power_w * std::norm(h0) /
                                            one.noise_power_w))
            .epsilon(1e-12));
  // strictly increasing in the transmit power
  SystemConfig hot = cfg;
  hot.tx_power_w *= 2.0;
  CHECK(mar_sample(300.0, 0, a2, hot) > mar_sample(300.0, 0, a2, cfg));
}

TEST_CASE("bulk sampler equals the direct evaluation") {
  const SystemConfig& cfg = small_cfg();
  const MarBulkSampler bulk(cfg);
  RngStream rng(21);
  for (double x : {37.5, 300.0, 888.0, -120.0}) {
    for (int t = 0; t < 3; ++t) {
      const auto a2 =
          scatter_coefficient(bs_distance(x, 0, cfg), cfg, rng);
      const double direct = mar_sample(x, 0, a2, cfg);
      CHECK(bulk.mar(x, 0, a2) == doctest::Approx(direct).epsilon(1e-11));
    }
  }
}

TEST_CASE("sample set order statistics") {
  MarSampleSet set;
  set.rates.resize(100);
  for (int i = 0; i < 100; ++i) set.rates[static_cast<std::size_t>(i)] = i + 1.0;
  CHECK(set.quantile(0.01) == 1.0);    // k = ceil(1) = 1
  CHECK(set.quantile(0.011) == 2.0);   // k = ceil(1.1) = 2
  CHECK(set.quantile(0.5) == 50.0);
  CHECK(set.quantile(0.999) == 100.0);
  CHECK_THROWS_AS(set.quantile(0.0099), QuantileUnresolvable);
  CHECK_THROWS_AS(set.quantile(1.0), InvalidDomain);
}

TEST_CASE("cdf build determinism and guards") {
  const SystemConfig& cfg = small_cfg();
  RngStream r1(5), r2(5);
  const auto a = build_cdf(300.0, 0, 20000, cfg, r1);
  const auto b = build_cdf(300.0, 0, 20000, cfg, r2);
  CHECK(a.rates == b.rates);
  CHECK(std::is_sorted(a.rates.begin(), a.rates.end()));
  RngStream r3(5);
  CHECK_THROWS_AS(build_cdf(300.0, 0, 5000, cfg, r3), InsufficientSamples);
  CHECK_THROWS_AS(build_cdf(0.5, 0, 20000, cfg, r3), DegenerateGeometry);
}

TEST_CASE("single-subcarrier lower tail matches the analytic slope") {
  SystemConfig cfg = small_cfg();
  cfg.n_subcarriers = 1;
  cfg.validate();
  RngStream rng(31);
  const std::int64_t n = 10000000;
  const auto set = build_cdf(300.0, 0, n, cfg, rng);
  // F(R) = (2^R - 1) sigma_n^2/P x^2 psi in the deep tail
  const TailConstants tc = tail_constants(1e-3, cfg);
  for (double p_target : {1e-3, 3e-3, 1e-2}) {
    const double rate = set.quantile(p_target);
    const double predicted = (std::pow(2.0, rate) - 1.0) * cfg.noise_power_w /
                             cfg.tx_power_w * 300.0 * 300.0 * tc.psi;
    CHECK(predicted == doctest::Approx(p_target).epsilon(0.05));
  }
  // and the analytic eps-outage capacity agrees with the MC quantile
  CHECK(analytic_outage_capacity(1e-3, 300.0, cfg) ==
        doctest::Approx(set.quantile(1e-3)).epsilon(0.03));
}

TEST_CASE("map quantile queries") {
  const RadioMap& map = small_map();
  // monotone in eps
  double prev = 0.0;
  for (double eps : {1e-3, 3e-3, 1e-2, 0.1, 0.5}) {
    const double q = map.eps_quantile(eps, 300.0, 0);
    CHECK(q >= prev);
    prev = q;
  }
  // against an independently drawn sample set at the same point
  RngStream rng(77);
  const auto fresh = build_cdf(300.0, 0, 20000, small_cfg(), rng);
  CHECK(map.eps_quantile(1e-3, 300.0, 0) ==
        doctest::Approx(fresh.quantile(1e-3)).epsilon(0.01));
  // interpolation stays between the bracketing grid points
  const double qa = map.eps_quantile(1e-3, 300.0, 0);
  const double qb = map.eps_quantile(1e-3, 325.0, 0);
  const double qm = map.eps_quantile(1e-3, 312.5, 0);
  CHECK(qm <= std::max(qa, qb));
  CHECK(qm >= std::min(qa, qb));
  // guards
  CHECK_THROWS_AS(map.eps_quantile(1e-6, 300.0, 0), QuantileUnresolvable);
  CHECK_THROWS_AS(map.eps_quantile(1e-3, 2000.0, 0), OutOfMapRange);
  CHECK(map.eps_quantile_clamped(1e-3, 2000.0, 0) ==
        map.eps_quantile(1e-3, map.grid_max(), 0));
}

TEST_CASE("map cdf queries") {
  const RadioMap& map = small_map();
  CHECK(map.outage_prob(0.0, 300.0, 0) == 0.0);
  CHECK(map.outage_prob(1e9, 300.0, 0) == 1.0);
  // inverse identity at a grid point, within the empirical granularity
  const double n = static_cast<double>(map.n_samples());
  for (double eps : {1e-3, 1e-2, 0.1}) {
    const double q = map.eps_quantile(eps, 300.0, 0);
    CHECK(std::abs(map.outage_prob(q, 300.0, 0) - eps) <= 2.0 / n);
  }
  // monotone in the rate
  double prev = -1.0;
  for (double r = 0.0; r < 400.0; r += 7.0) {
    const double p = map.outage_prob(r, 300.0, 0);
    CHECK(p >= prev);
    prev = p;
  }
}

TEST_CASE("quantile falls with distance from the serving BS") {
  const RadioMap& map = small_map();
  const auto& grid = map.grid();
  // BS1 at 0: non-increasing toward both sides, small slack for MC noise
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (grid[i] < 0.0 || grid[i + 1] > 1000.0) continue;
    const double din = std::abs(grid[i]);
    const double dout = std::abs(grid[i + 1]);
    if (dout > din)
      CHECK(map.eps_quantile(1e-3, grid[i + 1], 0) <=
            map.eps_quantile(1e-3, grid[i], 0) * (1.0 + 5e-3));
  }
}

TEST_CASE("selection probabilities") {
  const SystemConfig& cfg = small_cfg();
  RngStream rng(88);
  const auto mid = bs_selection_prob(500.0, 10000, cfg, rng);
  CHECK(mid[0] + mid[1] == 1.0);
  CHECK(std::abs(mid[0] - 0.5) < 3.0 / std::sqrt(10000.0));
  const auto near = bs_selection_prob(300.0, 4000, cfg, rng);
  CHECK(near[0] > 0.9);
  CHECK(near[0] < 0.98);  // noise keeps the gap from saturating
  CHECK(near[0] > near[1]);
  // map-level values mirror the direct estimator
  const auto w = small_map().selection_prob(300.0);
  CHECK(w[0] == doctest::Approx(near[0]).epsilon(0.03));
}

TEST_CASE("map rebuild is byte identical and refinement is position stable") {
  SystemConfig cfg = small_cfg();
  cfg.numerics.grid_min_m = 200.0;
  cfg.numerics.grid_max_m = 360.0;
  cfg.numerics.grid_step_m = 8.0;
  cfg.numerics.map_samples = 20000;
  cfg.numerics.select_mc_samples = 200;
  cfg.validate();
  const RadioMap coarse1 = RadioMap::build(cfg, 2);
  const RadioMap coarse2 = RadioMap::build(cfg, 1);
  const auto p1 = fs::temp_directory_path() / "locrel_m1.lrm";
  const auto p2 = fs::temp_directory_path() / "locrel_m2.lrm";
  coarse1.save(p1.string());
  coarse2.save(p2.string());
  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)), {});
  const std::string b2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(b1 == b2);
  fs::remove(p1);
  fs::remove(p2);

  cfg.numerics.grid_step_m = 4.0;  // x2 refinement shares draws at old points
  cfg.validate();
  const RadioMap fine = RadioMap::build(cfg, 2);
  for (double probe : {233.17, 287.9, 341.3}) {
    const double qc = coarse1.eps_quantile(1e-3, probe, 0);
    const double qf = fine.eps_quantile(1e-3, probe, 0);
    CHECK(std::abs(qc - qf) / qf < 0.01);
  }
}

TEST_CASE("map persistence round trip") {
  const RadioMap& map = small_map();
  const auto path = fs::temp_directory_path() / "locrel_roundtrip.lrm";
  map.save(path.string());
  const RadioMap back = RadioMap::load(path.string());
  CHECK(back.grid() == map.grid());
  CHECK(back.n_samples() == map.n_samples());
  CHECK(back.seed() == map.seed());
  CHECK(back.config_hash() == map.config_hash());
  for (double x : {-388.0, 42.0, 500.0, 1234.0})
    for (int bs : {0, 1})
      CHECK(back.eps_quantile(1e-3, x, bs) == map.eps_quantile(1e-3, x, bs));
  CHECK(back.selection_prob(312.0) == map.selection_prob(312.0));
  // corrupting the payload is caught by the checksum
  std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(200);
  f.put('\x7f');
  f.close();
  CHECK_THROWS_AS(RadioMap::load(path.string()), ParseError);
  fs::remove(path);
}

TEST_CASE("default extents cover the estimate tails") {
  SystemConfig cfg;  // default extents, coarse everything else
  cfg.numerics.grid_step_m = 200.0;
  cfg.numerics.map_samples = 10000;
  cfg.numerics.select_mc_samples = 100;
  cfg.validate();
  const RadioMap map = RadioMap::build(cfg, 2);
  CHECK(map.grid_min() <= -400.0);
  CHECK(map.grid_max() >= 1400.0);
  CHECK(map.grid_min() == -400.0);
  CHECK(map.grid_max() == 1400.0);
}

TEST_CASE("map build rejects unresolvable sample counts") {
  SystemConfig cfg = small_cfg();
  cfg.numerics.map_samples = 5000;  // below 10/eps_target
  cfg.validate();
  CHECK_THROWS_AS(RadioMap::build(cfg, 1), InsufficientSamples);
}

TEST_SUITE_END();
