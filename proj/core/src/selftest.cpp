#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <ostream>

#include "locrel/analytic.hpp"
#include "locrel/channel.hpp"
#include "locrel/gaussian.hpp"
#include "locrel/localization.hpp"
#include "locrel/quadrature.hpp"
#include "locrel/radiomap.hpp"
#include "locrel/result_table.hpp"
#include "locrel/runner.hpp"

namespace locrel {

namespace {

bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace

int selftest(std::ostream& out) {
  int failures = 0;
  auto check = [&](const char* name, bool ok) {
    out << (ok ? "[ok]   " : "[FAIL] ") << name << '\n';
    if (!ok) ++failures;
  };

  check("gaussian tail Q(1)", close(q_function(1.0), 0.15865525393145705, 1e-13));
  check("gaussian tail Q(8.5)", close(q_function(8.5), 9.4795348222033184e-18, 1e-9));
  check("gaussian quantile", close(normal_quantile(0.975), 1.9599639845400542, 1e-12));

  const auto gh = GaussHermite::rule(41);
  double w0 = 0, w2 = 0;
  for (std::size_t i = 0; i < gh.nodes().size(); ++i) {
    w0 += gh.weights()[i];
    w2 += gh.weights()[i] * gh.nodes()[i] * gh.nodes()[i];
  }
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  check("hermite rule moments", close(w0, sqrt_pi, 1e-12) && close(w2, sqrt_pi / 2, 1e-12));

  SystemConfig cfg;
  cfg.validate();

  try {
    const auto pc = path_coefficients(300.0, 0, scatter_coefficient(300.0, 1.0, 0.5, cfg), cfg);
    const ParamFisher J = fisher_eta(pc, cfg);
    const bool sym = (J.matrix - J.matrix.transpose()).norm() < 1e-9 * J.matrix.norm();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(J.matrix);
    const bool psd = es.eigenvalues().minCoeff() > -1e-10 * J.matrix.norm();
    check("fisher matrix symmetric PSD", sym && psd);
  } catch (const std::exception&) {
    check("fisher matrix symmetric PSD", false);
  }

  try {
    const CrlbEvaluator ev(cfg);
    const PhasePair phi{1.1, 4.0};
    check("crlb positive", ev.variance(300.0, phi) > 0.0);
  } catch (const std::exception&) {
    check("crlb positive", false);
  }

  try {
    const RicianParams rp = rician_params(300.0, 0, cfg);
    const double y = 1e-16;
    const double via_rician = y / rp.avg_power * (1.0 + rp.k_factor) *
                              std::exp(-rp.k_factor);
    check("tail identity vs rician params",
          close(tail_cdf(y, 300.0, cfg), via_rician, 1e-12));
    check("edge offsets at k=1", std::abs(edge_exact(300.0, 1.0, 1e-3, cfg)) < 1e-9 &&
                                     edge_approx(300.0, 1.0) == 0.0);
  } catch (const std::exception&) {
    check("tail identity vs rician params", false);
  }

  try {
    SystemConfig small = cfg;
    small.numerics.grid_min_m = 290.0;
    small.numerics.grid_max_m = 310.0;
    small.numerics.grid_step_m = 10.0;
    small.numerics.map_samples = 10000;
    small.numerics.select_mc_samples = 200;
    small.validate();
    const RadioMap m1 = RadioMap::build(small, 1);
    const RadioMap m2 = RadioMap::build(small, 2);
    const double q1 = m1.eps_quantile(1e-3, 300.0, 0);
    const double q2 = m2.eps_quantile(1e-3, 300.0, 0);
    check("map build deterministic across thread counts", q1 == q2);
    const auto tmp = std::filesystem::temp_directory_path() / "locrel_selftest.lrm";
    m1.save(tmp.string());
    const RadioMap m3 = RadioMap::load(tmp.string());
    check("map save/load round trip",
          m3.eps_quantile(1e-3, 300.0, 0) == q1 && m3.config_hash() == m1.config_hash());
    std::filesystem::remove(tmp);
  } catch (const std::exception&) {
    check("map build deterministic across thread counts", false);
  }

  return failures;
}

}  // namespace locrel
