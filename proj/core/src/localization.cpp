#include "locrel/localization.hpp"

#include <cmath>
#include <numbers>

#include "locrel/errors.hpp"
#include "locrel/quadrature.hpp"

namespace locrel {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

PhasePair PhasePair::wrapped(double p1, double p2) {
  auto wrap = [](double p) {
    double w = p - kTwoPi * std::floor(p / kTwoPi);
    if (w >= kTwoPi) w = 0.0;
    return w;
  };
  return PhasePair{wrap(p1), wrap(p2)};
}

CrlbEvaluator::SpectralSums CrlbEvaluator::spectral_sums(double delta_tau,
                                                         const SystemConfig& cfg) {
  SpectralSums s;
  const double df = cfg.subcarrier_spacing();
  for (int j = 0; j < cfg.n_subcarriers; ++j) {
    const double w = kTwoPi * j * df;
    const std::complex<double> e = std::polar(1.0, w * delta_tau);
    s.sw += w;
    s.sw2 += w * w;
    s.s0 += e;
    s.s1 += w * e;
    s.s2 += w * w * e;
  }
  return s;
}

Eigen::Matrix<double, 6, 6> CrlbEvaluator::assemble(const SpectralSums& s,
                                                    std::complex<double> a1,
                                                    std::complex<double> a2,
                                                    double kappa, int n) {
  Eigen::Matrix<double, 6, 6> J;
  const double N = static_cast<double>(n);
  J(0, 0) = std::norm(a1) * s.sw2;
  J(1, 1) = std::norm(a2) * s.sw2;
  J(0, 1) = (a1 * std::conj(a2) * s.s2).real();
  J(0, 2) = a1.imag() * s.sw;
  J(0, 3) = -a1.real() * s.sw;
  J(0, 4) = (a1 * s.s1).imag();
  J(0, 5) = -(a1 * s.s1).real();
  J(1, 2) = (a2 * std::conj(s.s1)).imag();
  J(1, 3) = -(a2 * std::conj(s.s1)).real();
  J(1, 4) = a2.imag() * s.sw;
  J(1, 5) = -a2.real() * s.sw;
  J(2, 2) = N;
  J(2, 3) = 0.0;
  J(2, 4) = s.s0.real();
  J(2, 5) = s.s0.imag();
  J(3, 3) = N;
  J(3, 4) = -s.s0.imag();
  J(3, 5) = s.s0.real();
  J(4, 4) = N;
  J(4, 5) = 0.0;
  J(5, 5) = N;
  for (int r = 1; r < 6; ++r)
    for (int c = 0; c < r; ++c) J(r, c) = J(c, r);
  return kappa * J;
}

ParamFisher fisher_eta(const PathCoefficients& coeffs, const SystemConfig& cfg) {
  const double dt = coeffs.tau_scatter - coeffs.tau_los;
  if (!(dt > 0.0))
    throw SingularModel("fisher_eta: zero excess delay makes the two paths unresolvable");
  const auto sums = CrlbEvaluator::spectral_sums(dt, cfg);
  const double kappa = 2.0 * cfg.tx_power_w / cfg.noise_power_w;
  return ParamFisher{CrlbEvaluator::assemble(sums, coeffs.a_los, coeffs.a_scatter,
                                             kappa, cfg.n_subcarriers)};
}

double equivalent_fisher(const ParamFisher& J) {
  const Eigen::Matrix<double, 5, 5> Jn = J.matrix.block<5, 5>(1, 1);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> es(Jn);
  const double emin = es.eigenvalues().minCoeff();
  const double emax = es.eigenvalues().maxCoeff();
  if (!(emin > 0.0) || emax / emin > 1e12)
    throw IllConditioned("equivalent_fisher: nuisance block numerically singular");
  const Eigen::Matrix<double, 5, 1> b = J.matrix.block<5, 1>(1, 0);
  const double je = J.matrix(0, 0) - b.dot(Jn.ldlt().solve(b));
  return je;
}

CrlbEvaluator::CrlbEvaluator(const SystemConfig& cfg)
    : cfg_(cfg), sums_(spectral_sums(cfg.excess_delay_s, cfg)) {
  if (!(cfg.excess_delay_s > 0.0))
    throw SingularModel("CrlbEvaluator: excess delay must be positive");
}

double CrlbEvaluator::equivalent_info(double x, int bs, double phase) const {
  const double d = bs_distance(x, bs, cfg_);
  const std::complex<double> a1 = los_coefficient(x, bs, cfg_);
  // Magnitude convention: sqrt(scatter_variance); the result is invariant
  // to the choice, which the tests assert.
  const std::complex<double> a2 =
      std::polar(std::sqrt(scatter_variance(d, cfg_)), phase);
  const double kappa = 2.0 * cfg_.tx_power_w / cfg_.noise_power_w;
  const ParamFisher J{assemble(sums_, a1, a2, kappa, cfg_.n_subcarriers)};
  return equivalent_fisher(J);
}

LocUncertainty CrlbEvaluator::full(double x, const PhasePair& phases) const {
  const double j1 = equivalent_info(x, 0, phases.phi1);
  const double j2 = equivalent_info(x, 1, phases.phi2);
  const double s1 = (x >= cfg_.bs_positions[0]) ? 1.0 : -1.0;
  const double s2 = (x >= cfg_.bs_positions[1]) ? 1.0 : -1.0;

  LocUncertainty out;
  Eigen::Matrix2d& Jxb = out.clock_bias_coupled;
  Jxb(0, 0) = (j1 + j2) / (kSpeedOfLight * kSpeedOfLight);
  Jxb(0, 1) = (j1 * s1 + j2 * s2) / kSpeedOfLight;
  Jxb(1, 0) = Jxb(0, 1);
  Jxb(1, 1) = j1 + j2;

  const double det = Jxb(0, 0) * Jxb(1, 1) - Jxb(0, 1) * Jxb(0, 1);
  const double scale = Jxb.norm();
  if (!(std::abs(det) > 1e-30 * scale * scale))
    throw IllConditioned(
        "crlb: J(x,B) singular; the UE must lie strictly between the BS positions");
  out.variance = Jxb(1, 1) / det;
  if (!(out.variance > 0.0))
    throw IllConditioned("crlb: nonpositive variance from near-singular J(x,B)");
  return out;
}

double CrlbEvaluator::variance(double x, const PhasePair& phases) const {
  return full(x, phases).variance;
}

double CrlbEvaluator::average_std(double x, int phase_nodes) const {
  const double mean_var = phase_grid_mean(
      phase_nodes, [&](double p1, double p2) { return variance(x, {p1, p2}); });
  return std::sqrt(mean_var);
}

double CrlbEvaluator::average_std(double x) const {
  return average_std(x, cfg_.numerics.phase_nodes_meta);
}

std::vector<double> CrlbEvaluator::sigma_grid(double x, int phase_nodes) const {
  const auto nodes = periodic_phase_nodes(phase_nodes);
  std::vector<double> sig;
  sig.reserve(nodes.size() * nodes.size());
  for (double p1 : nodes)
    for (double p2 : nodes) sig.push_back(std::sqrt(variance(x, {p1, p2})));
  return sig;
}

LocUncertainty crlb(double x, const PhasePair& phases, const SystemConfig& cfg) {
  return CrlbEvaluator(cfg).full(x, phases);
}

double sample_estimate(double x, const SystemConfig& cfg, RngStream& rng) {
  const CrlbEvaluator ev(cfg);
  const PhasePair phi{rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)};
  return x + std::sqrt(ev.variance(x, phi)) * rng.normal();
}

double average_std(double x, const SystemConfig& cfg) {
  return CrlbEvaluator(cfg).average_std(x);
}

}  // namespace locrel
