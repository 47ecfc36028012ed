#include "locrel/analytic.hpp"

#include <cmath>
#include <numbers>

#include "locrel/errors.hpp"

namespace locrel {

TailConstants tail_constants(double eps, const SystemConfig& cfg) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidDomain("eps must be in (0,1)");
  const double lam = cfg.wavelength();
  const double r = cfg.excess_delay_s / cfg.pdp_rho;
  // (1+K)e^{-K}/A with A, K from the Rician parameters reduces to
  // (16 pi^2 / lambda^2) rho e^{dt/rho - rho e^{dt/rho}} times x^2.
  const double psi = 16.0 * std::numbers::pi * std::numbers::pi / (lam * lam) *
                     cfg.pdp_rho * std::exp(r - cfg.pdp_rho * std::exp(r));
  TailConstants tc;
  tc.psi = psi;
  tc.psi_prime = cfg.tx_power_w * eps / (cfg.noise_power_w * psi);
  return tc;
}

double tail_cdf(double y, double x, const SystemConfig& cfg) {
  if (!(x > 0.0)) throw InvalidDomain("tail_cdf: x must be positive (BS 1 at the origin)");
  if (y < 0.0) throw InvalidDomain("tail_cdf: power must be nonnegative");
  const double lam = cfg.wavelength();
  const double r = cfg.excess_delay_s / cfg.pdp_rho;
  const double psi = 16.0 * std::numbers::pi * std::numbers::pi / (lam * lam) *
                     cfg.pdp_rho * std::exp(r - cfg.pdp_rho * std::exp(r));
  return y * x * x * psi;
}

double analytic_outage_capacity(double eps, double x, const SystemConfig& cfg) {
  if (!(x > 0.0)) throw InvalidDomain("analytic_outage_capacity: x must be positive");
  if (!(eps <= 1e-2))
    throw InvalidDomain("analytic_outage_capacity: tail approximation needs eps <= 1e-2");
  const TailConstants tc = tail_constants(eps, cfg);
  return std::log2(1.0 + tc.psi_prime / (x * x));
}

double edge_exact(double x, double k, double eps, const SystemConfig& cfg) {
  if (!(k > 0.0 && k <= 1.0)) throw InvalidDomain("edge_exact: k must be in (0,1]");
  if (!(x > 0.0)) throw InvalidDomain("edge_exact: x must be positive");
  const TailConstants tc = tail_constants(eps, cfg);
  const double u = tc.psi_prime / (x * x);
  if (!(u < 1.0))
    throw InvalidDomain("edge_exact: tail model invalid, psi'/x^2 must be < 1");
  const double den = std::pow(1.0 + u, 1.0 / k) - 1.0;
  if (!(den > 0.0)) throw InvalidDomain("edge_exact: nonpositive denominator");
  return x - std::sqrt(tc.psi_prime / den);
}

double edge_approx(double x, double k) {
  if (!(k > 0.0 && k <= 1.0)) throw InvalidDomain("edge_approx: k must be in (0,1]");
  return x * (1.0 - std::sqrt(k));
}

}  // namespace locrel
