#pragma once

#include "locrel/config.hpp"

namespace locrel {

/// Constants of the single-subcarrier power-tail approximation, with BS 1
/// at the origin so distance equals the location x > 0.
struct TailConstants {
  double psi = 0.0;        ///< tail slope scale, per W per m^2
  double psi_prime = 0.0;  ///< P_tx eps / (sigma_n^2 psi), m^2
};

/// psi and psi' for the given outage level.
TailConstants tail_constants(double eps, const SystemConfig& cfg);

/// Lower-tail CDF of the received power: P(|h|^2 <= y) ~= y x^2 psi,
/// valid for y near zero. Identical to (y/A)(1+K)e^{-K}.
double tail_cdf(double y, double x, const SystemConfig& cfg);

/// Closed-form eps-outage capacity for one subcarrier:
/// log2(1 + psi' / x^2). Valid in the small-eps tail regime (eps <= 1e-2).
double analytic_outage_capacity(double eps, double x, const SystemConfig& cfg);

/// Exact backoff outage-region edge offset: the Delta x solving
/// k F^-1(eps; x - Delta x) = F^-1(eps; x) under the tail model.
double edge_exact(double x, double k, double eps, const SystemConfig& cfg);

/// Linearized edge offset x (1 - sqrt(k)); independent of every system
/// parameter.
double edge_approx(double x, double k);

}  // namespace locrel
