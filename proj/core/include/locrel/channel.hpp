#pragma once

#include <complex>
#include <vector>

#include "locrel/config.hpp"
#include "locrel/rng.hpp"

namespace locrel {

/// Two-path coefficients for one BS-UE link.
struct PathCoefficients {
  std::complex<double> a_los;
  std::complex<double> a_scatter;
  double tau_los = 0.0;      ///< seconds
  double tau_scatter = 0.0;  ///< tau_los + excess delay
};

/// Channel transfer values across the subcarriers.
struct FrequencyResponse {
  std::vector<std::complex<double>> values;
};

/// Per-subcarrier Rician envelope parameters; independent of the subcarrier.
struct RicianParams {
  double avg_power = 0.0;  ///< A = E|h|^2
  double k_factor = 0.0;   ///< K = |E h|^2 / Var h
};

/// Distance from UE position to a BS, with the geometry guard applied.
double bs_distance(double x, int bs, const SystemConfig& cfg);

/// Free-space power gain lambda^2 / (16 pi^2 d^2).
double path_gain(double d, const SystemConfig& cfg);

/// LoS coefficient: magnitude sqrt(path_gain(d)), phase -2 pi d / lambda.
std::complex<double> los_coefficient(double x, int bs, const SystemConfig& cfg);

/// Scattered-path power from the exponential power delay profile:
/// path_gain(d)/rho * exp(-excess_delay/rho). The excess delay is in seconds
/// and rho dimensionless, taken literally from the settings table even
/// though the exponent is then ~2.5e-8; see the README note on units.
double scatter_variance(double d, const SystemConfig& cfg);

/// Samples a_scatter ~ CN(0, scatter_variance(d)).
std::complex<double> scatter_coefficient(double d, const SystemConfig& cfg, RngStream& rng);

/// Deterministic scatter coefficient with the given phase and the Rayleigh
/// magnitude at `magnitude_quantile` (in (0,1)); used by phase-conditioned
/// CRLB sweeps where only the phase matters.
std::complex<double> scatter_coefficient(double d, double phase, double magnitude_quantile,
                                         const SystemConfig& cfg);

/// Path delays and coefficients for one link; scatter part supplied.
PathCoefficients path_coefficients(double x, int bs, std::complex<double> a_scatter,
                                   const SystemConfig& cfg);

/// h_j = a1 d_j(tau1) + a2 d_j(tau2), d_j(tau) = exp(-i 2 pi j df tau).
FrequencyResponse freq_response(double x, int bs, std::complex<double> a_scatter,
                                const SystemConfig& cfg);

/// A = P_L(d) (1 + exp(-dt/rho)/rho),  K = rho exp(dt/rho).
RicianParams rician_params(double x, int bs, const SystemConfig& cfg);

/// One ping: y_j = sqrt(P_tx) h_j + n_j with a fresh scatter draw and
/// fresh noise, unit pilots on every subcarrier.
std::vector<std::complex<double>> simulate_ping(double x, int bs, const SystemConfig& cfg,
                                                RngStream& rng);

/// Received energy ||y||^2 of one ping, sampled from its exact distribution:
/// given the channel, ||y||^2 is (sigma_n^2/2) * noncentral-chi^2(2N) with
/// noncentrality 2 P_tx ||h||^2 / sigma_n^2, and ||h||^2 has a closed form
/// through a geometric phase sum. One gamma and three normal draws per ping
/// instead of 2N; agrees with simulate_ping in distribution.
double ping_energy_sample(double x, int bs, const SystemConfig& cfg, RngStream& rng);

/// Bulk sampler for the maximum achievable rate at one location. Evaluates
/// sum_j log2(1 + snr |h_j|^2) as a single log of a renormalized product,
/// with the subcarrier phase tables precomputed; equals the direct
/// per-subcarrier evaluation to ~1e-12 relative.
class MarBulkSampler {
 public:
  explicit MarBulkSampler(const SystemConfig& cfg);

  /// MAR for an explicit scatter coefficient.
  double mar(double x, int bs, std::complex<double> a_scatter) const;

  /// Appends n MAR draws (fresh scatter per draw) to out.
  void draw(double x, int bs, std::int64_t n, RngStream& rng,
            std::vector<double>& out) const;

 private:
  double mar_rotated(double a1_mag, double br, double bi) const;

  SystemConfig cfg_;
  std::vector<double> cos_theta_, sin_theta_;
  double snr_scale_;
};

}  // namespace locrel
