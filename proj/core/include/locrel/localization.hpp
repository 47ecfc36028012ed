#pragma once

#include <Eigen/Dense>
#include <complex>

#include "locrel/channel.hpp"
#include "locrel/config.hpp"
#include "locrel/rng.hpp"

namespace locrel {

/// Fisher information of one ping in the parameters
/// [tau1, tau2, Re a1, Im a1, Re a2, Im a2].
struct ParamFisher {
  Eigen::Matrix<double, 6, 6> matrix;
};

/// Scatter-path phases conditioning the location uncertainty.
struct PhasePair {
  double phi1 = 0.0;
  double phi2 = 0.0;

  /// Wraps both phases into [0, 2pi).
  static PhasePair wrapped(double p1, double p2);
};

/// Position CRLB at one location for fixed scatter phases.
struct LocUncertainty {
  double variance = 0.0;                    ///< sigma^2(x; phi), m^2
  Eigen::Matrix2d clock_bias_coupled;       ///< J(x,B), kept for diagnostics
};

/// Fisher information of the two-path signal model. Uses the closed form of
/// the per-subcarrier derivative outer products: every entry reduces to the
/// spectral sums sum_j w_j^p e^{i w_j dt} for p = 0,1,2, so the assembly is
/// O(N) once and O(1) per coefficient pair.
ParamFisher fisher_eta(const PathCoefficients& coeffs, const SystemConfig& cfg);

/// Schur complement onto the LoS delay: J11 - J1n Jnn^-1 Jn1.
double equivalent_fisher(const ParamFisher& J);

/// Position CRLB under unknown clock bias. Requires x strictly between the
/// two BS positions; outside, the (x,B) pair is unidentifiable from two
/// one-sided delays and IllConditioned is reported.
LocUncertainty crlb(double x, const PhasePair& phases, const SystemConfig& cfg);

/// Draws phases uniform on [0,2pi)^2, then xhat ~ N(x, sigma^2(x; phi)).
double sample_estimate(double x, const SystemConfig& cfg, RngStream& rng);

/// Phase-averaged localization std: sqrt of the mean of sigma^2(x; phi)
/// over the tensor phase grid (numerics.phase_nodes_meta per axis).
double average_std(double x, const SystemConfig& cfg);

/// Caches the spectral sums so repeated CRLB evaluations are cheap; the
/// free functions above are one-shot wrappers around this.
class CrlbEvaluator {
 public:
  explicit CrlbEvaluator(const SystemConfig& cfg);

  double variance(double x, const PhasePair& phases) const;
  LocUncertainty full(double x, const PhasePair& phases) const;
  double average_std(double x, int phase_nodes) const;
  double average_std(double x) const;

  /// sigma(x; phi) over the n x n tensor phase grid, row-major in (phi1, phi2).
  std::vector<double> sigma_grid(double x, int phase_nodes) const;

  const SystemConfig& config() const { return cfg_; }

 private:
  friend ParamFisher fisher_eta(const PathCoefficients&, const SystemConfig&);
  struct SpectralSums {
    double sw = 0.0, sw2 = 0.0;
    std::complex<double> s0, s1, s2;
  };
  static SpectralSums spectral_sums(double delta_tau, const SystemConfig& cfg);
  static Eigen::Matrix<double, 6, 6> assemble(const SpectralSums& s,
                                              std::complex<double> a1,
                                              std::complex<double> a2, double kappa,
                                              int n_subcarriers);
  double equivalent_info(double x, int bs, double phase) const;

  SystemConfig cfg_;
  SpectralSums sums_;
};

}  // namespace locrel
