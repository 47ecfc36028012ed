#pragma once

#include <cstddef>
#include <vector>

namespace locrel {

/// Uniform nodes 2*pi*k/n on [0, 2pi). For a 2pi-periodic integrand the
/// tensor trapezoid rule collapses to the plain mean over this grid and
/// converges spectrally.
std::vector<double> periodic_phase_nodes(int n);

/// Mean of f(phi1, phi2) over the n x n tensor phase grid.
template <class F>
double phase_grid_mean(int n, F&& f) {
  const auto nodes = periodic_phase_nodes(n);
  double acc = 0.0;
  for (double p1 : nodes)
    for (double p2 : nodes) acc += f(p1, p2);
  return acc / (static_cast<double>(n) * static_cast<double>(n));
}

/// Gauss-Hermite rule for weight exp(-t^2) on the real line, nodes and
/// weights computed by Golub-Welsch on the Jacobi matrix.
class GaussHermite {
 public:
  static GaussHermite rule(int n);

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  /// E[f(X)] for X ~ N(mu, sigma^2). sigma = 0 degenerates to f(mu).
  template <class F>
  double gaussian_mean(double mu, double sigma, F&& f) const {
    if (sigma == 0.0) return f(mu);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      acc += weights_[i] * f(mu + kSqrt2 * sigma * nodes_[i]);
    return acc * kInvSqrtPi;
  }

 private:
  static constexpr double kSqrt2 = 1.41421356237309504880;
  static constexpr double kInvSqrtPi = 0.56418958354775628695;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace locrel
