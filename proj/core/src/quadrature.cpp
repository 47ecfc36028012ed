#include "locrel/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "locrel/errors.hpp"

namespace locrel {

std::vector<double> periodic_phase_nodes(int n) {
  if (n < 1) throw InvalidDomain("phase grid needs at least one node");
  std::vector<double> nodes(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    nodes[static_cast<std::size_t>(k)] = 2.0 * std::numbers::pi * k / n;
  return nodes;
}

GaussHermite GaussHermite::rule(int n) {
  if (n < 1) throw InvalidDomain("Gauss-Hermite rule needs at least one node");
  // Jacobi matrix of the (physicists') Hermite polynomials: zero diagonal,
  // off-diagonal beta_k = sqrt(k/2). mu0 = integral of the weight = sqrt(pi).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 1);
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(std::max(n - 1, 0)),
                            Eigen::ComputeEigenvectors);
  GaussHermite gh;
  gh.nodes_.resize(static_cast<std::size_t>(n));
  gh.weights_.resize(static_cast<std::size_t>(n));
  const double mu0 = std::sqrt(std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    gh.nodes_[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    gh.weights_[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
  }
  return gh;
}

}  // namespace locrel
