#include "doctest.h"
#include "locrel/errors.hpp"
#include "locrel/quadrature.hpp"

#include <cmath>
#include <numbers>

using namespace locrel;

TEST_SUITE_BEGIN("quadrature");

TEST_CASE("periodic phase nodes") {
  const auto nodes = periodic_phase_nodes(8);
  REQUIRE(nodes.size() == 8);
  CHECK(nodes[0] == 0.0);
  CHECK(nodes[1] == doctest::Approx(std::numbers::pi / 4).epsilon(1e-15));
  CHECK(nodes.back() < 2 * std::numbers::pi);
  CHECK_THROWS_AS(periodic_phase_nodes(0), InvalidDomain);
}

TEST_CASE("phase grid mean is exact for low-order trigonometric integrands") {
  CHECK(phase_grid_mean(8, [](double, double) { return 3.5; }) ==
        doctest::Approx(3.5).epsilon(1e-15));
  // mean over the torus of cos(3 p1) cos(2 p2) is zero; an 8-point-per-axis
  // trapezoid integrates trig polynomials below the grid order exactly
  const double v = phase_grid_mean(
      8, [](double p1, double p2) { return std::cos(3 * p1) * std::cos(2 * p2); });
  CHECK(std::abs(v) < 1e-14);
  const double w = phase_grid_mean(
      16, [](double p1, double p2) { return 1.0 + 0.5 * std::sin(p1 + 2 * p2); });
  CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hermite rule integrates gaussian moments exactly") {
  const auto gh = GaussHermite::rule(41);
  REQUIRE(gh.nodes().size() == 41);
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  double m0 = 0, m2 = 0, m4 = 0, m6 = 0;
  for (std::size_t i = 0; i < gh.nodes().size(); ++i) {
    const double t = gh.nodes()[i], w = gh.weights()[i];
    m0 += w;
    m2 += w * t * t;
    m4 += w * t * t * t * t;
    m6 += w * std::pow(t, 6);
  }
  CHECK(m0 == doctest::Approx(sqrt_pi).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(sqrt_pi / 2).epsilon(1e-13));
  CHECK(m4 == doctest::Approx(3 * sqrt_pi / 4).epsilon(1e-13));
  CHECK(m6 == doctest::Approx(15 * sqrt_pi / 8).epsilon(1e-13));
}

TEST_CASE("gaussian mean") {
  const auto gh = GaussHermite::rule(41);
  // central moments of N(mu, sigma^2)
  const double mu = 3.0, sigma = 1.7;
  const double var = gh.gaussian_mean(mu, sigma, [&](double x) {
    return (x - mu) * (x - mu);
  });
  CHECK(var == doctest::Approx(sigma * sigma).epsilon(1e-12));
  // E[e^X] = exp(mu + sigma^2/2)
  const double mgf = gh.gaussian_mean(0.5, 0.8, [](double x) { return std::exp(x); });
  CHECK(mgf == doctest::Approx(std::exp(0.5 + 0.32)).epsilon(1e-10));
  // degenerate sigma evaluates at the mean
  CHECK(gh.gaussian_mean(2.5, 0.0, [](double x) { return x * x; }) ==
        doctest::Approx(6.25).epsilon(1e-15));
}

TEST_CASE("single node rule") {
  const auto gh = GaussHermite::rule(1);
  CHECK(gh.nodes()[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(gh.weights()[0] == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
}

TEST_SUITE_END();
