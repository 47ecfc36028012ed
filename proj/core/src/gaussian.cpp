#include "locrel/gaussian.hpp"

#include <cmath>
#include <numbers>

#include "locrel/errors.hpp"

namespace locrel {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double q_function(double z) {
  if (std::isnan(z)) return z;
  if (z < 0.0) return 1.0 - q_function(-z);
  if (z <= 8.0) return 0.5 * std::erfc(z * kInvSqrt2);
  // Mills-ratio asymptotic series: Q(z) = phi(z)/z * (1 - 1/z^2 + 3/z^4 - ...),
  // summed until the terms stop improving; at z = 8 that leaves a relative
  // error ~e^{-z^2/2}, far below the result itself.
  const double z2 = z * z;
  double term = 1.0;
  double sum = 1.0;
  double prev = 2.0;
  for (int k = 1; k < 200; ++k) {
    term *= -static_cast<double>(2 * k - 1) / z2;
    if (std::abs(term) >= prev) break;  // asymptotic tail started growing
    sum += term;
    prev = std::abs(term);
    if (prev < 1e-17 * std::abs(sum)) break;
  }
  return normal_pdf(z) / z * sum;
}

// Rational approximation for the inverse normal CDF (Acklam's algorithm)
// polished by one Halley step, giving close to full double precision.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidDomain("normal_quantile: p must be in (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement against the full-precision CDF.
  const double e = (1.0 - q_function(x)) - p;
  const double u = e / normal_pdf(x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

}  // namespace locrel
