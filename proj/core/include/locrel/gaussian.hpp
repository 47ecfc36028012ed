#pragma once

namespace locrel {

/// Upper tail of the standard normal distribution, Q(z) = P(Z > z).
/// Absolute accuracy better than 1e-12 for |z| <= 8; for z > 8 an
/// asymptotic expansion keeps small tails from underflowing to zero until
/// the result drops below the smallest positive double.
double q_function(double z);

/// Standard normal quantile, the inverse of 1 - q_function. p in (0, 1).
double normal_quantile(double p);

/// Standard normal density.
double normal_pdf(double z);

}  // namespace locrel
