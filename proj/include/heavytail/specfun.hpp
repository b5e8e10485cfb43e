#pragma once
// Special functions needed by the tail machinery: real-argument gamma with
// reflection, Kummer's confluent hypergeometric M (a.k.a. Phi), both real
// branches of the Lambert W function, the standard normal CDF/quantile pair,
// and an exact Poisson upper tail.

#include <cstdint>

namespace heavytail::specfun {

// sin(pi*x) with the integer part removed exactly, so the sign is exact for
// half-integers and near-integers. Used by the reflection formula.
double sinpi(double x);

// Gamma(x) for real x, including negative non-integer x via reflection.
// Relative error <= ~1e-12 away from poles. Throws PoleArgument within 1e-12
// of a non-positive integer, OverflowGuard for x > 171.62.
double gamma(double x);

// 1/Gamma(x), defined as 0 at the poles (entire function).
double rgamma(double x);

// Kummer's function Phi(a,b,z) = sum_n (a)_n/(b)_n z^n/n! for real a, b and
// z >= 0. Power series with compensated summation; switches to the large-z
// asymptotic form when the series loses more than ~3 digits to cancellation.
// Throws ParameterPole if b is within 1e-12 of a non-positive integer,
// DomainError for z < 0.
double kummer_phi(double a, double b, double z);

// Principal branch W0: w*e^w = x, w >= -1, for x >= -1/e.
double lambert_w0(double x);

// Lower branch W-1: w*e^w = x, w <= -1, for x in [-1/e, 0).
double lambert_w_minus1(double x);

// Standard normal CDF, absolute error <= 1e-14 (erfc-based).
double normal_cdf(double x);

// Standard normal quantile for p in (0,1); rational approximation polished
// with one Halley step so normal_cdf(normal_quantile(p)) = p to ~1e-15.
double normal_quantile(double p);

// P(N > n) for N ~ Poisson(rate), computed in log space from the mode so the
// result is accurate down to ~1e-300. Requires rate in (0, 1e6], n >= 0.
double poisson_tail_exact(double rate, long long n);

}  // namespace heavytail::specfun
