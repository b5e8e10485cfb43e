#pragma once
// Large-s expansions: the six-term series for compound-Pareto tails in powers
// of shat = s/x0 (exponents alpha-1, 2(alpha-1), alpha, 3(alpha-1), 2alpha-1,
// alpha+1), the single-loss lognormal asymptotic, and the Cramer-style Poisson
// tail exponent.

#include "heavytail/compound.hpp"

namespace heavytail {

struct AsymptoticExpansion {
  // P(S > s) ~ leading_coeff * shat^{-exponents[0]} + sum_i a[i] * shat^{-exponents[i+1]}
  double leading_coeff = 0.0;  // omega * lambda * T
  double a[5] = {0, 0, 0, 0, 0};
  double exponents[6] = {0, 0, 0, 0, 0, 0};
  double c1 = 0.0, c2 = 0.0;   // severity cumulant combinations
  double x0 = 0.0;             // threshold scale for shat = s/x0
  int leading_correction = 0;  // index (1..5) of the largest correction term
};

// Coefficients for a Pareto-spliced compound model. Throws AlphaNearSingular
// when alpha is within 1e-6 of {1.5, 2, 2.5, 3} (coefficient poles).
AsymptoticExpansion expand_compound_pareto(const CompoundModel& model);

// Partial sum with n_terms in 1..6, ordered (leading, a1, a2, a3, a4, a5).
double eval_expansion(const AsymptoticExpansion& exp, double s, int n_terms);

// Leading lognormal single-loss tail:
// (sigma/sqrt(2 pi)) (ln s - mu)^{-1} exp(-(ln s - mu)^2 / (2 sigma^2)).
// Requires ln s - mu >= 2 sigma (DomainError).
double lognormal_single_asymptotic(double mu, double sigma, double s);

// exp(-n (rate - ln rate - 1)): the exponential-order Poisson tail estimate.
// Its exponent is linear in n at fixed rate, so it departs from the exact
// tail as n grows past the mean; the module tests measure and report the gap
// rather than hiding it.
double poisson_tail_cramer(double rate, long long n);

}  // namespace heavytail
