#pragma once
// Extreme-quantile (VaR) solving: invert the quadrature tail in log-s with a
// safeguarded secant/bisection hybrid, seeded by the closed-form Pareto
// asymptotic or the single-loss lognormal quantile.

#include <variant>

#include "heavytail/compound.hpp"

namespace heavytail {

struct VarQuery {
  std::variant<CompoundModel, Portfolio> model;
  double confidence = 0.999;   // in (0.5, 1)
  double tol_rel = 1e-6;       // relative tolerance on the *tail probability*
  QuadratureSpec quad{};
  bool include_poisson_term = true;
};

struct VarResult {
  double var = 0.0;          // s with P(S > s) = 1 - confidence
  double tail_at_var = 0.0;  // achieved tail probability
  int iterations = 0;
  long long tail_evaluations = 0;
};

// Closed-form seed for Pareto compounds: s0 = x0 (omega lambda T / p)^{1/(alpha-1)}.
// Requires p in (0, omega lambda T) (DomainError).
double initial_guess(const CompoundModel& pareto_model, double p_tail);

// Throws BracketFailure if no bracket can be established, NonMonotoneTail if
// the sampled tail is not decreasing across the bracket (offending sample
// points are listed in the message), NonConvergence past the iteration cap.
VarResult solve_var(const VarQuery& query);

}  // namespace heavytail
