#pragma once
// Tail probabilities P(S > s) of compound Poisson sums with spliced severities,
// computed by integrating the branch-cut kernels against e^{-s x}. Also the
// single-loss tails and independent/factor-mixed portfolios.

#include <optional>
#include <vector>

#include "heavytail/branchcut.hpp"
#include "heavytail/quadrature.hpp"
#include "heavytail/severity.hpp"

namespace heavytail {

struct Frequency {
  double lambda = 1.0;   // Poisson intensity per unit time
  double horizon = 1.0;  // time horizon T; the product lambda*T is what matters
};

struct CompoundModel {
  SplicedSeverity severity;
  Frequency frequency;
};

struct TailResult {
  double prob = 0.0;              // clamped to [0, 1] (warning on clamp)
  double abs_err_estimate = 0.0;
  double cutoff_used = 0.0;
  long long n_evaluations = 0;
  std::vector<std::string> warnings;
  // Diagnostics.
  double raw_value = 0.0;         // integral + correction before clamping
  long long n0 = -1;              // Poisson floor index (Pareto compounds)
  double poisson_term = 0.0;      // exact floor correction added
  double peak_w2 = 0.0;           // saddle coordinate at the integrand peak
  std::string kernel_regime;      // lognormal kernel regime at the peak
  double suppressed_terms_bound = 0.0;
};

// P(X > s) of the severity itself via the cut integral (for Pareto splices the
// result reproduces omega (s/x0)^{-(alpha-1)} to within the quadrature error).
// Pareto: requires s > x0 (DomainError). Lognormal: s must be large enough
// that the cut representation holds (peak saddle beyond the branch point).
TailResult tail_single(const SplicedSeverity& sev, double s,
                       const QuadratureSpec& spec = {});

// Compound Poisson with Pareto-spliced severity. Requires s >= 2 x0
// (DomainError below). include_poisson_term adds the exact floor correction
// P(Po(lambda T) > n0), n0 = floor(s/x0); the added amount and n0 are reported
// in the diagnostics.
TailResult tail_compound_pareto(const CompoundModel& model, double s,
                                const QuadratureSpec& spec = {},
                                bool include_poisson_term = true);

// Compound Poisson with lognormal-spliced severity (saddle-point kernels).
TailResult tail_compound_lognormal(const CompoundModel& model, double s,
                                   const QuadratureSpec& spec = {});

// Dispatch on the severity's tail variant.
TailResult tail_compound(const CompoundModel& model, double s,
                         const QuadratureSpec& spec = {},
                         bool include_poisson_term = true);

// A factor-mixture point: with probability prob, each unit i has its
// intensity scaled by multipliers[i].
struct FactorPoint {
  double prob = 1.0;
  std::vector<double> multipliers;
};

struct Portfolio {
  std::vector<CompoundModel> units;
  std::vector<FactorPoint> factor_grid;  // empty = independent units
};

// Sum of independent compound units (or the factor mixture when factor_grid is
// non-empty): the aggregate transform exponent is the sum of per-unit kernels,
// so a single integral yields the portfolio tail. Throws EmptyPortfolio.
TailResult tail_portfolio(const Portfolio& pf, double s,
                          const QuadratureSpec& spec = {},
                          bool include_poisson_term = true);

}  // namespace heavytail
