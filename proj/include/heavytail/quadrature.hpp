#pragma once
// Adaptive Gauss-Kronrod (G7-K15) quadrature tuned for the cut integrals:
// open at the origin (integrable power singularities), pre-split at caller
// supplied breakpoints (sine zeros), with an envelope-scan policy that picks
// the upper cutoff for integrands that decay and then blow up again.

#include <functional>
#include <string>
#include <vector>

namespace heavytail {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 200;  // adaptive bisections on top of initial panels
  enum class CutoffPolicy { kAuto, kFixed };
  CutoffPolicy cutoff_policy = CutoffPolicy::kAuto;
  double fixed_cutoff = 0.0;   // used when cutoff_policy == kFixed
};

struct IntervalEstimate {
  double value = 0.0;
  double abs_err = 0.0;
  long long n_evaluations = 0;
  int subdivisions = 0;
};

// Plain adaptive G7-K15 over [a, b] with optional interior breakpoints.
// Throws NonConvergence if the tolerance is unmet after max_subdivisions.
IntervalEstimate integrate_interval(const std::function<double(double)>& f,
                                    double a, double b,
                                    const std::vector<double>& breakpoints,
                                    const QuadratureSpec& spec);

struct HalflineOptions {
  std::vector<double> breakpoints;  // interior split points (ascending not required)
  double anchor = 1.0;              // location near the integrand's main mass
  double hard_cutoff = 0.0;         // model-imposed upper bound; 0 = none
  // Optional log-magnitude envelope used *only* for cutoff scanning; +inf
  // signals breakdown/overflow at that point. Defaults to log|f|.
  std::function<double(double)> log_envelope;
};

struct HalflineResult {
  double value = 0.0;
  double abs_err = 0.0;
  double cutoff_used = 0.0;
  long long n_evaluations = 0;
  bool truncated_at_rise = false;   // cutoff chosen at an envelope minimum
  double boundary_magnitude = 0.0;  // |f| at the cutoff when truncated
  std::vector<std::string> warnings;
};

// Integral of f over (0, cutoff] where the cutoff comes from spec.cutoff_policy:
// kAuto scans the envelope upward from options.anchor and stops at clean decay
// (envelope below peak by a factor 1e-22), at the minimum preceding a persistent
// rise (warning CutoffTruncated, boundary magnitude as error proxy), or at
// options.hard_cutoff. Throws GrowthDetected when the envelope still rises over
// the last decade before the cutoff and the boundary is non-negligible against
// the accumulated value; NonConvergence as for integrate_interval.
HalflineResult integrate_halfline(const std::function<double(double)>& f,
                                  const QuadratureSpec& spec,
                                  const HalflineOptions& options = {});

}  // namespace heavytail
