#pragma once
// Discontinuity of the severity Laplace transform across its negative-axis
// branch cut, in the convention M(z) = E[exp(-z X)] continued to z = x e^{i pi},
// x > 0. These kernels are what the tail-probability contour integrals consume.

#include <string>

#include "heavytail/severity.hpp"

namespace heavytail {

// ---- Pareto splice ---------------------------------------------------------

// Jump of Im M across the cut for the Pareto piece alone (weight omega
// included): delta(x) = -2 omega pi / Gamma(alpha-1) * (x0 x)^{alpha-1}.
// Pole-free in alpha: valid at integer alpha too.
double delta_im_pareto_single(const SplicedSeverity& sev, double x);

// Real part of the continued spliced transform minus 1 ("exponent kernel"):
// psi(x) = omega Phi(1-a, 2-a, x0 x) + (1-omega) M1_body(-x) - 1
//          + omega Gamma(2-a) cos(pi a) (x0 x)^{a-1}.
// Exact zero at x = 0. Integer alpha is perturbed to alpha +- 1e-6 with
// *alpha_perturbed set (IntegerAlphaUnsupported is reserved for callers that
// demand the unperturbed value).
double psi(const SplicedSeverity& sev, double x, bool* alpha_perturbed = nullptr);

// ---- lognormal saddle points ----------------------------------------------

struct SaddleEval {
  double kappa = 0.0;  // x sigma^2 e^mu, must be <= 1/e
  double w1 = 0.0;     // -W0(-kappa), in [0, 1]
  double w2 = 0.0;     // -W-1(-kappa), >= 1
};

// Both saddles of the continued lognormal transform. Throws KappaOutOfRange
// for kappa > 1/e.
SaddleEval lognormal_saddles(double mu, double sigma, double x);

// Saddle-point kernels for the full (untruncated) lognormal, order 0 or 1 in
// the sigma^2/8 bracket. Preconditions: kappa <= (1/e)(1 - 1e-6) and the
// relevant saddle at least 1e-3 away from the branch point (SaddleTooClose).
double im_mgf_lognormal(double mu, double sigma, double x, int order = 1);
double re_mgf_lognormal(double mu, double sigma, double x, int order = 1);

// Kernels for the spliced severity (body + truncated lognormal tail).
// Im requires saddle/truncation separation w2 - w0bar >= 2 (SeparationViolated).
// Re switches between the saddle form (w0bar < w1) and the truncation-boundary
// form (w0bar > w1), blended linearly over |w0bar - w1| <= 0.05 because the
// boundary form's denominator vanishes at w0bar = w1.
double im_mgf_spliced_lognormal(const SplicedSeverity& sev, double x);
double re_mgf_spliced_lognormal(const SplicedSeverity& sev, double x);

struct CutKernelDiagnostics {
  std::string regime;                  // "series", "saddle", "boundary", "blend"
  double suppressed_terms_bound = 0.0; // magnitude bound for dropped saddle terms
  long long evaluations = 0;           // kernel evaluations performed
};

// Regime classification and the analytic bound on the terms the order-1
// saddle kernels drop, evaluated at x.
CutKernelDiagnostics spliced_kernel_diagnostics(const SplicedSeverity& sev, double x);

}  // namespace heavytail
