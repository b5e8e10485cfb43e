#pragma once
// Spliced severity model: a bounded "body" distribution on [0, x0] carrying
// probability 1-omega, glued to a heavy tail (Pareto or right-truncated-at-x0
// lognormal) carrying probability omega. Includes maximum-likelihood
// calibration of the tail index and the splice weight from loss data.

#include <string>
#include <variant>
#include <vector>

namespace heavytail {

// ---- body variants (support confined to [0, x0]) --------------------------

// Body known only through its first two raw moments; m1 = E[X]/x0 and
// m2 = E[X^2]/(2 x0^2) in threshold units (the 1/2 is part of the stored
// value so the MGF reads 1 + m1 y + m2 y^2 + ...).
struct MomentBody {
  double m1 = 0.0;
  double m2 = 0.0;
};

struct UniformBody {
  double lo = 0.0;
  double hi = 0.0;
};

struct PointMassBody {
  double at = 0.0;
};

using BodyModel = std::variant<MomentBody, UniformBody, PointMassBody>;

// ---- tail variants ---------------------------------------------------------

// P(X > x) = (x/x0)^{-(alpha-1)} for x >= x0. The tail *exponent* of the
// survival function is alpha-1 > 0.
struct ParetoTail {
  double alpha = 0.0;
};

// Lognormal(mu, sigma) conditioned on X > x0; nu = 1 / P(LN > x0) is the
// renormalization. x0 = 0 (with omega = 1) degenerates to the full lognormal.
struct LognormalTail {
  double mu = 0.0;
  double sigma = 0.0;
};

using TailModel = std::variant<ParetoTail, LognormalTail>;

struct SplicedSeverity {
  double omega = 1.0;  // tail weight in [0, 1]
  double x0 = 0.0;     // splice threshold
  BodyModel body{MomentBody{}};
  TailModel tail{ParetoTail{}};
};

// Throws InvalidSeverity unless: omega in [0,1]; x0 > 0 (x0 == 0 permitted
// only for a pure lognormal, omega == 1); body support inside [0, x0];
// alpha > 1; sigma > 0.
void validate(const SplicedSeverity& sev);

// Renormalization nu = 1 / P(LN(mu, sigma) > x0); equals 1 for x0 == 0.
double lognormal_tail_nu(const LognormalTail& tail, double x0);

// Survival function of the Pareto piece: (x/x0)^{-(alpha-1)}, x >= x0.
double pareto_ccdf(double alpha, double x0, double x);

// Body moment-generating function at a *negative* argument expressed in
// threshold units: returns E[exp(y X / x0)] for the body variant, where y
// may be any real with |result| < 1e300 (OverflowGuard beyond). For
// MomentBody this is the quadratic polynomial 1 + m1 y + m2 y^2.
double body_mgf_neg(const BodyModel& body, double y, double x0);

// Raw body moments in threshold units: first = E[X]/x0, second = E[X^2]/(2 x0^2).
double body_m1(const BodyModel& body, double x0);
double body_m2(const BodyModel& body, double x0);

// Density mismatch at the splice point: (1-omega) f_body(x0) - omega f_tail(x0).
// Throws DensityUnavailable for MomentBody / PointMassBody bodies.
double junction_residual(const SplicedSeverity& sev);

struct AlphaFit {
  double alpha = 0.0;    // MLE of the Pareto index
  double std_err = 0.0;  // (alpha-1)/sqrt(N)
  long long n_tail = 0;  // number of exceedances used
};

// Hill-type MLE from the exceedances strictly above x0:
// alpha = 1 + N / sum(ln(x_i/x0)). Requires N >= 2 (InsufficientTailData);
// all exceedances equal to x0 raises DegenerateData.
AlphaFit fit_alpha(const std::vector<double>& losses, double x0);

// Core estimator exposed for testing: alpha = 1 + n / sum_log_ratios.
double alpha_mle(double sum_log_ratios, long long n);

// Empirical splice weight: strict fraction of losses above x0 (ties count as
// body). Throws EmptyData on an empty sample.
double fit_omega(const std::vector<double>& losses, double x0);

// One-column CSV of losses; an optional single header line is skipped.
std::vector<double> load_losses_csv(const std::string& path);

}  // namespace heavytail
