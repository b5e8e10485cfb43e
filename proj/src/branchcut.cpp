#include "heavytail/branchcut.hpp"

#include <cmath>

#include "heavytail/errors.hpp"
#include "heavytail/specfun.hpp"

namespace heavytail {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInvE = 0.36787944117144232160;
constexpr double kSqrt2Pi = 2.50662827463100050242;
constexpr double kBlendHalfWidth = 0.05;  // |w0bar - w1| window for blending

// Nudge integer tail indices off the Gamma(2-alpha) / Kummer parameter poles.
double effective_alpha(double alpha, bool* perturbed) {
  if (!(alpha > 1.0)) throw InvalidSeverity("pareto alpha must be > 1");
  const double n = std::nearbyint(alpha);
  if (n >= 2.0 && std::fabs(alpha - n) < 1e-9) {
    if (perturbed) *perturbed = true;
    return n + 1e-6;
  }
  if (perturbed) *perturbed = false;
  return alpha;
}

const ParetoTail& require_pareto(const SplicedSeverity& sev) {
  const auto* t = std::get_if<ParetoTail>(&sev.tail);
  if (!t) throw InvalidSeverity("operation requires a Pareto tail");
  return *t;
}

const LognormalTail& require_lognormal(const SplicedSeverity& sev) {
  const auto* t = std::get_if<LognormalTail>(&sev.tail);
  if (!t) throw InvalidSeverity("operation requires a lognormal tail");
  return *t;
}

}  // namespace

double delta_im_pareto_single(const SplicedSeverity& sev, double x) {
  const ParetoTail& tail = require_pareto(sev);
  if (!(x > 0.0)) throw DomainError("delta_im_pareto_single: x must be > 0");
  // Pole-free in alpha: 1/Gamma(alpha-1) is entire.
  const double y = sev.x0 * x;
  return -2.0 * sev.omega * kPi * specfun::rgamma(tail.alpha - 1.0) *
         std::exp((tail.alpha - 1.0) * std::log(y));
}

double psi(const SplicedSeverity& sev, double x, bool* alpha_perturbed) {
  const ParetoTail& tail = require_pareto(sev);
  if (!(x >= 0.0)) throw DomainError("psi: x must be >= 0");
  const double a = effective_alpha(tail.alpha, alpha_perturbed);
  if (x == 0.0) return 0.0;
  const double y = sev.x0 * x;
  // Kummer term grows like e^y / y; e^700 is the last comfortable magnitude.
  if (sev.omega > 0.0 && y > 700.0)
    throw OverflowGuard("psi: x0*x = " + std::to_string(y) +
                        " beyond the e^700 range of the Kummer term");
  const double tail_part =
      (sev.omega > 0.0)
          ? specfun::kummer_phi(1.0 - a, 2.0 - a, y) - 1.0 +
                specfun::gamma(2.0 - a) * std::cos(kPi * a) *
                    std::exp((a - 1.0) * std::log(y))
          : 0.0;
  const double body_part =
      (sev.omega < 1.0) ? body_mgf_neg(sev.body, y, sev.x0) - 1.0 : 0.0;
  return sev.omega * tail_part + (1.0 - sev.omega) * body_part;
}

SaddleEval lognormal_saddles(double mu, double sigma, double x) {
  if (!(sigma > 0.0)) throw DomainError("lognormal_saddles: sigma must be > 0");
  if (!(x > 0.0)) throw DomainError("lognormal_saddles: x must be > 0");
  SaddleEval s;
  s.kappa = x * sigma * sigma * std::exp(mu);
  if (s.kappa > kInvE * (1.0 + 1e-12))
    throw KappaOutOfRange("lognormal_saddles: kappa = " +
                          std::to_string(s.kappa) + " exceeds 1/e");
  const double arg = -std::min(s.kappa, kInvE);
  s.w1 = -specfun::lambert_w0(arg);
  s.w2 = -specfun::lambert_w_minus1(arg);
  return s;
}

namespace {

// Shared saddle factor exp((w - w^2/2)/sigma^2) with the order-1 bracket.
double saddle_factor(double w, double sigma2, int order) {
  double v = std::exp((w - 0.5 * w * w) / sigma2);
  if (order >= 1) {
    const double d = (w < 1.0) ? (1.0 - w) : (w - 1.0);
    v *= 1.0 + (sigma2 / 8.0) * w / (d * d);
  }
  return v;
}

void check_order(int order) {
  if (order != 0 && order != 1)
    throw DomainError("saddle kernel order must be 0 or 1");
}

}  // namespace

double im_mgf_lognormal(double mu, double sigma, double x, int order) {
  check_order(order);
  const SaddleEval s = lognormal_saddles(mu, sigma, x);
  if (s.kappa > kInvE * (1.0 - 1e-6) || s.w2 - 1.0 < 1e-3)
    throw SaddleTooClose("im_mgf_lognormal: w2 - 1 = " +
                         std::to_string(s.w2 - 1.0) + " below 1e-3");
  const double sigma2 = sigma * sigma;
  return -0.5 * saddle_factor(s.w2, sigma2, order) / std::sqrt(s.w2 - 1.0);
}

double re_mgf_lognormal(double mu, double sigma, double x, int order) {
  check_order(order);
  const SaddleEval s = lognormal_saddles(mu, sigma, x);
  if (s.kappa > kInvE * (1.0 - 1e-6) || 1.0 - s.w1 < 1e-3)
    throw SaddleTooClose("re_mgf_lognormal: 1 - w1 = " +
                         std::to_string(1.0 - s.w1) + " below 1e-3");
  const double sigma2 = sigma * sigma;
  return saddle_factor(s.w1, sigma2, order) / std::sqrt(1.0 - s.w1);
}

double im_mgf_spliced_lognormal(const SplicedSeverity& sev, double x) {
  const LognormalTail& tail = require_lognormal(sev);
  if (sev.omega == 0.0) return 0.0;
  if (sev.x0 <= 0.0) return sev.omega * im_mgf_lognormal(tail.mu, tail.sigma, x);
  const double w0bar = std::log(sev.x0) - tail.mu;
  const SaddleEval s = lognormal_saddles(tail.mu, tail.sigma, x);
  if (s.w2 - w0bar < 2.0)
    throw SeparationViolated("im_mgf_spliced_lognormal: w2 - w0bar = " +
                             std::to_string(s.w2 - w0bar) + " below 2");
  const double nu = lognormal_tail_nu(tail, sev.x0);
  return sev.omega * nu * im_mgf_lognormal(tail.mu, tail.sigma, x);
}

namespace {

// Truncation-boundary form of the real kernel's tail contribution, evaluated
// at saddle coordinate w0 (which must exceed w1; the denominator w0 - kappa e^{w0}
// vanishes at w0 = w1).
double re_tail_boundary_form(const LognormalTail& tail, double nu, double kappa,
                             double w0) {
  const double sigma2 = tail.sigma * tail.sigma;
  const double denom = w0 - kappa * std::exp(w0);
  return nu * tail.sigma / kSqrt2Pi *
         std::exp((w0 - 0.5 * w0 * w0) / sigma2) / denom;
}

}  // namespace

double re_mgf_spliced_lognormal(const SplicedSeverity& sev, double x) {
  const LognormalTail& tail = require_lognormal(sev);
  const double body_part =
      (sev.omega < 1.0)
          ? (1.0 - sev.omega) * body_mgf_neg(sev.body, sev.x0 * x, sev.x0)
          : 0.0;
  if (sev.omega == 0.0) return body_part;
  if (sev.x0 <= 0.0)
    return body_part + sev.omega * re_mgf_lognormal(tail.mu, tail.sigma, x);

  const double w0bar = std::log(sev.x0) - tail.mu;
  const SaddleEval s = lognormal_saddles(tail.mu, tail.sigma, x);
  const double nu = lognormal_tail_nu(tail, sev.x0);

  double tail_part;
  if (w0bar <= s.w1 - kBlendHalfWidth) {
    tail_part = nu * re_mgf_lognormal(tail.mu, tail.sigma, x);
  } else if (w0bar >= s.w1 + kBlendHalfWidth) {
    tail_part = re_tail_boundary_form(tail, nu, s.kappa, w0bar);
  } else {
    // Inside the blend window the boundary form is evaluated at the window
    // edge w1 + 0.05 (its denominator vanishes at w0bar = w1).
    const double t = (w0bar - (s.w1 - kBlendHalfWidth)) / (2.0 * kBlendHalfWidth);
    const double saddle_form = nu * re_mgf_lognormal(tail.mu, tail.sigma, x);
    const double boundary_form =
        re_tail_boundary_form(tail, nu, s.kappa, s.w1 + kBlendHalfWidth);
    tail_part = (1.0 - t) * saddle_form + t * boundary_form;
  }
  return body_part + sev.omega * tail_part;
}

CutKernelDiagnostics spliced_kernel_diagnostics(const SplicedSeverity& sev,
                                                double x) {
  const LognormalTail& tail = require_lognormal(sev);
  CutKernelDiagnostics d;
  if (sev.omega == 0.0) {
    d.regime = "series";
    return d;
  }
  const SaddleEval s = lognormal_saddles(tail.mu, tail.sigma, x);
  d.evaluations = 1;
  const double sigma2 = tail.sigma * tail.sigma;
  // Magnitude bound for the saddle contributions the order-1 kernels drop
  // (next shifted saddle, suppressed by exp(-(w2^2 - pi^2)/(2 sigma^2))).
  d.suppressed_terms_bound =
      tail.sigma / (2.0 * kSqrt2Pi * s.w2) *
      std::exp(-s.w2 / sigma2 - (s.w2 * s.w2 - kPi * kPi) / (2.0 * sigma2));
  if (sev.x0 <= 0.0) {
    d.regime = "saddle";
    return d;
  }
  const double w0bar = std::log(sev.x0) - tail.mu;
  if (w0bar <= s.w1 - kBlendHalfWidth)
    d.regime = "saddle";
  else if (w0bar >= s.w1 + kBlendHalfWidth)
    d.regime = "boundary";
  else
    d.regime = "blend";
  return d;
}

}  // namespace heavytail
