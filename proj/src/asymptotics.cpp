#include "heavytail/asymptotics.hpp"

#include <cmath>
#include <limits>

#include "heavytail/errors.hpp"
#include "heavytail/severity.hpp"
#include "heavytail/specfun.hpp"

namespace heavytail {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSingularAlphas[] = {1.5, 2.0, 2.5, 3.0};
}  // namespace

AsymptoticExpansion expand_compound_pareto(const CompoundModel& model) {
  validate(model.severity);
  const auto* tail = std::get_if<ParetoTail>(&model.severity.tail);
  if (!tail)
    throw InvalidSeverity("expand_compound_pareto: expected a Pareto tail");
  const double alpha = tail->alpha;
  for (double v : kSingularAlphas)
    if (std::fabs(alpha - v) < 1e-6)
      throw AlphaNearSingular(
          "expansion coefficients are singular at alpha = " +
          std::to_string(v));
  if (!(model.frequency.lambda > 0.0) || !(model.frequency.horizon > 0.0))
    throw DomainError("frequency requires lambda > 0 and horizon > 0");

  const double omega = model.severity.omega;
  const double lamT = model.frequency.lambda * model.frequency.horizon;
  const double L = omega * lamT;
  const double m1 = body_m1(model.severity.body, model.severity.x0);
  const double m2 = body_m2(model.severity.body, model.severity.x0);

  AsymptoticExpansion ex;
  ex.x0 = model.severity.x0;
  ex.c1 = omega * (1.0 - alpha) / (2.0 - alpha) + (1.0 - omega) * m1;
  ex.c2 = 0.5 * omega * (1.0 - alpha) / (3.0 - alpha) + (1.0 - omega) * m2;
  ex.leading_coeff = L;
  ex.exponents[0] = alpha - 1.0;
  ex.exponents[1] = 2.0 * (alpha - 1.0);
  ex.exponents[2] = alpha;
  ex.exponents[3] = 3.0 * (alpha - 1.0);
  ex.exponents[4] = 2.0 * alpha - 1.0;
  ex.exponents[5] = alpha + 1.0;

  const double g2m = specfun::gamma(2.0 - alpha);
  ex.a[0] = -0.5 * L * L * g2m * g2m * specfun::rgamma(3.0 - 2.0 * alpha);
  ex.a[1] = omega * lamT * lamT * (alpha - 1.0) * ex.c1;
  const double rg = specfun::rgamma(alpha - 1.0);
  ex.a[2] = -(kPi * kPi / 6.0) * specfun::gamma(3.0 * alpha - 3.0) *
            (L * rg) * (L * rg) * (L * rg);
  ex.a[3] = 0.5 * L * L * lamT * ex.c1 * g2m * g2m *
            specfun::rgamma(2.0 - 2.0 * alpha);
  ex.a[4] = omega * lamT * lamT * alpha * (alpha - 1.0) *
            (ex.c2 + 0.5 * lamT * ex.c1 * ex.c1);

  ex.leading_correction = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 5; ++i) {
    if (ex.a[i] == 0.0) continue;
    if (ex.exponents[i + 1] < best) {
      best = ex.exponents[i + 1];
      ex.leading_correction = i + 1;
    }
  }
  return ex;
}

double eval_expansion(const AsymptoticExpansion& ex, double s, int n_terms) {
  if (n_terms < 1 || n_terms > 6)
    throw DomainError("eval_expansion: n_terms must be in 1..6");
  if (!(ex.x0 > 0.0) || !(s > ex.x0))
    throw DomainError("eval_expansion: need s > x0 > 0");
  const double ls = std::log(s / ex.x0);
  double sum = ex.leading_coeff * std::exp(-ex.exponents[0] * ls);
  for (int i = 0; i + 1 < n_terms; ++i)
    sum += ex.a[i] * std::exp(-ex.exponents[i + 1] * ls);
  return sum;
}

double lognormal_single_asymptotic(double mu, double sigma, double s) {
  if (!(sigma > 0.0) || !(s > 0.0))
    throw DomainError("lognormal_single_asymptotic: need sigma > 0, s > 0");
  const double w = std::log(s) - mu;
  if (!(w >= 2.0 * sigma))
    throw DomainError(
        "lognormal_single_asymptotic: need ln(s) - mu >= 2 sigma");
  return sigma / (std::sqrt(2.0 * kPi) * w) *
         std::exp(-0.5 * w * w / (sigma * sigma));
}

double poisson_tail_cramer(double rate, long long n) {
  if (!(rate > 0.0)) throw DomainError("poisson_tail_cramer: need rate > 0");
  if (n < 0) throw DomainError("poisson_tail_cramer: need n >= 0");
  return std::exp(-static_cast<double>(n) * (rate - std::log(rate) - 1.0));
}

}  // namespace heavytail
