#include "heavytail/severity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "heavytail/errors.hpp"
#include "heavytail/specfun.hpp"

namespace heavytail {

namespace {
constexpr double kSqrt2Pi = 2.50662827463100050242;
constexpr double kLogOverflow = 690.0;  // e^690 ~ 5e299, just under the 1e300 guard
}  // namespace

void validate(const SplicedSeverity& sev) {
  if (!(sev.omega >= 0.0 && sev.omega <= 1.0))
    throw InvalidSeverity("omega must lie in [0,1]");
  const bool pure_lognormal =
      std::holds_alternative<LognormalTail>(sev.tail) && sev.omega == 1.0;
  if (sev.x0 < 0.0 || (sev.x0 == 0.0 && !pure_lognormal))
    throw InvalidSeverity("x0 must be > 0 (x0 = 0 only for a pure lognormal)");
  if (const auto* u = std::get_if<UniformBody>(&sev.body)) {
    if (!(u->lo >= 0.0 && u->lo < u->hi))
      throw InvalidSeverity("uniform body needs 0 <= lo < hi");
    if (u->hi > sev.x0 * (1.0 + 1e-12))
      throw InvalidSeverity("uniform body support exceeds x0");
  } else if (const auto* p = std::get_if<PointMassBody>(&sev.body)) {
    if (!(p->at >= 0.0 && p->at <= sev.x0 * (1.0 + 1e-12)))
      throw InvalidSeverity("point-mass body outside [0, x0]");
  }
  if (const auto* t = std::get_if<ParetoTail>(&sev.tail)) {
    if (!(t->alpha > 1.0)) throw InvalidSeverity("pareto alpha must be > 1");
  } else if (const auto* l = std::get_if<LognormalTail>(&sev.tail)) {
    if (!(l->sigma > 0.0)) throw InvalidSeverity("lognormal sigma must be > 0");
  }
}

double lognormal_tail_nu(const LognormalTail& tail, double x0) {
  if (x0 <= 0.0) return 1.0;
  const double z = (std::log(x0) - tail.mu) / tail.sigma;
  const double p = specfun::normal_cdf(-z);  // P(LN > x0)
  if (p <= 0.0)
    throw InvalidSeverity("lognormal tail has no mass above x0");
  return 1.0 / p;
}

double pareto_ccdf(double alpha, double x0, double x) {
  if (!(alpha > 1.0) || !(x0 > 0.0))
    throw DomainError("pareto_ccdf: need alpha > 1, x0 > 0");
  if (x <= x0) return 1.0;
  return std::exp(-(alpha - 1.0) * std::log(x / x0));
}

double body_mgf_neg(const BodyModel& body, double y, double x0) {
  if (!(x0 > 0.0)) throw InvalidSeverity("body_mgf_neg: x0 must be > 0");
  if (const auto* m = std::get_if<MomentBody>(&body)) {
    return 1.0 + m->m1 * y + m->m2 * y * y;
  }
  if (const auto* u = std::get_if<UniformBody>(&body)) {
    if (y == 0.0) return 1.0;
    const double a = y * u->lo / x0, b = y * u->hi / x0;
    const double mid = 0.5 * (a + b), h = 0.5 * (b - a);
    // (e^b - e^a)/(b - a) = e^mid sinh(h)/h, stable for small h.
    const double sinhc = (std::fabs(h) < 1e-5)
                             ? 1.0 + h * h / 6.0
                             : std::sinh(h) / h;
    if (mid + std::log(sinhc) > kLogOverflow)
      throw OverflowGuard("body_mgf_neg: uniform body MGF exceeds 1e300");
    return std::exp(mid) * sinhc;
  }
  const auto& p = std::get<PointMassBody>(body);
  const double e = y * p.at / x0;
  if (e > kLogOverflow)
    throw OverflowGuard("body_mgf_neg: point-mass MGF exceeds 1e300");
  return std::exp(e);
}

double body_m1(const BodyModel& body, double x0) {
  if (!(x0 > 0.0)) throw InvalidSeverity("body_m1: x0 must be > 0");
  if (const auto* m = std::get_if<MomentBody>(&body)) return m->m1;
  if (const auto* u = std::get_if<UniformBody>(&body))
    return 0.5 * (u->lo + u->hi) / x0;
  return std::get<PointMassBody>(body).at / x0;
}

double body_m2(const BodyModel& body, double x0) {
  if (!(x0 > 0.0)) throw InvalidSeverity("body_m2: x0 must be > 0");
  if (const auto* m = std::get_if<MomentBody>(&body)) return m->m2;
  if (const auto* u = std::get_if<UniformBody>(&body)) {
    const double ex2 = (u->lo * u->lo + u->lo * u->hi + u->hi * u->hi) / 3.0;
    return 0.5 * ex2 / (x0 * x0);
  }
  const double at = std::get<PointMassBody>(body).at;
  return 0.5 * at * at / (x0 * x0);
}

double junction_residual(const SplicedSeverity& sev) {
  validate(sev);
  double f_body;
  if (const auto* u = std::get_if<UniformBody>(&sev.body)) {
    f_body = (sev.x0 >= u->lo && sev.x0 <= u->hi) ? 1.0 / (u->hi - u->lo) : 0.0;
  } else {
    throw DensityUnavailable(
        "junction_residual: body variant has no pointwise density");
  }
  double f_tail;
  if (const auto* t = std::get_if<ParetoTail>(&sev.tail)) {
    f_tail = (t->alpha - 1.0) / sev.x0;
  } else {
    const auto& l = std::get<LognormalTail>(sev.tail);
    const double nu = lognormal_tail_nu(l, sev.x0);
    const double z = (std::log(sev.x0) - l.mu) / l.sigma;
    f_tail = nu * std::exp(-0.5 * z * z) / (kSqrt2Pi * l.sigma * sev.x0);
  }
  return (1.0 - sev.omega) * f_body - sev.omega * f_tail;
}

double alpha_mle(double sum_log_ratios, long long n) {
  if (n < 1) throw DomainError("alpha_mle: need n >= 1");
  if (!(sum_log_ratios > 0.0))
    throw DegenerateData("alpha_mle: sum of log exceedance ratios is zero");
  return 1.0 + static_cast<double>(n) / sum_log_ratios;
}

AlphaFit fit_alpha(const std::vector<double>& losses, double x0) {
  if (losses.empty()) throw EmptyData("fit_alpha: no observations");
  if (!(x0 > 0.0)) throw DomainError("fit_alpha: x0 must be > 0");
  double sum = 0.0;
  long long n = 0, at_threshold = 0;
  for (const double x : losses) {
    if (x > x0) {
      sum += std::log(x / x0);
      ++n;
    } else if (x == x0) {
      ++at_threshold;
    }
  }
  if (n < 2) {
    if (at_threshold >= 2)
      throw DegenerateData("fit_alpha: exceedances all equal the threshold");
    throw InsufficientTailData("fit_alpha: fewer than 2 losses above x0");
  }
  AlphaFit fit;
  fit.alpha = alpha_mle(sum, n);
  fit.n_tail = n;
  fit.std_err = (fit.alpha - 1.0) / std::sqrt(static_cast<double>(n));
  return fit;
}

double fit_omega(const std::vector<double>& losses, double x0) {
  if (losses.empty()) throw EmptyData("fit_omega: no observations");
  long long n = 0;
  for (const double x : losses)
    if (x > x0) ++n;  // ties at x0 count as body
  return static_cast<double>(n) / static_cast<double>(losses.size());
}

std::vector<double> load_losses_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<double> out;
  std::string line;
  bool first_content_line = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Trim surrounding whitespace and any trailing CR.
    const auto b = line.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r\n");
    const std::string tok = line.substr(b, e - b + 1);
    double v;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec == std::errc() && res.ptr == tok.data() + tok.size()) {
      out.push_back(v);
    } else if (first_content_line) {
      // One non-numeric header line is permitted.
    } else {
      throw IoError("unparsable value at line " + std::to_string(lineno) +
                    " of '" + path + "'");
    }
    first_content_line = false;
  }
  return out;
}

}  // namespace heavytail
