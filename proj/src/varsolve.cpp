#include "heavytail/varsolve.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>

#include "heavytail/errors.hpp"
#include "heavytail/specfun.hpp"

namespace heavytail {

namespace {

double model_lamT(const CompoundModel& m) {
  if (!(m.frequency.lambda > 0.0) || !(m.frequency.horizon > 0.0))
    throw DomainError("frequency requires lambda > 0 and horizon > 0");
  return m.frequency.lambda * m.frequency.horizon;
}

// Smallest s the cut representation can evaluate for one unit.
double min_valid_s(const CompoundModel& m) {
  if (std::holds_alternative<ParetoTail>(m.severity.tail))
    return 2.0 * m.severity.x0 * (1.0 + 1e-9);
  const auto& t = std::get<LognormalTail>(m.severity.tail);
  double w_min = 1.0 + 2e-3;
  if (m.severity.x0 > 0.0)
    w_min = std::max(w_min, std::log(m.severity.x0) - t.mu + 2.0 + 1e-6);
  return std::exp(t.mu + w_min);
}

double seed_for_unit(const CompoundModel& m, double p) {
  const double lamT = model_lamT(m);
  const double omega = m.severity.omega;
  if (std::holds_alternative<ParetoTail>(m.severity.tail)) {
    if (omega > 0.0 && p < omega * lamT) return initial_guess(m, p);
    return 2.5 * m.severity.x0;
  }
  const auto& t = std::get<LognormalTail>(m.severity.tail);
  double z = 1.0;
  if (omega > 0.0) {
    const double q = std::min(0.4, p / (omega * lamT));
    z = std::max(z, specfun::normal_quantile(1.0 - q));
  }
  return std::max(std::exp(t.mu + t.sigma * z), min_valid_s(m) * 1.0001);
}

struct TailFn {
  const VarQuery& q;
  long long evals = 0;
  double floor_s = 0.0;  // below this the representation throws

  explicit TailFn(const VarQuery& query) : q(query) {
    if (const auto* m = std::get_if<CompoundModel>(&q.model)) {
      floor_s = min_valid_s(*m);
    } else {
      const auto& pf = std::get<Portfolio>(q.model);
      if (pf.units.empty()) throw EmptyPortfolio("solve_var: no units");
      for (const CompoundModel& u : pf.units)
        floor_s = std::max(floor_s, min_valid_s(u));
    }
  }

  double seed(double p) const {
    double s0 = 0.0;
    if (const auto* m = std::get_if<CompoundModel>(&q.model)) {
      s0 = seed_for_unit(*m, p);
    } else {
      for (const CompoundModel& u : std::get<Portfolio>(q.model).units)
        s0 = std::max(s0, seed_for_unit(u, p));
    }
    return std::max(s0, floor_s * 1.0001);
  }

  // nullopt = s below the representable range (treated as tail ~ 1).
  std::optional<double> operator()(double s) {
    ++evals;
    try {
      if (const auto* m = std::get_if<CompoundModel>(&q.model))
        return tail_compound(*m, s, q.quad, q.include_poisson_term).prob;
      return tail_portfolio(std::get<Portfolio>(q.model), s, q.quad,
                            q.include_poisson_term)
          .prob;
    } catch (const DomainError&) {
      if (s <= floor_s * 1.01) return std::nullopt;
      throw;
    }
  }
};

double log_gap(double tail, double p) {
  return std::log(std::max(tail, 1e-320)) - std::log(p);
}

}  // namespace

double initial_guess(const CompoundModel& pareto_model, double p_tail) {
  validate(pareto_model.severity);
  const auto* t = std::get_if<ParetoTail>(&pareto_model.severity.tail);
  if (!t) throw InvalidSeverity("initial_guess: expected a Pareto tail");
  const double L = pareto_model.severity.omega * model_lamT(pareto_model);
  if (!(p_tail > 0.0) || !(p_tail < L))
    throw DomainError(
        "initial_guess: target tail probability must lie in (0, omega "
        "lambda T)");
  return pareto_model.severity.x0 *
         std::exp(std::log(L / p_tail) / (t->alpha - 1.0));
}

VarResult solve_var(const VarQuery& query) {
  if (!(query.confidence > 0.5) || !(query.confidence < 1.0))
    throw DomainError("solve_var: confidence must lie in (0.5, 1)");
  if (!(query.tol_rel > 0.0) || !(query.tol_rel < 0.5))
    throw DomainError("solve_var: tol_rel must lie in (0, 0.5)");
  const double p = 1.0 - query.confidence;

  TailFn tail(query);
  int iterations = 0;

  // Bracket in t = ln s: g(t) = ln tail(e^t) - ln p, g decreasing, want a sign
  // change g(tlo) >= 0 >= g(thi).
  double t0 = std::log(tail.seed(p));
  auto g_at = [&](double t) -> double {
    const std::optional<double> v = tail(std::exp(t));
    return v ? log_gap(*v, p)
             : std::numeric_limits<double>::infinity();  // below range: tail~1
  };

  const double kStep = std::log(4.0);
  double tlo = t0, thi = t0;
  double glo = g_at(t0), ghi = glo;
  const double t_floor = std::log(tail.floor_s);
  for (int i = 0; glo < 0.0 && i < 60; ++i) {
    // Seed overshot: walk down, but not below the representable range.
    thi = tlo;
    ghi = glo;
    if (tlo <= t_floor + 1e-12)
      throw BracketFailure(
          "solve_var: tail probability at the smallest representable s is "
          "already below the target; the quantile is not in the heavy-tail "
          "regime");
    tlo = std::max(tlo - kStep, t_floor + 1e-12);
    glo = g_at(tlo);
  }
  for (int i = 0; ghi >= 0.0 && i < 60; ++i) {
    tlo = thi;
    glo = ghi;
    thi += kStep;
    ghi = g_at(thi);
  }
  if (glo < 0.0 || ghi >= 0.0)
    throw BracketFailure("solve_var: could not bracket the target quantile");

  // Monotonicity guard across the bracket.
  {
    std::vector<std::pair<double, double>> samples;
    for (int i = 0; i <= 4; ++i) {
      const double t = tlo + (thi - tlo) * i / 4.0;
      const std::optional<double> v = tail(std::exp(t));
      if (v) samples.emplace_back(std::exp(t), *v);
    }
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
      if (samples[i + 1].second >
          samples[i].second * (1.0 + 1e-9) + 1e-300) {
        std::ostringstream msg;
        msg << "solve_var: tail is not decreasing across the bracket:";
        for (const auto& [s, v] : samples) msg << " P(S>" << s << ")=" << v;
        throw NonMonotoneTail(msg.str());
      }
    }
  }

  // Safeguarded secant on g(t) within [tlo, thi].
  double ta = tlo, ga = glo, tb = thi, gb = ghi;
  double t_best = tb, tail_best = std::exp(gb) * p;
  for (iterations = 1; iterations <= 100; ++iterations) {
    double tn;
    if (std::isfinite(ga) && std::isfinite(gb) && gb != ga) {
      tn = tb - gb * (tb - ta) / (gb - ga);
      if (!(tn > tlo) || !(tn < thi)) tn = 0.5 * (tlo + thi);
    } else {
      tn = 0.5 * (tlo + thi);
    }
    const std::optional<double> v = tail(std::exp(tn));
    const double gn = v ? log_gap(*v, p) : std::numeric_limits<double>::infinity();
    if (v) {
      t_best = tn;
      tail_best = *v;
      if (std::fabs(*v - p) <= query.tol_rel * p) {
        VarResult r;
        r.var = std::exp(tn);
        r.tail_at_var = *v;
        r.iterations = iterations;
        r.tail_evaluations = tail.evals;
        return r;
      }
    }
    if (gn >= 0.0) {
      tlo = tn;
      glo = gn;
    } else {
      thi = tn;
      ghi = gn;
    }
    ta = tb;
    ga = gb;
    tb = tn;
    gb = gn;
    if (thi - tlo < 1e-14 * std::max(1.0, std::fabs(thi))) {
      VarResult r;
      r.var = std::exp(t_best);
      r.tail_at_var = tail_best;
      r.iterations = iterations;
      r.tail_evaluations = tail.evals;
      return r;
    }
  }
  throw NonConvergence(
      "solve_var: no convergence after 100 iterations; best s = " +
      std::to_string(std::exp(t_best)));
}

}  // namespace heavytail
