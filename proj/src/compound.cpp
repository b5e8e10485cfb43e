#include "heavytail/compound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heavytail/errors.hpp"
#include "heavytail/specfun.hpp"

namespace heavytail {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

double lamT(const CompoundModel& m) {
  if (!(m.frequency.lambda > 0.0) || !(m.frequency.horizon > 0.0))
    throw DomainError("frequency requires lambda > 0 and horizon > 0");
  return m.frequency.lambda * m.frequency.horizon;
}

// Aggregate cut kernel of one or more compound units evaluated at the same
// transform point x: exponent(x) = -s x + sum_i lamT_i (Re_i(x) - 1) and
// phase(x) = sum_i lamT_i Im_i(x) <= 0. In single-loss mode the weights are
// dropped and the integrand is linear in Im instead of exponentiated.
class AggregateKernel {
 public:
  AggregateKernel(std::vector<const CompoundModel*> units, double s,
                  bool single_loss)
      : units_(std::move(units)), s_(s), single_loss_(single_loss) {
    for (const CompoundModel* u : units_) {
      validate(u->severity);
      const double lt = single_loss_ ? 1.0 : lamT(*u);
      if (const auto* t = std::get_if<ParetoTail>(&u->severity.tail)) {
        bool perturbed = false;
        // Single-loss Pareto kernels are pole-free; compounds go through psi
        // which perturbs integer alpha.
        double a = t->alpha;
        if (!single_loss_) {
          const double n = std::nearbyint(a);
          if (n >= 2.0 && std::fabs(a - n) < 1e-9) {
            a = n + 1e-6;
            perturbed = true;
          }
        }
        alpha_perturbed_ = alpha_perturbed_ || perturbed;
        pareto_.push_back({u, lt, a});
      } else {
        logn_.push_back({u, lt});
      }
    }
  }

  bool alpha_perturbed() const { return alpha_perturbed_; }
  bool has_pareto() const { return !pareto_.empty(); }
  bool has_lognormal() const { return !logn_.empty(); }
  bool pure_body() const {
    for (const auto& p : pareto_)
      if (p.unit->severity.omega > 0.0) return false;
    for (const auto& l : logn_)
      if (l.unit->severity.omega > 0.0) return false;
    return true;
  }

  double phase(double x) const {
    double im = 0.0;
    for (const auto& p : pareto_) {
      const SplicedSeverity& sev = p.unit->severity;
      im -= p.lamT * kPi * sev.omega * specfun::rgamma(p.alpha_eff - 1.0) *
            std::exp((p.alpha_eff - 1.0) * std::log(sev.x0 * x));
    }
    for (const auto& l : logn_)
      im += l.lamT * im_mgf_spliced_lognormal(l.unit->severity, x);
    return im;
  }

  double exponent(double x) const {
    double e = -s_ * x;
    for (const auto& p : pareto_)
      e += p.lamT * psi(p.unit->severity, x);
    for (const auto& l : logn_)
      e += l.lamT * (re_mgf_spliced_lognormal(l.unit->severity, x) - 1.0);
    return e;
  }

  double integrand(double x) const {
    if (single_loss_)
      return -std::exp(-s_ * x) * phase(x) / (kPi * x);
    const double ph = phase(x);
    if (ph == 0.0) return 0.0;
    return -std::exp(exponent(x)) * std::sin(ph) / (kPi * x);
  }

  // Smooth magnitude bound used by the cutoff scan; +inf marks kernel
  // breakdown or overflow beyond this point.
  double log_envelope(double x) const {
    try {
      const double ph = phase(x);
      const double lsin =
          std::log(std::min(1.0, std::fabs(ph)));  // -inf when phase == 0
      const double e = single_loss_ ? -s_ * x : exponent(x);
      return e + lsin - std::log(x) - 1.1447298858494002;  // ln(pi)
    } catch (const Error&) {
      return kInf;
    }
  }

  // Model-imposed upper bound on x: the Pareto floor split y = n0 and the
  // lognormal branch-point / separation bounds.
  double hard_cutoff(long long pareto_n0) const {
    double hard = kInf;
    if (pareto_n0 >= 0) {
      double x0min = kInf;
      for (const auto& p : pareto_) x0min = std::min(x0min, p.unit->severity.x0);
      hard = std::min(hard, static_cast<double>(pareto_n0) / x0min);
    }
    for (const auto& l : logn_) {
      const auto& t = std::get<LognormalTail>(l.unit->severity.tail);
      double w2h = 1.0 + 1e-3;
      if (l.unit->severity.x0 > 0.0)
        w2h = std::max(w2h, (std::log(l.unit->severity.x0) - t.mu) + 2.0);
      const double sigma2 = t.sigma * t.sigma;
      hard = std::min(hard, w2h * std::exp(-w2h) / (sigma2 * std::exp(t.mu)));
    }
    return hard;
  }

  double anchor() const {
    double a = kInf;
    for (const auto& p : pareto_)
      a = std::min(a, std::max(p.alpha_eff - 1.0, 0.5) / s_);
    for (const auto& l : logn_) {
      const auto& t = std::get<LognormalTail>(l.unit->severity.tail);
      const double w0 = std::log(s_) - t.mu;
      if (!(w0 > 1.0 + 1e-3))
        throw DomainError(
            "lognormal cut representation needs ln(s) - mu > 1; got w0 = " +
            std::to_string(w0));
      const double sigma2 = t.sigma * t.sigma;
      a = std::min(a, w0 * std::exp(-w0) / (sigma2 * std::exp(t.mu)));
    }
    return a;
  }

  // Probe the kernels at the integrand peak so representation violations
  // (separation, saddle proximity) surface before any integration begins.
  void probe(double x) const {
    for (const auto& l : logn_) {
      (void)im_mgf_spliced_lognormal(l.unit->severity, x);
      (void)re_mgf_spliced_lognormal(l.unit->severity, x);
    }
  }

  // Ascending zeros of the sine phase below `limit` (at most `cap`).
  std::vector<double> phase_zeros(double limit, int cap) const {
    std::vector<double> zeros;
    if (single_loss_ || pure_body()) return zeros;
    if (pareto_.size() == 1 && logn_.empty()) {
      // Closed form for a single Pareto unit.
      const auto& p = pareto_.front();
      const SplicedSeverity& sev = p.unit->severity;
      if (sev.omega == 0.0) return zeros;
      const double a1 = p.alpha_eff - 1.0;
      const double g = specfun::gamma(a1);
      for (int k = 1; k <= cap; ++k) {
        const double y = std::exp(std::log(k * g / (sev.omega * p.lamT)) / a1);
        const double x = y / sev.x0;
        if (x >= limit) break;
        zeros.push_back(x);
      }
      return zeros;
    }
    // General case: |phase| is strictly increasing in x, bisect each level.
    // Kernel breakdown at the far end reads as a diverged phase.
    const auto A = [&](double x) {
      try {
        return -phase(x);
      } catch (const Error&) {
        return kInf;
      }
    };
    double lo = std::min(anchor(), limit) * 1e-8;
    for (int k = 1; k <= cap; ++k) {
      const double level = k * kPi;
      double hi = std::max(lo * 2.0, std::min(anchor(), limit));
      bool bracketed = false;
      for (int i = 0; i < 200 && hi < limit; ++i) {
        if (A(hi) >= level) {
          bracketed = true;
          break;
        }
        hi = std::min(hi * 2.0, limit);
      }
      if (!bracketed && A(std::nextafter(limit, 0.0)) < level) break;
      double a = lo, b = std::min(hi, std::nextafter(limit, 0.0));
      for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (a + b);
        (A(mid) < level ? a : b) = mid;
      }
      zeros.push_back(0.5 * (a + b));
      lo = zeros.back();
    }
    return zeros;
  }

 private:
  struct ParetoUnit {
    const CompoundModel* unit;
    double lamT;
    double alpha_eff;
  };
  struct LognUnit {
    const CompoundModel* unit;
    double lamT;
  };
  std::vector<const CompoundModel*> units_;
  double s_;
  bool single_loss_;
  bool alpha_perturbed_ = false;
  std::vector<ParetoUnit> pareto_;
  std::vector<LognUnit> logn_;
};

TailResult run_engine(const AggregateKernel& kernel, double s,
                      const QuadratureSpec& spec, long long n0,
                      double poisson_term,
                      std::vector<std::string> extra_warnings) {
  HalflineOptions opt;
  opt.anchor = kernel.anchor();
  const double hard = kernel.hard_cutoff(n0);
  if (std::isfinite(hard)) {
    opt.hard_cutoff = hard;
    if (opt.anchor >= hard)
      throw DomainError(
          "integrand peak lies beyond the representation bound; s = " +
          std::to_string(s) + " is too small for this model");
  }
  kernel.probe(opt.anchor);
  opt.log_envelope = [&kernel](double x) { return kernel.log_envelope(x); };
  opt.breakpoints =
      kernel.phase_zeros(std::isfinite(hard) ? hard : 1e300, 512);

  HalflineResult hr = integrate_halfline(
      [&kernel](double x) { return kernel.integrand(x); }, spec, opt);

  TailResult r;
  r.raw_value = hr.value + poisson_term;
  r.prob = r.raw_value;
  r.abs_err_estimate = hr.abs_err;
  r.cutoff_used = hr.cutoff_used;
  r.n_evaluations = hr.n_evaluations;
  r.warnings = std::move(hr.warnings);
  for (auto& w : extra_warnings) r.warnings.push_back(std::move(w));
  if (kernel.alpha_perturbed()) r.warnings.push_back("alpha_perturbed");
  r.n0 = n0;
  r.poisson_term = poisson_term;
  if (r.prob < 0.0) {
    r.prob = 0.0;
    r.warnings.push_back("ClampedBelow");
  } else if (r.prob > 1.0) {
    r.prob = 1.0;
    r.warnings.push_back("ClampedAbove");
  }
  return r;
}

const ParetoTail& pareto_tail_of(const SplicedSeverity& sev) {
  const auto* t = std::get_if<ParetoTail>(&sev.tail);
  if (!t) throw InvalidSeverity("expected a Pareto-tailed severity");
  return *t;
}

const LognormalTail& lognormal_tail_of(const SplicedSeverity& sev) {
  const auto* t = std::get_if<LognormalTail>(&sev.tail);
  if (!t) throw InvalidSeverity("expected a lognormal-tailed severity");
  return *t;
}

// Saddle diagnostics at the integrand peak for lognormal models.
void fill_lognormal_diagnostics(TailResult& r, const SplicedSeverity& sev,
                                double s) {
  const LognormalTail& t = lognormal_tail_of(sev);
  const double w0 = std::log(s) - t.mu;
  r.peak_w2 = w0;
  const double sigma2 = t.sigma * t.sigma;
  const double x_peak = w0 * std::exp(-w0) / (sigma2 * std::exp(t.mu));
  const CutKernelDiagnostics d = spliced_kernel_diagnostics(sev, x_peak);
  r.kernel_regime = d.regime;
  r.suppressed_terms_bound = d.suppressed_terms_bound;
}

}  // namespace

TailResult tail_single(const SplicedSeverity& sev, double s,
                       const QuadratureSpec& spec) {
  validate(sev);
  if (std::holds_alternative<ParetoTail>(sev.tail)) {
    if (!(s > sev.x0))
      throw DomainError("tail_single: need s > x0 for a Pareto tail");
  } else {
    if (!(s > 0.0)) throw DomainError("tail_single: need s > 0");
  }
  if (sev.omega == 0.0) {
    TailResult r;
    r.warnings.push_back("NoCutDiscontinuity");
    return r;
  }
  CompoundModel unit{sev, Frequency{1.0, 1.0}};
  AggregateKernel kernel({&unit}, s, /*single_loss=*/true);
  TailResult r = run_engine(kernel, s, spec, -1, 0.0, {});
  if (std::holds_alternative<LognormalTail>(sev.tail))
    fill_lognormal_diagnostics(r, sev, s);
  return r;
}

TailResult tail_compound_pareto(const CompoundModel& model, double s,
                                const QuadratureSpec& spec,
                                bool include_poisson_term) {
  validate(model.severity);
  pareto_tail_of(model.severity);
  if (!(s >= 2.0 * model.severity.x0))
    throw DomainError("tail_compound_pareto: need s >= 2 x0");
  const long long n0 = static_cast<long long>(std::floor(s / model.severity.x0));
  const double term =
      include_poisson_term ? specfun::poisson_tail_exact(lamT(model), n0) : 0.0;
  std::vector<std::string> warn;
  if (model.severity.omega == 0.0) warn.push_back("NoCutDiscontinuity");
  AggregateKernel kernel({&model}, s, /*single_loss=*/false);
  return run_engine(kernel, s, spec, n0, term, std::move(warn));
}

TailResult tail_compound_lognormal(const CompoundModel& model, double s,
                                   const QuadratureSpec& spec) {
  validate(model.severity);
  lognormal_tail_of(model.severity);
  if (!(s > 0.0)) throw DomainError("tail_compound_lognormal: need s > 0");
  if (model.severity.omega == 0.0) {
    TailResult r;
    r.warnings.push_back("NoCutDiscontinuity");
    return r;
  }
  AggregateKernel kernel({&model}, s, /*single_loss=*/false);
  TailResult r = run_engine(kernel, s, spec, -1, 0.0, {});
  fill_lognormal_diagnostics(r, model.severity, s);
  return r;
}

TailResult tail_compound(const CompoundModel& model, double s,
                         const QuadratureSpec& spec, bool include_poisson_term) {
  if (std::holds_alternative<ParetoTail>(model.severity.tail))
    return tail_compound_pareto(model, s, spec, include_poisson_term);
  return tail_compound_lognormal(model, s, spec);
}

namespace {

TailResult tail_portfolio_independent(const Portfolio& pf, double s,
                                      const QuadratureSpec& spec,
                                      bool include_poisson_term) {
  std::vector<const CompoundModel*> units;
  units.reserve(pf.units.size());
  double x0min_pareto = kInf;
  double lam_total = 0.0;
  for (const CompoundModel& u : pf.units) {
    validate(u.severity);
    lam_total += lamT(u);
    if (std::holds_alternative<ParetoTail>(u.severity.tail)) {
      if (!(s >= 2.0 * u.severity.x0))
        throw DomainError("tail_portfolio: need s >= 2 x0 for every Pareto unit");
      x0min_pareto = std::min(x0min_pareto, u.severity.x0);
    }
    units.push_back(&u);
  }
  long long n0 = -1;
  double term = 0.0;
  if (std::isfinite(x0min_pareto)) {
    n0 = static_cast<long long>(std::floor(s / x0min_pareto));
    if (include_poisson_term)
      term = specfun::poisson_tail_exact(lam_total, n0);
  }
  AggregateKernel kernel(units, s, /*single_loss=*/false);
  std::vector<std::string> warn;
  if (kernel.pure_body()) warn.push_back("NoCutDiscontinuity");
  return run_engine(kernel, s, spec, n0, term, std::move(warn));
}

}  // namespace

TailResult tail_portfolio(const Portfolio& pf, double s,
                          const QuadratureSpec& spec,
                          bool include_poisson_term) {
  if (pf.units.empty()) throw EmptyPortfolio("tail_portfolio: no units");
  if (pf.factor_grid.empty())
    return tail_portfolio_independent(pf, s, spec, include_poisson_term);

  double psum = 0.0;
  for (const FactorPoint& fp : pf.factor_grid) {
    if (!(fp.prob >= 0.0))
      throw DomainError("tail_portfolio: factor probabilities must be >= 0");
    if (fp.multipliers.size() != pf.units.size())
      throw DomainError(
          "tail_portfolio: factor multiplier count must match unit count");
    for (double m : fp.multipliers)
      if (!(m > 0.0))
        throw DomainError("tail_portfolio: factor multipliers must be > 0");
    psum += fp.prob;
  }
  if (std::fabs(psum - 1.0) > 1e-9)
    throw DomainError("tail_portfolio: factor probabilities must sum to 1");

  TailResult agg;
  agg.n0 = -1;
  bool first = true;
  for (const FactorPoint& fp : pf.factor_grid) {
    Portfolio scaled;
    scaled.units = pf.units;
    for (std::size_t i = 0; i < scaled.units.size(); ++i)
      scaled.units[i].frequency.lambda *= fp.multipliers[i];
    const TailResult r =
        tail_portfolio_independent(scaled, s, spec, include_poisson_term);
    agg.raw_value += fp.prob * r.raw_value;
    agg.abs_err_estimate += fp.prob * r.abs_err_estimate;
    agg.poisson_term += fp.prob * r.poisson_term;
    agg.n_evaluations += r.n_evaluations;
    agg.cutoff_used = std::max(agg.cutoff_used, r.cutoff_used);
    for (const std::string& w : r.warnings)
      if (std::find(agg.warnings.begin(), agg.warnings.end(), w) ==
          agg.warnings.end())
        agg.warnings.push_back(w);
    if (first) {
      agg.n0 = r.n0;
      first = false;
    }
  }
  agg.prob = std::clamp(agg.raw_value, 0.0, 1.0);
  if (agg.prob != agg.raw_value)
    agg.warnings.push_back(agg.raw_value < 0.0 ? "ClampedBelow" : "ClampedAbove");
  return agg;
}

}  // namespace heavytail
