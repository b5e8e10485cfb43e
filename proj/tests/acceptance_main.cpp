// Acceptance gate: ten numbered end-to-end checks, one verdict line each
// (indented lines carry the measured evidence). Run with no argument for the
// full battery or with a single number to run one check. The exit status is
// the number of failed checks.
//
// Two checks are expected to fail and are reported with the measurements
// that show why; see the README for the analysis. Nothing here loosens a
// target to make a line turn green.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "heavytail/asymptotics.hpp"
#include "heavytail/compound.hpp"
#include "heavytail/mc_oracle.hpp"
#include "heavytail/specfun.hpp"
#include "heavytail/varsolve.hpp"

namespace ht = heavytail;
namespace sf = heavytail::specfun;

namespace {

constexpr double kPi = 3.14159265358979323846;

double rel(double got, double want) {
  return std::fabs(got - want) / std::fabs(want);
}

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }
};

struct Report {
  std::vector<std::string> lines;
  void add(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    lines.emplace_back(buf);
  }
  void flush() const {
    for (const auto& l : lines) std::printf("      %s\n", l.c_str());
  }
};

void verdict(int n, bool pass, const std::string& text, const Report& rep) {
  std::printf("[%2d] %s  %s\n", n, pass ? "PASS" : "FAIL", text.c_str());
  rep.flush();
  std::fflush(stdout);
}

ht::SplicedSeverity pareto_sev(double omega, double x0, double alpha,
                               double body_lo, double body_hi) {
  ht::SplicedSeverity sev;
  sev.omega = omega;
  sev.x0 = x0;
  sev.body = ht::UniformBody{body_lo, body_hi};
  sev.tail = ht::ParetoTail{alpha};
  return sev;
}

// The reference Pareto model everywhere below: uniform body on [4e4, 1e5],
// x0 = 1e5, alpha = 2.2, omega = 0.35, lambda T = 20.
ht::CompoundModel ub_model(double lam_t = 20.0) {
  return ht::CompoundModel{pareto_sev(0.35, 1e5, 2.2, 4e4, 1e5),
                           ht::Frequency{lam_t, 1.0}};
}

ht::CompoundModel lognormal_model() {
  ht::SplicedSeverity sev;
  sev.omega = 1.0;
  sev.x0 = 0.0;
  sev.body = ht::PointMassBody{0.0};
  sev.tail = ht::LognormalTail{10.0, 2.0};
  return ht::CompoundModel{sev, ht::Frequency{5.0, 1.0}};
}

// ---------------------------------------------------------------------------

bool criterion1() {
  Stopwatch sw;
  const double alphas[] = {1.5, 2.2, 3.5};
  const double shats[] = {2.0, 10.0, 100.0};
  const double omegas[] = {0.35, 1.0};
  const double x0 = 1e5;
  double worst = 0.0;
  for (double a : alphas)
    for (double om : omegas)
      for (double sh : shats) {
        const auto sev = pareto_sev(om, x0, a, 4e4, x0);
        const double got = ht::tail_single(sev, sh * x0).prob;
        const double want = om * std::pow(sh, -(a - 1.0));
        worst = std::max(worst, rel(got, want));
      }
  const double ms = sw.ms();
  Report rep;
  rep.add("grid: alpha {1.5, 2.2, 3.5} x shat {2, 10, 100} x omega {0.35, 1}");
  rep.add("max rel err %.3e (tolerance 1e-6), runtime %.0f ms (< 1000)",
          worst, ms);
  const bool pass = worst <= 1e-6 && ms < 1000.0;
  verdict(1, pass, "single-loss Pareto tail reproduces the closed form", rep);
  return pass;
}

bool criterion2() {
  Stopwatch sw;
  const auto model = ub_model();
  ht::VarQuery q;
  q.model = model;
  q.confidence = 0.999;
  const ht::VarResult vr = ht::solve_var(q);
  // Propagate the tail-space error budget through the local Pareto slope
  // d ln tail / d ln s = -(alpha - 1).
  const double p = 1e-3;
  const ht::TailResult t = ht::tail_compound(model, vr.var);
  const double var_err =
      (t.abs_err_estimate + q.tol_rel * p) * vr.var / (1.2 * p);

  ht::McConfig mc;
  mc.n_paths = 1000000;
  mc.n_reps = 20;
  mc.seed = 4242;
  mc.percentile = 0.999;
  const ht::McEstimate est = ht::simulate_quantile(model, mc);
  const double ms = sw.ms();

  const bool inside = est.ci95_lo <= vr.var && vr.var <= est.ci95_hi;
  const double ratio = est.quantile_sd / var_err;
  Report rep;
  rep.add("quadrature 99.9%% VaR = %.8e  (error estimate %.2e)", vr.var,
          var_err);
  rep.add("MC (1e6 paths x 20 reps) = %.8e, 95%% CI [%.8e, %.8e]",
          est.quantile_mean, est.ci95_lo, est.ci95_hi);
  rep.add("rep-to-rep sd %.3e, sd / quadrature-error = %.1f (>= 10)",
          est.quantile_sd, ratio);
  rep.add("runtime %.1f s", ms / 1000.0);
  const bool pass = inside && ratio >= 10.0;
  verdict(2, pass, "quadrature VaR sits inside the Monte Carlo band", rep);
  return pass;
}

bool criterion3() {
  const auto model = ub_model();
  const auto exp6 = ht::expand_compound_pareto(model);
  const double quad100 = ht::tail_compound(model, 1e7).prob;
  const double quad1000 = ht::tail_compound(model, 1e8).prob;
  const double ser100 = ht::eval_expansion(exp6, 1e7, 6);
  const double ser1000 = ht::eval_expansion(exp6, 1e8, 6);
  const double gap100 = rel(ser100, quad100);
  const double gap1000 = rel(ser1000, quad1000);

  // Independent referee at shat = 100: plain-sampling Monte Carlo, which
  // sides with the quadrature and rules out an error on that side.
  ht::McConfig mc;
  mc.n_paths = 200000;
  mc.n_reps = 5;
  mc.seed = 99;
  const ht::McTailEstimate ref = ht::estimate_tail_prob(model, 1e7, mc);

  Report rep;
  rep.add("series (6 terms) at shat=100   = %.10e", ser100);
  rep.add("quadrature at shat=100         = %.10e", quad100);
  rep.add("MC referee at shat=100         = %.4e +- %.1e (3 sigma)", ref.prob,
          3.0 * ref.std_err);
  rep.add("rel gap: %.3e at shat=100 (target <= 1e-2), %.3e at shat=1000",
          gap100, gap1000);
  rep.add("decreasing-error clause: %s", gap1000 < gap100 ? "holds" : "VIOLATED");
  rep.add("the 6-term large-s expansion carries a genuine remainder of ~6%%");
  rep.add("of the tail at shat=100 (the quadrature matches both the");
  rep.add("arbitrary-precision oracle and the MC referee there), so the");
  rep.add("1e-2 band is unattainable at shat=100; it is reached by shat=1000.");
  const bool pass = gap100 <= 1e-2 && gap1000 < gap100;
  verdict(3, pass, "six-term series within 1e-2 of quadrature at shat=100",
          rep);
  return pass;
}

bool criterion4() {
  const auto model = ub_model();
  const double lead = 0.35 * 20.0;  // omega lambda T
  double dev[3];
  const double shats[] = {1e2, 1e3, 1e4};
  for (int i = 0; i < 3; ++i) {
    const double q = ht::tail_compound(model, shats[i] * 1e5).prob;
    dev[i] = std::fabs(q / (lead * std::pow(shats[i], -1.2)) - 1.0);
  }
  Report rep;
  rep.add("rel deviation from omega*lambda*T*shat^-(alpha-1):");
  rep.add("shat=1e2: %.4e   shat=1e3: %.4e   shat=1e4: %.4e", dev[0], dev[1],
          dev[2]);
  const bool pass = dev[1] < dev[0] && dev[2] < dev[1];
  verdict(4, pass, "single-loss decoupling law sharpens as shat grows", rep);
  return pass;
}

bool criterion5() {
  // Part A: order-1 cut-kernel quadrature of the pure lognormal single-loss
  // tail against the exact normal form.
  ht::SplicedSeverity sev;
  sev.omega = 1.0;
  sev.x0 = 0.0;
  sev.body = ht::PointMassBody{0.0};
  sev.tail = ht::LognormalTail{0.0, 1.0};
  const double q8 = ht::tail_single(sev, std::exp(8.0)).prob;
  const double q12 = ht::tail_single(sev, std::exp(12.0)).prob;
  const double r8 = rel(q8, sf::normal_cdf(-8.0));
  const double r12 = rel(q12, sf::normal_cdf(-12.0));

  // Part B: the closed-form saddle evaluation and the leading asymptotic
  // term are the same expression; spell out the saddle arrangement here and
  // demand 1e-15 agreement.
  double worst_b = 0.0;
  const double cases[][3] = {{0.0, 1.0, 8.0}, {0.0, 1.0, 12.0},
                             {3.0, 2.0, 10.0}};
  for (const auto& c : cases) {
    const double mu = c[0], sigma = c[1];
    const double s = std::exp(mu + c[2]);
    const double w = std::log(s) - mu;
    const double saddle = sigma / (std::sqrt(2.0 * kPi) * w) *
                          std::exp(-(w * w) / (2.0 * sigma * sigma));
    worst_b = std::max(
        worst_b, rel(saddle, ht::lognormal_single_asymptotic(mu, sigma, s)));
  }

  Report rep;
  rep.add("quadrature vs N(-w0/sigma): rel err %.4e at w0=8, %.4e at w0=12",
          r8, r12);
  rep.add("saddle formula vs leading asymptotic term: max rel dev %.2e "
          "(<= 1e-15)", worst_b);
  const bool pass = r8 <= 0.10 && r12 < r8 && worst_b <= 1e-15;
  verdict(5, pass, "lognormal single-loss quadrature and saddle identities",
          rep);
  return pass;
}

bool criterion6() {
  Stopwatch sw;
  const auto model = lognormal_model();

  ht::McConfig mc;
  mc.n_paths = 1000000;
  mc.n_reps = 10;
  mc.seed = 20260815;
  mc.percentile = 0.999;
  const ht::McEstimate est = ht::simulate_quantile(model, mc);
  const double qhat = est.quantile_mean;

  const ht::TailResult t = ht::tail_compound(model, qhat);
  const double se = std::sqrt(0.001 * 0.999 / 1e7);  // pooled binomial
  const double dev_sigma = std::fabs(t.prob - 1e-3) / se;

  // Independent referee: count exceedances of qhat directly.
  ht::McConfig mc2;
  mc2.n_paths = 1000000;
  mc2.n_reps = 5;
  mc2.seed = 777;
  const ht::McTailEstimate ref = ht::estimate_tail_prob(model, qhat, mc2);

  Report rep;
  rep.add("MC 99.9%% quantile (1e6 x 10, mu=10 sigma=2 lambda T=5) = %.6e",
          qhat);
  rep.add("quadrature tail there = %.6e; target 1.0e-3 +- %.2e (3 sigma)",
          t.prob, 3.0 * se);
  rep.add("deviation = %.1f sigma; MC referee tail at the same point = "
          "%.4e +- %.1e", dev_sigma, ref.prob, 3.0 * ref.std_err);
  rep.add("kernel regime '%s', dropped-term bound %.2e: at sigma=2 the",
          t.kernel_regime.c_str(), t.suppressed_terms_bound);
  rep.add("order-1 saddle kernel truncates a sigma^2/8 = 0.5 bracket, an");
  rep.add("O(10%%) kernel bias far above the 3-sigma statistical band, so");
  rep.add("this target is unattainable with the order-1 kernel the method");
  rep.add("prescribes; the referee confirms the simulation side is unbiased.");
  rep.add("runtime %.1f s", sw.ms() / 1000.0);
  const bool pass = std::fabs(t.prob - 1e-3) <= 3.0 * se;
  verdict(6, pass, "compound lognormal tail at the MC quantile equals 1e-3",
          rep);
  return pass;
}

bool criterion7() {
  // 500-term log-space reference summation.
  const auto logsum_tail = [](double rate, long long n) {
    long double acc = 0.0L;
    for (long long k = n + 500; k > n; --k)
      acc += std::exp((long double)k * std::log((long double)rate) - rate -
                      std::lgamma((long double)k + 1.0L));
    return (double)acc;
  };

  double worst = 0.0;
  const double rates[] = {0.5, 3.0, 20.0, 100.0};
  const long long ns[] = {0, 1, 5, 20, 60, 200};
  for (double r : rates)
    for (long long n : ns)
      worst = std::max(worst, rel(sf::poisson_tail_exact(r, n),
                                  logsum_tail(r, n)));

  bool verbatim = true;
  for (double r : rates)
    for (long long n : ns)
      verbatim = verbatim &&
                 ht::poisson_tail_cramer(r, n) ==
                     std::exp(-(double)n * (r - std::log(r) - 1.0));

  // The exponential-order estimate vs the exact tail near n ~ lambda T:
  // measured and printed, never hidden.
  const double ex20 = sf::poisson_tail_exact(20.0, 20);
  const double cr20 = ht::poisson_tail_cramer(20.0, 20);
  const double ex30 = sf::poisson_tail_exact(20.0, 30);
  const double cr30 = ht::poisson_tail_cramer(20.0, 30);

  Report rep;
  rep.add("exact vs 500-term log-space sum: max rel %.3e (<= 1e-12)", worst);
  rep.add("rate-function estimate matches its formula bit for bit: %s",
          verbatim ? "yes" : "NO");
  rep.add("divergence at n ~ lambda T (rate 20): exact %.4e vs estimate "
          "%.4e at n=20", ex20, cr20);
  rep.add("  and exact %.4e vs estimate %.4e at n=30 (%.1f e-folds low):",
          ex30, cr30, std::log(ex30) - std::log(cr30));
  rep.add("  the estimate's exponent is linear in n, so it only gives the");
  rep.add("  exponential order, as documented.");
  const bool pass = worst <= 1e-12 && verbatim;
  verdict(7, pass, "Poisson tail: exact summation check, estimate logged",
          rep);
  return pass;
}

bool criterion8() {
  Stopwatch sw;
  // Part A: two identical half-intensity units equal the pooled model.
  ht::Portfolio twin;
  twin.units = {ub_model(10.0), ub_model(10.0)};
  const auto pooled = ub_model(20.0);
  double worst = 0.0;
  for (double s : {5e6, 1e7, 1e8})
    worst = std::max(worst, rel(ht::tail_portfolio(twin, s).prob,
                                ht::tail_compound(pooled, s).prob));

  // Part B: heterogeneous two-unit portfolio VaR vs summed-path MC.
  ht::Portfolio hetero;
  hetero.units = {ht::CompoundModel{pareto_sev(0.35, 1e5, 2.2, 4e4, 1e5),
                                    ht::Frequency{12.0, 1.0}},
                  ht::CompoundModel{pareto_sev(0.5, 8e4, 2.6, 2e4, 8e4),
                                    ht::Frequency{6.0, 1.0}}};
  ht::VarQuery q;
  q.model = hetero;
  q.confidence = 0.999;
  const ht::VarResult vr = ht::solve_var(q);

  ht::McConfig mc;
  mc.n_paths = 200000;
  mc.n_reps = 20;
  mc.seed = 31415;
  mc.percentile = 0.999;
  const ht::McEstimate est = ht::simulate_quantile(hetero, mc);
  const bool inside = est.ci95_lo <= vr.var && vr.var <= est.ci95_hi;

  Report rep;
  rep.add("twin-unit (10+10) vs pooled (20): max rel dev %.3e (<= 1e-10)",
          worst);
  rep.add("heterogeneous portfolio VaR = %.6e", vr.var);
  rep.add("summed-path MC (2e5 x 20) 95%% CI [%.6e, %.6e]%s", est.ci95_lo,
          est.ci95_hi, inside ? "" : "  <- OUTSIDE");
  rep.add("runtime %.1f s", sw.ms() / 1000.0);
  const bool pass = worst <= 1e-10 && inside;
  verdict(8, pass, "portfolio additivity and heterogeneous VaR coverage",
          rep);
  return pass;
}

bool criterion9() {
  double worst_gamma = 0.0;
  worst_gamma = std::max(worst_gamma, rel(sf::gamma(-0.2), -5.8211485686265169));
  worst_gamma = std::max(worst_gamma, rel(sf::gamma(-1.4), 2.6592718728800305));
  worst_gamma = std::max(worst_gamma, rel(sf::gamma(10.5), 1133278.3889487856));
  worst_gamma = std::max(worst_gamma, rel(sf::gamma(1e-8), 99999999.422784345));

  double worst_kummer = 0.0;
  const double kz[] = {0.1, 0.5, 2.0, 10.0, 30.0, 50.0};
  const double kv[] = {1.5923870765074422, 3.7974070388200507,
                       8.7123261797096288, -3519.5350171899204,
                       -462721330904.83167, -1.3029132513731041e+20};
  for (int i = 0; i < 6; ++i)
    worst_kummer =
        std::max(worst_kummer, rel(sf::kummer_phi(-1.2, -0.2, kz[i]), kv[i]));

  double worst_lam = std::fabs(sf::lambert_w_minus1(-0.01) -
                               (-6.4727751243940047));
  worst_lam = std::max(worst_lam,
                       std::fabs(sf::lambert_w0(1.0) - 0.56714329040978387));

  double worst_ncdf = 0.0;
  worst_ncdf = std::max(worst_ncdf,
                        rel(sf::normal_cdf(-1.2), 0.11506967022170826));
  worst_ncdf = std::max(worst_ncdf,
                        rel(sf::normal_cdf(-0.2), 0.42074029056089696));
  worst_ncdf = std::max(worst_ncdf,
                        rel(sf::normal_cdf(0.1), 0.53982783727702899));
  worst_ncdf = std::max(worst_ncdf,
                        rel(sf::normal_cdf(-8.0), 6.2209605742717841e-16));

  // Round-trip residual on 1000 random points per branch.
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst_res = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = (u01(rng) < 0.4)
                         ? -0.36787944117144233 + 0.3678 * u01(rng)
                         : std::exp(14.0 * u01(rng) - 7.0);
    const double w = sf::lambert_w0(x);
    worst_res = std::max(worst_res, std::fabs(w * std::exp(w) - x) /
                                        std::max(1.0, std::fabs(x)));
  }
  for (int i = 0; i < 1000; ++i) {
    const double x = -std::exp(-1.0 - 110.0 * u01(rng));
    const double w = sf::lambert_w_minus1(x);
    worst_res = std::max(worst_res, std::fabs(w * std::exp(w) - x) /
                                        std::max(1.0, std::fabs(x)));
  }

  Report rep;
  rep.add("gamma max rel %.2e (<= 1e-12); Kummer max rel %.2e (<= 1e-10)",
          worst_gamma, worst_kummer);
  rep.add("Lambert golden abs %.2e (<= 1e-13); normal cdf max rel %.2e "
          "(<= 1e-13)", worst_lam, worst_ncdf);
  rep.add("Lambert round-trip residual on 2x1000 points: %.2e (<= 1e-13)",
          worst_res);
  const bool pass = worst_gamma <= 1e-12 && worst_kummer <= 1e-10 &&
                    worst_lam <= 1e-13 && worst_ncdf <= 1e-13 &&
                    worst_res <= 1e-13;
  verdict(9, pass, "special-function golden values and Lambert round-trip",
          rep);
  return pass;
}

bool criterion10() {
  const auto model = ub_model();
  ht::McConfig mc;
  mc.n_paths = 100000;
  mc.n_reps = 5;
  mc.seed = 99;
  mc.percentile = 0.999;

  struct Snapshot {
    ht::McEstimate q;
    ht::McTailEstimate t;
  };
  const char* envs[] = {nullptr, "1", "2", "8"};
  std::vector<Snapshot> snaps;
  for (const char* e : envs) {
    if (e)
      setenv("HEAVYTAIL_THREADS", e, 1);
    else
      unsetenv("HEAVYTAIL_THREADS");
    snaps.push_back({ht::simulate_quantile(model, mc),
                     ht::estimate_tail_prob(model, 1.6e8, mc)});
  }
  unsetenv("HEAVYTAIL_THREADS");

  bool same = true;
  for (std::size_t i = 1; i < snaps.size(); ++i) {
    same = same && snaps[i].q.quantile_mean == snaps[0].q.quantile_mean &&
           snaps[i].q.quantile_sd == snaps[0].q.quantile_sd &&
           snaps[i].q.rep_quantiles == snaps[0].q.rep_quantiles &&
           snaps[i].t.prob == snaps[0].t.prob &&
           snaps[i].t.std_err == snaps[0].t.std_err;
  }
  Report rep;
  rep.add("HEAVYTAIL_THREADS in {unset, 1, 2, 8}: quantile_mean = %.17g, "
          "tail = %.17g", snaps[0].q.quantile_mean, snaps[0].t.prob);
  rep.add("all per-rep quantiles and pooled statistics bit-identical: %s",
          same ? "yes" : "NO");
  verdict(10, same, "Monte Carlo results are thread-count invariant", rep);
  return same;
}

}  // namespace

int main(int argc, char** argv) {
  using Criterion = bool (*)();
  const Criterion all[] = {criterion1, criterion2, criterion3, criterion4,
                           criterion5, criterion6, criterion7, criterion8,
                           criterion9, criterion10};
  int which = 0;
  if (argc > 1) {
    which = std::atoi(argv[1]);
    if (which < 1 || which > 10) {
      std::fprintf(stderr, "usage: %s [1..10]\n", argv[0]);
      return 64;
    }
  }
  int failures = 0;
  if (which) {
    failures = all[which - 1]() ? 0 : 1;
  } else {
    for (const auto& c : all) failures += c() ? 0 : 1;
    std::printf("---- %d of 10 criteria passed ----\n", 10 - failures);
  }
  return failures;
}
