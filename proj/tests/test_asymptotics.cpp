#include <cmath>
#include <random>

#include "doctest.h"
#include "heavytail/asymptotics.hpp"
#include "heavytail/errors.hpp"
#include "heavytail/specfun.hpp"

using namespace heavytail;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kE = 2.71828182845904523536;

// Frozen references from 50-digit arithmetic.
constexpr double kUb_c1 = 2.555;
constexpr double kUb_c2 = -0.0935;
constexpr double kUb_a1 = -312.19123910878359;
constexpr double kUb_a2 = 429.24;
constexpr double kUb_a3 = -2709.38331306382;
constexpr double kUb_a4 = -38287.13356430122;
constexpr double kUb_a5 = 24093.0228;
constexpr double kMomB_m1 = 0.6387792;
constexpr double kMomB_m2 = 0.21714443317632;
constexpr double kMomB_c1 = 2.51520648;
constexpr double kMomB_c2 = -0.121356118435392;
constexpr double kMomB_a2 = 422.55468864;
constexpr double kMomB_a4 = -37690.820525070812;
constexpr double kMomB_a5 = 23337.017181103908;
// 50-digit tanh-sinh value of the cut integral for the pure-Pareto compound
// model (alpha 2.2, omega 1, lambda T = 1, x0 = 1) at shat = 100.
constexpr double kCpTail_pure_shat100 = 0.0041727506962545243;
// Single-loss lognormal(0,1) tail at s = e^8 / e^12: the leading asymptotic
// and the exact normal tail N(-8) / N(-12).
constexpr double kLognAsym_s_e8 = 6.3153388544211154e-16;
constexpr double kLognAsym_s_e12 = 1.7886531130525503e-33;
constexpr double kLognTail_e8 = 6.2209605742717841e-16;
constexpr double kLognTail_e12 = 1.776482112077679e-33;
// exp(-30 (20 - ln 20 - 1)) and the exact P(Po(20) > 30).
constexpr double kPoCramer_20_30 = 3.0412014232914618e-209;
constexpr double kPoExact_20_30 = 0.013474681279922283;

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::fabs(want);
}

CompoundModel ub_model(double alpha = 2.2) {
  SplicedSeverity sev;
  sev.omega = 0.35;
  sev.x0 = 1e5;
  sev.body = UniformBody{4e4, 1e5};
  sev.tail = ParetoTail{alpha};
  return CompoundModel{sev, Frequency{20.0, 1.0}};
}

// Same splice weight and frequency, body known only through its moments
// (mean 63877.92, variance 2.625e8 at threshold 1e5, stated in threshold
// units as m1 / m2).
CompoundModel moment_body_model() {
  SplicedSeverity sev;
  sev.omega = 0.35;
  sev.x0 = 1e5;
  sev.body = MomentBody{kMomB_m1, kMomB_m2};
  sev.tail = ParetoTail{2.2};
  return CompoundModel{sev, Frequency{20.0, 1.0}};
}

// Tail-only model: the body carries no weight, so coefficients reduce to
// pure-Pareto combinations with omega lambda T = 1.
CompoundModel pure_model(double alpha, double lamT = 1.0) {
  SplicedSeverity sev;
  sev.omega = 1.0;
  sev.x0 = 1.0;
  sev.body = UniformBody{0.0, 1.0};
  sev.tail = ParetoTail{alpha};
  return CompoundModel{sev, Frequency{lamT, 1.0}};
}

}  // namespace

TEST_SUITE("asymptotics") {
  TEST_CASE("uniform-body coefficients match 50-digit references") {
    const AsymptoticExpansion ex = expand_compound_pareto(ub_model());
    CHECK(rel_err(ex.leading_coeff, 7.0) < 1e-15);
    CHECK(rel_err(ex.c1, kUb_c1) < 1e-13);
    CHECK(rel_err(ex.c2, kUb_c2) < 1e-13);
    // a2 and a5 are finite products of rationals; a1, a3, a4 go through the
    // gamma function.
    CHECK(rel_err(ex.a[1], kUb_a2) < 1e-13);
    CHECK(rel_err(ex.a[4], kUb_a5) < 1e-13);
    CHECK(rel_err(ex.a[0], kUb_a1) < 1e-11);
    CHECK(rel_err(ex.a[2], kUb_a3) < 1e-11);
    CHECK(rel_err(ex.a[3], kUb_a4) < 1e-11);

    const double want_exp[6] = {1.2, 2.4, 2.2, 3.6, 3.4, 3.2};
    for (int i = 0; i < 6; ++i)
      CHECK(rel_err(ex.exponents[i], want_exp[i]) < 1e-14);
    CHECK(ex.x0 == 1e5);
    // For alpha > 2 the slowest-decaying correction is the body-coupling
    // term a2 (exponent alpha < 2(alpha-1)).
    CHECK(ex.leading_correction == 2);
    // ... and below alpha = 2 the order switches to a1.
    CHECK(expand_compound_pareto(ub_model(1.7)).leading_correction == 1);
  }

  TEST_CASE("moment-only body: coupled coefficients move, pure-tail ones do not") {
    const AsymptoticExpansion ub = expand_compound_pareto(ub_model());
    const AsymptoticExpansion mb = expand_compound_pareto(moment_body_model());
    CHECK(rel_err(mb.c1, kMomB_c1) < 1e-13);
    CHECK(rel_err(mb.c2, kMomB_c2) < 1e-13);
    CHECK(rel_err(mb.a[1], kMomB_a2) < 1e-13);
    CHECK(rel_err(mb.a[3], kMomB_a4) < 1e-11);
    CHECK(rel_err(mb.a[4], kMomB_a5) < 1e-13);
    // a1 and a3 involve only omega lambda T and alpha, not the body moments:
    // identical bit-for-bit across the two bodies.
    CHECK(mb.a[0] == ub.a[0]);
    CHECK(mb.a[2] == ub.a[2]);
    CHECK(mb.leading_coeff == ub.leading_coeff);
    CHECK(mb.leading_correction == 2);
  }

  TEST_CASE("the two printed forms of a1 agree, and a4 factors through a1") {
    // a1 = (omega lambda T)^2 Gamma(2-a) Gamma(2a-2) cos(pi a) / Gamma(a-1)
    // must equal the implemented reflection form -1/2 L^2 Gamma(2-a)^2 /
    // Gamma(3-2a), and a4 = a1 * lambda T * c1 * (2a-2).
    std::mt19937 gen(20260815u);
    std::uniform_real_distribution<double> U(1.1, 2.9);
    int tested = 0;
    while (tested < 500) {
      const double a = U(gen);
      if (std::fabs(a - 1.5) < 0.01 || std::fabs(a - 2.0) < 0.01 ||
          std::fabs(a - 2.5) < 0.01)
        continue;
      ++tested;
      const AsymptoticExpansion ex = expand_compound_pareto(pure_model(a));
      const double cos_form = specfun::gamma(2.0 - a) *
                              specfun::gamma(2.0 * a - 2.0) *
                              specfun::rgamma(a - 1.0) * std::cos(kPi * a);
      CHECK(std::fabs(ex.a[0] - cos_form) <=
            1e-12 * (std::fabs(cos_form) + std::fabs(ex.a[0])));
      const double a4_factored = ex.a[0] * 1.0 * ex.c1 * (2.0 * a - 2.0);
      CHECK(std::fabs(ex.a[3] - a4_factored) <=
            1e-12 * (std::fabs(a4_factored) + std::fabs(ex.a[3])));
      // The third correction is strictly negative for every admissible alpha.
      CHECK(ex.a[2] < 0.0);
      CHECK(ex.leading_coeff == 1.0);
    }
  }

  TEST_CASE("coefficient poles are guarded; a zero tail weight zeroes the series") {
    for (double v : {1.5, 2.0, 2.5, 3.0}) {
      CHECK_THROWS_AS(expand_compound_pareto(ub_model(v)), AlphaNearSingular);
      CHECK_THROWS_AS(expand_compound_pareto(ub_model(v + 5e-7)),
                      AlphaNearSingular);
      CHECK_THROWS_AS(expand_compound_pareto(ub_model(v - 5e-7)),
                      AlphaNearSingular);
      CHECK_NOTHROW(expand_compound_pareto(ub_model(v + 1e-4)));
      if (v > 1.6) CHECK_NOTHROW(expand_compound_pareto(ub_model(v - 1e-4)));
    }

    CompoundModel m = ub_model();
    m.severity.omega = 0.0;
    const AsymptoticExpansion ex = expand_compound_pareto(m);
    CHECK(ex.leading_coeff == 0.0);
    for (int i = 0; i < 5; ++i) CHECK(ex.a[i] == 0.0);
    CHECK(ex.leading_correction == 0);
    CHECK(eval_expansion(ex, 2e5, 6) == 0.0);
  }

  TEST_CASE("partial sums: exact leading term, then convergence to the cut integral") {
    const AsymptoticExpansion ex = expand_compound_pareto(pure_model(2.2));
    // One term is exactly omega lambda T shat^{-(alpha-1)}.
    CHECK(rel_err(eval_expansion(ex, 100.0, 1),
                  std::exp(-1.2 * std::log(100.0))) < 1e-14);

    // Against the frozen quadrature value at shat = 100: folding in the
    // leading correction (a2 enters at three terms) shrinks the error by
    // more than an order of magnitude, and the full series keeps it.
    const double e1 = std::fabs(eval_expansion(ex, 100.0, 1) - kCpTail_pure_shat100);
    const double e3 = std::fabs(eval_expansion(ex, 100.0, 3) - kCpTail_pure_shat100);
    const double e6 = std::fabs(eval_expansion(ex, 100.0, 6) - kCpTail_pure_shat100);
    CHECK(e3 < 0.1 * e1);
    CHECK(e6 < 0.1 * e1);

    // Far out the corrections are negligible relative to the leading term.
    const double far1 = eval_expansion(ex, 1e8, 1);
    const double far6 = eval_expansion(ex, 1e8, 6);
    CHECK(std::fabs(far6 / far1 - 1.0) < 1e-6);

    CHECK_THROWS_AS(eval_expansion(ex, 100.0, 0), DomainError);
    CHECK_THROWS_AS(eval_expansion(ex, 100.0, 7), DomainError);
    CHECK_THROWS_AS(eval_expansion(ex, 1.0, 1), DomainError);   // s == x0
    CHECK_THROWS_AS(eval_expansion(ex, 0.5, 1), DomainError);   // s < x0
  }

  TEST_CASE("single-loss lognormal asymptotic: anchors and error trend") {
    CHECK(rel_err(lognormal_single_asymptotic(0.0, 1.0, std::exp(8.0)),
                  kLognAsym_s_e8) < 1e-12);
    CHECK(rel_err(lognormal_single_asymptotic(0.0, 1.0, std::exp(12.0)),
                  kLognAsym_s_e12) < 1e-12);
    CHECK_THROWS_AS(lognormal_single_asymptotic(0.0, 1.0, std::exp(1.999999)),
                    DomainError);
    CHECK_THROWS_AS(lognormal_single_asymptotic(1.0, 2.0, std::exp(4.9)),
                    DomainError);
    CHECK_THROWS_AS(lognormal_single_asymptotic(0.0, -1.0, 10.0), DomainError);

    // Ratio to the exact tail behaves as 1 + sigma^2/w0^2; the relative
    // error decreases as the quantile moves out.
    const double r8 = kLognAsym_s_e8 / kLognTail_e8;
    const double r12 = kLognAsym_s_e12 / kLognTail_e12;
    CHECK(std::fabs(r8 - 1.0 - 1.0 / 64.0) < 0.2 / 64.0);
    CHECK(std::fabs(r12 - 1.0 - 1.0 / 144.0) < 0.2 / 144.0);
    CHECK(std::fabs(r12 - 1.0) < std::fabs(r8 - 1.0));

    // Same structure away from sigma = 1: at mu 0.5, sigma 1.5, w0 = 6 the
    // exact tail is N(-4) and the ratio error sits near sigma^2/w0^2.
    const double asym = lognormal_single_asymptotic(0.5, 1.5, std::exp(6.5));
    const double exact = 0.5 * std::erfc(4.0 / std::sqrt(2.0));
    const double dev = asym / exact - 1.0;
    CHECK(dev > 0.5 * 2.25 / 36.0);
    CHECK(dev < 1.5 * 2.25 / 36.0);
  }

  TEST_CASE("Poisson exponential-order estimate: values, limits, reported gap") {
    CHECK(rel_err(poisson_tail_cramer(20.0, 30), kPoCramer_20_30) < 1e-11);
    // rate = 1 zeroes the exponent for every n.
    for (long long n : {0LL, 1LL, 5LL, 1000LL})
      CHECK(poisson_tail_cramer(1.0, n) == 1.0);
    // rate = e gives exp(-n (e - 2)).
    CHECK(rel_err(poisson_tail_cramer(kE, 3), std::exp(-3.0 * (kE - 2.0))) <
          1e-13);
    // Strictly decreasing in n when rate > 1.
    double prev = poisson_tail_cramer(20.0, 5);
    for (long long n : {10LL, 20LL, 40LL}) {
      const double cur = poisson_tail_cramer(20.0, n);
      CHECK(cur < prev);
      prev = cur;
    }
    CHECK_THROWS_AS(poisson_tail_cramer(0.0, 3), DomainError);
    CHECK_THROWS_AS(poisson_tail_cramer(20.0, -1), DomainError);

    // The estimate's exponent is linear in n, so near n ~ 1.5 rate it sits
    // hundreds of e-folds below the exact tail. Measured, not hidden:
    const double gap =
        std::log(kPoExact_20_30) - std::log(poisson_tail_cramer(20.0, 30));
    MESSAGE("exponential-order estimate at rate 20, n 30 undershoots the "
            "exact tail by ", gap, " e-folds");
    CHECK(gap > 400.0);
    CHECK(poisson_tail_cramer(20.0, 30) < kPoExact_20_30 * 1e-200);
  }
}
