#include <cmath>

#include "doctest.h"
#include "heavytail/errors.hpp"
#include "heavytail/varsolve.hpp"

using namespace heavytail;

namespace {

// x0 (omega lambda T / p)^{1/(alpha-1)} at omega 0.35, lambda T 20, p 1e-3
// (50-digit arithmetic).
constexpr double kVarGuess_ub = 160047305.41362076;

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::fabs(want);
}

SplicedSeverity ub_severity(double omega = 0.35) {
  SplicedSeverity sev;
  sev.omega = omega;
  sev.x0 = 1e5;
  sev.body = UniformBody{4e4, 1e5};
  sev.tail = ParetoTail{2.2};
  return sev;
}

CompoundModel ub_model(double lamT = 20.0, double omega = 0.35) {
  return CompoundModel{ub_severity(omega), Frequency{lamT, 1.0}};
}

VarQuery query_for(const CompoundModel& m, double confidence) {
  VarQuery q;
  q.model = m;
  q.confidence = confidence;
  return q;
}

}  // namespace

TEST_SUITE("varsolve") {
  TEST_CASE("closed-form seed: frozen value, scaling, and guards") {
    const CompoundModel m = ub_model();
    CHECK(rel_err(initial_guess(m, 1e-3), kVarGuess_ub) < 1e-13);

    // Homogeneous of degree one in the threshold.
    CompoundModel scaled = m;
    scaled.severity.x0 = 2e5;
    scaled.severity.body = UniformBody{8e4, 2e5};
    CHECK(rel_err(initial_guess(scaled, 1e-3), 2.0 * kVarGuess_ub) < 1e-13);

    // Deeper targets sit further out.
    CHECK(initial_guess(m, 1e-4) > initial_guess(m, 1e-3));

    // The seed only exists for targets inside the single-loss regime
    // p < omega lambda T (= 7 here).
    CHECK_THROWS_AS(initial_guess(m, 7.0), DomainError);
    CHECK_THROWS_AS(initial_guess(m, 7.1), DomainError);
    CHECK_THROWS_AS(initial_guess(m, 0.0), DomainError);
    CHECK_THROWS_AS(initial_guess(m, -1.0), DomainError);

    CompoundModel logn = m;
    logn.severity.omega = 1.0;
    logn.severity.x0 = 0.0;
    logn.severity.tail = LognormalTail{10.0, 2.0};
    CHECK_THROWS_AS(initial_guess(logn, 1e-3), InvalidSeverity);
  }

  TEST_CASE("round-trip: the solved quantile reproduces its target tail") {
    const CompoundModel m = ub_model();
    double prev_var = 0.0;
    for (double conf : {0.99, 0.999, 0.9999}) {
      const VarResult r = solve_var(query_for(m, conf));
      const double p = 1.0 - conf;
      CHECK(std::fabs(r.tail_at_var - p) <= 1e-6 * p);
      // Re-evaluating the tail at the solved point lands on the same value.
      const double back = tail_compound(m, r.var).prob;
      CHECK(rel_err(back, r.tail_at_var) < 1e-12);
      CHECK(r.var > prev_var);
      prev_var = r.var;
      CHECK(r.iterations >= 1);
      CHECK(r.iterations <= 100);
      CHECK(r.tail_evaluations >= r.iterations);
      CHECK(r.tail_evaluations < 200);
    }
  }

  TEST_CASE("sparse-frequency limit collapses to the single-loss inversion") {
    // At lambda T = 1e-3 multi-claim paths are negligible, so the VaR is the
    // closed-form seed up to O(lambda T) corrections.
    const CompoundModel m = ub_model(1e-3);
    const double conf = 0.99997;
    const VarResult r = solve_var(query_for(m, conf));
    const double seed = initial_guess(m, 1.0 - conf);
    CHECK(rel_err(r.var, seed) < 5e-3);
  }

  TEST_CASE("the quantile is monotone in confidence drivers") {
    const double conf = 0.999;
    const double base = solve_var(query_for(ub_model(20.0), conf)).var;
    // More frequent claims push the quantile out...
    CHECK(solve_var(query_for(ub_model(25.0), conf)).var > base);
    // ... and so does a heavier splice weight.
    CHECK(solve_var(query_for(ub_model(20.0, 0.5), conf)).var > base);
  }

  TEST_CASE("portfolio of identical halves matches the pooled unit") {
    const CompoundModel half = ub_model(10.0);
    Portfolio pf;
    pf.units = {half, half};
    VarQuery q;
    q.model = pf;
    q.confidence = 0.999;
    const VarResult split = solve_var(q);
    const VarResult pooled = solve_var(query_for(ub_model(20.0), 0.999));
    // Both solves stop within 1e-6 of the same tail target, so the
    // quantiles agree to the corresponding s-resolution.
    CHECK(rel_err(split.var, pooled.var) < 5e-6);

    Portfolio empty;
    VarQuery qe;
    qe.model = empty;
    qe.confidence = 0.999;
    CHECK_THROWS_AS(solve_var(qe), EmptyPortfolio);
  }

  TEST_CASE("refusals: parameter guards and out-of-regime targets") {
    const CompoundModel m = ub_model();
    CHECK_THROWS_AS(solve_var(query_for(m, 0.5)), DomainError);
    CHECK_THROWS_AS(solve_var(query_for(m, 1.0)), DomainError);
    CHECK_THROWS_AS(solve_var(query_for(m, 0.3)), DomainError);
    VarQuery bad_tol = query_for(m, 0.999);
    bad_tol.tol_rel = 0.0;
    CHECK_THROWS_AS(solve_var(bad_tol), DomainError);
    bad_tol.tol_rel = 0.6;
    CHECK_THROWS_AS(solve_var(bad_tol), DomainError);

    // A shallow quantile of a sparse book lies below the validity window of
    // the cut representation (shat ~ 2, where the hard claim-count cutoff
    // leaves material integrand mass at the boundary). The quadrature guard
    // fires before a bracket can even be attempted: refused, not
    // extrapolated.
    const CompoundModel sparse = ub_model(1e-3);
    CHECK_THROWS_AS(solve_var(query_for(sparse, 0.9997)), GrowthDetected);

    // Same story for a sparse lognormal book near its evaluation floor.
    CompoundModel logn = sparse;
    logn.severity.omega = 1.0;
    logn.severity.x0 = 0.0;
    logn.severity.tail = LognormalTail{0.0, 1.0};
    CHECK_THROWS_AS(solve_var(query_for(logn, 0.9997)), Error);
  }
}
