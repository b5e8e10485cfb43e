#pragma once
// Monte Carlo ground truth for compound and portfolio tails. Every path owns
// a counter-derived RNG substream keyed by (seed, rep, unit, path), so results
// are bit-identical for any worker count (HEAVYTAIL_THREADS overrides the
// hardware count when set).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "heavytail/compound.hpp"

namespace heavytail {

struct McConfig {
  long long n_paths = 1000000;  // paths per repetition (>= 1e4 for estimates)
  int n_reps = 1;
  std::uint64_t seed = 0;
  double percentile = 0.999;    // in (0, 1)
};

struct McEstimate {
  double quantile_mean = 0.0;
  double quantile_sd = 0.0;   // sample sd across repetitions (0 if n_reps == 1)
  double ci95_lo = 0.0;       // mean +- 1.96 sd / sqrt(n_reps)
  double ci95_hi = 0.0;
  std::vector<double> rep_quantiles;
  long long n_paths = 0;
  int n_reps = 0;
};

// splitmix64 stream; the per-path key construction lives in path_rng below.
struct CounterRng {
  std::uint64_t state;
  explicit CounterRng(std::uint64_t key) : state(key) {}
  std::uint64_t next_u64();
  double next_unit();  // strictly inside (0, 1)
};

CounterRng path_rng(std::uint64_t seed, std::uint64_t rep, std::uint64_t unit,
                    std::uint64_t path);

// Poisson(rate) via product-of-uniforms, chunked at rate 60 so e^{-chunk}
// stays comfortably normal. Deterministic given the rng state.
long long poisson_draw(CounterRng& rng, double rate);

// Inverse-CDF samplers. sample_severity draws the splice with u_mix (tail iff
// u_mix < omega) and the component with u. MomentBody throws BodyNotSamplable.
double sample_tail(const SplicedSeverity& sev, double u);
double sample_body(const SplicedSeverity& sev, double u);
double sample_severity(const SplicedSeverity& sev, double u_mix, double u);

// Per-rep empirical percentile (nearest-rank: index ceil(n p) - 1 of the
// sorted totals) with a normal-theory CI across reps.
McEstimate simulate_quantile(const CompoundModel& model, const McConfig& cfg);
McEstimate simulate_quantile(const Portfolio& pf, const McConfig& cfg);

// Pooled estimate of P(S > s) with binomial standard error. s = 0 checks out
// against 1 - exp(-lambda T).
struct McTailEstimate {
  double prob = 0.0;
  double std_err = 0.0;
  long long n_total = 0;
};
McTailEstimate estimate_tail_prob(const CompoundModel& model, double s,
                                  const McConfig& cfg);
McTailEstimate estimate_tail_prob(const Portfolio& pf, double s,
                                  const McConfig& cfg);

// Optional raw-totals dump (CSV: rep,total), one row per path.
void dump_totals_csv(const CompoundModel& model, const McConfig& cfg,
                     const std::string& path);

// Effective worker count: HEAVYTAIL_THREADS if set (clamped to [1, 64]),
// otherwise std::thread::hardware_concurrency().
int effective_thread_count();

}  // namespace heavytail
