#include "heavytail/mc_oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include "heavytail/errors.hpp"
#include "heavytail/specfun.hpp"

namespace heavytail {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

double unit_lamT(const CompoundModel& m) {
  if (!(m.frequency.lambda > 0.0) || !(m.frequency.horizon > 0.0))
    throw DomainError("frequency requires lambda > 0 and horizon > 0");
  return m.frequency.lambda * m.frequency.horizon;
}

void check_config(const McConfig& cfg) {
  if (cfg.n_paths < 1) throw DomainError("mc: n_paths must be >= 1");
  if (cfg.n_reps < 1) throw DomainError("mc: n_reps must be >= 1");
  if (!(cfg.percentile > 0.0) || !(cfg.percentile < 1.0))
    throw DomainError("mc: percentile must lie in (0, 1)");
}

}  // namespace

std::uint64_t CounterRng::next_u64() {
  state += 0x9e3779b97f4a7c15ULL;
  return mix64(state);
}

double CounterRng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

CounterRng path_rng(std::uint64_t seed, std::uint64_t rep, std::uint64_t unit,
                    std::uint64_t path) {
  std::uint64_t k = seed;
  k = mix64(k + 0x9e3779b97f4a7c15ULL * (rep + 1));
  k = mix64(k ^ (0xd1b54a32d192ed03ULL * (unit + 1)));
  k = mix64(k ^ (0x8cb92ba72f3d8dd7ULL * (path + 1)));
  return CounterRng(k);
}

long long poisson_draw(CounterRng& rng, double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate))
    throw DomainError("poisson_draw: rate must be finite and >= 0");
  long long total = 0;
  while (rate > 0.0) {
    const double chunk = std::min(rate, 60.0);
    const double floor = std::exp(-chunk);
    long long k = 0;
    double p = 1.0;
    do {
      p *= rng.next_unit();
      ++k;
    } while (p > floor);
    total += k - 1;
    rate -= chunk;
  }
  return total;
}

double sample_tail(const SplicedSeverity& sev, double u) {
  if (const auto* t = std::get_if<ParetoTail>(&sev.tail))
    return sev.x0 * std::exp(-std::log(u) / (t->alpha - 1.0));
  const auto& t = std::get<LognormalTail>(sev.tail);
  double p_lo = 0.0;
  if (sev.x0 > 0.0)
    p_lo = specfun::normal_cdf((std::log(sev.x0) - t.mu) / t.sigma);
  const double z = specfun::normal_quantile(p_lo + u * (1.0 - p_lo));
  return std::exp(t.mu + t.sigma * z);
}

double sample_body(const SplicedSeverity& sev, double u) {
  if (const auto* b = std::get_if<UniformBody>(&sev.body))
    return b->lo + u * (b->hi - b->lo);
  if (const auto* b = std::get_if<PointMassBody>(&sev.body)) return b->at;
  throw BodyNotSamplable(
      "moment-specified bodies cannot be sampled; use a uniform or point-mass "
      "body (or omega = 1)");
}

double sample_severity(const SplicedSeverity& sev, double u_mix, double u) {
  return u_mix < sev.omega ? sample_tail(sev, u) : sample_body(sev, u);
}

int effective_thread_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("HEAVYTAIL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<int>(std::min(v, 64L));
  }
  return static_cast<int>(std::min(hw, 64u));
}

namespace {

// Fill out[0..n) with path_total(path); the partition into worker chunks has
// no effect on values since every path owns its own keyed substream.
void run_paths(const std::function<double(long long)>& path_total,
               std::vector<double>& out) {
  const long long n = static_cast<long long>(out.size());
  const int workers =
      static_cast<int>(std::min<long long>(effective_thread_count(), n));
  if (workers <= 1) {
    for (long long i = 0; i < n; ++i) out[i] = path_total(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const long long chunk = (n + workers - 1) / workers;
  std::exception_ptr err;
  std::mutex err_mu;
  for (int w = 0; w < workers; ++w) {
    const long long lo = w * chunk;
    const long long hi = std::min(n, lo + chunk);
    pool.emplace_back([&, lo, hi] {
      try {
        for (long long i = lo; i < hi; ++i) out[i] = path_total(i);
      } catch (...) {
        std::lock_guard<std::mutex> g(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

double model_path_total(const CompoundModel& model, double lamT,
                        std::uint64_t seed, std::uint64_t rep,
                        std::uint64_t unit, long long path) {
  CounterRng rng = path_rng(seed, rep, unit, static_cast<std::uint64_t>(path));
  const long long n = poisson_draw(rng, lamT);
  double total = 0.0;
  for (long long j = 0; j < n; ++j) {
    const double u_mix = rng.next_unit();
    const double u = rng.next_unit();
    total += sample_severity(model.severity, u_mix, u);
  }
  return total;
}

// Factor state (if any) is drawn from a dedicated substream so unit streams
// stay aligned across factor configurations.
constexpr std::uint64_t kFactorUnit = 0xffffffffULL;

std::function<double(long long)> portfolio_path_fn(const Portfolio& pf,
                                                   const McConfig& cfg,
                                                   std::uint64_t rep) {
  for (const CompoundModel& u : pf.units) validate(u.severity);
  std::vector<double> lamTs;
  lamTs.reserve(pf.units.size());
  for (const CompoundModel& u : pf.units) lamTs.push_back(unit_lamT(u));
  return [&pf, lamTs, cfg, rep](long long path) {
    std::vector<double> mult(pf.units.size(), 1.0);
    if (!pf.factor_grid.empty()) {
      CounterRng zrng = path_rng(cfg.seed, rep, kFactorUnit,
                                 static_cast<std::uint64_t>(path));
      double u = zrng.next_unit();
      std::size_t z = 0;
      double acc = 0.0;
      for (; z + 1 < pf.factor_grid.size(); ++z) {
        acc += pf.factor_grid[z].prob;
        if (u < acc) break;
      }
      mult = pf.factor_grid[z].multipliers;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < pf.units.size(); ++i)
      total += model_path_total(pf.units[i], lamTs[i] * mult[i], cfg.seed, rep,
                                static_cast<std::uint64_t>(i), path);
    return total;
  };
}

double nearest_rank(std::vector<double>& totals, double p) {
  const long long n = static_cast<long long>(totals.size());
  long long idx =
      static_cast<long long>(std::ceil(p * static_cast<double>(n))) - 1;
  idx = std::clamp(idx, 0LL, n - 1);
  std::nth_element(totals.begin(), totals.begin() + idx, totals.end());
  return totals[static_cast<std::size_t>(idx)];
}

McEstimate quantile_from_reps(const std::vector<double>& reps, long long n_paths) {
  McEstimate e;
  e.rep_quantiles = reps;
  e.n_paths = n_paths;
  e.n_reps = static_cast<int>(reps.size());
  double mean = 0.0;
  for (double q : reps) mean += q;
  mean /= static_cast<double>(reps.size());
  double var = 0.0;
  if (reps.size() > 1) {
    for (double q : reps) var += (q - mean) * (q - mean);
    var /= static_cast<double>(reps.size() - 1);
  }
  e.quantile_mean = mean;
  e.quantile_sd = std::sqrt(var);
  const double half =
      1.96 * e.quantile_sd / std::sqrt(static_cast<double>(reps.size()));
  e.ci95_lo = mean - half;
  e.ci95_hi = mean + half;
  return e;
}

template <typename PathFnFactory>
McEstimate simulate_quantile_impl(PathFnFactory&& make_fn, const McConfig& cfg) {
  check_config(cfg);
  std::vector<double> rep_q;
  rep_q.reserve(cfg.n_reps);
  std::vector<double> totals(static_cast<std::size_t>(cfg.n_paths));
  for (int r = 0; r < cfg.n_reps; ++r) {
    run_paths(make_fn(static_cast<std::uint64_t>(r)), totals);
    rep_q.push_back(nearest_rank(totals, cfg.percentile));
  }
  return quantile_from_reps(rep_q, cfg.n_paths);
}

template <typename PathFnFactory>
McTailEstimate tail_prob_impl(PathFnFactory&& make_fn, double s,
                              const McConfig& cfg) {
  check_config(cfg);
  std::vector<double> totals(static_cast<std::size_t>(cfg.n_paths));
  long long hits = 0;
  for (int r = 0; r < cfg.n_reps; ++r) {
    run_paths(make_fn(static_cast<std::uint64_t>(r)), totals);
    for (double t : totals) hits += t > s ? 1 : 0;
  }
  McTailEstimate e;
  e.n_total = cfg.n_paths * cfg.n_reps;
  e.prob = static_cast<double>(hits) / static_cast<double>(e.n_total);
  e.std_err =
      std::sqrt(e.prob * (1.0 - e.prob) / static_cast<double>(e.n_total));
  return e;
}

}  // namespace

McEstimate simulate_quantile(const CompoundModel& model, const McConfig& cfg) {
  validate(model.severity);
  const double lamT = unit_lamT(model);
  return simulate_quantile_impl(
      [&model, lamT, &cfg](std::uint64_t rep) {
        return [&model, lamT, &cfg, rep](long long path) {
          return model_path_total(model, lamT, cfg.seed, rep, 0, path);
        };
      },
      cfg);
}

McEstimate simulate_quantile(const Portfolio& pf, const McConfig& cfg) {
  if (pf.units.empty()) throw EmptyPortfolio("simulate_quantile: no units");
  return simulate_quantile_impl(
      [&pf, &cfg](std::uint64_t rep) { return portfolio_path_fn(pf, cfg, rep); },
      cfg);
}

McTailEstimate estimate_tail_prob(const CompoundModel& model, double s,
                                  const McConfig& cfg) {
  validate(model.severity);
  const double lamT = unit_lamT(model);
  return tail_prob_impl(
      [&model, lamT, &cfg](std::uint64_t rep) {
        return [&model, lamT, &cfg, rep](long long path) {
          return model_path_total(model, lamT, cfg.seed, rep, 0, path);
        };
      },
      s, cfg);
}

McTailEstimate estimate_tail_prob(const Portfolio& pf, double s,
                                  const McConfig& cfg) {
  if (pf.units.empty()) throw EmptyPortfolio("estimate_tail_prob: no units");
  return tail_prob_impl(
      [&pf, &cfg](std::uint64_t rep) { return portfolio_path_fn(pf, cfg, rep); },
      s, cfg);
}

void dump_totals_csv(const CompoundModel& model, const McConfig& cfg,
                     const std::string& path) {
  check_config(cfg);
  validate(model.severity);
  const double lamT = unit_lamT(model);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "rep,total\n";
  std::vector<double> totals(static_cast<std::size_t>(cfg.n_paths));
  char buf[32];
  for (int r = 0; r < cfg.n_reps; ++r) {
    run_paths(
        [&model, lamT, &cfg, r](long long p) {
          return model_path_total(model, lamT, cfg.seed,
                                  static_cast<std::uint64_t>(r), 0, p);
        },
        totals);
    for (double t : totals) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), t);
      out << r << ',';
      out.write(buf, res.ptr - buf);
      out << '\n';
    }
  }
  if (!out) throw IoError("write failure on " + path);
}

}  // namespace heavytail
