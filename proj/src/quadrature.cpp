#include "heavytail/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "heavytail/errors.hpp"

namespace heavytail {

namespace {

// 15-point Kronrod extension of 7-point Gauss (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0, b = 0.0;
  double value = 0.0;
  double err = 0.0;
  bool operator<(const Panel& o) const { return err < o.err; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b,
                     long long* n_eval) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double fv[15];
  // Nodes ordered: +-xgk[0..6], center.
  for (int i = 0; i < 7; ++i) {
    fv[2 * i] = f(center - half * kXgk[i]);
    fv[2 * i + 1] = f(center + half * kXgk[i]);
  }
  fv[14] = f(center);
  *n_eval += 15;
  for (int i = 0; i < 15; ++i)
    if (!std::isfinite(fv[i]))
      throw NonConvergence("integrand evaluated non-finite inside a panel");

  double resk = kWgk[7] * fv[14];
  double resabs = std::fabs(resk);
  double resg = kWg[3] * fv[14];
  for (int i = 0; i < 7; ++i) {
    const double sum = fv[2 * i] + fv[2 * i + 1];
    resk += kWgk[i] * sum;
    resabs += kWgk[i] * (std::fabs(fv[2 * i]) + std::fabs(fv[2 * i + 1]));
    if (i % 2 == 1) resg += kWg[i / 2] * sum;
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::fabs(fv[14] - reskh);
  for (int i = 0; i < 7; ++i)
    resasc += kWgk[i] * (std::fabs(fv[2 * i] - reskh) +
                         std::fabs(fv[2 * i + 1] - reskh));

  Panel p;
  p.a = a;
  p.b = b;
  p.value = resk * half;
  double err = std::fabs((resk - resg) * half);
  resasc *= std::fabs(half);
  resabs *= std::fabs(half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * resabs);
  p.err = err;
  return p;
}

struct AdaptiveResult {
  double value = 0.0;
  double err = 0.0;
  int subdivisions = 0;
};

// Refine the worst panel until the summed error meets tolerance or the
// bisection budget is exhausted.
AdaptiveResult refine(const std::function<double(double)>& f,
                      std::vector<Panel> panels, const QuadratureSpec& spec,
                      long long* n_eval) {
  std::priority_queue<Panel> queue(panels.begin(), panels.end());
  std::vector<Panel> frozen;  // panels too narrow to split further
  double total_v = 0.0, total_e = 0.0;
  for (const Panel& p : panels) {
    total_v += p.value;
    total_e += p.err;
  }
  int splits = 0;
  const auto tol = [&] {
    return std::max(spec.abs_tol, spec.rel_tol * std::fabs(total_v));
  };
  while (total_e > tol() && !queue.empty()) {
    if (splits >= spec.max_subdivisions)
      throw NonConvergence("tolerance unmet after " +
                           std::to_string(spec.max_subdivisions) +
                           " subdivisions");
    Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const double width = worst.b - worst.a;
    if (!(width > 8.0 * std::numeric_limits<double>::epsilon() *
                      std::max(std::fabs(worst.a), std::fabs(worst.b)))) {
      frozen.push_back(worst);  // roundoff floor; keep its contribution
      continue;
    }
    Panel left = evaluate_panel(f, worst.a, mid, n_eval);
    Panel right = evaluate_panel(f, mid, worst.b, n_eval);
    total_v += left.value + right.value - worst.value;
    total_e += left.err + right.err - worst.err;
    queue.push(left);
    queue.push(right);
    ++splits;
  }
  // Re-sum for a clean final value (the incremental sums drift slightly).
  AdaptiveResult out;
  out.subdivisions = splits;
  double v = 0.0, e = 0.0;
  while (!queue.empty()) {
    v += queue.top().value;
    e += queue.top().err;
    queue.pop();
  }
  for (const Panel& p : frozen) {
    v += p.value;
    e += p.err;
  }
  out.value = v;
  out.err = e;
  if (out.err > std::max(spec.abs_tol, spec.rel_tol * std::fabs(out.value)))
    throw NonConvergence("tolerance unmet after refinement");
  return out;
}

std::vector<Panel> initial_panels(const std::function<double(double)>& f,
                                  const std::vector<double>& points,
                                  long long* n_eval) {
  std::vector<Panel> panels;
  panels.reserve(points.size() - 1);
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    panels.push_back(evaluate_panel(f, points[i], points[i + 1], n_eval));
  return panels;
}

}  // namespace

IntervalEstimate integrate_interval(const std::function<double(double)>& f,
                                    double a, double b,
                                    const std::vector<double>& breakpoints,
                                    const QuadratureSpec& spec) {
  if (!(b > a)) throw DomainError("integrate_interval: need b > a");
  if (spec.max_subdivisions < 8)
    throw DomainError("integrate_interval: max_subdivisions must be >= 8");
  std::vector<double> pts{a};
  for (double p : breakpoints)
    if (p > a && p < b) pts.push_back(p);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  long long n_eval = 0;
  AdaptiveResult r = refine(f, initial_panels(f, pts, &n_eval), spec, &n_eval);
  IntervalEstimate out;
  out.value = r.value;
  out.abs_err = r.err;
  out.n_evaluations = n_eval;
  out.subdivisions = r.subdivisions;
  return out;
}

HalflineResult integrate_halfline(const std::function<double(double)>& f,
                                  const QuadratureSpec& spec,
                                  const HalflineOptions& options) {
  if (spec.max_subdivisions < 8)
    throw DomainError("integrate_halfline: max_subdivisions must be >= 8");
  const double anchor = options.anchor > 0.0 ? options.anchor : 1.0;
  const double hard =
      options.hard_cutoff > 0.0 ? options.hard_cutoff
                                : std::numeric_limits<double>::infinity();

  long long n_eval = 0;
  const auto log_env = [&](double y) -> double {
    if (options.log_envelope) return options.log_envelope(y);
    ++n_eval;
    const double v = std::fabs(f(y));
    return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
  };

  HalflineResult out;
  double cutoff;
  enum class StopMode { kDecay, kRise, kHard, kFixed } mode;

  if (spec.cutoff_policy == QuadratureSpec::CutoffPolicy::kFixed) {
    if (!(spec.fixed_cutoff > 0.0))
      throw DomainError("integrate_halfline: fixed cutoff must be > 0");
    cutoff = std::min(spec.fixed_cutoff, hard);
    mode = StopMode::kFixed;
    // Keep the growth guard honest even with a user-chosen cutoff.
    const double e1 = log_env(0.1 * cutoff);
    const double e2 = log_env(cutoff);
    if (std::isfinite(e2) && e2 > e1) out.boundary_magnitude = std::exp(e2);
    if (std::isinf(e2) && e2 > 0.0)
      throw GrowthDetected(
          "integrand overflows at the fixed cutoff y = " + std::to_string(cutoff));
  } else {
    // Envelope scan: 16 points per decade upward from the anchor (with a few
    // probes below it to locate the reference peak). Stop at clean decay
    // (1e-22 below the peak), at the minimum before a persistent rise, or at
    // the hard bound.
    constexpr double kStep = 1.1547819846894583;  // 10^(1/16)
    constexpr double kDeadDrop = 50.657;          // ln(1e22)
    double peak = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 32; ++k) {  // two decades below the anchor
      const double y = anchor * std::pow(kStep, -k);
      peak = std::max(peak, log_env(y));
    }
    double y = anchor;
    double prev = -std::numeric_limits<double>::infinity();
    double min_env = std::numeric_limits<double>::infinity();
    double min_y = anchor;
    bool past_peak = false;
    int dead_count = 0;
    cutoff = hard;
    mode = StopMode::kHard;
    double env_at_cutoff = 0.0;
    bool have_env_at_cutoff = false;
    for (int j = 0; j < 2400; ++j) {
      const bool clamped = y >= hard;
      if (clamped) y = hard;
      const double env = log_env(y);
      if (env > peak) {
        peak = env;
        min_env = std::numeric_limits<double>::infinity();
        past_peak = false;
      } else {
        past_peak = true;
      }
      if (past_peak && env < min_env) {
        min_env = env;
        min_y = y;
      }
      // Breakdown or persistent rise: truncate at the preceding minimum.
      if (std::isnan(env) || (std::isinf(env) && env > 0.0)) {
        cutoff = min_y;
        mode = StopMode::kRise;
        env_at_cutoff = min_env;
        have_env_at_cutoff = true;
        break;
      }
      if (past_peak && std::isfinite(min_env) && env > min_env + 0.05 &&
          env > prev && y > min_y * 1.02) {
        cutoff = min_y;
        mode = StopMode::kRise;
        env_at_cutoff = min_env;
        have_env_at_cutoff = true;
        break;
      }
      // Clean decay.
      if (env < peak - kDeadDrop) {
        if (++dead_count >= 3) {
          cutoff = y;
          mode = StopMode::kDecay;
          env_at_cutoff = env;
          have_env_at_cutoff = true;
          break;
        }
      } else {
        dead_count = 0;
      }
      if (clamped) {
        cutoff = hard;
        mode = StopMode::kHard;
        env_at_cutoff = env;
        have_env_at_cutoff = true;
        break;
      }
      prev = env;
      y *= kStep;
    }
    if (peak == -std::numeric_limits<double>::infinity()) {
      // Identically-zero integrand (e.g. vanishing cut weight).
      cutoff = std::min(10.0 * anchor, hard);
      mode = StopMode::kDecay;
    }
    if (!std::isfinite(cutoff))
      throw DomainError(
          "integrate_halfline: integrand neither decays nor rises within 150 "
          "decades of the anchor");
    if (mode == StopMode::kRise) {
      out.truncated_at_rise = true;
      out.boundary_magnitude =
          have_env_at_cutoff ? std::exp(env_at_cutoff) : 0.0;
      out.warnings.push_back("CutoffTruncated");
    } else if (mode == StopMode::kHard && have_env_at_cutoff &&
               env_at_cutoff > peak - kDeadDrop) {
      out.boundary_magnitude = std::exp(env_at_cutoff);
      out.warnings.push_back("CutoffTruncated");
    }
  }

  // Panel layout: interior breakpoints below the cutoff, plus a geometric
  // ladder into the origin handling the integrable power singularity.
  std::vector<double> pts;
  for (double p : options.breakpoints)
    if (p > 0.0 && p < cutoff) pts.push_back(p);
  pts.push_back(cutoff);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const double first = std::min(pts.front(), std::min(anchor, cutoff));
  std::vector<double> ladder;
  for (int k = 48; k >= 1; --k) ladder.push_back(first * std::ldexp(1.0, -k));
  if (first < pts.front()) ladder.push_back(first);
  ladder.insert(ladder.begin(), 0.0);
  ladder.insert(ladder.end(), pts.begin(), pts.end());
  ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());

  AdaptiveResult r = refine(f, initial_panels(f, ladder, &n_eval), spec, &n_eval);

  out.value = r.value;
  out.abs_err = r.err + out.boundary_magnitude;
  out.cutoff_used = cutoff;
  out.n_evaluations = n_eval;

  // A truncation whose boundary is material relative to the accumulated value
  // means the representation is growing out of control.
  if (out.boundary_magnitude >
      1e-2 * std::fabs(out.value) + 1e2 * spec.abs_tol)
    throw GrowthDetected(
        "integrand rises toward the cutoff with non-negligible boundary "
        "magnitude " +
        std::to_string(out.boundary_magnitude) + " at y = " +
        std::to_string(cutoff));
  return out;
}

}  // namespace heavytail
