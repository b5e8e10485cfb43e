#include "heavytail/specfun.hpp"

#include <cmath>
#include <limits>

#include "heavytail/errors.hpp"

namespace heavytail::specfun {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInvE = 0.36787944117144232160;  // 1/e
// Largest x with Gamma(x) finite in double precision.
constexpr double kGammaOverflowX = 171.62;

bool near_nonpositive_integer(double x, double tol) {
  if (x > 0.5) return false;
  const double n = std::nearbyint(x);
  return n <= 0.0 && std::fabs(x - n) <= tol;
}

}  // namespace

double sinpi(double x) {
  const double n = std::nearbyint(x);
  const double r = x - n;  // |r| <= 0.5, exact for |x| < 2^52
  const double s = std::sin(kPi * r);
  // (-1)^n: nearbyint returns an exact integer-valued double.
  return (std::fmod(std::fabs(n), 2.0) == 1.0) ? -s : s;
}

double gamma(double x) {
  if (std::isnan(x)) throw DomainError("gamma: NaN argument");
  if (near_nonpositive_integer(x, 1e-12))
    throw PoleArgument("gamma: argument within 1e-12 of non-positive integer");
  if (x >= 0.5) {
    if (x > kGammaOverflowX)
      throw OverflowGuard("gamma: argument exceeds overflow bound 171.62");
    return std::tgamma(x);
  }
  // Reflection: Gamma(x) = pi / (sin(pi x) * Gamma(1-x)), with the sign of
  // sin(pi x) computed exactly by sinpi. Gamma(1-x) may overflow to inf for
  // x < -170.6; the quotient then underflows to a signed zero, which is the
  // correctly rounded value.
  return kPi / (sinpi(x) * std::tgamma(1.0 - x));
}

double rgamma(double x) {
  if (near_nonpositive_integer(x, 1e-12)) return 0.0;
  if (x >= 0.5) {
    if (x > kGammaOverflowX) return std::exp(-std::lgamma(x));
    return 1.0 / std::tgamma(x);
  }
  return sinpi(x) * std::tgamma(1.0 - x) / kPi;
}

namespace {

// Large-z asymptotic expansion of Phi(a,b,z), both algebraic and exponential
// pieces, each truncated at its smallest term.
double kummer_asymptotic(double a, double b, double z) {
  // e^z z^{a-b} / Gamma(a) * sum_k (b-a)_k (1-a)_k / (k! z^k)
  double s1 = 0.0;
  {
    double term = 1.0, sum = 1.0, smallest = std::fabs(term);
    for (int k = 0; k < 60; ++k) {
      term *= (b - a + k) * (1.0 - a + k) / ((k + 1.0) * z);
      if (std::fabs(term) >= smallest) break;  // divergent tail reached
      smallest = std::fabs(term);
      sum += term;
      if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    }
    s1 = rgamma(a) * std::exp(z + (a - b) * std::log(z)) * sum;
  }
  // z^{-a} / Gamma(b-a) * sum_k (a)_k (a-b+1)_k / (k! (-z)^k)
  double s2 = 0.0;
  if (rgamma(b - a) != 0.0) {
    double term = 1.0, sum = 1.0, smallest = std::fabs(term);
    for (int k = 0; k < 60; ++k) {
      term *= (a + k) * (a - b + 1.0 + k) / ((k + 1.0) * (-z));
      if (std::fabs(term) >= smallest) break;
      smallest = std::fabs(term);
      sum += term;
      if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    }
    s2 = rgamma(b - a) * std::exp(-a * std::log(z)) * sum;
  }
  return gamma(b) * (s1 + s2);
}

}  // namespace

double kummer_phi(double a, double b, double z) {
  if (!(z >= 0.0)) throw DomainError("kummer_phi: z must be >= 0");
  if (near_nonpositive_integer(b, 1e-12))
    throw ParameterPole("kummer_phi: b within 1e-12 of non-positive integer");

  // Power series with term recurrence and compensated (Kahan) summation.
  double sum = 1.0, comp = 0.0, term = 1.0, max_abs_term = 1.0;
  for (int n = 0; n < 10000; ++n) {
    term *= (a + n) / (b + n) * z / (n + 1.0);
    if (term == 0.0) break;  // terminating series (a a non-positive integer)
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    max_abs_term = std::max(max_abs_term, std::fabs(term));
    if (n > z && std::fabs(term) < 1e-17 * std::fabs(sum)) break;
  }
  // Cancellation monitor: if the largest term exceeded the sum by more than
  // three digits, the series answer has lost too much precision; switch to
  // the large-z asymptotic form.
  if (max_abs_term > 1e3 * std::fabs(sum)) return kummer_asymptotic(a, b, z);
  return sum;
}

namespace {

// Halley refinement of w*e^w = x, valid on either branch away from w = -1.
double lambert_halley(double w, double x) {
  for (int it = 0; it < 40; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    const double dw = f / denom;
    w -= dw;
    if (std::fabs(dw) <= 1e-16 * (1.0 + std::fabs(w))) break;
  }
  return w;
}

// Series around the branch point x = -1/e in p = ±sqrt(2(e x + 1)).
double lambert_branch_series(double p) {
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))));
}

}  // namespace

double lambert_w0(double x) {
  if (std::isnan(x)) throw DomainError("lambert_w0: NaN argument");
  if (x < -kInvE * (1.0 + 4e-16))
    throw DomainError("lambert_w0: argument below -1/e");
  x = std::max(x, -kInvE);
  const double ex1 = std::fma(2.718281828459045235, x, 1.0);  // e*x + 1
  if (ex1 <= 0.0) return -1.0;

  double w;
  if (ex1 < 0.11) {
    w = lambert_branch_series(std::sqrt(2.0 * ex1));
    if (ex1 < 1e-12) return w;  // series already at full precision
  } else if (std::fabs(x) <= 0.05) {
    w = x * (1.0 + x * (-1.0 + x * (1.5 + x * (-8.0 / 3.0 + x * (125.0 / 24.0)))));
  } else if (x > 3.0) {
    const double l1 = std::log(x), l2 = std::log(l1);
    w = l1 - l2 + l2 / l1 + l2 * (l2 - 2.0) / (2.0 * l1 * l1);
  } else {
    w = std::log1p(x);
  }
  return lambert_halley(w, x);
}

double lambert_w_minus1(double x) {
  if (std::isnan(x)) throw DomainError("lambert_w_minus1: NaN argument");
  if (!(x < 0.0)) throw DomainError("lambert_w_minus1: argument must be negative");
  if (x < -kInvE * (1.0 + 4e-16))
    throw DomainError("lambert_w_minus1: argument below -1/e");
  x = std::max(x, -kInvE);
  const double ex1 = std::fma(2.718281828459045235, x, 1.0);
  if (ex1 <= 0.0) return -1.0;

  if (ex1 < 0.025) {
    const double w = lambert_branch_series(-std::sqrt(2.0 * ex1));
    if (ex1 < 1e-12) return w;
    return lambert_halley(w, x);
  }
  // Log-space Newton on h(w) = w + ln(-w) - ln(-x); h is increasing on
  // w < -1 and the seed w = ln(-x) - ln(-ln(-x)) lies on the correct side
  // for small |x|. Stable down to x = -1e-300 where e^w underflows.
  const double lx = std::log(-x);
  double w = lx - std::log(-lx);
  if (w > -1.0) w = -1.0 - 1e-10;
  for (int it = 0; it < 60; ++it) {
    const double h = w + std::log(-w) - lx;
    const double dw = h * w / (w + 1.0);
    double wn = w - dw;
    if (wn >= -1.0) wn = 0.5 * (w - 1.0);  // keep iterates on the branch
    const double step = std::fabs(wn - w);
    w = wn;
    if (step <= 1e-16 * std::fabs(w)) break;
  }
  // One Halley polish in direct space when e^w is representable.
  if (w > -700.0) w = lambert_halley(w, x);
  return w;
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

namespace {

// Rational approximation for the normal quantile (Wichura's PPND16 layout):
// central region in q = p - 1/2, tail regions in r = sqrt(-ln(min(p,1-p))).
double normal_quantile_seed(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                   6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
               1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
            5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
          4.2313330701600911252e1) * r + 1.0);
    return num / den;
  }
  double r = std::sqrt(-std::log(std::min(p, 1.0 - p)));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
    val = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    val = num / den;
  }
  return (p < 0.5) ? -val : val;
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("normal_quantile: p must lie in (0,1)");
  double x = normal_quantile_seed(p);
  // Halley polish: F''(x) = -x f(x), so dx = d / (1 + d*x/2), d = (F-p)/f.
  for (int it = 0; it < 2; ++it) {
    const double pdf = 0.39894228040143267794 * std::exp(-0.5 * x * x);
    if (pdf < 1e-290) break;
    const double d = (normal_cdf(x) - p) / pdf;
    x -= d / (1.0 + 0.5 * d * x);
  }
  return x;
}

double poisson_tail_exact(double rate, long long n) {
  if (!(rate > 0.0) || rate > 1e6)
    throw DomainError("poisson_tail_exact: rate must lie in (0, 1e6]");
  if (n < 0) throw DomainError("poisson_tail_exact: n must be >= 0");

  const double lrate = std::log(rate);
  const auto log_pmf = [&](long long k) {
    return static_cast<double>(k) * lrate - rate - std::lgamma(static_cast<double>(k) + 1.0);
  };

  if (static_cast<double>(n) < rate) {
    // CDF path: sum k = n down to 0 with descending ratios (all < 1), then
    // complement. The CDF is < ~0.6 here so 1 - CDF keeps full precision.
    double sum = 1.0, ratio = 1.0;
    for (long long j = 1; j <= n; ++j) {
      ratio *= static_cast<double>(n - j + 1) / rate;
      sum += ratio;
      if (ratio < 1e-20 * sum) break;
    }
    const double cdf = std::exp(log_pmf(n) + std::log(sum));
    return 1.0 - cdf;
  }
  // Tail path: sum k = n+1 upward with ascending ratios (all < 1).
  double sum = 1.0, ratio = 1.0;
  for (long long j = 1; j < 400000; ++j) {
    ratio *= rate / static_cast<double>(n + 1 + j);
    sum += ratio;
    if (ratio < 1e-20 * sum) break;
  }
  return std::exp(log_pmf(n + 1) + std::log(sum));
}

}  // namespace heavytail::specfun
