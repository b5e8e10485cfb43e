#!/usr/bin/env python3
"""Generate the frozen reference values used by the C++ unit/acceptance tests.

Everything is computed with mpmath (50 significant digits for closed forms,
25-30 for quadratures) so the printed 17-digit doubles are correctly rounded.
Independent methods are used wherever possible:

  * gamma / Kummer / Lambert W / normal cdf: mpmath's arbitrary-precision
    implementations (series/continued fractions unrelated to the C++ code).
  * Poisson tails: direct log-space summation, cross-checked with gammainc.
  * lognormal MGF cut kernels: direct numerical quadrature of the exact
    analytically-continued integral representation (no saddle-point input).
  * compound-lognormal tail: two-level quadrature with the exact kernels,
    giving an approximation-free target for the saddle-kernel pipeline.

Run:  python3 tools/gen_reference_values.py [fast|cp|cl17|cl9|all]

The quadrature stages (cp, cl17, cl9) take several minutes each.
"""

import sys

import mpmath as mp


def show(name, value, dps=17):
    print(f"constexpr double {name} = {mp.nstr(mp.mpf(value), dps)};", flush=True)


# ---------------------------------------------------------------- fast stage

def stage_fast():
    mp.mp.dps = 50

    print("// ---- gamma ----")
    show("kGammaNeg02", mp.gamma("-0.2"))
    show("kGammaNeg14", mp.gamma("-1.4"))
    show("kGammaNeg24", mp.gamma("-2.4"))
    show("kGamma12", mp.gamma("1.2"))
    show("kGamma06", mp.gamma("0.6"))
    show("kGamma36", mp.gamma("3.6"))
    show("kGammaNeg05", mp.gamma("-0.5"))
    show("kGamma105", mp.gamma("10.5"))
    show("kGamma1705", mp.gamma("170.5"))
    show("kGammaTiny", mp.gamma("1e-8"))
    show("kGammaNeg3eps", mp.gamma("-2.999999"))

    print("\n// ---- Kummer Phi(a, b, z) = 1F1(a; b; z) ----")
    cases = [
        ("-1.2", "-0.2", "0.1"),
        ("-1.2", "-0.2", "0.5"),
        ("-1.2", "-0.2", "2.0"),
        ("-1.2", "-0.2", "10.0"),
        ("-1.2", "-0.2", "30.0"),
        ("-1.2", "-0.2", "50.0"),
        ("-1.7", "-0.7", "1.0"),
        ("-1.7", "-0.7", "25.0"),
        ("-0.3", "0.7", "5.0"),
        ("-2.3", "-1.3", "40.0"),
        ("-0.5", "0.5", "50.0"),
    ]
    for i, (a, b, z) in enumerate(cases):
        v = mp.hyp1f1(mp.mpf(a), mp.mpf(b), mp.mpf(z))
        print(f"// phi({a}, {b}, {z})")
        show(f"kKummer{i}", v)

    print("\n// ---- Lambert W ----")
    for i, x in enumerate(["-0.36", "-0.2", "-0.05", "0.3", "1.0", "5.0", "100.0"]):
        show(f"kW0_{i}", mp.lambertw(mp.mpf(x), 0).real)
    for i, x in enumerate(["-0.367", "-0.3", "-0.1", "-0.01", "-1e-6", "-1e-250"]):
        show(f"kWm1_{i}", mp.lambertw(mp.mpf(x), -1).real)

    print("\n// ---- normal cdf / quantile ----")
    show("kNcdfNeg1", mp.ncdf(-1))
    show("kNcdfNeg8", mp.ncdf(-8))
    show("kNcdfNeg12", mp.ncdf(-12))
    show("kNcdf05", mp.ncdf(0.5))
    for i, p in enumerate(["0.75", "1e-4", "0.001", "0.999"]):
        q = mp.sqrt(2) * mp.erfinv(2 * mp.mpf(p) - 1)
        print(f"// N^-1({p})")
        show(f"kNq{i}", q)

    print("\n// ---- Poisson tails: P(N > n0), N ~ Poisson(rate) ----")

    def poisson_tail(rate, n0, terms=4000):
        rate = mp.mpf(rate)
        s = mp.mpf(0)
        for k in range(n0 + 1, n0 + 1 + terms):
            s += mp.e**(-rate + k * mp.log(rate) - mp.loggamma(k + 1))
        return s

    for i, (rate, n0) in enumerate([("20", 40), ("2", 0), ("500", 560), ("5", 30),
                                    ("20", 30), ("0.1", 3), ("100", 170)]):
        v = poisson_tail(rate, n0)
        chk = mp.gammainc(n0 + 1, 0, mp.mpf(rate), regularized=True)
        assert mp.almosteq(v, chk, rel_eps=mp.mpf("1e-30")), (v, chk)
        print(f"// P(Po({rate}) > {n0})")
        show(f"kPoTail{i}", v)
    show("kPoCramer_20_30", mp.e**(-30 * (mp.mpf(20) - mp.log(20) - 1)))

    print("\n// ---- Pareto cut-kernel spot values ----")
    show("kNeg2PiOverGamma12", -2 * mp.pi / mp.gamma("1.2"))

    alpha = mp.mpf("2.2")
    for nm, yy in [("kPsi_a22_y01", "0.1"), ("kPsi_a22_y1", "1.0"),
                   ("kPsi_a22_y5", "5.0")]:
        yy = mp.mpf(yy)
        show(nm, mp.hyp1f1(1 - alpha, 2 - alpha, yy)
             + mp.gamma(2 - alpha) * mp.cos(mp.pi * alpha) * yy**(alpha - 1) - 1)

    print("\n// ---- lognormal cut kernels: exact continuation quadratures ----")
    mp.mp.dps = 30

    w2 = mp.mpf(5)
    x = w2 * mp.e**(-w2)
    print("// exact Im M(x e^{i pi}) at mu=0, sigma=1, x = 5e^{-5} (w2=5)")
    show("kImLogn_w2_5_exact", im_mgf_logn_exact(0, 1, x))
    print("// order-1 saddle value at the same point: -1/4 e^{-7.5} (1 + 5/128)")
    show("kImLogn_w2_5_saddle", -mp.e**mp.mpf("-7.5") / 4 * (1 + mp.mpf(5) / 128))

    w2 = mp.mpf(9)
    print("// exact at w2=9 (mu=0, sigma=1)")
    show("kImLogn_w2_9_exact", im_mgf_logn_exact(0, 1, w2 * mp.e**(-w2)))

    print("// exact Re M(x e^{i pi}) at mu=0, sigma=1, x=0.05")
    show("kReLogn_x005_exact", re_mgf_logn_exact(0, 1, "0.05"))
    print("// exact Re at mu=0, sigma=1, x=0.02")
    show("kReLogn_x002_exact", re_mgf_logn_exact(0, 1, "0.02"))

    mu_s, sig_s = mp.mpf(10), mp.mpf(2)
    w1 = mp.mpf("0.5")
    x_spl = w1 * mp.e**(-w1) / (sig_s**2 * mp.e**mu_s)
    nu = 1 / mp.ncdf(0)
    print("// truncated spliced: mu=10 sigma=2 x0=e^10, x with w1=0.5, nu=2")
    show("kReSpliced_w105_exact", nu * re_mgf_logn_exact(mu_s, sig_s, x_spl, lo=0))
    show("kImSpliced_w105_exact", nu * im_mgf_logn_exact(mu_s, sig_s, x_spl, lo=0))
    show("kXSpliced_w105", x_spl)

    print("\n// ---- single lognormal tail anchors ----")
    mp.mp.dps = 50
    show("kLognAsym_s_e8", 1 / mp.sqrt(2 * mp.pi) / 8 * mp.e**(mp.mpf(-64) / 2))
    show("kLognAsym_s_e12", 1 / mp.sqrt(2 * mp.pi) / 12 * mp.e**(mp.mpf(-144) / 2))
    show("kLognTail_e8", mp.ncdf(-8))
    show("kLognTail_e12", mp.ncdf(-12))

    print("\n// ---- asymptotic expansion coefficients, uniform-body reference model ----")
    alpha = mp.mpf("2.2"); omega = mp.mpf("0.35"); lamT = mp.mpf(20)
    m1 = (mp.mpf("0.4") + 1) / 2
    m2 = (mp.mpf("0.4")**2 + mp.mpf("0.4") + 1) / 3 / 2
    c1 = omega * (1 - alpha) / (2 - alpha) + (1 - omega) * m1
    c2 = omega / 2 * (1 - alpha) / (3 - alpha) + (1 - omega) * m2
    a1 = -(omega * lamT)**2 / 2 * mp.gamma(2 - alpha)**2 / mp.gamma(3 - 2 * alpha)
    a1c = (omega * lamT)**2 * (mp.gamma(2 - alpha) * mp.gamma(2 * alpha - 2)
                               * mp.cos(mp.pi * alpha) / mp.gamma(alpha - 1))
    assert mp.almosteq(a1, a1c, rel_eps=mp.mpf("1e-40"))
    a2 = omega * lamT**2 * (alpha - 1) * c1
    a3 = -mp.pi**2 / 6 * mp.gamma(3 * alpha - 3) * (omega * lamT / mp.gamma(alpha - 1))**3
    a4 = (omega * lamT)**2 / 2 * lamT * mp.gamma(2 - alpha)**2 / mp.gamma(2 - 2 * alpha) * c1
    a5 = omega * lamT**2 * alpha * (alpha - 1) * (c2 + lamT / 2 * c1**2)
    show("kUb_m1", m1); show("kUb_m2", m2)
    show("kUb_c1", c1); show("kUb_c2", c2)
    show("kUb_a1", a1); show("kUb_a2", a2); show("kUb_a3", a3)
    show("kUb_a4", a4); show("kUb_a5", a5)

    mean_b = mp.mpf("63877.92"); var_b = mp.mpf("2.625e8"); x0 = mp.mpf("1e5")
    m1b = mean_b / x0
    m2b = (var_b + mean_b**2) / (2 * x0**2)
    c1b = omega * (1 - alpha) / (2 - alpha) + (1 - omega) * m1b
    c2b = omega / 2 * (1 - alpha) / (3 - alpha) + (1 - omega) * m2b
    show("kMomB_m1", m1b); show("kMomB_m2", m2b)
    show("kMomB_c1", c1b); show("kMomB_c2", c2b)
    show("kMomB_a2", omega * lamT**2 * (alpha - 1) * c1b)
    show("kMomB_a4", (omega * lamT)**2 / 2 * lamT * mp.gamma(2 - alpha)**2
         / mp.gamma(2 - 2 * alpha) * c1b)
    show("kMomB_a5", omega * lamT**2 * alpha * (alpha - 1) * (c2b + lamT / 2 * c1b**2))

    print("\n// ---- misc closed forms ----")
    show("kTenPowNeg12", mp.mpf(10)**mp.mpf("-1.2"))
    show("kSqrtPi", mp.sqrt(mp.pi))
    show("kParetoSample_u05", mp.mpf("1e5") * mp.mpf("0.5")**(-1 / mp.mpf("1.2")))
    show("kVarGuess_ub",
         mp.mpf("1e5") * (mp.mpf("0.35") * 20 / mp.mpf("0.001"))**(1 / mp.mpf("1.2")))
    show("kLognSample_u05", mp.e**(10 + 2 * mp.sqrt(2) * mp.erfinv(2 * mp.mpf("0.75") - 1)))


# ------------------------------------------------------ exact logn kernels

def _kernel_quad(mu, sigma, x, trig, lo=None):
    """Re/Im of M(x e^{i pi}) for lognormal(mu, sigma), M(z) = E e^{-z X}.

    Exact representation (log-contour shifted by i*pi), z = ln t - mu:
      M(x e^{i pi}) = e^{pi^2/(2 s^2)}/sqrt(2 pi s^2)
                      * Int dz exp[(-kappa e^z - z^2/2)/s^2] e^{i pi z/s^2},
    kappa = x s^2 e^mu.  `lo` truncates the integral at z = ln x0 - mu and the
    caller multiplies by nu.
    """
    mu, sigma, x = map(mp.mpf, (mu, sigma, x))
    kap = x * sigma**2 * mp.e**mu
    s2 = sigma**2
    pref = mp.e**(mp.pi**2 / (2 * s2)) / mp.sqrt(2 * mp.pi * s2)

    def f(z):
        return mp.e**((-kap * mp.e**z - z * z / 2) / s2) * trig(mp.pi * z / s2)

    zlo = -40 * max(1, s2) if lo is None else mp.mpf(lo)
    zhi = 40 * max(1, s2)
    # split at oscillation half-periods (s2) to keep tanh-sinh honest
    pts = [zlo]
    k = mp.floor(zlo / s2) + 1
    while k * s2 < zhi:
        if k * s2 > zlo:
            pts.append(k * s2)
        k += 1
    pts.append(zhi)
    return pref * mp.quad(f, pts)


def im_mgf_logn_exact(mu, sigma, x, lo=None):
    return _kernel_quad(mu, sigma, x, mp.sin, lo)


def re_mgf_logn_exact(mu, sigma, x, lo=None):
    return _kernel_quad(mu, sigma, x, mp.cos, lo)


# ------------------------------------------------------- compound Pareto

def stage_cp():
    mp.mp.dps = 30

    def compound_pareto_tail(alpha, omega, lamT, x0, s, body_mgf_neg):
        """Tail via the cut integral plus the Poisson floor term P(Po > floor(s/x0)).

        integrand(y) = 1/(pi y) exp(-y s/x0 + lamT Psi(y)) sin(pi om lamT /
                       Gamma(a-1) * y^(a-1)),
        Psi(y) = om Phi(1-a,2-a,y) + (1-om) M1(-y/x0) - 1
                 + om Gamma(2-a) cos(pi a) y^(a-1).
        """
        alpha, omega, lamT, x0, s = map(mp.mpf, (alpha, omega, lamT, x0, s))
        shat = s / x0
        ga1 = mp.gamma(alpha - 1)
        c_sin = mp.pi * omega * lamT / ga1
        g2a = mp.gamma(2 - alpha) * mp.cos(mp.pi * alpha)

        def f(yv):
            psi = (omega * mp.hyp1f1(1 - alpha, 2 - alpha, yv)
                   + (1 - omega) * body_mgf_neg(yv) - 1
                   + omega * g2a * yv**(alpha - 1))
            return (mp.e**(-shat * yv + lamT * psi) / yv / mp.pi
                    * mp.sin(c_sin * yv**(alpha - 1)))

        y_hi = 80 / shat  # exp(-80) cut: far beyond 30-digit relevance
        zeros, k = [], 1
        while True:
            z = (k * ga1 / (omega * lamT))**(1 / (alpha - 1))
            if z >= y_hi or k > 5000:
                break
            zeros.append(z)
            k += 1
        pts = [mp.mpf(0)] + zeros + [y_hi]
        val = mp.quad(f, pts)
        n0 = int(mp.floor(shat))
        val += mp.gammainc(n0 + 1, 0, lamT, regularized=True)
        return val

    def uniform_body(lo, hi, x0):
        lo, hi, x0 = map(mp.mpf, (lo, hi, x0))

        def m(yv):
            t = yv / x0
            if yv == 0:
                return mp.mpf(1)
            return (mp.e**(t * hi) - mp.e**(t * lo)) / (t * (hi - lo))

        return m

    body = uniform_body(40000, 100000, 100000)
    for nm, shat in [("kCpTail_shat100", 100), ("kCpTail_shat1600", 1600)]:
        v = compound_pareto_tail("2.2", "0.35", "20", "100000",
                                 mp.mpf(shat) * 100000, body)
        print(f"// alpha=2.2 omega=0.35 lamT=20 x0=1e5 uniform body [4e4,1e5], s_hat={shat}")
        show(nm, v)

    v = compound_pareto_tail("2.2", "1.0", "1.0", "1.0", "100.0", lambda yv: mp.mpf(1))
    print("// omega=1 lamT=1 alpha=2.2 x0=1, s=100")
    show("kCpTail_pure_shat100", v)


# ---------------------------------------------------- compound lognormal

def compound_logn_tail_exact(mu, sigma, lamT, s):
    """omega=1, x0=0: -(1/pi) Int dx/x e^{-sx+lamT(Re M-1)} sin(lamT Im M),
    with the exact (quadrature) kernels. Slow but approximation-free."""
    mu, sigma, lamT, s = map(mp.mpf, (mu, sigma, lamT, s))

    def f(u):  # u = ln x
        x = mp.e**u
        re = re_mgf_logn_exact(mu, sigma, x)
        im = im_mgf_logn_exact(mu, sigma, x)
        return -mp.e**(-s * x + lamT * (re - 1)) * mp.sin(lamT * im) / mp.pi

    w0 = mp.log(s) - mu
    u0 = mp.log(w0) - w0 - mu - 2 * mp.log(sigma)  # ln of the peak x
    pts = [u0 - 18, u0 - 8, u0 - 4, u0 - 2, u0, u0 + 1, u0 + 2, u0 + 3, u0 + 3.8]
    return mp.quad(f, pts, maxdegree=5)


def stage_cl17():
    mp.mp.dps = 22
    v = compound_logn_tail_exact(10, 2, 5, mp.e**17)
    print("// mu=10 sigma=2 omega=1 x0=0 lamT=5, s=e^17")
    show("kClTail_e17_exact", v)


def stage_cl9():
    mp.mp.dps = 22
    v = compound_logn_tail_exact(0, 1, 3, mp.e**9)
    print("// mu=0 sigma=1 omega=1 x0=0 lamT=3, s=e^9")
    show("kClTail_e9_exact", v)


if __name__ == "__main__":
    stages = sys.argv[1:] or ["fast"]
    if stages == ["all"]:
        stages = ["fast", "cp", "cl17", "cl9"]
    for st in stages:
        {"fast": stage_fast, "cp": stage_cp,
         "cl17": stage_cl17, "cl9": stage_cl9}[st]()
    print("done.", flush=True)
