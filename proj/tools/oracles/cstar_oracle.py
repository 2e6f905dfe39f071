"""Independent oracle for c* under AWGN reward (scipy quadrature / exact sums)."""
import math
from scipy import integrate, optimize, special
import numpy as np

def cstar_cont(pdf, hi_guess, scale):
    # root of (1+c) * int_0^c pdf(x)/(1+x) dx = 1
    def F(c):
        pts = None
        v, _ = integrate.quad(lambda x: pdf(x) / (1 + x), 0, c, epsabs=1e-14, epsrel=1e-13, limit=500)
        return (1 + c) * v - 1
    lo, hi = 1e-300, hi_guess
    while F(hi) < 0:
        hi *= 2
    return optimize.brentq(F, min(hi/2, hi_guess*1e-6), hi, xtol=1e-15, rtol=1e-14) if F(min(hi/2, hi_guess*1e-6)) < 0 else None

def cstar_disc(logpmf, kmax):
    # walk partial sums S_j = sum_{i<=j} p_i/(1+i); c* in (j, j+1) with 1/(1+c)=S_j, or atom
    S = 0.0
    for k in range(kmax):
        Snew = S + math.exp(logpmf(k)) / (1 + k)
        # at atom k: predicate true iff 1/(1+k) >= S (S excludes atom k)
        if 1 / (1 + k) < S:
            # root in (k-1, k)
            return 1 / S - 1
        if 1 / (1 + k) <= Snew:
            # c slightly above k fails -> c* = k... need 1/(1+k) >= S (true) and for c in (k, k+1) 1/(1+c) < Snew
            return float(k) if 1/(1+k) <= Snew else None
        S = Snew
    return None

def geo(mu):
    p = 1 / (1 + mu)
    return cstar_disc(lambda k: k * math.log1p(-p) + math.log(p), 10**9)

def poi(mu):
    return cstar_disc(lambda k: -mu + k * math.log(mu) - special.gammaln(k + 1), 10**9)

def uni(mu):
    w = 2 * mu
    return optimize.brentq(lambda c: (1 + c) * math.log1p(c) - w, 1e-300, w, xtol=1e-15, rtol=1e-14)

def expo(mu):
    eta = 1 / mu
    return cstar_cont(lambda x: eta * math.exp(-eta * x), mu, mu)

def ray(mu):
    th = 2 * mu * mu / math.pi
    return cstar_cont(lambda x: x / th * math.exp(-x * x / (2 * th)), mu, mu)

def astar():
    f = lambda a: math.pi * a / 2 * integrate.quad(lambda y: math.exp(-math.pi * y * y / 4), 0, a, epsabs=1e-15)[0] - 1
    return optimize.brentq(f, 0.1, 2, xtol=1e-15)

if __name__ == "__main__":
    a = astar()
    print("astar", repr(a))
    print("exp1", repr(expo(1.0)), "uni2", repr(uni(1.0)))
    psi = {
        ("geometric", "small"): lambda m: m, ("geometric", "large"): lambda m: m / math.log(m),
        ("poisson", "small"): lambda m: m, ("poisson", "large"): lambda m: m,
        ("uniform", "small"): lambda m: 2 * m, ("uniform", "large"): lambda m: 2 * m / math.log(m),
        ("exponential", "small"): lambda m: -m * math.log(m), ("exponential", "large"): lambda m: m / math.log(m),
        ("rayleigh", "small"): lambda m: 2 / math.sqrt(math.pi) * m * math.sqrt(-math.log(m)),
        ("rayleigh", "large"): lambda m: a * m,
    }
    fn = dict(geometric=geo, poisson=poi, uniform=uni, exponential=expo, rayleigh=ray)
    for (fam, reg), ps in psi.items():
        mus = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-8] if reg == "small" else [1e1, 1e2, 1e3, 1e4, 1e5, 1e6]
        out = []
        for m in mus:
            try:
                cs = fn[fam](m)
                out.append(f"{m:g}:{cs/ps(m):.4f}")
            except Exception as e:
                out.append(f"{m:g}:ERR")
        print(fam, reg, " ".join(out))
