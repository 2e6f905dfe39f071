"""High-precision (mpmath) c* for extreme mu, AWGN reward."""
import mpmath as mp
mp.mp.dps = 120

def exp_cstar(mu):
    mu = mp.mpf(mu); eta = 1/mu
    # int_0^c eta e^{-eta x}/(1+x) dx = eta e^eta (E1(eta) - E1(eta(1+c)))
    def G(c):
        I = eta*mp.e**eta*(mp.e1(eta) - mp.e1(eta*(1+c)))
        return 1 - (1+c)*I
    # bracket
    lo = mu*mp.mpf('1e-3'); hi = mu*1000*max(1, -mp.log(mu))
    return mp.findroot(G, (lo, hi), solver='anderson', tol=mp.mpf('1e-60'))

def geo_cstar(mu):
    mu = mp.mpf(mu); p = 1/(1+mu); q = 1-p
    # S_j = (p/q) sum_{m=1}^{j+1} q^m/m ; find j with 1/(1+j+1) < S_j ... case i root 1/(1+c) = S_j
    def S(j):  # sum_{k=0}^{j} p q^k/(1+k)
        n = j+1
        return (p/q)*(-mp.log(1-q) - q**(n+1)*mp.lerchphi(q, 1, n+1))
    # predicate at c just below atom j+1: 1/(1+c) >= S_j. find smallest j s.t. 1/(2+j) < S_j -> root in (j, j+1)
    lo, hi = 0, int(mu)  # 1/(2+j) decreasing, S_j increasing
    while lo < hi:
        m = (lo+hi)//2
        if 1/mp.mpf(2+m) < S(m): hi = m
        else: lo = m+1
    j = lo
    # check case ii at atom j: need S_{j-1} <= 1/(1+j) <= S_j ; case i root in (j, j+1)? careful
    c = 1/S(j) - 1
    if c <= j: return mp.mpf(j)
    return c

def uni_cstar(mu):
    w = 2*mp.mpf(mu)
    return mp.findroot(lambda c: (1+c)*mp.log1p(c) - w, w/mp.log(w))

astar = mp.findroot(lambda a: mp.pi*a/2*mp.quad(lambda y: mp.e**(-mp.pi*y*y/4), [0, a]) - 1, 0.875)
print("astar", astar)
print("exp small")
for e in [40, 42, 45]:
    mu = mp.mpf(10)**(-e); c = exp_cstar(mu); print(e, mp.nstr(c/(-mu*mp.log(mu)), 8))
print("exp large")
for e in [6, 8, 10, 11, 12, 13, 14, 16, 20]:
    mu = mp.mpf(10)**e; c = exp_cstar(mu); print(e, mp.nstr(c/(mu/mp.log(mu)), 8))
print("geo large")
for e in [6, 7, 8, 9, 10, 12, 14]:
    mu = mp.mpf(10)**e; c = geo_cstar(mu); print(e, mp.nstr(c/(mu/mp.log(mu)), 8))
print("uni large")
for e in [6, 7, 8, 9, 10, 12, 14]:
    mu = mp.mpf(10)**e; c = uni_cstar(mu); print(e, mp.nstr(c/(2*mu/mp.log(mu)), 8))
