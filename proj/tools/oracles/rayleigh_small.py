"""High-precision c* for Rayleigh arrivals at small mu, AWGN reward."""
import mpmath as mp
mp.mp.dps = 60

def ray_cstar(mu):
    mu = mp.mpf(mu); th = 2*mu*mu/mp.pi
    def G(c):
        I = mp.quad(lambda x: x/th*mp.e**(-x*x/(2*th))/(1+x), [0, c/4, c/2, c])
        return 1 - (1+c)*I
    psi = 2/mp.sqrt(mp.pi)*mu*mp.sqrt(-mp.log(mu))
    return mp.findroot(G, (psi*mp.mpf('0.9'), psi*mp.mpf('1.05')), solver='anderson', tol=mp.mpf('1e-40')), psi

for e in [6, 8, 10, 11, 12, 15, 20]:
    c, psi = ray_cstar(mp.mpf(10)**(-e))
    print(e, mp.nstr(c/psi, 10))
for mu in ['10', '100', '1000', '10000']:
    mu = mp.mpf(mu); th = 2*mu*mu/mp.pi
    G = lambda c: 1 - (1+c)*mp.quad(lambda x: x/th*mp.e**(-x*x/(2*th))/(1+x), [0, 1, c/4, c/2, c])
    c = mp.findroot(G, (mu*0.5, mu*1.5), solver='anderson', tol=mp.mpf('1e-40'))
    print('large', mp.nstr(mu,3), mp.nstr(c, 15))
