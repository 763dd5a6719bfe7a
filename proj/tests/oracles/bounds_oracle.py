#!/usr/bin/env python3
"""Independent high-precision evaluation of the exponent recursions and G(k)
bound formulas. Used once to freeze regression values into the C++ tests."""
import mpmath as mp

mp.mp.dps = 40


def sigma_data(k):
    beta = mp.mpf(k - 2) * (k + 1) ** 2 / mp.mpf(k) ** 2
    lam = mp.findroot(lambda l: (1 + l) * beta - mp.e ** l, mp.log(k) + mp.log(mp.log(k)) + 0.5)
    sh = mp.log(1 + mp.mpf(1) / k) / (4 * (1 + lam))
    return beta, lam, sh


def t1(k):
    _, _, sh = sigma_data(k)
    mu = mp.log(mp.mpf(k + 1) / k)
    cont = mp.log(mu * (k - 2) / (2 * sh)) / mu
    best = None
    for v in range(0, int(4 * cont) + 1):
        b = 7 + 2 * v + 2 * int(mp.ceil((k - 2) / (2 * sh) * (mp.mpf(k) / (k + 1)) ** v))
        if best is None or b < best[0]:
            best = (b, v)
    return best, cont


def delta_exact(k, s):
    d = mp.mpf(k - 2)
    for _ in range(3, s + 1):
        th = 1 / (k + d)
        d = (d + k * th - 1) / (1 + th)
    return d


def t2(k):
    _, _, sh = sigma_data(k)
    u = 1 + int(mp.ceil((k + 1) / mp.mpf(2) * mp.log(1 / sh)))
    d316 = 2 * k * mp.e ** (-2 * mp.mpf(u - 1) / (k + 1))
    b316 = 3 + 2 * u + 2 * int(mp.ceil(d316 / (2 * sh)))
    dex = delta_exact(k, u)
    bex = 3 + 2 * u + 2 * int(mp.ceil(dex / (2 * sh)))
    return u, b316, bex


for k in [3, 10, 20, 50, 100, 500, 1000]:
    beta, lam, sh = sigma_data(k)
    (b1, v), cont = t1(k)
    u, b316, bex = t2(k)
    a1 = 2 * k * mp.log(k * mp.log(k))
    a2 = k * mp.log(k * mp.log(k))
    print(f"k={k} lam={mp.nstr(lam,12)} sigma_hat={mp.nstr(sh,12)} T1={b1} v={v} cont={mp.nstr(cont,8)} "
          f"T2={b316} u={u} T2exact={bex} T1/2klog={mp.nstr(b1/a1,5)} T2/klog={mp.nstr(b316/a2,5)}"
          f" T1/asym={mp.nstr(b1/(2*k*(mp.log(k*mp.log(k))+1+mp.log(2))),5)}")
