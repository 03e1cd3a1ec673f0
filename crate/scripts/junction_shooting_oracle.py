"""Independent shooting-method reference for the default junction configuration.

Solves -E_c psi'' + (U - U_min) psi = E psi on the well window with Dirichlet walls
using Numerov integration on 2**15 steps and bisection on the right-wall value.
The window is: left edge where U - U_min = 3 * (barrier top - U_min), right edge
at the adjacent barrier maximum.
"""
import json
import math
import sys

import numpy as np
from scipy.optimize import brentq

E = 1.602176634e-19
H = 6.62607015e-34
HBAR = H / (2 * math.pi)
PHI0 = H / (2 * E)


def derived(c, i0, ind):
    ec = (2 * E) ** 2 / (2 * c)
    ej = HBAR / (2 * E) * i0
    beta = 2 * math.pi * i0 * ind / PHI0
    return ec, ej, beta


def window(ec, ej, beta, phi):
    u = lambda d: -ej * math.cos(d) + ej / (2 * beta) * (d - 2 * math.pi * phi) ** 2
    du = lambda d: math.sin(d) + (d - 2 * math.pi * phi) / beta
    lo, hi = 2 * math.pi * phi - beta - math.pi, 2 * math.pi * phi + beta + math.pi
    xs = np.linspace(lo, hi, 400001)
    g = [du(x) for x in xs]
    crit = []
    for i in range(len(xs) - 1):
        if g[i] * g[i + 1] < 0:
            crit.append((brentq(du, xs[i], xs[i + 1], xtol=1e-15, rtol=1e-15), g[i] < 0))
    dmin = crit[0][0]
    assert crit[0][1] and not crit[1][1]
    dmax = crit[1][0]
    bar = u(dmax) - u(dmin)
    left = brentq(lambda d: u(d) - u(dmin) - 3 * bar, dmin - 10, dmin, xtol=1e-15, rtol=1e-15)
    return u, dmin, left, dmax, bar


def shoot(vv, h, eps):
    n = len(vv)
    k = (eps - vv) * h * h / 12.0
    psi = np.zeros(n)
    psi[1] = 1e-30
    for i in range(1, n - 1):
        psi[i + 1] = (2 * psi[i] * (1 - 5 * k[i]) - psi[i - 1] * (1 + k[i - 1])) / (1 + k[i + 1])
    return psi


def nodes(psi):
    # sign changes on (a, b]; equals the number of eigenvalues below the trial energy
    s = np.sign(psi[1:])
    s = s[s != 0]
    return int(np.sum(s[1:] != s[:-1]))


def eigen(vv, h, level, lo, hi):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if nodes(shoot(vv, h, mid)) > level:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-14 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def main(cfg_path):
    cfg = json.load(open(cfg_path))["junction"]
    ec, ej, beta = derived(cfg["capacitance"], cfg["critical_current"], cfg["inductance"])
    u, dmin, a, b, bar = window(ec, ej, beta, cfg["phi_dc"])
    n = 2 ** 15
    h = (b - a) / n
    xs = a + h * np.arange(n + 1)
    vv = np.array([(u(x) - u(dmin)) / ec for x in xs])
    levels = []
    for lvl in range(3):
        levels.append(eigen(vv, h, lvl, 0.0, bar / ec))
    psis = []
    for lvl, ev in enumerate(levels):
        p = shoot(vv, h, ev)
        p[-1] = 0.0
        p /= math.sqrt(np.trapezoid(p * p, xs))
        psis.append(p)
    d01 = abs(np.trapezoid(psis[0] * xs * psis[1], xs))
    de = (levels[1] - levels[0]) * ec
    phi_ac = 1e-3 * abs(cfg["phi_dc"])
    omega = 2 * math.pi * ej * phi_ac / beta * d01 / HBAR
    out = {
        "E_c_J": ec,
        "E_J_J": ej,
        "beta": beta,
        "delta_min": dmin,
        "window": [a, b],
        "barrier_over_Ec": bar / ec,
        "levels_over_Ec": levels,
        "delta_eps_over_h_Hz": de / H,
        "delta_01": d01,
        "hbar_omega_x_over_delta_eps": HBAR * omega / de,
    }
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main(sys.argv[1])
