"""Direct-propagation oracle for the CP-violating sequence R_y(-pi/2) U(t) R_y(pi/2) K_L and the regeneration scenario.

All quantities in units where tau1 = 1. Evaluated with mpmath at 50 digits.
"""
import mpmath as mp

mp.mp.dps = 50


def cpv_probs(t, eps, tau1, tau2, dm):
    # diagonal free decay in the (K2=|0>, K1=|1>) basis, m = 0
    m2, m1 = dm / 2, -dm / 2
    e2 = mp.exp(-1j * m2 * t - t / (2 * tau2))
    e1 = mp.exp(-1j * m1 * t - t / (2 * tau1))
    n = mp.sqrt(1 + abs(eps) ** 2)
    c = 1 / mp.sqrt(2)
    # K_L = (|0> + eps|1>)/n, then R_y(pi/2) = [[c, -s], [s, c]]
    k0, k1 = 1 / n, eps / n
    a0, a1 = (c * k0 - c * k1) * e2, (c * k0 + c * k1) * e1
    # R_y(-pi/2) = [[c, s], [-s, c]]
    b0 = c * a0 + c * a1
    b1 = -c * a0 + c * a1
    return abs(b0) ** 2, abs(b1) ** 2


def cpv_summary():
    eps = mp.mpf("0.525") * (1 + 1j)
    ts = [mp.mpf(10.0 * i / 999.0) for i in range(1000)]
    p = [cpv_probs(t, eps, 1, 1000, 2) for t in ts]
    for k, name in ((0, "P_0"), (1, "P_1")):
        vals = [q[k] for q in p]
        i_min = min(range(len(vals)), key=lambda i: vals[i])
        after = max(vals[i_min:])
        print(f"{name}: start={mp.nstr(vals[0], 12)} min={mp.nstr(vals[i_min], 12)} at t={mp.nstr(ts[i_min], 6)} "
              f"max after={mp.nstr(after, 12)}")
    # continuous minima via refinement
    for k in (0, 1):
        f = lambda t: cpv_probs(t, eps, 1, 1000, 2)[k]
        best = min((f(mp.mpf(i) / 1000), mp.mpf(i) / 1000) for i in range(0, 10000))
        print(f"fine min P_{k}: {mp.nstr(best[0], 12)} at t={mp.nstr(best[1], 6)}")


def regen_summary(t1=20, t2=mp.mpf("0.1"), tau1=1, tau2=1000, dm=mp.mpf("0.477")):
    omega = mp.mpf("0.2") / t2
    m2, m1 = dm / 2, -dm / 2
    s = 1 / mp.sqrt(2)
    c2 = s * mp.exp(-1j * m2 * t1 - t1 / (2 * tau2))
    c1 = s * mp.exp(-1j * m1 * t1 - t1 / (2 * tau1))
    print("before |C1|/|C2| =", mp.nstr(abs(c1) / abs(c2), 12))
    h = mp.matrix([[m2 - 0.5j / tau2, omega / 2], [omega / 2, m1 - 0.5j / tau1]])
    u = mp.expm(-1j * h * t2)
    v = u * mp.matrix([c2, c1])
    print("after |C1|/|C2| =", mp.nstr(abs(v[1]) / abs(v[0]), 12))
    print("after C2 =", mp.nstr(v[0], 15), " C1 =", mp.nstr(v[1], 15))


if __name__ == "__main__":
    cpv_summary()
    regen_summary()
