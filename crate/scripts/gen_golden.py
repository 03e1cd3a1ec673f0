"""Golden CSV files for the figure configs, evaluated with mpmath at 50 digits.

Fig. 1 and Fig. 2 use the closed-form mixing probabilities; Fig. 3 uses direct
propagation of the CP-violating sequence (see cpv_regen_oracle.py). The time grid
is the double-precision grid t_i = 10 i / 999 used by the CLI.

    python3 scripts/gen_golden.py crates/cli/tests/golden
"""
import os
import sys

import mpmath as mp

from cpv_regen_oracle import cpv_probs

mp.mp.dps = 50

N = 1000
T_MAX = 10.0


def grid():
    return [T_MAX * i / (N - 1) for i in range(N)]


def mixing(t, tau1, tau2, dm):
    t = mp.mpf(t)
    a = mp.exp(-t / tau1)
    b = mp.exp(-t / tau2)
    cross = 2 * mp.exp(-t / (2 * tau1) - t / (2 * tau2)) * mp.cos(dm * t)
    return (a + b + cross) / 4, (a + b - cross) / 4


def write(path, header, rows):
    with open(path, "w", newline="\n") as f:
        f.write(header + "\n")
        for t, p, q in rows:
            f.write(f"{repr(float(t)) if t else '0'},{repr(float(p))},{repr(float(q))}\n")


def main(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    ts = grid()
    tau2_fig1 = mp.mpf("0.52") / mp.mpf("0.89") * 1000
    write(
        os.path.join(out_dir, "fig1_mix_analytic.csv"),
        "t_over_tau1,P_K0,P_K0bar",
        [(t, *mixing(t, 1, tau2_fig1, mp.mpf("0.477"))) for t in ts],
    )
    write(
        os.path.join(out_dir, "fig2_mix_qubit.csv"),
        "t_over_tau1,P_0,P_1",
        [(t, *mixing(t, 1, 1000, 2)) for t in ts],
    )
    eps = mp.mpf("0.525") * (1 + 1j)
    write(
        os.path.join(out_dir, "fig3_cpv.csv"),
        "t_over_tau1,P_0,P_1",
        [(t, *cpv_probs(mp.mpf(t), eps, 1, 1000, 2)) for t in ts],
    )


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "golden")
