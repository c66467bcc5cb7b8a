"""Sweep the twice-reduced series against the closed-form Coulomb amplitude.

Prints one line per (eta, k, theta) with the relative error, the order at
which the tail bound certified the tolerance, and the wall time of the sweep.

    python3 scripts/convergence_sweep.py --tol 1e-8
"""

import argparse
import math
import time
from dataclasses import dataclass, field
from typing import Tuple

from coulomb_pw import coulomb_engine as ce


@dataclass
class SweepConfig:
    etas: Tuple[float, ...] = (0.5, 1.0, 5.0, -1.0)
    ks: Tuple[float, ...] = (0.5, 1.0, 2.0)
    thetas_deg: Tuple[float, ...] = field(default=(30, 60, 90, 120, 150, 180))
    tol: float = 1e-6
    L_cap: int = 100_000


def run(cfg: SweepConfig) -> float:
    thetas = [math.radians(d) for d in cfg.thetas_deg]
    t0 = time.perf_counter()
    worst = 0.0
    print(f"{'eta':>6} {'k':>5} {'theta':>6} {'rel_err':>10} {'L_used':>7}")
    for eta in cfg.etas:
        for k in cfg.ks:
            p = ce.ScatteringParams(eta, k)
            table, reports = ce.amplitude_table(p, thetas, "reduced2", cfg.tol, cfg.L_cap)
            for deg, t, f, rep in zip(cfg.thetas_deg, thetas, table.f, reports):
                fc = ce.closed_form_amplitude(p, t)
                err = abs(f - fc) / abs(fc)
                worst = max(worst, err)
                print(f"{eta:6g} {k:5g} {deg:6g} {err:10.2e} {rep.L_used:7d}")
    print(f"worst relative error {worst:.2e} at tol {cfg.tol:g}; "
          f"{time.perf_counter() - t0:.2f} s")
    return worst


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tol", type=float, default=SweepConfig.tol)
    ap.add_argument("--lmax", type=int, default=SweepConfig.L_cap)
    args = ap.parse_args()
    run(SweepConfig(tol=args.tol, L_cap=args.lmax))
