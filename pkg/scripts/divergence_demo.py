"""Show that the plain Coulomb partial-wave series never settles.

For each truncation order the script prints the last term, the partial sum
and the largest term over the final hundred orders, for the raw, once- and
twice-reduced series at one angle. Only the twice-reduced series converges.

    python3 scripts/divergence_demo.py --eta 1 --theta 90
"""

import argparse
import math
from dataclasses import dataclass

import numpy as np

from coulomb_pw import coulomb_engine as ce
from coulomb_pw.legendre_series import evaluate_partial_sums


@dataclass
class DemoConfig:
    eta: float = 1.0
    k: float = 1.0
    theta_deg: float = 90.0
    L_max: int = 100_000


def run(cfg: DemoConfig) -> None:
    p = ce.ScatteringParams(cfg.eta, cfg.k)
    t = math.radians(cfg.theta_deg)
    x = math.cos(t)
    omx = ce.one_minus_cos(t)
    exact = ce.closed_form_amplitude(p, t)
    series = {
        "raw": (ce.raw_coefficients(p), 1.0),
        "reduced1": (ce.reduced1_coefficients(p), omx),
        "reduced2": (ce.reduced2_coefficients(p), omx**2),
    }
    print(f"closed form f = {exact:.12g}")
    for name, (coeffs, scale) in series.items():
        trace = evaluate_partial_sums(coeffs, x, cfg.L_max)
        print(f"\n{name}: partial sum / (1-x)^m against the closed form")
        print(f"{'L':>7} {'|term_L|':>11} {'last-100 max':>13} {'rel err':>10}")
        L = 100
        while L <= cfg.L_max:
            osc = np.max(np.abs(trace.terms[max(0, L - 99):L + 1]))
            err = abs(trace.sums[L] / scale - exact) / abs(exact)
            print(f"{L:7d} {abs(trace.terms[L]):11.3e} {osc:13.3e} {err:10.2e}")
            L *= 10


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eta", type=float, default=DemoConfig.eta)
    ap.add_argument("--k", type=float, default=DemoConfig.k)
    ap.add_argument("--theta", type=float, default=DemoConfig.theta_deg, help="degrees")
    ap.add_argument("--lmax", type=int, default=DemoConfig.L_max)
    args = ap.parse_args()
    run(DemoConfig(args.eta, args.k, args.theta, args.lmax))
