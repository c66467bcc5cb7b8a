"""Partial sums and tails of the two M-test majorant sequences.

The once-reduced majorant behaves like 4 eta^2 / l, so its partial sums grow
only logarithmically; the twice-reduced one decays like 2 / l^3 and its tail
like 1 / L^2.

    python3 scripts/m_test_tails.py --eta 1
"""

import argparse
from dataclasses import dataclass

import numpy as np

from coulomb_pw import coulomb_engine as ce


@dataclass
class TailConfig:
    eta: float = 1.0
    L_max: int = 1_000_000


def run(cfg: TailConfig) -> None:
    l = np.arange(1, cfg.L_max + 1, dtype=float)
    m1 = np.cumsum(ce.m_bound_reduced1(l, cfg.eta))
    m2 = ce.m_bound_reduced2(l, cfg.eta)
    tail2 = np.cumsum(m2[::-1])[::-1]  # tail2[L] = sum over l > L
    print(f"{'L':>8} {'sum M1':>12} {'4eta^2 lnL':>12} {'tail M2':>12} {'L^2 tail':>10} "
          f"{'bound':>10}")
    L = 10
    while 100 * L <= cfg.L_max:  # keep the tail truncation negligible
        print(f"{L:8d} {m1[L - 1]:12.5g} {4 * cfg.eta**2 * np.log(L):12.5g} {tail2[L]:12.4e} "
              f"{L * L * tail2[L]:10.5f} {ce.m_tail_reduced2(L):10.3e}")
        L *= 10
    for stage in ("reduced1", "reduced2"):
        r = ce.m_test(ce.ScatteringParams(cfg.eta, 1.0), stage)
        print(f"{stage}: fitted decay exponent {r.decay_exponent:.4f}, verdict {r.verdict}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eta", type=float, default=TailConfig.eta)
    ap.add_argument("--lmax", type=int, default=TailConfig.L_max)
    args = ap.parse_args()
    run(TailConfig(args.eta, args.lmax))
