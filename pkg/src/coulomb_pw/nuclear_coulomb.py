"""
Nuclear plus Coulomb amplitudes
===============================

With total phase shifts eta_l = delta_l + sigma_l, the amplitude is split as

    f = f^C + 1/(2ik) sum_l (2l+1) exp(2i sigma_l) (exp(2i delta_l) - 1) P_l(cos theta)

where f^C is the closed-form Coulomb amplitude. The delta_l are external
input; the table length is the truncation and delta_l = 0 beyond it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .coulomb_engine import ScatteringParams, _check_theta, closed_form_amplitude, s_matrices
from .legendre_series import (
    CoefficientSequence,
    ConvergenceReport,
    adaptive_sum,
    evaluate_partial_sums,
)


class PhaseShiftFormatError(ValueError):
    pass


@dataclass(frozen=True)
class PhaseShiftTable:
    """delta_0, delta_1, ... in radians, contiguous from l = 0."""

    deltas: tuple
    source: str = ""

    def __post_init__(self):
        d = tuple(float(v) for v in self.deltas)
        if not all(math.isfinite(v) for v in d):
            raise ValueError("phase shifts must be finite")
        object.__setattr__(self, "deltas", d)

    def __len__(self) -> int:
        return len(self.deltas)

    def as_array(self, n: int | None = None) -> np.ndarray:
        """delta_l for l < n, zero-padded past the table."""
        n = len(self.deltas) if n is None else n
        out = np.zeros(n)
        m = min(n, len(self.deltas))
        out[:m] = self.deltas[:m]
        return out


def parse_phase_shifts(text: str, source: str = "") -> PhaseShiftTable:
    """Parse 'l delta_l' lines; '#' lines and blank lines are skipped."""
    deltas = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        fields = s.split()
        if len(fields) != 2:
            raise PhaseShiftFormatError(f"{source}:{lineno}: expected 'l delta', got {line!r}")
        try:
            l, d = int(fields[0]), float(fields[1])
        except ValueError as exc:
            raise PhaseShiftFormatError(f"{source}:{lineno}: {exc}") from None
        if l != len(deltas):
            raise PhaseShiftFormatError(
                f"{source}:{lineno}: l values must be 0,1,2,... contiguous; expected {len(deltas)}, got {l}"
            )
        deltas.append(d)
    try:
        return PhaseShiftTable(tuple(deltas), source)
    except ValueError as exc:
        raise PhaseShiftFormatError(f"{source}: {exc}") from None


def load_phase_shifts(path: Union[str, Path]) -> PhaseShiftTable:
    path = Path(path)
    return parse_phase_shifts(path.read_text(), str(path))


def correction_coefficients(p: ScatteringParams, deltas: PhaseShiftTable) -> CoefficientSequence:
    """(2l+1) exp(2i sigma_l)(exp(2i delta_l) - 1)/(2ik); zero past the table."""
    n = len(deltas)
    if n == 0:
        return CoefficientSequence.from_values([], "correction")
    l = np.arange(n)
    s = s_matrices(n - 1, p.eta)
    d = deltas.as_array()
    vals = (2 * l + 1) * s * (np.exp(2j * d) - 1.0) / (2j * p.k)
    return CoefficientSequence.from_values(vals, "correction")


def correction_sum(p: ScatteringParams, deltas: PhaseShiftTable, theta: float) -> complex:
    """The finite short-range correction f - f^C."""
    _check_theta(theta)
    n = len(deltas)
    if n == 0:
        return 0j
    tr = evaluate_partial_sums(correction_coefficients(p, deltas), math.cos(theta), n - 1)
    return complex(tr.sums[-1])


def combined_amplitude(p: ScatteringParams, deltas: PhaseShiftTable, theta: float) -> complex:
    """f^C(theta) plus the finite correction sum."""
    return closed_form_amplitude(p, theta) + correction_sum(p, deltas, theta)


def unsplit_coefficients(p: ScatteringParams, deltas: PhaseShiftTable) -> CoefficientSequence:
    """(2l+1)(exp(2i(sigma_l + delta_l)) - 1)/(2ik), the unsplit series."""
    eta, k = p.eta, p.k

    def fn(ls):
        ls = np.asarray(ls)
        if ls.size == 0:
            return np.zeros(0, dtype=np.complex128)
        top = int(ls.max())
        s = s_matrices(top, eta)[ls]
        d = deltas.as_array(top + 1)[ls]
        # e^{2i sigma} e^{2i delta}: identical to the raw Coulomb S_l where delta = 0
        s = np.where(d == 0, s, s * np.exp(2j * d))
        return (2 * ls + 1) * (s - 1.0) / (2j * k)

    return CoefficientSequence(fn, "unsplit")


def raw_combined_diagnostic(
    p: ScatteringParams, deltas: PhaseShiftTable, theta: float, L_cap: int
) -> ConvergenceReport:
    """Oscillation diagnostics of the unsplit series summed to `L_cap`.

    With eta = 0 the series is a finite sum of len(deltas) terms and is
    reported converged; otherwise convergence is never claimed.
    """
    _check_theta(theta)
    x = math.cos(theta)
    c = unsplit_coefficients(p, deltas)
    if p.degenerate:
        n = max(len(deltas), 1)
        support = n - 1
        _, rep = adaptive_sum(c, x, 1.0, lambda L: 0.0 if L >= support else math.inf,
                              max(L_cap, support))
        return rep
    _, rep = adaptive_sum(c, x, 1.0, lambda L: math.inf, L_cap, m_test_verdict="inconclusive")
    return rep


__all__ = [
    "PhaseShiftFormatError",
    "PhaseShiftTable",
    "parse_phase_shifts",
    "load_phase_shifts",
    "correction_coefficients",
    "correction_sum",
    "combined_amplitude",
    "unsplit_coefficients",
    "raw_combined_diagnostic",
]
