"""
Legendre coefficient sequences
==============================

A series g(x) = sum_l c_l P_l(x) is held as a lazily evaluated coefficient
map l -> c_l. Every l-dependent factor multiplying P_l(x) is folded into
c_l, so multiplying g by (1 - x) is one universal local rule on the
coefficients:

    d_l = c_l - l/(2l-1) c_{l-1} - (l+1)/(2l+3) c_{l+1}

Applying it m times gives the coefficients of (1 - x)^m g(x).

Partial sums are evaluated with one upward Legendre recurrence pass per
abscissa. Nothing in this module knows about Coulomb physics; tail bounds
for adaptive truncation are supplied by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .special_functions import DomainError

CoefficientFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CoefficientSequence:
    """Coefficients c_l of g(x) = sum_l c_l P_l(x).

    Parameters
    ----------
    fn : callable
        Vectorized map from an integer array of indices l >= 0 to the array
        of coefficients. Must be deterministic. Complex128 is the usual
        dtype; object arrays (e.g. mpmath numbers) are carried through the
        arithmetic unchanged.
    label : str
        Short name of the series.
    """

    fn: CoefficientFn
    label: str = ""

    def __call__(self, l: int):
        if l < 0:
            raise IndexError("coefficient index must be >= 0")
        return self.fn(np.array([l]))[0]

    def block(self, start: int, stop: int) -> np.ndarray:
        """Coefficients for l in [start, stop)."""
        if start < 0 or stop < start:
            raise IndexError(f"bad coefficient range [{start}, {stop})")
        return self.fn(np.arange(start, stop))

    @classmethod
    def from_values(cls, values: Sequence, label: str = "finite") -> "CoefficientSequence":
        """Finite-support sequence; c_l = 0 beyond ``len(values)``."""
        vals = np.asarray(values)
        if vals.dtype != object:
            vals = vals.astype(np.complex128)
        n = len(vals)

        def fn(ls):
            ls = np.asarray(ls)
            out = np.zeros(ls.shape, dtype=vals.dtype)
            if vals.dtype == object and n:
                out[:] = [vals[0] * 0] * out.size
            inside = ls < n
            out[inside] = vals[ls[inside]]
            return out

        return cls(fn, label)

    def __add__(self, other: "CoefficientSequence") -> "CoefficientSequence":
        return CoefficientSequence(lambda ls: self.fn(ls) + other.fn(ls),
                                   f"({self.label} + {other.label})")

    def __sub__(self, other: "CoefficientSequence") -> "CoefficientSequence":
        return CoefficientSequence(lambda ls: self.fn(ls) - other.fn(ls),
                                   f"({self.label} - {other.label})")

    def __mul__(self, alpha) -> "CoefficientSequence":
        return CoefficientSequence(lambda ls: alpha * self.fn(ls), f"{alpha}*{self.label}")

    __rmul__ = __mul__


def _int_like(ls: np.ndarray, ref: np.ndarray) -> np.ndarray:
    # object arrays need Python ints so exact rationals stay exact
    return ls.astype(object) if ref.dtype == object else ls


def _div(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """num / den for a real integer den, componentwise for complex num.

    numpy would promote den to complex and use complex division, which is
    not correctly rounded even when the quotient is representable.
    """
    if num.dtype == object or not np.iscomplexobj(num):
        return num / den
    out = np.empty(num.shape, dtype=num.dtype)
    out.real = num.real / den
    out.imag = num.imag / den
    return out


def multiply_by_one_minus_x(c: CoefficientSequence) -> CoefficientSequence:
    """Coefficients of (1 - x) g(x), via (2l+1) x P_l = (l+1) P_{l+1} + l P_{l-1}."""

    def fn(ls):
        ls = np.asarray(ls)
        here = c.fn(ls)
        below = c.fn(np.maximum(ls - 1, 0))
        above = c.fn(ls + 1)
        li = _int_like(ls, here)
        # integer product, then division by an integer: exact types stay exact
        lower = _div(li * below, 2 * li - 1)
        lower = np.where(ls == 0, 0 * here, lower)
        upper = _div((li + 1) * above, 2 * li + 3)
        return here - lower - upper

    return CoefficientSequence(fn, f"(1-x)*{c.label}")


def reduce_series(c: CoefficientSequence, m: int) -> CoefficientSequence:
    """Coefficients of (1 - x)^m g(x)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    for _ in range(m):
        c = multiply_by_one_minus_x(c)
    return c


@dataclass(frozen=True)
class PartialSumTrace:
    """Partial sums S_0..S_L of sum_l c_l P_l(x) and the individual terms."""

    x: float
    sums: np.ndarray
    terms: np.ndarray

    @property
    def L(self) -> int:
        return len(self.sums) - 1


def _check_x(x: float) -> None:
    if not abs(x) <= 1.0:
        raise DomainError(f"|x| must be <= 1, got x = {x}")


def evaluate_partial_sums(c: CoefficientSequence, x: float, L: int) -> PartialSumTrace:
    """Trace of all partial sums through order L at abscissa x."""
    from .special_functions import legendre_all

    _check_x(x)
    if L < 0:
        raise ValueError("L must be >= 0")
    coeffs = c.block(0, L + 1)
    p = legendre_all(L, x)
    terms = coeffs * p
    # sequential accumulation: sums[l] = sums[l-1] + terms[l] as computed
    sums = np.cumsum(terms)
    return PartialSumTrace(float(x), sums, terms)


def oscillation_metric(trace: PartialSumTrace, window: int) -> float:
    """max |term| over the final `window` orders of the trace."""
    n = len(trace.terms)
    if window < 1 or window > n:
        raise ValueError(f"window must be in [1, {n}], got {window}")
    return float(np.max(np.abs(trace.terms[n - window:].astype(complex))))


def decade_window(L: int) -> int:
    """Number of orders in the last decade (L/10, L] of a trace of order L."""
    return max(1, L - L // 10)


@dataclass
class ConvergenceReport:
    """Outcome of summing a Legendre series at one abscissa.

    ``tail_bound`` is an absolute bound on the truncated remainder. When
    ``relative`` is set, convergence means tail_bound <= tol (|S_L| - tail_bound),
    which bounds the relative error of the result by `tol`.
    """

    method: str
    L_used: int
    m_test_verdict: Optional[str]
    tail_bound: Optional[float]
    oscillation_metric: float
    converged: bool
    final_value: Optional[complex]
    tol: Optional[float] = None
    relative: bool = False
    partial_sum: Optional[complex] = field(default=None, repr=False)

    def __post_init__(self):
        if self.converged and (self.tail_bound is None or self.final_value is None):
            raise ValueError("a converged report needs a tail bound and a final value")


def _within_tol(bound: float, s: complex, tol: float, relative: bool) -> bool:
    if relative:
        return bound <= tol * (abs(s) - bound)
    return bound <= tol


def adaptive_sum(
    c: CoefficientSequence,
    x: float,
    tol: float,
    tail_bound: Callable[[int], float],
    L_cap: int,
    relative: bool = False,
    m_test_verdict: Optional[str] = None,
    chunk: int = 256,
):
    """Sum c_l P_l(x) until the caller's tail bound certifies `tol`.

    Parameters
    ----------
    c : CoefficientSequence
    x : float
        Abscissa, |x| <= 1.
    tol : float
        Absolute tolerance on the remainder, or relative tolerance on the
        sum when `relative` is true.
    tail_bound : callable
        tail_bound(L) bounds |sum_{l > L} c_l P_l(x)|; must be nonincreasing.
        Return ``math.inf`` where no bound is available.
    L_cap : int
        Highest order summed.

    Returns
    -------
    value : complex or None
        The certified sum, or None if `L_cap` was reached first.
    report : ConvergenceReport
    """
    _check_x(x)
    if not tol > 0:
        raise ValueError("tol must be > 0")
    if L_cap < 0:
        raise ValueError("L_cap must be >= 0")

    x = float(x)
    p_prev, p_cur = 0.0, 1.0
    s = 0j
    max_abs_terms = []  # per-l |term| kept for the oscillation metric
    l = 0
    bound = float("inf")
    converged = False
    while l <= L_cap:
        stop = min(L_cap + 1, l + chunk)
        coeffs = c.block(l, stop).astype(complex)
        for cl in coeffs:
            term = cl * p_cur
            s += term
            max_abs_terms.append(abs(term))
            bound = float(tail_bound(l))
            if _within_tol(bound, s, tol, relative):
                converged = True
                break
            p_prev, p_cur = p_cur, ((2 * l + 1) * x * p_cur - l * p_prev) / (l + 1)
            l += 1
        if converged:
            break
        chunk *= 2
    L_used = min(l, L_cap)
    w = decade_window(L_used)
    osc = float(max(max_abs_terms[len(max_abs_terms) - w:]))
    report = ConvergenceReport(
        method=c.label,
        L_used=L_used,
        m_test_verdict=m_test_verdict,
        tail_bound=bound if np.isfinite(bound) else None,
        oscillation_metric=osc,
        converged=converged,
        final_value=s if converged else None,
        tol=tol,
        relative=relative,
        partial_sum=s,
    )
    return (s if converged else None), report


__all__ = [
    "CoefficientSequence",
    "multiply_by_one_minus_x",
    "reduce_series",
    "PartialSumTrace",
    "evaluate_partial_sums",
    "oscillation_metric",
    "decade_window",
    "ConvergenceReport",
    "adaptive_sum",
]
