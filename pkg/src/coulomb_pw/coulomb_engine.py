"""
Coulomb partial-wave series
===========================

Three coefficient families for the pure Coulomb amplitude f^C(x), x = cos(theta):

    raw       f^C(x)          = sum_l (2l+1) (S_l - 1) / (2ik) P_l(x)              (divergent)
    reduced1  (1-x)   f^C(x)  = sum_l 2 eta^2 (2l+1) T_l / (2ik) P_l(x)
    reduced2  (1-x)^2 f^C(x)  = sum_l A (2l+1) G(l-1+i eta)/G(l+3-i eta) / (2ik) P_l(x)

with S_l = G(l+1+i eta)/G(l+1-i eta), T_l = G(l+i eta)/G(l+2-i eta) and
A = -4 eta^2 (1 - i eta)^2. The twice-reduced series is absolutely
convergent and sums in closed form through the Bateman expansion of
(1-x)^rho, which reproduces the Rutherford amplitude

    f^C = -eta / (2k sin^2(theta/2)) exp(-i (eta ln sin^2(theta/2) - 2 sigma_0)).

Units: k in inverse length, amplitudes in length.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .legendre_series import (
    CoefficientSequence,
    ConvergenceReport,
    adaptive_sum,
)
from .special_functions import (
    DomainError,
    PoleError,
    coulomb_phase_shifts,
    legendre_all,
    log_gamma,
)

DEFAULT_THETA_MIN = math.radians(1.0)
METHODS = ("raw", "reduced1", "reduced2", "closed")


class DegenerateParameterError(ValueError):
    """Quantity undefined at eta = 0."""


@dataclass(frozen=True)
class ScatteringParams:
    """Sommerfeld parameter `eta` and wavenumber `k` (> 0)."""

    eta: float
    k: float

    def __post_init__(self):
        if not math.isfinite(self.eta):
            raise ValueError(f"eta must be finite, got {self.eta}")
        if not (math.isfinite(self.k) and self.k > 0):
            raise ValueError(f"k must be finite and > 0, got {self.k}")

    @property
    def degenerate(self) -> bool:
        """eta = 0: free motion, f^C vanishes identically."""
        return self.eta == 0


def one_minus_cos(theta):
    """1 - cos(theta) computed as 2 sin^2(theta/2) (no cancellation near 0)."""
    return 2.0 * np.sin(0.5 * np.asarray(theta)) ** 2


# ---------------------------------------------------------------------------
# S-matrix and gamma ratios
# ---------------------------------------------------------------------------

def s_matrices(L: int, eta: float) -> np.ndarray:
    """S_0 .. S_L = exp(2 i sigma_l)."""
    return np.exp(2j * coulomb_phase_shifts(L, eta))


def s_matrix(l: int, eta: float) -> complex:
    """Coulomb S-matrix element S_l = G(l+1+i eta)/G(l+1-i eta)."""
    if l < 0:
        raise ValueError("l must be >= 0")
    return complex(s_matrices(l, eta)[l])


def _gamma_ratio_conj(a, m: int):
    """G(a)/G(conj(a) + m) for integer m >= 0, in log space.

    G(conj(a)) = conj(G(a)), so the log ratio is 2i Im lnG(a) - sum_j ln(conj(a) + j):
    the modulus comes out of m small logs instead of the difference of two
    large log-gamma values.
    """
    a = np.asarray(a, dtype=np.complex128)
    lg = log_gamma(a)
    ac = np.conj(a)
    log_r = 2j * np.imag(lg)
    for j in range(m):
        log_r = log_r - np.log(ac + j)
    return np.exp(log_r)


def t_factor(l: int, eta: float) -> complex:
    """T_l = G(l+i eta)/G(l+2-i eta), |T_l| = 1/sqrt((l^2+eta^2)((l+1)^2+eta^2))."""
    if l < 0:
        raise ValueError("l must be >= 0")
    if l == 0 and eta == 0:
        raise DegenerateParameterError("T_0 has a gamma pole at eta = 0")
    return complex(_gamma_ratio_conj(l + 1j * eta, 2))


# ---------------------------------------------------------------------------
# Coefficient families
# ---------------------------------------------------------------------------

def _zeros(ls):
    return np.zeros(np.shape(ls), dtype=np.complex128)


def raw_coefficients(p: ScatteringParams, dps: Optional[int] = None) -> CoefficientSequence:
    """c_l = (2l+1)(S_l - 1)/(2ik): the formal (divergent) partial-wave series.

    With `dps` set, coefficients are mpmath numbers at that many decimal
    digits (object arrays); arithmetic on them then runs at the caller's
    ``mpmath.mp`` precision.
    """
    eta, k = p.eta, p.k
    if dps is not None:
        return _raw_coefficients_mp(p, dps)

    def fn(ls):
        ls = np.asarray(ls)
        if eta == 0 or ls.size == 0:
            return _zeros(ls)
        s = s_matrices(int(ls.max()), eta)[ls]
        return (2 * ls + 1) * (s - 1.0) / (2j * k)

    return CoefficientSequence(fn, "raw")


def _raw_coefficients_mp(p: ScatteringParams, dps: int) -> CoefficientSequence:
    import mpmath as mp

    eta, k = p.eta, p.k

    def fn(ls):
        ls = np.asarray(ls)
        out = np.empty(ls.shape, dtype=object)
        with mp.workdps(dps):
            ie = mp.mpc(0, eta)
            for idx, l in np.ndenumerate(ls):
                l = int(l)
                s = mp.exp(2j * mp.im(mp.loggamma(l + 1 + ie)))
                out[idx] = (2 * l + 1) * (s - 1) / (2j * mp.mpf(k))
        return out

    return CoefficientSequence(fn, "raw")


def reduced1_coefficients(p: ScatteringParams) -> CoefficientSequence:
    """Coefficients of (1-x) f^C(x): c_l = 2 eta^2 (2l+1) T_l / (2ik)."""
    eta, k = p.eta, p.k

    def fn(ls):
        ls = np.asarray(ls)
        if eta == 0:
            return _zeros(ls)
        t = _gamma_ratio_conj(ls + 1j * eta, 2)
        return 2 * eta**2 * (2 * ls + 1) * t / (2j * k)

    return CoefficientSequence(fn, "reduced1")


def reduced1_phase_form(p: ScatteringParams) -> CoefficientSequence:
    """Same as reduced1 via exp(2i sigma_{l-1}); defined for l >= 1 only."""
    eta, k = p.eta, p.k

    def fn(ls):
        ls = np.asarray(ls)
        if np.any(ls < 1):
            raise IndexError("phase form needs l >= 1")
        if eta == 0:
            return _zeros(ls)
        s = s_matrices(int(ls.max()) - 1, eta)[ls - 1]
        den = (ls - 1j * eta) * (ls + 1 - 1j * eta)
        return 2 * eta**2 * (2 * ls + 1) * s / den / (2j * k)

    return CoefficientSequence(fn, "reduced1-phase")


def reduced2_prefactor(eta: float) -> complex:
    """A = -4 eta^2 (1 - i eta)^2."""
    return -4.0 * eta**2 * (1 - 1j * eta) ** 2


def reduced2_coefficients(p: ScatteringParams) -> CoefficientSequence:
    """Coefficients of (1-x)^2 f^C(x) from the gamma-ratio form, in log space.

    |2ik c_l| = 4 eta^2 (1+eta^2) M_l with
    M_l = (2l+1)/sqrt(((l+2)^2+eta^2)((l+1)^2+eta^2)(l^2+eta^2)((l-1)^2+eta^2)).
    """
    eta, k = p.eta, p.k
    a = reduced2_prefactor(eta)

    def fn(ls):
        ls = np.asarray(ls)
        if eta == 0:
            return _zeros(ls)
        g = _gamma_ratio_conj(ls - 1 + 1j * eta, 4)
        return a * (2 * ls + 1) * g / (2j * k)

    return CoefficientSequence(fn, "reduced2")


def reduced2_phase_form(p: ScatteringParams) -> CoefficientSequence:
    """Same as reduced2 via exp(2i sigma_{l-2}); defined for l >= 2 only."""
    eta, k = p.eta, p.k
    a = reduced2_prefactor(eta)

    def fn(ls):
        ls = np.asarray(ls)
        if np.any(ls < 2):
            raise IndexError("phase form needs l >= 2")
        if eta == 0:
            return _zeros(ls)
        s = s_matrices(int(ls.max()) - 2, eta)[ls - 2]
        den = (ls + 2 - 1j * eta) * (ls + 1 - 1j * eta) * (ls - 1j * eta) * (ls - 1 - 1j * eta)
        return a * (2 * ls + 1) * s / den / (2j * k)

    return CoefficientSequence(fn, "reduced2-phase")


# ---------------------------------------------------------------------------
# Weierstrass M-test
# ---------------------------------------------------------------------------

def m_bound_reduced1(l, eta: float):
    """M_l = 2 eta^2 (2l+1)/sqrt((l^2+eta^2)((l+1)^2+eta^2)); equals |2ik c_l| for reduced1."""
    l = np.asarray(l, dtype=float)
    return 2 * eta**2 * (2 * l + 1) / np.sqrt((l**2 + eta**2) * ((l + 1) ** 2 + eta**2))


def m_bound_reduced2(l, eta: float):
    """M_l = (2l+1)/sqrt(prod_{j=-1..2} ((l+j)^2+eta^2)); |2ik c_l| = 4 eta^2 (1+eta^2) M_l."""
    l = np.asarray(l, dtype=float)
    e2 = eta**2
    return (2 * l + 1) / np.sqrt(
        ((l + 2) ** 2 + e2) * ((l + 1) ** 2 + e2) * (l**2 + e2) * ((l - 1) ** 2 + e2)
    )


def m_tail_reduced2(L: int) -> float:
    """Closed-form bound on sum_{l > L} M_l for the reduced2 M-sequence.

    For l >= 2, M_l <= (2l+1)/((l+2)(l+1)l(l-1)) <= 2/((l-1)l(l+1)), whose
    tail telescopes to 1/(L(L+1)). Valid for L >= 1, any eta.
    """
    if L < 1:
        return math.inf
    return 1.0 / (L * (L + 1.0))


@dataclass(frozen=True)
class MTestResult:
    """M-test outcome for one reduced series.

    ``decay_exponent`` is the fitted s in M_l ~ l^{-s}; the M-series is
    compared with sum l^{-s}, convergent iff s > 1.
    """

    stage: str
    verdict: str
    bound: Callable[[np.ndarray], np.ndarray]
    decay_exponent: float
    tail_bound: Optional[Callable[[int], float]] = None


def m_test(p: ScatteringParams, stage: str) -> MTestResult:
    """Weierstrass M-test on the once- or twice-reduced Coulomb series."""
    if p.degenerate:
        raise DegenerateParameterError("M-test needs eta != 0")
    eta = p.eta
    if stage == "reduced1":
        bound = lambda l: m_bound_reduced1(l, eta)  # noqa: E731
        tail = None
    elif stage == "reduced2":
        bound = lambda l: m_bound_reduced2(l, eta)  # noqa: E731
        tail = m_tail_reduced2
    else:
        raise ValueError(f"unknown stage {stage!r}")
    # limit comparison against l^{-s}, fitted well past l ~ |eta|
    l0 = 1000.0 * max(1.0, abs(eta))
    s = float(np.log(bound(l0) / bound(10 * l0)) / np.log(10.0))
    verdict = "convergent" if s > 1.1 else "inconclusive"
    return MTestResult(stage, verdict, bound, s, tail if verdict == "convergent" else None)


def reduced2_tail_bound(p: ScatteringParams, x: float) -> Callable[[int], float]:
    """Bound on |sum_{l > L} c_l P_l(x)| for the reduced2 coefficients.

    Starts from |c_l| = |A|/(2k) M_l and the M-tail 1/(L(L+1)), sharpened by
    the Legendre envelope: |P_l(cos t)| < sqrt(2/(pi (l+1/2) sin t))
    (Bernstein's inequality, Antonov-Kholshevnikov constant). At x = -1,
    where that envelope is lost, summation by parts on the alternating
    P_l(-1) = (-1)^l gives |tail| <= sum_{l>L} |c_l - c_{l+1}| with
    |1 - c_{l+1}/c_l| = (l+1) sqrt(36+16 eta^2)/((2l+1)|l+3-i eta|)
    <= (2/3) sqrt(36+16 eta^2)/(L+4).
    """
    eta, k = p.eta, p.k
    scale = abs(reduced2_prefactor(eta)) / (2 * k)
    sin_t = math.sqrt(max(0.0, 1.0 - x * x))
    alt = x == -1.0
    alt_const = (2.0 / 3.0) * math.sqrt(36.0 + 16.0 * eta**2)

    def bound(L: int) -> float:
        if L < 1:
            return math.inf
        envelope = 1.0
        if sin_t > 0:
            envelope = min(1.0, math.sqrt(2.0 / (math.pi * (L + 1.5) * sin_t)))
        if alt:
            envelope = min(envelope, alt_const / (L + 4))
        return scale * m_tail_reduced2(L) * envelope

    return bound


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def _check_theta(theta: float, theta_min: float = 0.0) -> None:
    if not (theta > theta_min and theta <= math.pi):
        if theta_min > 0:
            raise DomainError(
                f"theta = {math.degrees(theta):g} deg outside ({math.degrees(theta_min):g}, 180] deg"
            )
        raise DomainError(f"theta = {theta} rad outside (0, pi]; forward direction is singular")


def closed_form_amplitude(p: ScatteringParams, theta: float) -> complex:
    """Rutherford amplitude f^C(theta); 0 when eta = 0."""
    _check_theta(theta)
    if p.degenerate:
        return 0j
    eta, k = p.eta, p.k
    s2 = math.sin(0.5 * theta) ** 2
    sigma0 = log_gamma(1 + 1j * eta).imag
    return -eta / (2 * k * s2) * cmath.exp(-1j * (eta * math.log(s2) - 2 * sigma0))


def analytic_sum_check(p: ScatteringParams, theta: float) -> complex:
    """f^C from the Bateman-summed twice-reduced series.

    Evaluates A 2^{-1+i eta} (1-x)^{1-i eta} G(-1+i eta)/G(2-i eta) and
    divides by 2ik (1-x)^2.
    """
    _check_theta(theta)
    if p.degenerate:
        return 0j
    eta, k = p.eta, p.k
    omx = float(one_minus_cos(theta))
    log_rhs = (
        cmath.log(reduced2_prefactor(eta))
        + (-1 + 1j * eta) * math.log(2.0)
        + (1 - 1j * eta) * math.log(omx)
        + log_gamma(-1 + 1j * eta)
        - log_gamma(2 - 1j * eta)
    )
    return cmath.exp(log_rhs) / (2j * k * omx**2)


# ---------------------------------------------------------------------------
# Bateman expansion of (1-x)^rho
# ---------------------------------------------------------------------------

def bateman_coefficients(rho: complex, L: int) -> CoefficientSequence:
    """First L+1 Legendre coefficients of (1-x)^rho.

    c_n = 2^rho (2n+1)/(n+rho+1) (-rho)_n/(1+rho)_n; the Pochhammer ratio is
    accumulated factor by factor so it neither overflows nor touches
    gamma poles. Coefficients beyond L are zero.

    Raises
    ------
    PoleError
        If n + rho + 1 = 0 for some n <= L.
    """
    rho = complex(rho)
    if L < 0:
        raise ValueError("L must be >= 0")
    n = np.arange(L + 1)
    if rho.imag == 0 and rho.real <= -1 and rho.real == round(rho.real) and -rho.real - 1 <= L:
        raise PoleError(f"n + rho + 1 = 0 at n = {int(-rho.real - 1)} for rho = {rho}")
    ratio = np.ones(L + 1, dtype=np.complex128)
    if L >= 1:
        j = n[:-1]
        ratio[1:] = np.cumprod((-rho + j) / (1 + rho + j))
    coeffs = 2.0**rho * (2 * n + 1) / (n + rho + 1) * ratio
    return CoefficientSequence.from_values(coeffs, f"bateman(rho={rho})")


def bateman_max_error(rho: complex, L: int, xs: Sequence[float]) -> float:
    """max_x |sum_{n<=L} c_n P_n(x) - (1-x)^rho| over the sample points."""
    xs = np.asarray(xs, dtype=float)
    c = bateman_coefficients(rho, L).block(0, L + 1)
    p = legendre_all(L, xs)
    approx = np.tensordot(c, p, axes=(0, 0))
    exact = np.exp(complex(rho) * np.log(1.0 - xs))
    return float(np.max(np.abs(approx - exact)))


# ---------------------------------------------------------------------------
# Amplitude tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AmplitudeTable:
    """Angles (radians), complex amplitudes and dsigma/dOmega = |f|^2."""

    theta: np.ndarray
    f: np.ndarray
    dsigma: np.ndarray
    method: str
    degenerate: bool = False

    @classmethod
    def build(cls, theta, f, method, degenerate=False) -> "AmplitudeTable":
        f = np.asarray(f, dtype=np.complex128)
        return cls(np.asarray(theta, dtype=float), f, np.abs(f) ** 2, method, degenerate)

    def rows(self):
        for t, f, d in zip(self.theta, self.f, self.dsigma):
            yield float(t), complex(f), float(d)


def _degenerate_report(method: str) -> ConvergenceReport:
    return ConvergenceReport(method, 0, None, 0.0, 0.0, True, 0j)


def amplitude_at(
    p: ScatteringParams,
    theta: float,
    method: str,
    tol: float = 1e-6,
    L_cap: int = 100_000,
) -> Tuple[complex, ConvergenceReport]:
    """One angle of `amplitude_table` (no theta_min check)."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if p.degenerate:
        return 0j, _degenerate_report(method)
    x = math.cos(theta)
    if method == "closed":
        f = closed_form_amplitude(p, theta)
        return f, ConvergenceReport("closed", 0, None, 0.0, 0.0, True, f)
    if method == "raw":
        _, rep = adaptive_sum(raw_coefficients(p), x, tol, lambda L: math.inf, L_cap,
                              m_test_verdict="inconclusive")
        return rep.partial_sum, rep
    omx = float(one_minus_cos(theta))
    if method == "reduced1":
        # M-test is inconclusive here, so no convergence claim is made
        _, rep = adaptive_sum(reduced1_coefficients(p), x, tol, lambda L: math.inf, L_cap,
                              m_test_verdict=m_test(p, "reduced1").verdict)
        return rep.partial_sum / omx, rep
    mt = m_test(p, "reduced2")
    value, rep = adaptive_sum(reduced2_coefficients(p), x, tol, reduced2_tail_bound(p, x),
                              L_cap, relative=True, m_test_verdict=mt.verdict)
    if rep.converged:
        rep.final_value = value / omx**2
    return rep.partial_sum / omx**2, rep


def amplitude_table(
    p: ScatteringParams,
    thetas: Sequence[float],
    method: str,
    tol: float = 1e-6,
    L_cap: int = 100_000,
    theta_min: float = DEFAULT_THETA_MIN,
) -> Tuple[AmplitudeTable, List[ConvergenceReport]]:
    """Amplitudes at each angle (radians) with per-angle convergence reports.

    reduced2 sums under a certified relative tolerance `tol` and divides by
    (1-cos theta)^2. reduced1 and raw are summed to `L_cap` and never
    claim convergence; their rows hold the truncated value. Angles must lie
    in (theta_min, pi].
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if not tol > 0:
        raise ValueError("tol must be > 0")
    thetas = [float(t) for t in thetas]
    for t in thetas:
        _check_theta(t, theta_min)
    fs, reports = [], []
    for t in thetas:
        f, rep = amplitude_at(p, t, method, tol, L_cap)
        fs.append(f)
        reports.append(rep)
    return AmplitudeTable.build(thetas, fs, method, p.degenerate), reports


__all__ = [
    "DEFAULT_THETA_MIN",
    "METHODS",
    "DegenerateParameterError",
    "ScatteringParams",
    "one_minus_cos",
    "s_matrix",
    "s_matrices",
    "t_factor",
    "raw_coefficients",
    "reduced1_coefficients",
    "reduced1_phase_form",
    "reduced2_prefactor",
    "reduced2_coefficients",
    "reduced2_phase_form",
    "m_bound_reduced1",
    "m_bound_reduced2",
    "m_tail_reduced2",
    "MTestResult",
    "m_test",
    "reduced2_tail_bound",
    "closed_form_amplitude",
    "analytic_sum_check",
    "bateman_coefficients",
    "bateman_max_error",
    "AmplitudeTable",
    "amplitude_at",
    "amplitude_table",
]
