"""
Special-function kernels
========================

Complex log-gamma, Coulomb phase shifts, Legendre polynomials and the
rising factorial. Everything downstream (S-matrix elements, reduced-series
coefficients, the Bateman expansion) is built from these four pieces.

All functions accept Python scalars; ``log_gamma`` and ``legendre_all``
also vectorize over numpy arrays.
"""

from __future__ import annotations

import cmath
import math

import numpy as np


class PoleError(ValueError):
    """Argument sits on a pole (gamma function or a rational denominator)."""


class DomainError(ValueError):
    """Argument outside the domain of the function."""


# Lanczos approximation, g = 671/128 with 14 terms (Godfrey's fit, as used in
# Numerical Recipes 3rd ed.). Relative error ~1e-15 for Re z >= 0.5.
_LANCZOS_G = 5.24218750000000000
_LANCZOS_C0 = 0.999999999999997092
_LANCZOS_COEF = (
    57.1562356658629235,
    -59.5979603554754912,
    14.1360979747417471,
    -0.491913816097620199,
    0.339946499848118887e-4,
    0.465236289270485756e-4,
    -0.983744753048795646e-4,
    0.158088703224912494e-3,
    -0.210264441724104883e-3,
    0.217439618115212643e-3,
    -0.164318106536763890e-3,
    0.844182239838527433e-4,
    -0.261908384015814087e-4,
    0.368991826595316234e-5,
)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)


def _lanczos(z):
    # Re z >= 0.5. Logs are kept separate so Im follows the continuous branch.
    ser = np.full_like(z, _LANCZOS_C0)
    for j, c in enumerate(_LANCZOS_COEF, start=1):
        ser = ser + c / (z + j)
    t = z + _LANCZOS_G
    return (z + 0.5) * np.log(t) - t + (_LOG_SQRT_2PI + np.log(ser) - np.log(z))


def _log_sinpi(z):
    """Principal log of sin(pi z), without overflow at large |Im z|."""
    out = np.empty_like(z)
    small = np.abs(z.imag) < 20.0
    out[small] = np.log(np.sin(np.pi * z[small]))
    big = ~small
    if np.any(big):
        zb = z[big]
        flip = zb.imag < 0
        zb = np.where(flip, np.conj(zb), zb)
        # sin(pi z) = exp(-i pi z) (exp(2i pi z) - 1) / (2i), exp(2i pi z) tiny
        w = -1j * np.pi * zb + np.log((np.exp(2j * np.pi * zb) - 1.0) / 2j)
        w = np.where(flip, np.conj(w), w)
        im = np.angle(np.exp(1j * w.imag))  # principal branch
        out[big] = w.real + 1j * im
    return out


def log_gamma(z):
    """Principal branch of log Gamma(z) for complex z.

    Uses the Lanczos approximation for ``Re z >= 0.5`` and the reflection
    formula otherwise, with the branch correction that keeps the imaginary
    part continuous off the negative real axis.

    Parameters
    ----------
    z : complex or array_like of complex

    Returns
    -------
    complex or ndarray of complex128

    Raises
    ------
    PoleError
        If any element of `z` is a nonpositive real integer.
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    on_pole = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(on_pole):
        raise PoleError(f"log_gamma pole at z = {z[on_pole][0]}")
    out = np.empty_like(z)
    right = z.real >= 0.5
    out[right] = _lanczos(z[right])
    left = ~right
    if np.any(left):
        zl = z[left]
        # 2 pi floor(x/2 + 1/4) picks the branch of log sin(pi z)
        branch = np.copysign(2.0 * np.pi, zl.imag) * np.floor(0.5 * zl.real + 0.25)
        out[left] = (_LOG_PI + 1j * branch) - _log_sinpi(zl) - _lanczos(1.0 - zl)
    return complex(out[0]) if scalar else out


def coulomb_phase_shifts(L: int, eta: float) -> np.ndarray:
    """Coulomb phase shifts sigma_0 .. sigma_L (radians, not wrapped).

    sigma_0 = arg Gamma(1 + i eta) comes from ``log_gamma``; higher orders
    use sigma_l = sigma_{l-1} + arctan(eta / l), which avoids tracking the
    branch of arg Gamma over many windings.
    """
    if L < 0:
        raise ValueError("L must be >= 0")
    out = np.empty(L + 1)
    out[0] = log_gamma(1.0 + 1j * eta).imag if eta != 0 else 0.0
    if L > 0:
        out[1:] = np.arctan(eta / np.arange(1, L + 1))
        np.cumsum(out, out=out)
    return out


def coulomb_phase_shift(l: int, eta: float) -> float:
    """Coulomb phase shift sigma_l = arg Gamma(l + 1 + i eta)."""
    if l < 0:
        raise ValueError("l must be >= 0")
    return float(coulomb_phase_shifts(l, eta)[l])


def legendre_all(L: int, x) -> np.ndarray:
    """P_0(x) .. P_L(x) by upward three-term recurrence.

    `x` may be a scalar or an array; the result has shape ``(L + 1,) + x.shape``.

    Raises
    ------
    DomainError
        If any ``|x| > 1``.
    """
    if L < 0:
        raise ValueError("L must be >= 0")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0) or np.any(np.isnan(x)):
        raise DomainError("Legendre argument must satisfy |x| <= 1")
    p = np.empty((L + 1,) + x.shape)
    p[0] = 1.0
    if L >= 1:
        p[1] = x
    for l in range(1, L):
        p[l + 1] = ((2 * l + 1) * x * p[l] - l * p[l - 1]) / (l + 1)
    return p


def pochhammer(xi: complex, n: int) -> complex:
    """Rising factorial (xi)_n = xi (xi + 1) ... (xi + n - 1).

    Direct product, so it stays finite where Gamma(xi) has a pole.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    out = 1.0 + 0j
    for j in range(n):
        out *= xi + j
    return out


__all__ = [
    "PoleError",
    "DomainError",
    "log_gamma",
    "coulomb_phase_shift",
    "coulomb_phase_shifts",
    "legendre_all",
    "pochhammer",
]
