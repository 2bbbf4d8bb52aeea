"""Scalar numeric kernels: adaptive Simpson quadrature and golden-section search.

The adaptive routines are hand-rolled so the potential machinery can state
its tolerances exactly (absolute 1e-10 for integrals) without tracking a
library's error model.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

_GOLDEN = 0.6180339887498949  # (sqrt(5) - 1) / 2


def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
    return h * (fa + 4.0 * fm + fb) / 6.0


def _adaptive(
    f: Callable[[float], float],
    a: float,
    b: float,
    fa: float,
    fm: float,
    fb: float,
    whole: float,
    tol: float,
    depth: int,
) -> float:
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(fa, flm, fm, m - a)
    right = _simpson(fm, frm, fb, b - m)
    err = left + right - whole
    if depth <= 0 or abs(err) <= 15.0 * tol:
        # Richardson extrapolation of the composite estimate.
        return left + right + err / 15.0
    half = 0.5 * tol
    return _adaptive(f, a, m, fa, flm, fm, left, half, depth - 1) + _adaptive(
        f, m, b, fm, frm, fb, right, half, depth - 1
    )


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_depth: int = 48,
) -> float:
    """Integrate f over [a, b] to absolute tolerance ``tol``.

    Classic recursive Simpson bisection with Richardson extrapolation; the
    integrand must be finite on the closed interval.
    """
    if not b > a:
        raise ValueError(f"empty integration interval [{a}, {b}]")
    fa = f(a)
    fm = f(0.5 * (a + b))
    fb = f(b)
    whole = _simpson(fa, fm, fb, b - a)
    return _adaptive(f, a, b, fa, fm, fb, whole, tol, max_depth)


def golden_section_min(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> tuple[float, float]:
    """Minimise a unimodal f on [a, b]; returns (argmin, min value)."""
    if not b > a:
        raise ValueError(f"empty search interval [{a}, {b}]")
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1 = f(x1)
    f2 = f(x2)
    for _ in range(max_iter):
        if b - a <= tol * (1.0 + abs(a) + abs(b)):
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    if f1 <= f2:
        return x1, f1
    return x2, f2


def composite_simpson_vec(f, a: float, b: float, n_panels: int):
    """Fixed-grid Simpson rule for vectorised integrands.

    f receives the full node array (n_panels + 1,) and may return extra
    leading axes (one row per state); integration runs along the last axis.
    Suited to bulk oracle checks where the same smooth integrand is needed
    at many parameter values; use ``adaptive_simpson`` when a per-call
    tolerance is required.
    """
    if not b > a:
        raise ValueError(f"empty integration interval [{a}, {b}]")
    if n_panels < 2 or n_panels % 2:
        raise ValueError("n_panels must be a positive even count")
    x = np.linspace(a, b, n_panels + 1)
    w = np.ones(n_panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return (b - a) / (3.0 * n_panels) * (f(x) @ w)
