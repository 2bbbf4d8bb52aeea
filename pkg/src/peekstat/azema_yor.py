"""Potential functions and the max-sensitive processes they induce.

A nondecreasing g is paired with its smoothed companion

    G(s)  = integral_0^1 g(s/u) du  =  s * integral_s^inf g(x)/x^2 dx
    G'(s) = integral_s^inf (g(x) - g(s))/x^2 dx

G is continuous, concave, and nondecreasing, and g(s) = G(s) - s G'(s)
identically.  For a path (M, S) the induced process

    Y_t = g(S_t) + M_t G'(S_t)

is a supermartingale whose running maximum equals G(S_t) exactly, and the
bias-corrected B_t = Y_t + sum_s D_{-G}(S_s, S_{s-1}) is a martingale with
increments dB = dM * G'(S_prev).  Inverting that difference equation
recovers (M, S) from B; g(M_t) is the matching max-plus lower process.

Quadrature-backed potentials integrate over v with x = s*e^v, turning both
improper integrals into integrals of smooth integrands against e^-v on a
finite interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .distributions import (
    DistributionModel,
    DominanceReport,
    DomainError,
    NonintegrableTailError,
    ccdf_vec,
    check_dominated_by_ccdf,
    hl_ccdf_vec,
    superquantile_vec,
    tail_quantile,
    tail_quantile_vec,
)
from .quadrature import adaptive_simpson


class PotentialError(ValueError):
    """Potential construction rejected (nonmonotone or nonintegrable g)."""


class DecompositionError(ValueError):
    """Input process violates the decomposition preconditions."""


def _eval(x, fn_vec: Callable[[np.ndarray], np.ndarray]):
    """Apply an array function, returning float for scalar input."""
    arr = np.asarray(x, dtype=float)
    out = fn_vec(arr)
    if arr.ndim == 0:
        return float(out)
    return out


class Potential:
    """Nondecreasing g with derived G and G'; subclasses fill in the math."""

    mode = "closed_form"
    s_min = 0.0

    def _check(self, s: np.ndarray) -> None:
        if np.any(s < self.s_min) or np.any(s <= 0.0):
            raise DomainError(f"potential defined for s >= {max(self.s_min, 0.0)}")

    def _g(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _G(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _Gprime(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def g(self, s):
        return _eval(s, lambda a: (self._check(a), self._g(a))[1])

    def G(self, s):
        return _eval(s, lambda a: (self._check(a), self._G(a))[1])

    def Gprime(self, s):
        return _eval(s, lambda a: (self._check(a), self._Gprime(a))[1])

    def tail_integral(self, s):
        """integral_s^inf g(x)/x^2 dx; equals G(s)/s for every potential."""
        out = self.G(s) / np.asarray(s, dtype=float)
        return float(out) if np.ndim(s) == 0 else out

    def to_json_dict(self) -> dict:
        raise NotImplementedError


class LogPotential(Potential):
    """g(s) = log s, G(s) = log s + 1, G'(s) = 1/s."""

    def _g(self, s):
        return np.log(s)

    def _G(self, s):
        return np.log(s) + 1.0

    def _Gprime(self, s):
        return 1.0 / s

    def tail_integral(self, s):
        return _eval(s, lambda a: (self._check(a), (np.log(a) + 1.0) / a)[1])

    def to_json_dict(self) -> dict:
        return {"g": "log"}


class PowerPotential(Potential):
    """g(s) = s^a for 0 < a < 1; G(s) = s^a/(1-a), G'(s) = a s^(a-1)/(1-a)."""

    def __init__(self, a: float):
        if not 0.0 < a < 1.0:
            raise PotentialError("power exponent must lie in (0, 1): "
                                 "a >= 1 breaks integrability, a <= 0 monotonicity")
        self.a = float(a)

    def _g(self, s):
        return s**self.a

    def _G(self, s):
        return s**self.a / (1.0 - self.a)

    def _Gprime(self, s):
        return self.a * s ** (self.a - 1.0) / (1.0 - self.a)

    def tail_integral(self, s):
        return _eval(s, lambda arr: (self._check(arr), arr ** (self.a - 1.0) / (1.0 - self.a))[1])

    def to_json_dict(self) -> dict:
        return {"g": {"power": self.a}}


class TailQuantilePotential(Potential):
    """g(s) = tail_quantile(mu, 1/s) and G(s) = superquantile(mu, 1/s), s >= 1.

    G'(s) comes from the identity G'(s) = (G(s) - g(s))/s.  The independent
    tail-integral route uses quadrature of g directly (continuous mu only),
    so the four process forms stay genuinely cross-checkable.
    """

    s_min = 1.0

    def __init__(self, mu: DistributionModel):
        self.mu = mu
        try:
            mu.mean
        except NonintegrableTailError as exc:
            raise PotentialError(f"mu has a nonintegrable tail: {exc}") from exc

    def _g(self, s):
        return tail_quantile_vec(self.mu, 1.0 / s)

    def _G(self, s):
        return superquantile_vec(self.mu, 1.0 / s)

    def _Gprime(self, s):
        return (self._G(s) - self._g(s)) / s

    def tail_integral(self, s):
        if self.mu.kind == "Empirical":
            return super().tail_integral(s)
        growth = 1.0 / self.mu.alpha if self.mu.kind == "Pareto" else 0.0
        v_max = 45.0 / (1.0 - growth)

        def one(si: float) -> float:
            def integrand(v: float) -> float:
                return tail_quantile(self.mu, min(1.0, 1.0 / (si * math.exp(v)))) * math.exp(-v)

            return adaptive_simpson(integrand, 0.0, v_max, tol=1e-11) / si

        return _eval(
            s,
            lambda arr: (
                self._check(arr),
                np.array([one(float(si)) for si in np.atleast_1d(arr)]).reshape(np.shape(arr)),
            )[1],
        )

    def to_json_dict(self) -> dict:
        return {"g": {"tail_quantile_of": self.mu.to_json_dict()}}


class QuadraturePotential(Potential):
    """G and G' by adaptive Simpson over v in [0, V] with x = s e^v.

    growth bounds g (|g(x)| <= C x^growth for large x) and sets V so the
    discarded tail is below the 1e-10 quadrature tolerance.
    """

    mode = "quadrature"

    def __init__(
        self,
        g_fn: Callable[[float], float],
        growth: float = 0.5,
        s_min: float = 1e-12,
        tol: float = 1e-10,
    ):
        if not 0.0 <= growth < 1.0:
            raise PotentialError("growth exponent must lie in [0, 1) for an "
                                 "integrable tail")
        self.g_fn = g_fn
        self.growth = float(growth)
        self.s_min = float(s_min)
        self.tol = float(tol)
        self.v_max = 45.0 / (1.0 - self.growth)

    def _g(self, s):
        return np.vectorize(self.g_fn, otypes=[float])(s)

    def _G_scalar(self, s: float) -> float:
        return adaptive_simpson(
            lambda v: self.g_fn(s * math.exp(v)) * math.exp(-v),
            0.0,
            self.v_max,
            tol=self.tol,
        )

    def _Gprime_scalar(self, s: float) -> float:
        gs = self.g_fn(s)
        return (
            adaptive_simpson(
                lambda v: (self.g_fn(s * math.exp(v)) - gs) * math.exp(-v),
                0.0,
                self.v_max,
                tol=self.tol,
            )
            / s
        )

    def _G(self, s):
        return np.array([self._G_scalar(float(x)) for x in np.atleast_1d(s)]).reshape(np.shape(s))

    def _Gprime(self, s):
        return np.array([self._Gprime_scalar(float(x)) for x in np.atleast_1d(s)]).reshape(np.shape(s))

    def to_json_dict(self) -> dict:
        raise PotentialError("a free-function potential has no JSON form")


class UserTablePotential(QuadraturePotential):
    """Monotone interpolation of tabulated (x, g(x)) pairs.

    Pchip keeps the interpolant monotone between knots; outside the table g
    extends flat, which also caps growth so the quadrature tail vanishes.
    """

    def __init__(self, points: Sequence[Sequence[float]], tol: float = 1e-10):
        pts = [(float(x), float(y)) for x, y in points]
        if len(pts) < 2:
            raise PotentialError("table needs at least two points")
        xs = np.array([x for x, _ in pts])
        ys = np.array([y for _, y in pts])
        if not np.all(np.isfinite(xs)) or not np.all(np.isfinite(ys)):
            raise PotentialError("table entries must be finite")
        if np.any(np.diff(xs) <= 0):
            raise PotentialError("table x-values must be strictly increasing")
        if np.any(np.diff(ys) < 0):
            raise PotentialError("table g-values must be nondecreasing")
        if xs[0] <= 0:
            raise PotentialError("table x-values must be positive")
        self._xs, self._ys = xs, ys
        self._interp = PchipInterpolator(xs, ys)
        super().__init__(self._g_scalar, growth=0.0, s_min=xs[0], tol=tol)
        self.points = pts

    def _g_scalar(self, x: float) -> float:
        return float(self._interp(min(max(x, self._xs[0]), self._xs[-1])))

    def _g(self, s):
        return self._interp(np.clip(s, self._xs[0], self._xs[-1]))

    def to_json_dict(self) -> dict:
        return {"g": {"table": [[x, y] for x, y in self.points]}}


def make_potential(obj: dict) -> Potential:
    """Build a potential from its JSON form {"g": ...}."""
    spec = obj.get("g")
    if spec == "log":
        return LogPotential()
    if isinstance(spec, dict):
        if "power" in spec:
            return PowerPotential(float(spec["power"]))
        if "tail_quantile_of" in spec:
            return TailQuantilePotential(
                DistributionModel.from_json_dict(spec["tail_quantile_of"])
            )
        if "table" in spec:
            return UserTablePotential(spec["table"])
    raise PotentialError(f"unrecognized potential spec {obj!r}")


def potential_eval(p: Potential, s: float) -> tuple[float, float, float]:
    """(g(s), G(s), G'(s))."""
    return p.g(s), p.G(s), p.Gprime(s)


def ay_forms(p: Potential, m: float, s: float) -> tuple[float, float, float, float]:
    """The four equivalent evaluations of Y at a state with 0 <= M <= S.

    (a) (1 - M/S) g(S) + M * integral_S^inf g(x)/x^2 dx
    (b) (1 - M/S) g(S) + (M/S) G(S)
    (c) G(S) - (S - M) G'(S)
    (d) g(S) + M G'(S)
    """
    if not 0.0 <= m <= s:
        raise DomainError(f"need 0 <= M <= S, got M={m}, S={s}")
    gs, Gs, Gps = p.g(s), p.G(s), p.Gprime(s)
    a = (1.0 - m / s) * gs + m * p.tail_integral(s)
    b = (1.0 - m / s) * gs + (m / s) * Gs
    c = Gs - (s - m) * Gps
    d = gs + m * Gps
    return a, b, c, d


def bregman_div(p: Potential, a, b):
    """D_{-G}(a, b) = -G(a) + G(b) + (a - b) G'(b) >= 0 by concavity."""
    out = -p.G(a) + p.G(b) + (np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) * p.Gprime(b)
    return float(out) if np.ndim(a) == 0 and np.ndim(b) == 0 else out


@dataclass(frozen=True)
class AYState:
    y: float
    y_max: float
    b: float
    bregman_sum: float
    stopped: bool

    @classmethod
    def initial(cls, p: Potential) -> "AYState":
        y0 = p.G(1.0)
        return cls(y=y0, y_max=y0, b=y0, bregman_sum=0.0, stopped=False)


def ay_step(
    state: AYState,
    p: Potential,
    m_new: float,
    s_new: float,
    m_prev: float,
    s_prev: float,
) -> AYState:
    """Advance Y, its max, and the bias-corrected B by one path step."""
    if s_new < s_prev:
        raise DecompositionError("running max cannot decrease")
    if s_new != max(s_prev, m_new):
        raise DecompositionError("S_new must equal max(S_prev, M_new)")
    # evaluated as G(S) - (S - M) G'(S): a record step (M == S) lands on
    # G(S) bitwise, so the running max of Y matches G(S_t) exactly
    gs = p.G(s_new)
    y = gs - (s_new - m_new) * p.Gprime(s_new)
    bsum = state.bregman_sum + bregman_div(p, s_new, s_prev)
    return AYState(
        y=y,
        y_max=gs,
        b=y + bsum,
        bregman_sum=bsum,
        stopped=state.stopped,
    )


def ay_stop_rule(state: AYState, mu: DistributionModel, s: float) -> bool:
    """First-hitting trigger of the calibrated stop: g_mu(S_t) >= Y_t."""
    if s < 1.0:
        raise DomainError(f"running max below initial value: {s}")
    level = tail_quantile_vec(mu, np.asarray(1.0 / s))
    return bool(level >= state.y)


class AYArrays:
    """AY state for a batch of paths, vectorised per time step.

    Stopped rows are the caller's concern: this class just advances Y, the
    exact running max G(S), the Bregman tally (compensated), and B.
    """

    def __init__(self, p: Potential, n: int):
        self.p = p
        y0 = p.G(1.0)
        self.y = np.full(n, y0)
        self.y_max = np.full(n, y0)
        self.b = np.full(n, y0)
        self.bregman_sum = np.zeros(n)
        self._comp = np.zeros(n)

    def update(self, m_new: np.ndarray, s_new: np.ndarray, s_prev: np.ndarray) -> None:
        p = self.p
        gs = p.G(s_new)
        # G(S) - (S - M) G'(S): exact G(S) on record steps, see ay_step
        self.y = gs - (s_new - m_new) * p.Gprime(s_new)
        d = -gs + p.G(s_prev) + (s_new - s_prev) * p.Gprime(s_prev)
        yterm = d - self._comp
        t = self.bregman_sum + yterm
        self._comp = (t - self.bregman_sum) - yterm
        self.bregman_sum = t
        self.b = self.y + self.bregman_sum
        self.y_max = gs


def mm_decompose_batch(
    b_paths: np.ndarray, p: Potential, atol: float = 1e-9
) -> tuple[np.ndarray, np.ndarray]:
    """Invert dB = dM * G'(S_prev) for a batch of processes.

    b_paths has shape (n, T+1) with b_paths[:, 0] = G(1).  Returns (M, S)
    with M_0 = S_0 = 1 and S the running max of M.
    """
    b = np.atleast_2d(np.asarray(b_paths, dtype=float))
    if np.any(np.abs(b[:, 0] - p.G(1.0)) > atol):
        raise DecompositionError(f"decomposable processes start at G(1) = {p.G(1.0)}")
    n, width = b.shape
    m = np.empty_like(b)
    s = np.empty_like(b)
    m[:, 0] = 1.0
    s[:, 0] = 1.0
    for t in range(1, width):
        gp = p.Gprime(s[:, t - 1])
        if np.any(gp < 1e-300):
            raise DecompositionError(
                "G' vanished along the path; potential is degenerate there"
            )
        m[:, t] = m[:, t - 1] + (b[:, t] - b[:, t - 1]) / gp
        s[:, t] = np.maximum(s[:, t - 1], m[:, t])
    return m, s


def mm_decompose(b_path: np.ndarray, p: Potential) -> tuple[np.ndarray, np.ndarray]:
    """Single-path convenience wrapper around ``mm_decompose_batch``."""
    m, s = mm_decompose_batch(np.asarray(b_path)[None, :], p)
    return m[0], s[0]


def maxplus_lower(p: Potential, m):
    """Lower process of the max-plus pairing: G(m) - m G'(m), equal to g(m)."""
    return _eval(m, lambda arr: p.G(arr) - arr * p.Gprime(arr))


def expected_ultimate_max(p: Potential) -> float:
    """E[g(S_inf)] = g(1) + G'(1) for a nonnegative martingale from 1."""
    return p.g(1.0) + p.Gprime(1.0)


@dataclass(frozen=True)
class StoppedMaxReport:
    """Two-stage dominance verdict for a stopped process.

    The running-max claim (max is dominated by the HL transform of mu) only
    makes sense when the stopped values are themselves dominated by mu, so
    the precheck gates the main check.
    """

    precondition_ok: bool
    precheck: DominanceReport
    main: DominanceReport | None

    @property
    def rejected_precondition(self) -> bool:
        return not self.precondition_ok

    @property
    def holds(self) -> bool:
        return self.precondition_ok and self.main is not None and self.main.holds

    def to_json_dict(self) -> dict:
        return {
            "precondition_ok": self.precondition_ok,
            "precheck": self.precheck.to_json_dict(),
            "main": self.main.to_json_dict() if self.main is not None else None,
        }


def stopped_max_dominance_check(
    stop_values: np.ndarray,
    running_maxes: np.ndarray,
    mu: DistributionModel,
    delta: float = 0.01,
) -> StoppedMaxReport:
    """Verify stop_values <= mu implies running_maxes <= mu^HL (empirically)."""
    pre = check_dominated_by_ccdf(stop_values, lambda ys: ccdf_vec(mu, ys), delta)
    if not pre.holds:
        return StoppedMaxReport(precondition_ok=False, precheck=pre, main=None)
    main = check_dominated_by_ccdf(running_maxes, lambda ys: hl_ccdf_vec(mu, ys), delta)
    return StoppedMaxReport(precondition_ok=True, precheck=pre, main=main)
