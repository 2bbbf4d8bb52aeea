"""Distribution toolkit: tails, barycenters, superquantiles, and the
Hardy-Littlewood maximal transform.

Conventions used throughout:

    ccdf(x)            P(X >= x), nonincreasing in x
    tail_quantile(xi)  inf{x : ccdf(x) < xi}, the upper-tail quantile
    barycenter(x)      E[X | X >= x]
    superquantile(xi)  (1/xi) * integral_0^xi tail_quantile(u) du
                       = barycenter(tail_quantile(xi)) for continuous laws

The Hardy-Littlewood transform of mu is the law of superquantile(U) for U
uniform on (0, 1]; its CCDF also admits the variational form

    hl_ccdf(y) = min_{z > 0} E[(X - (y - z))^+] / z

which ``hl_ccdf_variational`` evaluates numerically and tests cross-check
against sampling.  Empirical superquantiles follow the CVaR convention: the
average of the ceil(xi*n) largest order statistics with fractional weight on
the boundary atom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .quadrature import golden_section_min

KINDS = ("Uniform01", "Pareto", "Exponential", "Empirical")

_VAR_GRID = np.exp(np.linspace(np.log(1e-6), np.log(1e6), 512))


class DomainError(ValueError):
    """Argument outside an operation's documented domain."""


class EmptyConditioningError(ValueError):
    """Conditioning event {X >= x} has zero probability."""


class NonintegrableTailError(ValueError):
    """The requested tail functional does not exist (infinite mean tail)."""


@dataclass(frozen=True)
class DistributionModel:
    """One of the supported laws, with JSON round-tripping.

    kind      one of Uniform01 | Pareto | Exponential | Empirical
    alpha     Pareto tail index (> 0), scale fixed at 1
    rate      Exponential rate (> 0)
    sample    Empirical support, stored sorted ascending
    """

    kind: str
    alpha: float | None = None
    rate: float | None = None
    sample: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise DomainError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "Pareto":
            if self.alpha is None or not self.alpha > 0:
                raise DomainError("Pareto requires alpha > 0")
        elif self.kind == "Exponential":
            if self.rate is None or not self.rate > 0:
                raise DomainError("Exponential requires rate > 0")
        elif self.kind == "Empirical":
            if not self.sample:
                raise DomainError("Empirical requires a nonempty sample")
            vals = tuple(sorted(float(v) for v in self.sample))
            if not all(math.isfinite(v) for v in vals):
                raise DomainError("Empirical sample must be finite")
            object.__setattr__(self, "sample", vals)

    @classmethod
    def uniform01(cls) -> "DistributionModel":
        return cls("Uniform01")

    @classmethod
    def pareto(cls, alpha: float) -> "DistributionModel":
        return cls("Pareto", alpha=float(alpha))

    @classmethod
    def exponential(cls, rate: float) -> "DistributionModel":
        return cls("Exponential", rate=float(rate))

    @classmethod
    def empirical(cls, sample: Sequence[float]) -> "DistributionModel":
        return cls("Empirical", sample=tuple(float(v) for v in sample))

    @classmethod
    def from_json_dict(cls, obj: dict) -> "DistributionModel":
        kind = obj.get("kind")
        params = obj.get("params", {}) or {}
        if kind == "Uniform01":
            return cls.uniform01()
        if kind == "Pareto":
            return cls.pareto(params["alpha"])
        if kind == "Exponential":
            return cls.exponential(params["rate"])
        if kind == "Empirical":
            return cls.empirical(params["sample"])
        raise DomainError(f"unknown distribution kind {kind!r}")

    def to_json_dict(self) -> dict:
        if self.kind == "Pareto":
            return {"kind": self.kind, "params": {"alpha": self.alpha}}
        if self.kind == "Exponential":
            return {"kind": self.kind, "params": {"rate": self.rate}}
        if self.kind == "Empirical":
            return {"kind": self.kind, "params": {"sample": list(self.sample)}}
        return {"kind": self.kind, "params": {}}

    @property
    def support_min(self) -> float:
        if self.kind == "Pareto":
            return 1.0
        if self.kind == "Empirical":
            return self.sample[0]
        return 0.0

    @property
    def mean(self) -> float:
        if self.kind == "Uniform01":
            return 0.5
        if self.kind == "Pareto":
            if self.alpha <= 1:
                raise NonintegrableTailError("Pareto mean requires alpha > 1")
            return self.alpha / (self.alpha - 1.0)
        if self.kind == "Exponential":
            return 1.0 / self.rate
        return float(np.mean(self.sample))

    def _arr(self) -> np.ndarray:
        return np.asarray(self.sample, dtype=float)


def ccdf(mu: DistributionModel, x: float) -> float:
    """P(X >= x)."""
    if mu.kind == "Uniform01":
        if x <= 0.0:
            return 1.0
        return max(0.0, 1.0 - x)
    if mu.kind == "Pareto":
        if x <= 1.0:
            return 1.0
        return x ** -mu.alpha
    if mu.kind == "Exponential":
        if x <= 0.0:
            return 1.0
        return math.exp(-mu.rate * x)
    arr = mu._arr()
    return float(arr.size - np.searchsorted(arr, x, side="left")) / arr.size


def ccdf_vec(mu: DistributionModel, xs: np.ndarray) -> np.ndarray:
    """Vectorised ``ccdf``."""
    xs = np.asarray(xs, dtype=float)
    if mu.kind == "Uniform01":
        return np.clip(1.0 - xs, 0.0, 1.0)
    if mu.kind == "Pareto":
        return np.where(xs <= 1.0, 1.0, np.maximum(xs, 1.0) ** -mu.alpha)
    if mu.kind == "Exponential":
        return np.where(xs <= 0.0, 1.0, np.exp(-mu.rate * np.maximum(xs, 0.0)))
    arr = mu._arr()
    return (arr.size - np.searchsorted(arr, xs, side="left")) / arr.size


def _check_xi(xi: float) -> None:
    if not 0.0 < xi <= 1.0:
        raise DomainError(f"tail level must lie in (0, 1], got {xi}")


def tail_quantile(mu: DistributionModel, xi: float) -> float:
    """Upper-tail quantile inf{x : ccdf(x) < xi}.

    At empirical breakpoints xi = k/n this is the k-th largest sample value.
    """
    _check_xi(xi)
    if mu.kind == "Uniform01":
        return 1.0 - xi
    if mu.kind == "Pareto":
        return xi ** (-1.0 / mu.alpha)
    if mu.kind == "Exponential":
        return -math.log(xi) / mu.rate
    arr = mu._arr()
    n = arr.size
    # k-th largest, k = ceil(xi * n); nudge guards float fuzz at breakpoints
    k = int(math.ceil(xi * n - 1e-12))
    k = min(max(k, 1), n)
    return float(arr[n - k])


def tail_quantile_vec(mu: DistributionModel, xis: np.ndarray) -> np.ndarray:
    """Vectorised ``tail_quantile``."""
    xis = np.asarray(xis, dtype=float)
    if np.any((xis <= 0.0) | (xis > 1.0)):
        raise DomainError("tail levels must lie in (0, 1]")
    if mu.kind == "Uniform01":
        return 1.0 - xis
    if mu.kind == "Pareto":
        return xis ** (-1.0 / mu.alpha)
    if mu.kind == "Exponential":
        return -np.log(xis) / mu.rate
    arr = mu._arr()
    n = arr.size
    k = np.minimum(np.maximum(np.ceil(xis * n - 1e-12).astype(int), 1), n)
    return arr[n - k]


def barycenter(mu: DistributionModel, x: float) -> float:
    """E[X | X >= x]; raises if the conditioning event is null."""
    if mu.kind == "Uniform01":
        if x >= 1.0:
            raise EmptyConditioningError(f"P(X >= {x}) = 0 for Uniform01")
        return 0.5 * (1.0 + max(x, 0.0))
    if mu.kind == "Pareto":
        if mu.alpha <= 1.0:
            raise NonintegrableTailError(
                "Pareto barycenter requires alpha > 1 (infinite conditional mean)"
            )
        return mu.alpha * max(x, 1.0) / (mu.alpha - 1.0)
    if mu.kind == "Exponential":
        return max(x, 0.0) + 1.0 / mu.rate
    arr = mu._arr()
    tail = arr[np.searchsorted(arr, x, side="left") :]
    if tail.size == 0:
        raise EmptyConditioningError(f"no sample mass at or above {x}")
    return float(tail.mean())


def superquantile(mu: DistributionModel, xi: float) -> float:
    """Mean of the upper xi-tail, (1/xi) * integral_0^xi tail_quantile."""
    _check_xi(xi)
    if mu.kind == "Uniform01":
        return 1.0 - 0.5 * xi
    if mu.kind == "Pareto":
        if mu.alpha <= 1.0:
            raise NonintegrableTailError("Pareto superquantile requires alpha > 1")
        return (mu.alpha / (mu.alpha - 1.0)) * xi ** (-1.0 / mu.alpha)
    if mu.kind == "Exponential":
        return (1.0 - math.log(xi)) / mu.rate
    arr = mu._arr()
    n = arr.size
    m = int(math.ceil(xi * n - 1e-12))
    m = min(max(m, 1), n)
    desc = arr[::-1]
    full = desc[: m - 1].sum() / n
    boundary = desc[m - 1] * (xi - (m - 1) / n)
    return float((full + boundary) / xi)


def hl_sample(mu: DistributionModel, u: float) -> float:
    """One draw of the Hardy-Littlewood transform: superquantile(u), u ~ U(0,1]."""
    return superquantile(mu, u)


def superquantile_vec(mu: DistributionModel, xis: np.ndarray) -> np.ndarray:
    """Vectorised ``superquantile``."""
    xis = np.asarray(xis, dtype=float)
    if np.any((xis <= 0.0) | (xis > 1.0)):
        raise DomainError("tail levels must lie in (0, 1]")
    if mu.kind == "Uniform01":
        return 1.0 - 0.5 * xis
    if mu.kind == "Pareto":
        if mu.alpha <= 1.0:
            raise NonintegrableTailError("Pareto superquantile requires alpha > 1")
        return (mu.alpha / (mu.alpha - 1.0)) * xis ** (-1.0 / mu.alpha)
    if mu.kind == "Exponential":
        return (1.0 - np.log(xis)) / mu.rate
    arr = mu._arr()
    n = arr.size
    desc_cum = np.concatenate(([0.0], np.cumsum(arr[::-1])))
    m = np.minimum(np.maximum(np.ceil(xis * n - 1e-12).astype(int), 1), n)
    full = desc_cum[m - 1] / n
    boundary = arr[n - m] * (xis - (m - 1) / n)
    return (full + boundary) / xis


def hl_sample_vec(mu: DistributionModel, us: np.ndarray) -> np.ndarray:
    """Vectorised ``hl_sample``; used by Monte Carlo cross-checks."""
    return superquantile_vec(mu, us)


def expected_shortfall_above(mu: DistributionModel, k: float) -> float:
    """E[(X - k)^+], the put-free call value of the tail."""
    if mu.kind == "Uniform01":
        if k <= 0.0:
            return 0.5 - k
        if k >= 1.0:
            return 0.0
        return 0.5 * (1.0 - k) ** 2
    if mu.kind == "Pareto":
        if mu.alpha <= 1.0:
            raise NonintegrableTailError("E[(X-k)^+] requires alpha > 1")
        if k <= 1.0:
            return mu.alpha / (mu.alpha - 1.0) - k
        return k ** (1.0 - mu.alpha) / (mu.alpha - 1.0)
    if mu.kind == "Exponential":
        if k <= 0.0:
            return 1.0 / mu.rate - k
        return math.exp(-mu.rate * k) / mu.rate
    arr = mu._arr()
    return float(np.clip(arr - k, 0.0, None).mean())


def hl_ccdf_variational(mu: DistributionModel, y: float) -> float:
    """CCDF of the Hardy-Littlewood transform at y via

        min_{z > 0} E[(X - (y - z))^+] / z

    evaluated on a 512-point log grid over [1e-6, 1e6] and refined by
    golden-section search around the best grid point.
    """

    def objective(z: float) -> float:
        return expected_shortfall_above(mu, y - z) / z

    vals = np.array([objective(z) for z in _VAR_GRID])
    i = int(np.argmin(vals))
    lo = _VAR_GRID[max(i - 1, 0)]
    hi = _VAR_GRID[min(i + 1, _VAR_GRID.size - 1)]
    if hi > lo:
        _, best = golden_section_min(objective, lo, hi, tol=1e-13)
    else:
        best = vals[i]
    best = min(best, float(vals[i]))
    return min(max(best, 0.0), 1.0)


def hl_ccdf_exact(mu: DistributionModel, y: float) -> float:
    """CCDF of the HL transform by inverting the superquantile.

    superquantile(xi) is nonincreasing in xi, so P(SQ(U) >= y) is the largest
    xi with SQ(xi) >= y; computed by bisection.  Serves as an independent
    oracle for ``hl_ccdf_variational``.
    """
    if superquantile(mu, 1.0) >= y:
        return 1.0
    lo, hi = 1e-15, 1.0  # SQ(lo) is the far tail, SQ(hi) the mean
    if superquantile(mu, lo) < y:
        return 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if superquantile(mu, mid) >= y:
            lo = mid
        else:
            hi = mid
    return lo


def hl_ccdf_vec(mu: DistributionModel, ys: np.ndarray) -> np.ndarray:
    """Vectorised ``hl_ccdf_exact`` (bisection on the monotone superquantile)."""
    ys = np.asarray(ys, dtype=float)
    lo = np.full(ys.shape, 1e-15)
    hi = np.ones(ys.shape)
    out = np.zeros(ys.shape)
    at_mean = superquantile_vec(mu, hi) >= ys
    far_tail = superquantile_vec(mu, lo) < ys
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        above = superquantile_vec(mu, mid) >= ys
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    out = np.where(far_tail, 0.0, np.where(at_mean, 1.0, lo))
    return out


def g_mu(mu: DistributionModel, x: float) -> float:
    """tail_quantile(1/x) for x >= 1: the potential induced by mu."""
    if x < 1.0:
        raise DomainError(f"g_mu requires x >= 1, got {x}")
    return tail_quantile(mu, 1.0 / x)


def G_mu(mu: DistributionModel, x: float) -> float:
    """superquantile(1/x) for x >= 1: the future-loss potential of mu."""
    if x < 1.0:
        raise DomainError(f"G_mu requires x >= 1, got {x}")
    return superquantile(mu, 1.0 / x)


def draw(mu: DistributionModel, rng: np.random.Generator, n: int) -> np.ndarray:
    """n iid draws from mu via the tail-quantile transform of uniforms."""
    us = 1.0 - rng.random(n)  # in (0, 1]
    if mu.kind == "Uniform01":
        return 1.0 - us
    if mu.kind == "Pareto":
        return us ** (-1.0 / mu.alpha)
    if mu.kind == "Exponential":
        return -np.log(us) / mu.rate
    arr = mu._arr()
    n_s = arr.size
    k = np.minimum(np.maximum(np.ceil(us * n_s - 1e-12).astype(int), 1), n_s)
    return arr[n_s - k]


def dkw_band(n: int, delta: float) -> float:
    """One-sample Dvoretzky-Kiefer-Wolfowitz band sqrt(ln(2/delta) / (2n))."""
    if n <= 0:
        raise DomainError("DKW band needs n >= 1")
    if not 0.0 < delta < 1.0:
        raise DomainError("confidence delta must lie in (0, 1)")
    return math.sqrt(math.log(2.0 / delta) / (2.0 * n))


@dataclass(frozen=True)
class DominanceReport:
    """Outcome of an empirical stochastic-dominance check X >= Y.

    max_violation  largest amount by which P^(X >= c) falls below P^(Y >= c)
                   over the pooled breakpoints (0 when dominance is clean)
    slack          combined DKW allowance at the requested confidence
    worst_point    breakpoint attaining max_violation
    """

    holds: bool
    max_violation: float
    slack: float
    worst_point: float
    n_x: int
    n_y: int
    delta: float

    @property
    def verdict(self) -> str:
        return "DominanceHolds" if self.holds else "ViolatedBeyondSlack"

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "max_violation": self.max_violation,
            "slack": self.slack,
            "worst_point": self.worst_point,
            "n_x": self.n_x,
            "n_y": self.n_y,
            "delta": self.delta,
        }


def check_dominance(
    sample_x: np.ndarray, sample_y: np.ndarray, delta: float = 0.01
) -> DominanceReport:
    """Test X >= Y (first-order dominance) from two samples.

    Evaluates P^(X >= c) >= P^(Y >= c) - slack at every pooled breakpoint,
    slack = dkw(n_x) + dkw(n_y).
    """
    xs = np.sort(np.asarray(sample_x, dtype=float))
    ys = np.sort(np.asarray(sample_y, dtype=float))
    if xs.size == 0 or ys.size == 0:
        raise DomainError("dominance check needs nonempty samples")
    slack = dkw_band(xs.size, delta) + dkw_band(ys.size, delta)
    points = np.unique(np.concatenate([xs, ys]))
    px = (xs.size - np.searchsorted(xs, points, side="left")) / xs.size
    py = (ys.size - np.searchsorted(ys, points, side="left")) / ys.size
    gaps = py - px
    i = int(np.argmax(gaps))
    max_violation = float(max(gaps[i], 0.0))
    return DominanceReport(
        holds=max_violation <= slack,
        max_violation=max_violation,
        slack=slack,
        worst_point=float(points[i]),
        n_x=int(xs.size),
        n_y=int(ys.size),
        delta=delta,
    )


def check_dominated_by_ccdf(
    sample: np.ndarray,
    model_ccdf: Callable[[np.ndarray], np.ndarray],
    delta: float = 0.01,
) -> DominanceReport:
    """Test sample <= model (sample dominated by an analytic law).

    Violation is the largest excess of the empirical CCDF over the model CCDF
    across sample breakpoints; slack is the one-sample DKW band.
    """
    xs = np.sort(np.asarray(sample, dtype=float))
    if xs.size == 0:
        raise DomainError("dominance check needs a nonempty sample")
    points = np.unique(xs)
    emp = (xs.size - np.searchsorted(xs, points, side="left")) / xs.size
    gaps = emp - np.asarray(model_ccdf(points), dtype=float)
    i = int(np.argmax(gaps))
    max_violation = float(max(gaps[i], 0.0))
    slack = dkw_band(xs.size, delta)
    return DominanceReport(
        holds=max_violation <= slack,
        max_violation=max_violation,
        slack=slack,
        worst_point=float(points[i]),
        n_x=int(xs.size),
        n_y=0,
        delta=delta,
    )
