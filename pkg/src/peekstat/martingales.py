"""Test (super)martingales as streaming per-path state machines.

Every process here starts at M_0 = 1 and is tracked in log-space so horizons
of 10^5+ steps neither underflow nor overflow.  ``PathState`` carries the
sufficient statistics for all supported processes:

    t       step count
    log_m   log of the current process value M_t
    log_s   log of the running maximum S_t
    v       cumulative variance (sub-Gaussian increments)
    z_sum   running sum of raw increments (the z-statistic)

The reciprocal 1/M_t of any of these processes is a p-value that stays valid
under optional stopping; ``h_value`` computes it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import erfc, logsumexp

from .distributions import DomainError


@dataclass(frozen=True)
class PathState:
    t: int = 0
    log_m: float = 0.0
    log_s: float = 0.0
    v: float = 0.0
    z_sum: float = 0.0
    rng_seed: int = 0

    @property
    def m(self) -> float:
        return math.exp(self.log_m)

    @property
    def s(self) -> float:
        return math.exp(self.log_s)

    @property
    def h(self) -> float:
        return h_value(self.m)

    @classmethod
    def initial(cls, rng_seed: int = 0) -> "PathState":
        return cls(rng_seed=rng_seed)


def h_value(w: float) -> float:
    """Reciprocal of a nonnegative test process; +inf when the process is 0."""
    if w < 0.0:
        raise DomainError(f"test process value must be >= 0, got {w}")
    if w == 0.0:
        return math.inf
    return 1.0 / w


def step_gaussian_exp(state: PathState, lam: float, z: float) -> PathState:
    """Multiply M by exp(lam*z - lam^2/2); a martingale for standard normal z.

    lam may vary per step as long as it is chosen before z is drawn
    (predictable), which preserves the exact martingale property.
    """
    if lam == 0.0:
        raise DomainError("lam must be nonzero")
    log_m = state.log_m + lam * z - 0.5 * lam * lam
    return replace(
        state,
        t=state.t + 1,
        log_m=log_m,
        log_s=max(state.log_s, log_m),
        v=state.v + 1.0,
        z_sum=state.z_sum + z,
    )


def gap_scaled_lambda(
    log_gap: float, scale: float = 0.125, lo: float = 0.01, hi: float = 1.0
) -> float:
    """Predictable per-step lam: small near the running max, large far below.

    log_gap = log(S/M) >= 0 is known before the next increment is drawn, so
    lam_t = clip(scale * log_gap, lo, hi) keeps the process an exact
    martingale while making its discrete running maximum track the
    continuum law P(S >= x) = 1/x closely: overshoot past a record level is
    O(lam), and lam is tiny whenever a record is within reach.
    """
    return min(max(scale * log_gap, lo), hi)


def step_likelihood_ratio(
    state: PathState, f_density: float, g_density: float
) -> PathState:
    """Multiply M by f(x)/g(x); a martingale when data are drawn from g."""
    if g_density <= 0.0:
        raise DomainError("denominator density must be positive")
    if f_density < 0.0:
        raise DomainError("numerator density must be nonnegative")
    if f_density == 0.0:
        log_m = -math.inf
    else:
        log_m = state.log_m + math.log(f_density) - math.log(g_density)
    return replace(state, t=state.t + 1, log_m=log_m, log_s=max(state.log_s, log_m))


def fixed_time_pvalue(z_sum: float, t: int) -> float:
    """Best fixed-time sub-Gaussian p-value exp(-z_sum^2 / (2 t))."""
    if t < 1:
        raise DomainError(f"fixed-time p-value needs t >= 1, got {t}")
    return math.exp(-(z_sum * z_sum) / (2.0 * t))


def naive_z_pvalue(z_sum: float, t: int) -> float:
    """Exact two-sided z-test p-value 2*P(N(0,1) >= |z_sum|/sqrt(t)).

    Calibrated at fixed t (uniform under the null) but has no validity under
    peeking; the harness uses it as the inflation baseline.
    """
    if t < 1:
        raise DomainError(f"z-test p-value needs t >= 1, got {t}")
    return float(erfc(abs(z_sum) / math.sqrt(2.0 * t)))


@dataclass(frozen=True)
class MixtureGrid:
    """Discrete mixing distribution over step sizes lam."""

    lambdas: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.lambdas) != len(self.weights) or not self.lambdas:
            raise DomainError("grid needs matching nonempty lambdas and weights")
        if any(lam <= 0 for lam in self.lambdas):
            raise DomainError("grid lambdas must be positive")
        if any(w <= 0 for w in self.weights):
            raise DomainError("grid weights must be positive")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise DomainError("grid weights must sum to 1 within 1e-12")

    @classmethod
    def geometric(
        cls,
        lam_max: float = 4.0,
        ratio: float = 1.1,
        size: int = 100,
        decay: float = 1.4,
    ) -> "MixtureGrid":
        """Geometric ladder lam_k = lam_max * ratio^-(k + 1/2) with slowly
        decaying weights 1 / (lam_k * ln^decay(e * lam_max / lam_k)).

        Heavy weight near lam = 0 keeps the mixture sensitive at long
        horizons; the exact shape carries no correctness weight (any valid
        grid yields a valid H-value) and is fully user-configurable.
        """
        if ratio <= 1.0 or lam_max <= 0 or size < 1:
            raise DomainError("geometric grid needs ratio > 1, lam_max > 0, size >= 1")
        k = np.arange(size)
        lams = lam_max * ratio ** -(k + 0.5)
        raw = 1.0 / (lams * np.log(np.e * lam_max / lams) ** decay)
        w = raw / raw.sum()
        return cls(tuple(float(x) for x in lams), tuple(float(x) for x in w))

    @classmethod
    def from_json_dict(cls, obj: dict) -> "MixtureGrid":
        if "lambdas" in obj:
            lams = [float(x) for x in obj["lambdas"]]
            if "weights" in obj:
                w = [float(x) for x in obj["weights"]]
            else:
                w = [1.0 / len(lams)] * len(lams)
            return cls(tuple(lams), tuple(w))
        return cls.geometric(
            lam_max=float(obj.get("lam_max", 4.0)),
            ratio=float(obj.get("ratio", 1.1)),
            size=int(obj.get("size", 100)),
            decay=float(obj.get("decay", 1.4)),
        )

    def to_json_dict(self) -> dict:
        return {"lambdas": list(self.lambdas), "weights": list(self.weights)}

    def log_weights(self) -> np.ndarray:
        return np.log(np.asarray(self.weights))

    def lambdas_arr(self) -> np.ndarray:
        return np.asarray(self.lambdas)


def mixture_log_wealth(z_sum: float, v: float, grid: MixtureGrid) -> float:
    """log W_t for W_t = sum_k w_k exp(lam_k * z_sum - lam_k^2 * v / 2)."""
    lams = grid.lambdas_arr()
    return float(logsumexp(grid.log_weights() + lams * z_sum - 0.5 * lams**2 * v))


def mixture_log_wealth_vec(
    z_sums: np.ndarray, vs: np.ndarray, grid: MixtureGrid
) -> np.ndarray:
    """Vectorised ``mixture_log_wealth`` over paths."""
    lams = grid.lambdas_arr()[:, None]
    expo = grid.log_weights()[:, None] + lams * np.asarray(z_sums) - 0.5 * lams**2 * np.asarray(vs)
    return logsumexp(expo, axis=0)


def step_mixture(
    state: PathState, grid: MixtureGrid, z: float, sigma_sq: float = 1.0
) -> PathState:
    """Advance the mixed wealth process one increment.

    z must have conditional mean <= 0 and be sub-Gaussian with parameter
    sigma_sq given the past; then W is a nonnegative supermartingale with
    W_0 = 1 (a martingale for exactly Gaussian increments).  The per-lam
    components are deterministic in (z_sum, v), so only those two statistics
    are carried and W is recomputed in log-space at each step.
    """
    if sigma_sq <= 0.0:
        raise DomainError("sigma_sq must be positive")
    z_sum = state.z_sum + z
    v = state.v + sigma_sq
    log_m = mixture_log_wealth(z_sum, v, grid)
    return replace(
        state,
        t=state.t + 1,
        log_m=log_m,
        log_s=max(state.log_s, log_m),
        v=v,
        z_sum=z_sum,
    )
