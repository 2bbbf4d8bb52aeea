"""Path engines: reproducible randomness, full traces, and streaming studies.

Two tiers of randomness:

  * Trace mode gives every path its own generator, seeded by mixing the path
    index into the master seed (splitmix64).  Path i is bit-identical no
    matter how paths are batched, which is what the report determinism
    contract needs.
  * The aggregate studies draw from a single master stream while shrinking
    the active set (absorbed, stopped, or decayed paths drop out).  Output
    is still deterministic for a fixed (seed, n_paths, horizon) triple, but
    individual paths are not addressable; these runs only feed summary
    statistics.

Trace mode materialises (n_paths, horizon+1) arrays and is capped by
``max_cells``; the studies run 10^5-path, 10^4-step workloads in bounded
memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.special import erfcinv

from .azema_yor import AYArrays, Potential
from .distributions import DistributionModel, DomainError, tail_quantile_vec
from .extrema import ExtremaArrays
from .martingales import MixtureGrid, mixture_log_wealth_vec

_MASK = (1 << 64) - 1
_GOLDEN64 = 0x9E3779B97F4A7C15


class TraceSizeError(ValueError):
    """Requested trace would not fit the in-memory trace format."""


def splitmix64(x: int) -> int:
    x &= _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def per_path_seed(master_seed: int, index: int) -> int:
    """64-bit seed for path ``index``; independent of batching or workers."""
    return splitmix64((master_seed + (index + 1) * _GOLDEN64) & _MASK)


def path_rng(master_seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(per_path_seed(master_seed, index)))


def master_rng(master_seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(master_seed & _MASK))


# ---------------------------------------------------------------------------
# process specifications


@dataclass(frozen=True)
class GaussianExpSpec:
    """Exponential martingale on standard normal increments, fixed step."""

    lam: float = 1.0
    kind: str = field(default="gaussian_exp", init=False)

    def __post_init__(self) -> None:
        if self.lam == 0.0:
            raise DomainError("lam must be nonzero")


@dataclass(frozen=True)
class GaussianExpGapSpec:
    """Same martingale with the predictable gap-scaled step size."""

    scale: float = 0.125
    lo: float = 0.01
    hi: float = 1.0
    kind: str = field(default="gaussian_exp_gap", init=False)

    def __post_init__(self) -> None:
        if not 0.0 < self.lo <= self.hi:
            raise DomainError("need 0 < lo <= hi")
        if self.scale <= 0.0:
            raise DomainError("scale must be positive")


@dataclass(frozen=True)
class AbsorbedWalkSpec:
    """Additive +/-step walk from 1, absorbed exactly at 0."""

    step: float = 0.5
    kind: str = field(default="absorbed_walk", init=False)

    def __post_init__(self) -> None:
        if not 0.0 < self.step <= 1.0 or (1.0 / self.step) != round(1.0 / self.step):
            raise DomainError("step must divide the starting value 1 exactly")


@dataclass(frozen=True)
class MixtureSpec:
    """Mixture wealth process over a grid of step sizes."""

    grid: MixtureGrid
    kind: str = field(default="mixture", init=False)


ProcessSpec = GaussianExpSpec | GaussianExpGapSpec | AbsorbedWalkSpec | MixtureSpec


def parse_process(obj: dict) -> ProcessSpec:
    kind = obj.get("kind")
    if kind == "gaussian_exp":
        return GaussianExpSpec(lam=float(obj.get("lam", 1.0)))
    if kind == "gaussian_exp_gap":
        return GaussianExpGapSpec(
            scale=float(obj.get("scale", 0.125)),
            lo=float(obj.get("lo", 0.01)),
            hi=float(obj.get("hi", 1.0)),
        )
    if kind == "absorbed_walk":
        return AbsorbedWalkSpec(step=float(obj.get("step", 0.5)))
    if kind == "mixture":
        return MixtureSpec(grid=MixtureGrid.from_json_dict(obj.get("grid", {})))
    raise DomainError(f"unknown process kind {kind!r}")


def process_to_json(spec: ProcessSpec) -> dict:
    if isinstance(spec, GaussianExpSpec):
        return {"kind": spec.kind, "lam": spec.lam}
    if isinstance(spec, GaussianExpGapSpec):
        return {"kind": spec.kind, "scale": spec.scale, "lo": spec.lo, "hi": spec.hi}
    if isinstance(spec, AbsorbedWalkSpec):
        return {"kind": spec.kind, "step": spec.step}
    return {"kind": spec.kind, "grid": spec.grid.to_json_dict()}


# ---------------------------------------------------------------------------
# trace mode


@dataclass
class Traces:
    """Full per-step state for a batch of paths; column 0 is t = 0."""

    process: dict
    master_seed: int
    seeds: np.ndarray
    m: np.ndarray
    s: np.ndarray
    v: np.ndarray
    h: np.ndarray
    z_sum: np.ndarray
    ratio: np.ndarray
    q: np.ndarray
    l: np.ndarray
    r: np.ndarray
    y: np.ndarray | None = None
    y_max: np.ndarray | None = None
    b: np.ndarray | None = None
    stopped: np.ndarray | None = None

    @property
    def n_paths(self) -> int:
        return self.m.shape[0]

    @property
    def horizon(self) -> int:
        return self.m.shape[1] - 1


def _per_path_normals(master_seed: int, n: int, t: int) -> np.ndarray:
    out = np.empty((n, t))
    for i in range(n):
        out[i] = path_rng(master_seed, i).standard_normal(t)
    return out


def _per_path_uniforms(master_seed: int, n: int, t: int) -> np.ndarray:
    out = np.empty((n, t))
    for i in range(n):
        out[i] = path_rng(master_seed, i).random(t)
    return out


def simulate_traces(
    spec: ProcessSpec,
    n_paths: int,
    horizon: int,
    master_seed: int,
    potential: Potential | None = None,
    mu: DistributionModel | None = None,
    max_cells: int = 2_000_000,
) -> Traces:
    """Simulate full traces with per-path generators.

    When a potential is given the Y/Ymax/B columns are filled; when mu is
    also given the stopped flag marks steps at or after the calibrated stop
    (first t with tail_quantile(mu, 1/S_t) >= Y_t).
    """
    if n_paths < 1 or horizon < 0:
        raise DomainError("need n_paths >= 1 and horizon >= 0")
    if n_paths * (horizon + 1) > max_cells:
        raise TraceSizeError(
            f"trace of {n_paths} x {horizon + 1} exceeds {max_cells} cells; "
            "lower --paths/--horizon (aggregate studies handle large runs)"
        )
    n, width = n_paths, horizon + 1
    log_m = np.zeros((n, width))
    v = np.zeros((n, width))
    z_sum = np.zeros((n, width))

    if isinstance(spec, AbsorbedWalkSpec):
        m_lin = np.ones(n)
        m_cols = np.ones((n, width))
        steps = np.where(
            _per_path_uniforms(master_seed, n, horizon) < 0.5, -spec.step, spec.step
        )
        for t in range(1, width):
            live = m_cols[:, t - 1] > 0.0
            m_lin = np.where(live, m_cols[:, t - 1] + steps[:, t - 1], 0.0)
            m_cols[:, t] = np.maximum(m_lin, 0.0)
        with np.errstate(divide="ignore"):
            log_m = np.where(m_cols > 0.0, np.log(np.maximum(m_cols, 1e-300)), -np.inf)
        m = m_cols
    elif isinstance(spec, GaussianExpSpec):
        z = _per_path_normals(master_seed, n, horizon)
        inc = spec.lam * z - 0.5 * spec.lam * spec.lam
        log_m[:, 1:] = np.cumsum(inc, axis=1)
        z_sum[:, 1:] = np.cumsum(z, axis=1)
        v[:, 1:] = np.arange(1, width)
        m = np.exp(log_m)
    elif isinstance(spec, GaussianExpGapSpec):
        z = _per_path_normals(master_seed, n, horizon)
        lm = np.zeros(n)
        ls = np.zeros(n)
        for t in range(1, width):
            lam = np.clip(spec.scale * (ls - lm), spec.lo, spec.hi)
            lm = lm + lam * z[:, t - 1] - 0.5 * lam * lam
            ls = np.maximum(ls, lm)
            log_m[:, t] = lm
            z_sum[:, t] = z_sum[:, t - 1] + z[:, t - 1]
            v[:, t] = v[:, t - 1] + 1.0
        m = np.exp(log_m)
    elif isinstance(spec, MixtureSpec):
        z = _per_path_normals(master_seed, n, horizon)
        z_sum[:, 1:] = np.cumsum(z, axis=1)
        v[:, 1:] = np.arange(1, width)
        for t in range(1, width):
            log_m[:, t] = mixture_log_wealth_vec(z_sum[:, t], v[:, t], spec.grid)
        m = np.exp(log_m)
    else:
        raise DomainError(f"unknown process spec {spec!r}")

    log_s = np.maximum.accumulate(log_m, axis=1)
    s = np.exp(log_s)
    if isinstance(spec, AbsorbedWalkSpec):
        s = np.maximum.accumulate(m, axis=1)
        log_s = np.log(s)
    with np.errstate(divide="ignore"):
        h = np.where(m > 0.0, 1.0 / np.maximum(m, 1e-300), np.inf)

    acc = ExtremaArrays(n)
    q = np.zeros((n, width))
    l = np.zeros((n, width))
    r = np.ones((n, width))
    ratio = np.ones((n, width))
    for t in range(1, width):
        acc.update(log_m[:, t - 1], log_s[:, t - 1], log_m[:, t], log_s[:, t])
        q[:, t] = acc.q
        l[:, t] = acc.l
        r[:, t] = acc.r
        ratio[:, t] = acc.ratio

    traces = Traces(
        process=process_to_json(spec),
        master_seed=master_seed,
        seeds=np.array([per_path_seed(master_seed, i) for i in range(n)], dtype=np.uint64),
        m=m,
        s=s,
        v=v,
        h=h,
        z_sum=z_sum,
        ratio=ratio,
        q=q,
        l=l,
        r=r,
    )
    if potential is not None:
        ay = AYArrays(potential, n)
        y = np.empty((n, width))
        y_max = np.empty((n, width))
        b = np.empty((n, width))
        y[:, 0], y_max[:, 0], b[:, 0] = ay.y, ay.y_max, ay.b
        stopped = np.zeros((n, width), dtype=bool)
        if mu is not None:
            stopped[:, 0] = tail_quantile_vec(mu, np.ones(n)) >= ay.y
        for t in range(1, width):
            ay.update(m[:, t], s[:, t], s[:, t - 1])
            y[:, t], y_max[:, t], b[:, t] = ay.y, ay.y_max, ay.b
            if mu is not None:
                trigger = tail_quantile_vec(mu, 1.0 / s[:, t]) >= ay.y
                stopped[:, t] = stopped[:, t - 1] | trigger
        traces.y, traces.y_max, traces.b = y, y_max, b
        traces.stopped = stopped if mu is not None else np.zeros((n, width), dtype=bool)
    return traces


# ---------------------------------------------------------------------------
# streaming studies (aggregate outputs only)


@dataclass(frozen=True)
class RunningMaxStudy:
    log_s: np.ndarray
    log_m: np.ndarray
    frozen_fraction: float
    n_paths: int
    horizon: int


def running_max_study(
    n_paths: int,
    horizon: int,
    master_seed: int,
    lam: float | None = None,
    scale: float = 0.125,
    lo: float = 0.01,
    hi: float = 1.0,
    freeze_ratio: float = 1e-12,
) -> RunningMaxStudy:
    """Final running max (and value) of the exponential martingale.

    lam fixes the step size; lam=None uses the gap-scaled schedule.  Paths
    whose value decays freeze_ratio below their max are frozen: the chance
    of another record from there is below freeze_ratio (Ville), so the
    final max is already determined up to that probability.
    """
    rng = master_rng(master_seed)
    log_m = np.zeros(n_paths)
    log_s = np.zeros(n_paths)
    alive = np.arange(n_paths)
    log_freeze = math.log(freeze_ratio)
    for _ in range(horizon):
        if alive.size == 0:
            break
        lm, ls = log_m[alive], log_s[alive]
        if lam is None:
            lam_t = np.clip(scale * (ls - lm), lo, hi)
        else:
            lam_t = lam
        z = rng.standard_normal(alive.size)
        lm = lm + lam_t * z - 0.5 * np.square(lam_t)
        ls = np.maximum(ls, lm)
        log_m[alive] = lm
        log_s[alive] = ls
        keep = (lm - ls) >= log_freeze
        alive = alive[keep]
    return RunningMaxStudy(
        log_s=log_s,
        log_m=log_m,
        frozen_fraction=1.0 - alive.size / n_paths,
        n_paths=n_paths,
        horizon=horizon,
    )


@dataclass(frozen=True)
class RValidityStudy:
    """Per-path stopping data for the normalized-drawdown statistic R."""

    tau_f: np.ndarray
    rho_f: np.ndarray
    r_at_tau_f: np.ndarray
    resolved: np.ndarray
    cross_time: np.ndarray
    cross_r: np.ndarray
    newmin_time: np.ndarray
    newmin_r: np.ndarray
    final_ratio: np.ndarray
    r_snapshots: dict[int, np.ndarray]
    n_paths: int
    horizon: int

    def strategy_r(self, name: str) -> np.ndarray:
        """R at the strategy's stop, clipped at the estimated final record."""
        if name == "first_crossing":
            use_cross = self.cross_time <= self.tau_f
            return np.where(use_cross, self.cross_r, self.r_at_tau_f)
        if name == "stop_at_new_min":
            use_new = self.newmin_time <= self.tau_f
            return np.where(use_new, self.newmin_r, self.r_at_tau_f)
        if name == "min_over_horizon":
            return self.r_at_tau_f
        raise DomainError(f"unknown strategy {name!r}")


def r_validity_study(
    n_paths: int,
    horizon: int,
    master_seed: int,
    lam: float = 1.0,
    alpha: float = 0.05,
    freeze_ratio: float | None = 1e-12,
    snapshot_ts: Iterable[int] = (),
) -> RValidityStudy:
    """Stream the drawdown statistics a peeker could stop on.

    Tracks, per path: the last record time tau_F (with a resolved flag when
    the value has decayed below 1e-6 of the max by the horizon), the last
    argmin time rho_F of M/S before tau_F, R at tau_F, the first time R
    crosses alpha, and the first strict new low of M/S after the first step.
    Snapshot times record R_t (exact only when freezing is disabled).
    """
    rng = master_rng(master_seed)
    n = n_paths
    log_m = np.zeros(n)
    log_s = np.zeros(n)
    r = np.ones(n)
    argmin_t = np.zeros(n, dtype=np.int64)
    tau_f = np.zeros(n, dtype=np.int64)
    rho_f = np.zeros(n, dtype=np.int64)
    r_at_tau_f = np.ones(n)
    cross_time = np.full(n, horizon + 1, dtype=np.int64)
    cross_r = np.ones(n)
    newmin_time = np.full(n, horizon + 1, dtype=np.int64)
    newmin_r = np.ones(n)
    alive = np.arange(n)
    log_freeze = -math.inf if freeze_ratio is None else math.log(freeze_ratio)
    snapshots = {}
    want_snap = sorted(set(int(t) for t in snapshot_ts))
    for t in range(1, horizon + 1):
        if alive.size:
            lm, ls = log_m[alive], log_s[alive]
            z = rng.standard_normal(alive.size)
            lm = lm + lam * z - 0.5 * lam * lam
            record = lm > ls
            ls = np.where(record, lm, ls)
            ratio = np.exp(lm - ls)
            r_prev = r[alive]
            is_min = ratio <= r_prev
            r_new = np.where(is_min, ratio, r_prev)
            am = np.where(is_min, t, argmin_t[alive])
            # record events: refresh the final-record markers
            tau_f[alive[record]] = t
            rho_f[alive[record]] = am[record]
            r_at_tau_f[alive[record]] = r_new[record]
            # first time the running min crosses alpha
            cross_now = (cross_time[alive] > horizon) & (r_new <= alpha)
            cross_time[alive[cross_now]] = t
            cross_r[alive[cross_now]] = r_new[cross_now]
            # first strict new low after the first step
            newmin_now = (newmin_time[alive] > horizon) & (ratio < r_prev) & (t >= 2)
            newmin_time[alive[newmin_now]] = t
            newmin_r[alive[newmin_now]] = ratio[newmin_now]
            log_m[alive] = lm
            log_s[alive] = ls
            r[alive] = r_new
            argmin_t[alive] = am
            keep = (lm - ls) >= log_freeze
            alive = alive[keep]
        if want_snap and t == want_snap[0]:
            snapshots[t] = r.copy()
            want_snap.pop(0)
    resolved = (log_m - log_s) < math.log(1e-6)
    return RValidityStudy(
        tau_f=tau_f,
        rho_f=rho_f,
        r_at_tau_f=r_at_tau_f,
        resolved=resolved,
        cross_time=cross_time,
        cross_r=cross_r,
        newmin_time=newmin_time,
        newmin_r=newmin_r,
        final_ratio=np.exp(log_m - log_s),
        r_snapshots=snapshots,
        n_paths=n,
        horizon=horizon,
    )


@dataclass(frozen=True)
class WalkStudy:
    """Absorbed (optionally barrier-stopped) additive walk outcomes."""

    stop_time: np.ndarray
    stopped: np.ndarray
    s_stop: np.ndarray
    m_final: np.ndarray
    s_final: np.ndarray
    stop_value: np.ndarray
    n_paths: int
    horizon: int

    @property
    def censored_fraction(self) -> float:
        return 1.0 - float(np.mean(self.stopped))


def absorbed_walk_study(
    n_paths: int,
    horizon: int,
    master_seed: int,
    step: float = 0.5,
    barrier: float | None = None,
) -> WalkStudy:
    """Run +/-step walks from 1 until absorption at 0 (or a barrier hit).

    All values are exact grid multiples of ``step``, so absorption and
    barrier crossings are equality events, not threshold approximations.
    """
    AbsorbedWalkSpec(step=step)  # validate
    if barrier is not None and (barrier <= 1.0 or round(barrier / step) * step != barrier):
        raise DomainError("barrier must be a grid multiple above 1")
    rng = master_rng(master_seed)
    n = n_paths
    m = np.ones(n)
    s = np.ones(n)
    stop_time = np.full(n, -1, dtype=np.int64)
    stop_value = np.zeros(n)
    alive = np.arange(n)
    for t in range(1, horizon + 1):
        if alive.size == 0:
            break
        z = rng.random(alive.size)
        mm = m[alive] + np.where(z < 0.5, -step, step)
        ss = np.maximum(s[alive], mm)
        m[alive] = mm
        s[alive] = ss
        hit = mm == 0.0
        if barrier is not None:
            hit = hit | (mm >= barrier)
        idx = alive[hit]
        stop_time[idx] = t
        stop_value[idx] = mm[hit]
        alive = alive[~hit]
    stopped = stop_time >= 0
    return WalkStudy(
        stop_time=stop_time,
        stopped=stopped,
        s_stop=s,
        m_final=m,
        s_final=s,
        stop_value=stop_value,
        n_paths=n,
        horizon=horizon,
    )


@dataclass(frozen=True)
class InflationStudy:
    """Peeking type-I rates for the naive z p-value and the mixture H-value."""

    crossed_naive: dict[tuple[float, int], float]
    crossed_h: dict[tuple[float, int], float]
    fixed_time_naive: dict[tuple[float, int], float]
    n_paths: int
    horizons: tuple[int, ...]


def mixture_crossing_boundary(
    grid: MixtureGrid, alpha: float, horizon: int
) -> np.ndarray:
    """z*(t) with W_t(z*) = 1/alpha: the wealth is increasing in the
    z-statistic at fixed t, so min_t H <= alpha iff the walk ever reaches
    the boundary.  Entry [t-1] is the level at step t."""
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    ts = np.arange(1, horizon + 1, dtype=float)
    lams = grid.lambdas_arr()[:, None]
    logw = grid.log_weights()[:, None]
    target = math.log(1.0 / alpha)
    lo = np.zeros(horizon)
    hi = np.min((target - logw + 0.5 * lams**2 * ts) / lams, axis=0)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        val = mixture_log_wealth_vec(mid, ts, grid)
        above = val >= target
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    return 0.5 * (lo + hi)


def peeking_inflation_study(
    n_paths: int,
    horizons: Iterable[int],
    master_seed: int,
    alphas: Iterable[float] = (0.10, 0.05, 0.01),
    grid: MixtureGrid | None = None,
    chunk: int = 100,
) -> InflationStudy:
    """Share one batch of z-walks across all horizons and alpha levels.

    Reports, per (alpha, horizon): the fraction of paths whose naive z-test
    p-value ever dipped below alpha within the horizon, the same for the
    mixture H-value, and the fixed-time naive rejection rate at exactly the
    horizon (the calibration baseline).  Prefix-sharing makes the naive
    inflation exactly nondecreasing in the horizon, path by path.
    """
    horizons = sorted(set(int(h) for h in horizons))
    alphas = tuple(float(a) for a in alphas)
    t_max = horizons[-1]
    if any(h % chunk for h in horizons):
        chunk = math.gcd(*horizons)
    grid = grid or MixtureGrid.geometric()
    rng = master_rng(master_seed)
    n = n_paths
    z = np.zeros(n)
    # naive: p_t <= alpha iff |Z_t| >= sqrt(2t) * erfcinv(alpha)
    naive_mult = {a: math.sqrt(2.0) * float(erfcinv(a)) for a in alphas}
    h_bound = {a: mixture_crossing_boundary(grid, a, t_max) for a in alphas}
    crossed_naive = {a: np.zeros(n, dtype=bool) for a in alphas}
    crossed_h = {a: np.zeros(n, dtype=bool) for a in alphas}
    out_naive: dict[tuple[float, int], float] = {}
    out_h: dict[tuple[float, int], float] = {}
    out_fixed: dict[tuple[float, int], float] = {}
    sqrt_t = np.sqrt(np.arange(1, t_max + 1, dtype=float))
    t0 = 0
    while t0 < t_max:
        c = min(chunk, t_max - t0)
        dz = rng.standard_normal((n, c), dtype=np.float32).astype(np.float64)
        zc = z[:, None] + np.cumsum(dz, axis=1)
        z = zc[:, -1]
        ts = slice(t0, t0 + c)
        for a in alphas:
            thr = naive_mult[a] * sqrt_t[ts]
            crossed_naive[a] |= (np.abs(zc) >= thr).any(axis=1)
            crossed_h[a] |= (zc >= h_bound[a][ts]).any(axis=1)
        t0 += c
        if t0 in horizons:
            for a in alphas:
                out_naive[(a, t0)] = float(np.mean(crossed_naive[a]))
                out_h[(a, t0)] = float(np.mean(crossed_h[a]))
                out_fixed[(a, t0)] = float(
                    np.mean(np.abs(z) >= naive_mult[a] * math.sqrt(t0))
                )
    return InflationStudy(
        crossed_naive=out_naive,
        crossed_h=out_h,
        fixed_time_naive=out_fixed,
        n_paths=n,
        horizons=tuple(horizons),
    )


def extrema_identity_study(
    n_paths: int,
    horizon: int,
    master_seed: int,
    lam: float = 0.5,
) -> dict:
    """Stream the Q/L identity over every step of every path.

    Returns the worst |M/S - (1 + Q - L)| and worst L - log(S) across the
    whole batch, plus final-step aggregates for the martingale mean checks.
    """
    rng = master_rng(master_seed)
    n = n_paths
    log_m = np.zeros(n)
    log_s = np.zeros(n)
    acc = ExtremaArrays(n)
    worst_identity = 0.0
    worst_l_excess = -math.inf
    for _ in range(horizon):
        z = rng.standard_normal(n)
        lm = log_m + lam * z - 0.5 * lam * lam
        ls = np.maximum(log_s, lm)
        acc.update(log_m, log_s, lm, ls)
        log_m, log_s = lm, ls
        worst_identity = max(worst_identity, float(np.max(np.abs(acc.identity_gap()))))
        worst_l_excess = max(worst_l_excess, float(np.max(acc.l - log_s)))
    return {
        "worst_identity": worst_identity,
        "worst_l_excess": worst_l_excess,
        "q_final": acc.q,
        "l_final": acc.l,
        "r_final": acc.r,
        "log_s_final": log_s,
        "log_m_final": log_m,
    }
