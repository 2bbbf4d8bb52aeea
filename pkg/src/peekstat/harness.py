"""Experiment driver: peeker strategies against p-value processes.

A config names a process, a batch size, a horizon, and a list of peeking
strategies, each bound to the p-process it peeks at:

  * NaiveZ      two-sided z-test p-value at the current step (the textbook
                number, only valid at fixed times)
  * HValue      reciprocal wealth, valid at any stopping time
  * RStatistic  running min of M/S, valid when read before the final record

Four commands share the config: ``simulate`` dumps traces, ``peek`` runs
the strategies and tabulates type-I rates, ``verify`` executes the
pathwise invariant suite, ``roundtrip`` exercises the max-decomposition
inversion.  All of them render byte-deterministic reports: same config,
same bytes.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import erfc

from .azema_yor import (
    AYArrays,
    LogPotential,
    Potential,
    PotentialError,
    PowerPotential,
    ay_forms,
    bregman_div,
    make_potential,
    mm_decompose_batch,
)
from .distributions import DistributionModel, DomainError, dkw_band
from .extrema import CheckReport, identity_check, q_logmax_bound_check
from .simulate import (
    AbsorbedWalkSpec,
    GaussianExpSpec,
    ProcessSpec,
    Traces,
    master_rng,
    parse_process,
    process_to_json,
    simulate_traces,
)

SCHEMA_VERSION = 1
PROCESS_NAMES = ("NaiveZ", "HValue", "RStatistic")
STRATEGY_KINDS = ("FirstCrossing", "MinOverHorizon", "FixedTime", "StopAtNewMin")
DEFAULT_ALPHAS = (0.10, 0.05, 0.01)
P_FLOOR = 1e-300

PATHS_HEADER = "path,t,M,S,V,H,M/S,Q,L,R,Y,Ymax,B,stopped"
RECORDS_HEADER = (
    "path,strategy,process,stop_time,censored,reported_p,"
    "tau_f_estimate,tau_f_resolved,rho_f_estimate"
)


class ConfigError(ValueError):
    """Config rejected before any simulation runs."""


def default_config_dict(command: str) -> dict:
    """Sensible small-scale config for a subcommand run without --config."""
    base = {
        "master_seed": 20260814,
        "n_paths": 200,
        "horizon": 500,
        "process": {"kind": "gaussian_exp", "lam": 1.0},
        "potential": {"g": "log"},
    }
    if command == "peek":
        base["strategies"] = [
            {"kind": "FixedTime", "t": 250, "process": "NaiveZ"},
            {"kind": "FirstCrossing", "alpha": 0.05, "process": "HValue"},
            {"kind": "StopAtNewMin", "process": "RStatistic"},
            {"kind": "MinOverHorizon", "t": 500, "process": "RStatistic"},
        ]
    elif command == "roundtrip":
        base["process"] = {"kind": "gaussian_exp", "lam": 0.5}
        base["horizon"] = 300
    return base


def build_identifier() -> str:
    try:
        from importlib.metadata import version

        return f"peekstat-{version('peekstat')}"
    except Exception:
        return "peekstat-0+unknown"


@dataclass(frozen=True)
class PeekStrategy:
    """A stopping rule bound to the p-process it watches."""

    kind: str
    alpha: float | None = None
    t: int | None = None
    process: str = "RStatistic"

    def __post_init__(self) -> None:
        if self.kind not in STRATEGY_KINDS:
            raise ConfigError(f"unknown strategy kind {self.kind!r}")
        if self.process not in PROCESS_NAMES:
            raise ConfigError(f"unknown p-process {self.process!r}")
        if self.kind == "FirstCrossing":
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise ConfigError("FirstCrossing needs alpha in (0, 1)")
        elif self.kind in ("MinOverHorizon", "FixedTime"):
            if self.t is None or self.t < 1:
                raise ConfigError(f"{self.kind} needs t >= 1")

    @property
    def label(self) -> str:
        if self.kind == "FirstCrossing":
            return f"FirstCrossing({self.alpha:g})"
        if self.kind in ("MinOverHorizon", "FixedTime"):
            return f"{self.kind}({self.t})"
        return self.kind

    @classmethod
    def from_json_dict(cls, obj: dict) -> "PeekStrategy":
        if not isinstance(obj, dict):
            raise ConfigError(f"strategy must be an object, got {obj!r}")
        unknown = set(obj) - {"kind", "alpha", "t", "process"}
        if unknown:
            raise ConfigError(f"unknown strategy keys {sorted(unknown)}")
        return cls(
            kind=obj.get("kind", ""),
            alpha=None if obj.get("alpha") is None else float(obj["alpha"]),
            t=None if obj.get("t") is None else int(obj["t"]),
            process=obj.get("process", "RStatistic"),
        )

    def to_json_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.alpha is not None:
            out["alpha"] = self.alpha
        if self.t is not None:
            out["t"] = self.t
        out["process"] = self.process
        return out


@dataclass(frozen=True)
class PeekRunRecord:
    """One (path, strategy) outcome; final-record times are estimates."""

    path: int
    strategy: str
    process: str
    stop_time: int
    censored: bool
    reported_p: float
    tau_f_estimate: int
    tau_f_resolved: bool
    rho_f_estimate: int


@dataclass(frozen=True)
class ExperimentConfig:
    master_seed: int = 20260814
    n_paths: int = 200
    horizon: int = 500
    process: ProcessSpec = GaussianExpSpec(lam=1.0)
    strategies: tuple[PeekStrategy, ...] = ()
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    potential: Potential | None = None
    mu: DistributionModel | None = None
    out_dir: str | None = None
    max_cells: int = 2_000_000

    def __post_init__(self) -> None:
        if not isinstance(self.master_seed, int):
            raise ConfigError("master_seed must be an integer")
        if self.n_paths < 1:
            raise ConfigError("n_paths must be >= 1")
        if self.horizon < 0:
            raise ConfigError("horizon must be >= 0")
        if self.max_cells < 1:
            raise ConfigError("max_cells must be >= 1")
        for a in self.alphas:
            if not 0.0 < a < 1.0:
                raise ConfigError(f"alpha level {a} outside (0, 1)")
        walk = isinstance(self.process, AbsorbedWalkSpec)
        for st in self.strategies:
            if st.kind in ("MinOverHorizon", "FixedTime") and st.t > self.horizon:
                raise ConfigError(
                    f"{st.label} looks past the horizon {self.horizon}"
                )
            if walk and st.process == "NaiveZ":
                raise ConfigError(
                    "NaiveZ needs a z-statistic; the absorbed walk has none"
                )

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ExperimentConfig":
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        known = {
            "master_seed",
            "n_paths",
            "horizon",
            "process",
            "strategies",
            "alphas",
            "potential",
            "mu",
            "out_dir",
            "max_cells",
        }
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        kwargs: dict = {}
        try:
            if "master_seed" in obj:
                kwargs["master_seed"] = int(obj["master_seed"])
            if "n_paths" in obj:
                kwargs["n_paths"] = int(obj["n_paths"])
            if "horizon" in obj:
                kwargs["horizon"] = int(obj["horizon"])
            if "max_cells" in obj:
                kwargs["max_cells"] = int(obj["max_cells"])
            if obj.get("process") is not None:
                kwargs["process"] = parse_process(obj["process"])
            if obj.get("strategies") is not None:
                kwargs["strategies"] = tuple(
                    PeekStrategy.from_json_dict(s) for s in obj["strategies"]
                )
            if obj.get("alphas") is not None:
                kwargs["alphas"] = tuple(float(a) for a in obj["alphas"])
            if obj.get("potential") is not None:
                kwargs["potential"] = make_potential(obj["potential"])
            if obj.get("mu") is not None:
                kwargs["mu"] = DistributionModel.from_json_dict(obj["mu"])
            if obj.get("out_dir") is not None:
                kwargs["out_dir"] = str(obj["out_dir"])
        except (DomainError, PotentialError, TypeError) as exc:
            raise ConfigError(f"bad config value: {exc}") from exc
        return cls(**kwargs)

    def to_json_dict(self) -> dict:
        return {
            "master_seed": self.master_seed,
            "n_paths": self.n_paths,
            "horizon": self.horizon,
            "process": process_to_json(self.process),
            "strategies": [s.to_json_dict() for s in self.strategies],
            "alphas": list(self.alphas),
            "potential": None if self.potential is None else self.potential.to_json_dict(),
            "mu": None if self.mu is None else self.mu.to_json_dict(),
            "out_dir": self.out_dir,
            "max_cells": self.max_cells,
        }

    def with_overrides(
        self,
        seed: int | None = None,
        paths: int | None = None,
        horizon: int | None = None,
        out_dir: str | None = None,
    ) -> "ExperimentConfig":
        changes: dict = {}
        if seed is not None:
            changes["master_seed"] = seed
        if paths is not None:
            changes["n_paths"] = paths
        if horizon is not None:
            changes["horizon"] = horizon
        if out_dir is not None:
            changes["out_dir"] = out_dir
        return dataclasses.replace(self, **changes) if changes else self


# ---------------------------------------------------------------------------
# p-processes and strategy stop times


def p_matrix(traces: Traces, process: str) -> np.ndarray:
    """Reported p-value at every step, one row per path; column 0 is 1."""
    if process == "NaiveZ":
        width = traces.m.shape[1]
        out = np.ones_like(traces.m)
        if width > 1:
            ts = np.arange(1, width, dtype=float)
            out[:, 1:] = erfc(np.abs(traces.z_sum[:, 1:]) / np.sqrt(2.0 * ts))
    elif process == "HValue":
        out = np.minimum(1.0, traces.h)
    elif process == "RStatistic":
        out = traces.r.copy()
    else:
        raise ConfigError(f"unknown p-process {process!r}")
    return np.clip(out, P_FLOOR, 1.0)


def strategy_stop_times(
    strategy: PeekStrategy, p: np.ndarray, horizon: int
) -> tuple[np.ndarray, np.ndarray]:
    """(stop_time, censored) per path; censored stops sit at the horizon."""
    n, width = p.shape
    if width == 1 and strategy.kind in ("FirstCrossing", "StopAtNewMin"):
        return np.full(n, horizon, dtype=np.int64), np.ones(n, dtype=bool)
    if strategy.kind == "FixedTime":
        return np.full(n, strategy.t, dtype=np.int64), np.zeros(n, dtype=bool)
    if strategy.kind == "MinOverHorizon":
        seg = p[:, 1 : strategy.t + 1]
        stop = np.argmin(seg, axis=1).astype(np.int64) + 1
        return stop, np.zeros(n, dtype=bool)
    if strategy.kind == "FirstCrossing":
        hits = p[:, 1:] <= strategy.alpha
        any_hit = hits.any(axis=1)
        first = hits.argmax(axis=1).astype(np.int64) + 1
        stop = np.where(any_hit, first, horizon)
        return stop, ~any_hit
    # StopAtNewMin: first step that undercuts every earlier reported value
    if width < 3:
        return np.full(n, horizon, dtype=np.int64), np.ones(n, dtype=bool)
    runmin = np.minimum.accumulate(p[:, 1:], axis=1)
    hits = p[:, 2:] < runmin[:, :-1]
    any_hit = hits.any(axis=1)
    first = hits.argmax(axis=1).astype(np.int64) + 2
    stop = np.where(any_hit, first, horizon)
    return stop, ~any_hit


def final_record_estimates(
    traces: Traces, decay_threshold: float = 1e-6
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Last record time, last drawdown-argmin before it, and a resolved flag.

    Both times look at the realized path only; the resolved flag marks paths
    whose value has decayed below decay_threshold of the max by the horizon,
    where another record has probability below the threshold.
    """
    m, s, ratio = traces.m, traces.s, traces.ratio
    n, width = m.shape
    rec = m == s
    tau_f = (width - 1 - np.argmax(rec[:, ::-1], axis=1)).astype(np.int64)
    cols = np.arange(width)
    masked = np.where(cols[None, :] <= tau_f[:, None], ratio, np.inf)
    rho_f = (width - 1 - np.argmin(masked[:, ::-1], axis=1)).astype(np.int64)
    resolved = ratio[:, -1] < decay_threshold
    return tau_f, rho_f, resolved


@dataclass
class PeekExperimentResult:
    records: list[PeekRunRecord]
    summary: dict
    traces: Traces


def run_peek_experiment(cfg: ExperimentConfig) -> PeekExperimentResult:
    """Stop every configured strategy on every path and tabulate type-I.

    The R statistic is read at the stop clipped to the estimated final
    record time; its guarantee covers stops taken before that record, and
    later stops inherit the value there.
    """
    traces = simulate_traces(
        cfg.process,
        cfg.n_paths,
        cfg.horizon,
        cfg.master_seed,
        potential=cfg.potential,
        mu=cfg.mu,
        max_cells=cfg.max_cells,
    )
    tau_f, rho_f, resolved = final_record_estimates(traces)
    n = cfg.n_paths
    rows = np.arange(n)
    records: list[PeekRunRecord] = []
    type_i: list[dict] = []
    counts: list[dict] = []
    matrices: dict[str, np.ndarray] = {}
    for st in cfg.strategies:
        if st.process not in matrices:
            matrices[st.process] = p_matrix(traces, st.process)
        p = matrices[st.process]
        stop, censored = strategy_stop_times(st, p, cfg.horizon)
        eff = np.minimum(stop, tau_f) if st.process == "RStatistic" else stop
        reported = p[rows, eff]
        for a in cfg.alphas:
            rate = float(np.mean(reported <= a))
            type_i.append(
                {
                    "strategy": st.label,
                    "process": st.process,
                    "alpha": a,
                    "rate": rate,
                    "stderr": math.sqrt(max(rate * (1.0 - rate), 1e-12) / n),
                }
            )
        n_cens = int(np.sum(censored))
        counts.append(
            {
                "strategy": st.label,
                "process": st.process,
                "stopped": n - n_cens,
                "censored": n_cens,
            }
        )
        for i in range(n):
            records.append(
                PeekRunRecord(
                    path=i,
                    strategy=st.label,
                    process=st.process,
                    stop_time=int(stop[i]),
                    censored=bool(censored[i]),
                    reported_p=float(reported[i]),
                    tau_f_estimate=int(tau_f[i]),
                    tau_f_resolved=bool(resolved[i]),
                    rho_f_estimate=int(rho_f[i]),
                )
            )
    summary = {
        "n_records": len(records),
        "type_i": type_i,
        "counts": counts,
        "unresolved_tau_f": int(np.sum(~resolved)),
    }
    return PeekExperimentResult(records=records, summary=summary, traces=traces)


# ---------------------------------------------------------------------------
# invariant suite


@dataclass
class SuiteResult:
    checks: list[CheckReport]
    all_ok: bool
    vacuous: bool
    note: str
    master_seed: int
    traces: Traces

    def summary_dict(self) -> dict:
        return {
            "all_ok": self.all_ok,
            "vacuous": self.vacuous,
            "note": self.note,
            "reproduce_seed": self.master_seed,
            "checks": [c.to_json_dict() for c in self.checks],
        }


def _two_sided_ecdf_gap(values: np.ndarray) -> float:
    x = np.sort(values)
    n = x.size
    hi = np.max((np.arange(1, n + 1) / n) - x)
    lo = np.max(x - (np.arange(n) / n))
    return float(max(hi, lo))


def run_invariant_suite(cfg: ExperimentConfig, corrupt: str | None = None) -> SuiteResult:
    """Execute every pathwise identity and bound on freshly simulated traces.

    corrupt injects a known fault before checking ("l_sign" flips the sign
    of the L tally, "y_bump" perturbs one Y column) so tests can confirm
    the checks actually bite.
    """
    traces = simulate_traces(
        cfg.process,
        cfg.n_paths,
        cfg.horizon,
        cfg.master_seed,
        potential=cfg.potential,
        mu=cfg.mu,
        max_cells=cfg.max_cells,
    )
    q, l, ratio = traces.q, traces.l.copy(), traces.ratio
    y = None if traces.y is None else traces.y.copy()
    if corrupt == "l_sign":
        l = np.where(l != 0.0, -l, l)
    elif corrupt == "y_bump" and y is not None:
        # column 0 sits exactly on the bound, so any bump must be caught
        y[:, 0] += 1e-3
    elif corrupt is not None and corrupt not in ("l_sign", "y_bump"):
        raise ConfigError(f"unknown corruption {corrupt!r}")

    checks: list[CheckReport] = []
    checks.append(identity_check(ratio, q, l, tol=1e-10))
    with np.errstate(divide="ignore"):
        log_s = np.log(traces.s)
    checks.append(q_logmax_bound_check(log_s, ratio, q, l, tol=1e-9))

    p = cfg.potential
    if p is not None and y is not None:
        run_y = np.maximum.accumulate(y, axis=1)
        g_of_s = np.asarray(p.G(traces.s.ravel())).reshape(traces.s.shape)
        dev = np.abs(run_y - g_of_s)
        worst = float(np.max(dev))
        loc = np.unravel_index(int(np.argmax(dev)), dev.shape)
        checks.append(
            CheckReport(
                name="ay_running_max_exact",
                ok=worst == 0.0,
                worst_deviation=worst,
                path=int(loc[0]),
                step=int(loc[1]),
            )
        )
        if traces.s.shape[1] > 1:
            d = bregman_div(p, traces.s[:, 1:].ravel(), traces.s[:, :-1].ravel())
            worst_d = float(np.min(d))
            checks.append(
                CheckReport(
                    name="bregman_nonnegative",
                    ok=worst_d >= -1e-12,
                    worst_deviation=max(0.0, -worst_d),
                )
            )
        # four equivalent forms of Y on states sampled from the traces
        m_flat, s_flat = traces.m.ravel(), traces.s.ravel()
        usable = np.flatnonzero(s_flat >= max(1.0, p.s_min))
        budget = 256 if p.mode == "quadrature" else 2048
        pick = usable[:: max(1, usable.size // budget)][:budget]
        tol = 1e-7 if p.mode == "quadrature" else 1e-9
        worst_forms = 0.0
        for idx in pick:
            forms = ay_forms(p, float(m_flat[idx]), float(s_flat[idx]))
            worst_forms = max(worst_forms, max(forms) - min(forms))
        checks.append(
            CheckReport(
                name="ay_forms_agree",
                ok=worst_forms <= tol,
                worst_deviation=worst_forms,
            )
        )

    n_cal = max(cfg.n_paths, 1000)
    u = master_rng(cfg.master_seed ^ 0xECDFECDF).random(n_cal)
    gap = _two_sided_ecdf_gap(u)
    band = dkw_band(n_cal, 0.01)
    checks.append(
        CheckReport(name="ecdf_calibration", ok=gap <= band, worst_deviation=gap)
    )

    vacuous = cfg.horizon == 0
    note = "all-vacuous: zero-length horizon" if vacuous else ""
    return SuiteResult(
        checks=checks,
        all_ok=all(c.ok for c in checks),
        vacuous=vacuous,
        note=note,
        master_seed=cfg.master_seed,
        traces=traces,
    )


# ---------------------------------------------------------------------------
# decomposition roundtrip


@dataclass
class RoundtripResult:
    entries: list[dict]
    all_ok: bool
    traces: Traces


def run_decomposition_roundtrip(
    cfg: ExperimentConfig, tol: float = 1e-9
) -> RoundtripResult:
    """Rebuild (M, S) from the bias-corrected max process and measure error."""
    traces = simulate_traces(
        cfg.process,
        cfg.n_paths,
        cfg.horizon,
        cfg.master_seed,
        max_cells=cfg.max_cells,
    )
    potentials: list[Potential] = [LogPotential(), PowerPotential(0.5)]
    if cfg.potential is not None and not any(
        type(cfg.potential) is type(q) for q in potentials
    ):
        potentials.append(cfg.potential)
    m, s = traces.m, traces.s
    n, width = m.shape
    entries: list[dict] = []
    for p in potentials:
        if p.s_min > 1.0:
            raise ConfigError(f"potential domain starts above 1: {p.s_min}")
        ay = AYArrays(p, n)
        b = np.empty((n, width))
        b[:, 0] = ay.b
        for t in range(1, width):
            ay.update(m[:, t], s[:, t], s[:, t - 1])
            b[:, t] = ay.b
        m_hat, s_hat = mm_decompose_batch(b, p)
        err_m = float(np.max(np.abs(m_hat - m)))
        err_s = float(np.max(np.abs(s_hat - s)))
        try:
            label = p.to_json_dict()
        except PotentialError:
            label = {"g": "quadrature"}
        entries.append(
            {
                "potential": label,
                "max_m_error": err_m,
                "max_s_error": err_s,
                "ok": err_m <= tol and err_s <= tol,
            }
        )
    return RoundtripResult(
        entries=entries, all_ok=all(e["ok"] for e in entries), traces=traces
    )


# ---------------------------------------------------------------------------
# deterministic report rendering


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    return obj


def render_summary_json(command: str, cfg: ExperimentConfig, payload: dict) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "build": build_identifier(),
        "command": command,
        "config": cfg.to_json_dict(),
        "results": payload,
    }
    return json.dumps(_jsonify(doc), indent=2, allow_nan=False) + "\n"


def render_paths_csv(traces: Traces | None) -> str:
    lines = [PATHS_HEADER]
    if traces is not None:
        has_ay = traces.y is not None
        n, width = traces.m.shape
        for i in range(n):
            for t in range(width):
                base = (
                    f"{i},{t},{_fmt(traces.m[i, t])},{_fmt(traces.s[i, t])},"
                    f"{_fmt(traces.v[i, t])},{_fmt(traces.h[i, t])},"
                    f"{_fmt(traces.ratio[i, t])},{_fmt(traces.q[i, t])},"
                    f"{_fmt(traces.l[i, t])},{_fmt(traces.r[i, t])}"
                )
                if has_ay:
                    stop = traces.stopped is not None and bool(traces.stopped[i, t])
                    base += (
                        f",{_fmt(traces.y[i, t])},{_fmt(traces.y_max[i, t])},"
                        f"{_fmt(traces.b[i, t])},{_fmt(stop)}"
                    )
                else:
                    base += ",,,,"
                lines.append(base)
    return "\n".join(lines) + "\n"


def render_records_csv(records: Sequence[PeekRunRecord] | None) -> str:
    lines = [RECORDS_HEADER]
    for r in records or ():
        lines.append(
            f"{r.path},{r.strategy},{r.process},{r.stop_time},{_fmt(r.censored)},"
            f"{_fmt(r.reported_p)},{r.tau_f_estimate},{_fmt(r.tau_f_resolved)},"
            f"{r.rho_f_estimate}"
        )
    return "\n".join(lines) + "\n"


@dataclass
class CommandOutput:
    summary_json: str
    paths_csv: str
    records_csv: str
    exit_code: int


def execute_command(command: str, cfg: ExperimentConfig) -> CommandOutput:
    """Run one subcommand and render its three report artifacts."""
    if command == "simulate":
        traces = simulate_traces(
            cfg.process,
            cfg.n_paths,
            cfg.horizon,
            cfg.master_seed,
            potential=cfg.potential,
            mu=cfg.mu,
            max_cells=cfg.max_cells,
        )
        payload = {
            "n_paths": cfg.n_paths,
            "horizon": cfg.horizon,
            "final": {
                "mean_m": float(np.mean(traces.m[:, -1])),
                "mean_log_s": float(np.mean(np.log(traces.s[:, -1]))),
                "max_s": float(np.max(traces.s[:, -1])),
                "mean_r": float(np.mean(traces.r[:, -1])),
            },
        }
        return CommandOutput(
            summary_json=render_summary_json(command, cfg, payload),
            paths_csv=render_paths_csv(traces),
            records_csv=render_records_csv(None),
            exit_code=0,
        )
    if command == "peek":
        res = run_peek_experiment(cfg)
        return CommandOutput(
            summary_json=render_summary_json(command, cfg, res.summary),
            paths_csv=render_paths_csv(res.traces),
            records_csv=render_records_csv(res.records),
            exit_code=0,
        )
    if command == "verify":
        suite = run_invariant_suite(cfg)
        return CommandOutput(
            summary_json=render_summary_json(command, cfg, suite.summary_dict()),
            paths_csv=render_paths_csv(suite.traces),
            records_csv=render_records_csv(None),
            exit_code=0 if suite.all_ok else 1,
        )
    if command == "roundtrip":
        res = run_decomposition_roundtrip(cfg)
        payload = {"potentials": res.entries, "all_ok": res.all_ok}
        return CommandOutput(
            summary_json=render_summary_json(command, cfg, payload),
            paths_csv=render_paths_csv(res.traces),
            records_csv=render_records_csv(None),
            exit_code=0 if res.all_ok else 1,
        )
    raise ConfigError(f"unknown command {command!r}")


def emit_report(out_dir: str, output: CommandOutput) -> dict[str, str]:
    """Write summary.json, paths.csv, records.csv; returns their paths."""
    try:
        os.makedirs(out_dir, exist_ok=True)
        targets = {
            "summary": os.path.join(out_dir, "summary.json"),
            "paths": os.path.join(out_dir, "paths.csv"),
            "records": os.path.join(out_dir, "records.csv"),
        }
        for key, text in (
            ("summary", output.summary_json),
            ("paths", output.paths_csv),
            ("records", output.records_csv),
        ):
            with open(targets[key], "w", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report under {out_dir!r}: {exc}") from exc
    return targets
