"""Random-network driver placement sweeps and their CSV output.

A run draws ``realizations`` networks (realization ``r`` uses seed
``base_seed ^ r``), computes the centralities once per network, and for every
strategy and driver count records ``trace(W)``, ``lambda_min(W)`` and the
``q_tilde`` upper bound on ``lambda_min``.  Aggregates are plain arithmetic
means accumulated in realization order, so serial and parallel schedules give
bit-identical results.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, io
from .centrality import STRATEGIES, compute_centralities, select_drivers
from .control import lambda_min_upper_bound, metrics
from .errors import NetEnergyError, NumericError, ValidationError
from .gramian import GramianSpec, ctrb_gramian
from .netgraph import GeneratorParams, generate

#: slack (relative to trace W) allowed when checking lambda_min <= bound
BOUND_SLACK = 1e-10


@dataclass(frozen=True)
class Outputs:
    metric_sweep: bool = True
    spectrum_at_m: bool = False
    centrality_profile: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    generator: GeneratorParams
    realizations: int = 100
    m_grid: tuple[int, ...] = tuple(range(10, 161, 10))
    strategies: tuple[str, ...] = STRATEGIES
    spec: GramianSpec = field(default_factory=GramianSpec)
    base_seed: int = 0
    outputs: Outputs = field(default_factory=Outputs)
    spectrum_m: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "m_grid", tuple(int(m) for m in self.m_grid))
        object.__setattr__(self, "strategies", tuple(self.strategies))
        if int(self.realizations) != self.realizations or self.realizations < 1:
            raise ValidationError("realizations must be a positive integer")
        if not self.m_grid:
            raise ValidationError("m_grid must not be empty")
        if any(b <= a for a, b in zip(self.m_grid, self.m_grid[1:])):
            raise ValidationError("m_grid must be strictly ascending")
        if self.m_grid[0] < 1 or self.m_grid[-1] > self.generator.n:
            raise ValidationError(f"m_grid values must lie in 1..{self.generator.n}")
        if not self.strategies:
            raise ValidationError("at least one strategy is required")
        unknown = [s for s in self.strategies if s not in STRATEGIES]
        if unknown or len(set(self.strategies)) != len(self.strategies):
            raise ValidationError(f"strategies must be distinct members of {STRATEGIES}")
        if not 0 <= int(self.base_seed) < 2**64:
            raise ValidationError("base_seed must be a 64-bit unsigned integer")
        if self.outputs.spectrum_at_m:
            if self.spectrum_m is None or not 1 <= self.spectrum_m <= self.generator.n:
                raise ValidationError("spectrum_at_m needs spectrum_m in 1..n")

    def to_dict(self) -> dict:
        return {
            "generator": asdict(self.generator),
            "realizations": self.realizations,
            "m_grid": list(self.m_grid),
            "strategies": list(self.strategies),
            "spec": {"horizon": self.spec.label() if self.spec.T is None else self.spec.T,
                     "lyap_tol": self.spec.lyap_tol,
                     "lyap_max_iter": self.spec.lyap_max_iter},
            "base_seed": self.base_seed,
            "outputs": asdict(self.outputs),
            "spectrum_m": self.spectrum_m,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        _reject_unknown(data, {f.name for f in fields(cls)}, "config")
        if "generator" not in data:
            raise ValidationError("config: 'generator' is required")
        gen = data["generator"]
        _reject_unknown(gen, {f.name for f in fields(GeneratorParams)}, "generator")
        kw = dict(data)
        try:
            kw["generator"] = GeneratorParams(**gen)
            if "spec" in kw:
                spec = dict(kw["spec"])
                _reject_unknown(spec, {"horizon", "lyap_tol", "lyap_max_iter"}, "spec")
                kw["spec"] = GramianSpec.parse(spec.pop("horizon", "inf"), **spec)
            if "outputs" in kw:
                _reject_unknown(kw["outputs"], {f.name for f in fields(Outputs)}, "outputs")
                kw["outputs"] = Outputs(**kw["outputs"])
            return cls(**kw)
        except TypeError as exc:
            raise ValidationError(f"config: {exc}") from None


def _reject_unknown(data, allowed: set[str], where: str) -> None:
    if not isinstance(data, dict):
        raise ValidationError(f"{where}: expected a JSON object")
    extra = sorted(set(data) - allowed)
    if extra:
        raise ValidationError(f"{where}: unknown keys {extra}")


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ValidationError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config file is not valid JSON: {exc}") from None
    return ExperimentConfig.from_dict(data)


@dataclass
class RealizationRecord:
    trace: np.ndarray        # (strategies, m_grid)
    lambda_min: np.ndarray   # (strategies, m_grid)
    bound: np.ndarray        # (m_grid,)
    spectrum: Optional[np.ndarray] = None   # (strategies, n)
    profile: Optional[np.ndarray] = None    # (3, n): sorted p, q, q_tilde


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    realizations: int
    mean_trace: np.ndarray
    mean_lambda_min: np.ndarray
    mean_bound: np.ndarray
    mean_spectrum: Optional[np.ndarray] = None
    mean_profile: Optional[np.ndarray] = None
    version: str = __version__

    def curve(self, strategy: str, what: str = "lambda_min") -> np.ndarray:
        s = self.config.strategies.index(strategy)
        return {"trace": self.mean_trace, "lambda_min": self.mean_lambda_min}[what][s]


def realization_seed(base_seed: int, r: int) -> int:
    return int(base_seed) ^ int(r)


def _driver_seed(seed: int, m: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, m])


def run_realization(cfg: ExperimentConfig, r: int) -> RealizationRecord:
    """Evaluate every strategy on network number ``r`` (1-based)."""
    seed = realization_seed(cfg.base_seed, r)
    try:
        return _run_realization(cfg, seed)
    except NetEnergyError as exc:
        cls = ValidationError if isinstance(exc, ValidationError) else NumericError
        raise cls(f"realization {r} (seed {seed}): {exc}") from exc


def _run_realization(cfg: ExperimentConfig, seed: int) -> RealizationRecord:
    net = generate(replace(cfg.generator, seed=seed))
    n = net.n
    spec = cfg.spec
    table = compute_centralities(net, spec)
    S, K = len(cfg.strategies), len(cfg.m_grid)
    trace = np.empty((S, K))
    lam = np.empty((S, K))
    bound = np.array([lambda_min_upper_bound(table, m) if m < n else np.nan
                      for m in cfg.m_grid])

    def evaluate(strategy, m):
        drivers = select_drivers(net, strategy, m, spec, seed=_driver_seed(seed, m), table=table)
        return metrics(ctrb_gramian(net, drivers.members, spec))

    for s, strategy in enumerate(cfg.strategies):
        for k, m in enumerate(cfg.m_grid):
            mt = evaluate(strategy, m)
            if m < n and mt.lambda_min > bound[k] + BOUND_SLACK * mt.trace_w:
                raise NumericError(f"lambda_min {mt.lambda_min:.6g} exceeds q_tilde bound "
                                   f"{bound[k]:.6g} ({strategy}, m={m})")
            trace[s, k] = mt.trace_w
            lam[s, k] = mt.lambda_min
    rec = RealizationRecord(trace, lam, bound)
    if cfg.outputs.spectrum_at_m:
        rec.spectrum = np.array([evaluate(st, cfg.spectrum_m).spectrum for st in cfg.strategies])
    if cfg.outputs.centrality_profile:
        rec.profile = np.array([np.sort(table.p), np.sort(table.q), np.sort(table.q_tilde)])
    return rec


def _records(cfg: ExperimentConfig, workers: int):
    rs = range(1, cfg.realizations + 1)
    if workers <= 1:
        for r in rs:
            yield run_realization(cfg, r)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(run_realization, [cfg] * len(rs), rs)


def run_experiment(cfg: ExperimentConfig, workers: int = 1, progress=None) -> ExperimentResult:
    """Run all realizations and average them; ``progress(r)`` is called after each."""
    acc = None
    for r, rec in enumerate(_records(cfg, workers), start=1):
        parts = [rec.trace, rec.lambda_min, rec.bound, rec.spectrum, rec.profile]
        if acc is None:
            acc = [None if x is None else np.zeros_like(x) for x in parts]
        for a, x in zip(acc, parts):
            if a is not None:
                a += x
        if progress is not None:
            progress(r)
    R = cfg.realizations
    means = [None if a is None else a / R for a in acc]
    return ExperimentResult(cfg, R, *means)


def emit_csv(result: ExperimentResult, out_dir: str | os.PathLike) -> list[Path]:
    """Write the selected CSV tables plus ``config.json``; returns the paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    cfg = result.config
    written = []

    def put(name, text):
        path = out / name
        io.write_text(path, text)
        written.append(path)

    if cfg.outputs.metric_sweep:
        rows = [(st, m, result.mean_trace[s, k], result.mean_lambda_min[s, k], result.mean_bound[k])
                for s, st in enumerate(cfg.strategies) for k, m in enumerate(cfg.m_grid)]
        put("metrics.csv", io.csv_text(
            ["strategy", "m", "mean_trace", "mean_lambda_min", "qtilde_bound"], rows))
    if cfg.outputs.spectrum_at_m and result.mean_spectrum is not None:
        rows = [(st, k + 1, v) for s, st in enumerate(cfg.strategies)
                for k, v in enumerate(result.mean_spectrum[s])]
        put(f"spectrum_m{cfg.spectrum_m}.csv",
            io.csv_text(["strategy", "rank", "mean_eigenvalue"], rows))
    if cfg.outputs.centrality_profile and result.mean_profile is not None:
        p, q, qt = result.mean_profile
        rows = [(k + 1, p[k], q[k], qt[k]) for k in range(len(p))]
        put("centrality_profile.csv",
            io.csv_text(["order_stat", "mean_p", "mean_q", "mean_qtilde"], rows))
    echo = {"version": result.version, "realizations": result.realizations,
            "config": cfg.to_dict()}
    put("config.json", json.dumps(echo, indent=2, sort_keys=True) + "\n")
    return written


def desk_config(kind: str, n: int = 200, realizations: int = 100, base_seed: int = 0,
                **overrides) -> ExperimentConfig:
    """Reduced-size sweep; ER keeps the expected degree of p=0.01 at n=500."""
    gen = GeneratorParams(kind, n, edge_prob=min(1.0, 0.01 * 500 / n))
    kw = dict(generator=gen, realizations=realizations, m_grid=tuple(range(10, 161, 10)),
              strategies=STRATEGIES, spec=GramianSpec(), base_seed=base_seed,
              outputs=Outputs(True, True, True), spectrum_m=60)
    kw.update(overrides)
    return ExperimentConfig(**kw)


def full_config(kind: str, base_seed: int = 0) -> ExperimentConfig:
    """Full-size sweep: 500 nodes, 1000 realizations, spectrum at m = 150."""
    return ExperimentConfig(
        generator=GeneratorParams(kind, 500, edge_prob=0.01),
        realizations=1000, m_grid=tuple(range(10, 251, 10)), strategies=STRATEGIES,
        spec=GramianSpec(), base_seed=base_seed, outputs=Outputs(True, True, True),
        spectrum_m=150)


PRESETS = {
    "desk_er": lambda: desk_config("erdos_renyi"),
    "desk_sf": lambda: desk_config("directed_scale_free"),
    "full_er": lambda: full_config("erdos_renyi"),
    "full_sf": lambda: full_config("directed_scale_free"),
}
