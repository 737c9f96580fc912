"""Declarative experiment configs, single runs, sweeps and CSV output."""

from __future__ import annotations

import csv
import dataclasses
import itertools
import json
import math
import time
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Iterable, Optional

import numpy as np

from rbfvar.assembly import ProblemKind, assemble_system, evaluate_uhat
from rbfvar.benchmarks import BENCHMARK_IDS, get_benchmark, relative_l2_error
from rbfvar.errors import ConfigurationError, RbfVarError
from rbfvar.geometry import sample_centers, sample_collocation
from rbfvar.kernels import Kernel, KernelKind, c_opt, shape_param
from rbfvar.solvers import AdmmParams, EllipticParams, solve_elliptic, solve_obstacle

__all__ = [
    "ExperimentConfig",
    "RunRecord",
    "CSV_HEADER",
    "BENCHMARK_DEFAULTS",
    "load_config",
    "expand_grid",
    "run_single",
    "run_detailed",
    "RunDetail",
    "run_sweep",
    "write_csv",
    "write_rows",
]

CSV_HEADER = (
    "benchmark,kernel,N,m,m_omega,m_boundary,zeta,T,tau,c,b,beta,mu,rho,"
    "seed_centers,seed_colloc,rank_kept,error_rel_l2,iterations,converged,runtime_ms"
).split(",")

# Benchmark defaults for fields the config leaves out.
BENCHMARK_DEFAULTS = {
    "poisson1d": {"T": 8.0, "beta": 3e5},
    "rd1d": {"T": 2.0, "beta": 3e5},
    "obstacle_one_bump": {"T": 2.0, "beta": 1e6, "mu": 300.0, "rho": 45.0},
    "obstacle_two_bump": {"T": 3.0, "beta": 1e8, "mu": 2.5e4, "rho": 250.0},
    # mu = 10 / h^2 with h = 1 / sqrt(N); see dome_mu
    "dome2d": {"T": 3.0, "beta": 1e6, "rho": 20.3},
}

_SWEEPABLE = ("N", "zeta", "T", "tau", "beta", "mu", "rho", "c_override",
              "seed_centers", "seed_colloc")
_INT_FIELDS = ("N", "zeta", "max_iter", "seed_centers", "seed_colloc")


def dome_mu(N: int) -> float:
    """Obstacle penalty ``10 / h^2`` for the dome, with ``h = 1/sqrt(N)``."""
    return 10.0 * N


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment, or a grid of them when sweepable fields hold lists.

    Fields left as ``None`` are filled from the benchmark defaults by
    :meth:`resolved`.
    """

    benchmark: str
    kernel: str = "gaussian"
    N: Any = 256
    zeta: Any = None
    T: Any = None
    tau: Any = 1e-15
    beta: Any = None
    mu: Any = None
    rho: Any = None
    c_override: Any = None
    eps_primal: float = 1e-6
    eps_dual: float = 1e-6
    max_iter: int = 50_000
    seed_centers: Any = 0
    seed_colloc: Any = 1
    out: Optional[str] = None

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        if not isinstance(data, dict):
            raise ConfigurationError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
        if "benchmark" not in data:
            raise ConfigurationError("config is missing the 'benchmark' key")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}

    @property
    def kind(self) -> ProblemKind:
        return get_benchmark(self.benchmark).kind

    def validate(self) -> None:
        if self.benchmark not in BENCHMARK_IDS:
            raise ConfigurationError(
                f"unknown benchmark {self.benchmark!r}; expected one of {', '.join(BENCHMARK_IDS)}"
            )
        try:
            KernelKind.parse(self.kernel)
        except RbfVarError as exc:
            raise ConfigurationError(str(exc)) from None
        if self.kind is not ProblemKind.OBSTACLE:
            given = [k for k in ("mu", "rho") if getattr(self, k) is not None]
            if given:
                raise ConfigurationError(
                    f"{', '.join(given)} only apply to obstacle benchmarks, not {self.benchmark}"
                )
        for f in fields(self):
            val = getattr(self, f.name)
            if isinstance(val, list):
                if f.name not in _SWEEPABLE:
                    raise ConfigurationError(f"field {f.name!r} cannot be swept")
                if not val:
                    raise ConfigurationError(f"sweep over {f.name!r} is empty")
                for item in val:
                    _check_scalar(f.name, item)
            elif val is not None and f.name not in ("benchmark", "kernel", "out"):
                _check_scalar(f.name, val)

    def resolved(self) -> ExperimentConfig:
        """Copy with benchmark defaults substituted for unset fields."""
        defaults = dict(BENCHMARK_DEFAULTS[self.benchmark])
        dim = get_benchmark(self.benchmark).domain.dim
        defaults["zeta"] = 2 if dim == 1 else 4
        updates = {k: v for k, v in defaults.items() if getattr(self, k) is None}
        return dataclasses.replace(self, **updates)

    def is_sweep(self) -> bool:
        return any(isinstance(getattr(self, name), list) for name in _SWEEPABLE)


def _check_scalar(name: str, val) -> None:
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigurationError(f"field {name!r} must be numeric, got {val!r}")
    if name in _INT_FIELDS and int(val) != val:
        raise ConfigurationError(f"field {name!r} must be an integer, got {val!r}")
    if not math.isfinite(val):
        raise ConfigurationError(f"field {name!r} must be finite, got {val!r}")


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
    return ExperimentConfig.from_dict(data)


def expand_grid(config: ExperimentConfig) -> list:
    """Scalar configs of the Cartesian product, lexicographic in field order."""
    cfg = config.resolved()
    names = [f.name for f in fields(cfg)]
    axes = [getattr(cfg, n) if isinstance(getattr(cfg, n), list) else [getattr(cfg, n)]
            for n in names]
    grid = [dataclasses.replace(cfg, **dict(zip(names, point)))
            for point in itertools.product(*axes)]
    if not grid:
        raise ConfigurationError("sweep grid is empty")
    return grid


@dataclass
class RunRecord:
    benchmark: str
    kernel: str
    N: int
    m: int
    m_omega: Optional[int] = None
    m_boundary: Optional[int] = None
    zeta: Optional[int] = None
    T: Optional[float] = None
    tau: Optional[float] = None
    c: Optional[float] = None
    b: Optional[float] = None
    beta: Optional[float] = None
    mu: Optional[float] = None
    rho: Optional[float] = None
    seed_centers: Optional[int] = None
    seed_colloc: Optional[int] = None
    rank_kept: Optional[int] = None
    error_rel_l2: Optional[float] = None
    iterations: Optional[int] = None
    converged: Optional[bool] = None
    runtime_ms: Optional[float] = None
    failure: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.failure is None


@dataclass
class RunDetail:
    """Interior evaluation of a finished run, for checks beyond the CSV row."""

    points: np.ndarray
    u_hat: np.ndarray
    u_exact: np.ndarray
    psi: Optional[np.ndarray]
    weights: np.ndarray


def run_single(config: ExperimentConfig) -> RunRecord:
    """Sample, assemble, solve and score one scalar configuration.

    Library errors do not propagate: the record comes back with ``failure``
    set to the reason.
    """
    return run_detailed(config)[0]


def run_detailed(config: ExperimentConfig):
    """Like :func:`run_single` but also return a :class:`RunDetail`.

    The detail is ``None`` when the run failed.
    """
    cfg = config.resolved()
    if cfg.is_sweep():
        raise ConfigurationError("run_single needs a scalar config; use run_sweep")
    cfg.validate()
    N, zeta = int(cfg.N), int(cfg.zeta)
    bench = get_benchmark(cfg.benchmark)
    obstacle = bench.kind is ProblemKind.OBSTACLE
    mu = cfg.mu
    if obstacle and mu is None:
        mu = dome_mu(N) if cfg.benchmark == "dome2d" else None
    rec = RunRecord(
        benchmark=cfg.benchmark,
        kernel=KernelKind.parse(cfg.kernel).value,
        N=N,
        m=zeta * N,
        zeta=zeta,
        T=float(cfg.T),
        tau=float(cfg.tau),
        beta=float(cfg.beta),
        mu=float(mu) if obstacle and mu is not None else None,
        rho=float(cfg.rho) if obstacle and cfg.rho is not None else None,
        seed_centers=int(cfg.seed_centers),
        seed_colloc=int(cfg.seed_colloc),
    )
    detail = None
    start = time.perf_counter()
    try:
        if obstacle and (rec.mu is None or rec.rho is None):
            raise ConfigurationError(f"{cfg.benchmark} needs mu and rho")
        d = bench.domain.dim
        rec.c = float(cfg.c_override) if cfg.c_override is not None else c_opt(rec.T, rec.tau)
        rec.b = shape_param(rec.c, N, d)
        kernel = Kernel(KernelKind.parse(cfg.kernel), rec.b)
        centers = sample_centers(bench.domain, rec.T, N, rec.seed_centers)
        colloc = sample_collocation(bench.domain, zeta, N, rec.seed_colloc)
        rec.m_omega, rec.m_boundary = colloc.m_omega, colloc.m_boundary
        sys = assemble_system(bench, kernel, centers, colloc)
        if obstacle:
            report = solve_obstacle(
                sys,
                AdmmParams(
                    mu=rec.mu,
                    beta=rec.beta,
                    rho=rec.rho,
                    tau=rec.tau,
                    max_iter=int(cfg.max_iter),
                    eps_primal=float(cfg.eps_primal),
                    eps_dual=float(cfg.eps_dual),
                ),
            )
        else:
            report = solve_elliptic(sys, EllipticParams(beta=rec.beta, tau=rec.tau))
        u_hat = evaluate_uhat(kernel, centers, report.weights, colloc.interior)
        u_ref = bench.u_exact(colloc.interior)
        rec.error_rel_l2 = relative_l2_error(u_hat, u_ref)
        rec.rank_kept = report.rank_kept
        rec.iterations = report.iterations
        rec.converged = report.converged
        if not math.isfinite(rec.error_rel_l2):
            raise RbfVarError("non-finite error")
        psi = bench.psi(colloc.interior) if obstacle else None
        detail = RunDetail(colloc.interior, u_hat, u_ref, psi, report.weights)
    except (RbfVarError, np.linalg.LinAlgError, MemoryError) as exc:
        rec.failure = f"{type(exc).__name__}: {exc}"
        rec.converged = False
        detail = None
    rec.runtime_ms = 1e3 * (time.perf_counter() - start)
    return rec, detail


def run_sweep(config: ExperimentConfig, progress=None) -> list:
    """Run every grid point in order; failures are recorded, not raised."""
    records = []
    for point in expand_grid(config):
        rec = run_single(point)
        records.append(rec)
        if progress is not None:
            progress(rec)
    return records


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        # repr is the shortest string that round-trips
        return repr(value)
    return str(value)


def write_rows(records: Iterable[RunRecord], fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow([_cell(getattr(rec, col)) for col in CSV_HEADER])


def write_csv(records: Iterable[RunRecord], path) -> None:
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            write_rows(records, fh)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
