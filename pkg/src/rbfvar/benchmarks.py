"""Benchmark problems with closed-form solutions, and accuracy metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from rbfvar.assembly import ProblemKind
from rbfvar.errors import ConfigurationError, DomainError, NumericError
from rbfvar.geometry import Domain

__all__ = [
    "Benchmark",
    "BENCHMARK_IDS",
    "POISSON_SOURCE_SIGN",
    "RD_AMPLITUDE",
    "DOME_RC",
    "poisson1d",
    "rd1d",
    "obstacle_one_bump",
    "obstacle_two_bump",
    "dome2d",
    "solve_contact_radius",
    "get_benchmark",
    "relative_l2_error",
    "convergence_order",
]

PointMap = Callable[[np.ndarray], np.ndarray]

# -u'' = f holds for u = sin(pi x) + linear only with the + sign.
POISSON_SOURCE_SIGN = 1.0
RD_AMPLITUDE = 50.0
DOME_RC = 0.5

BENCHMARK_IDS = ("poisson1d", "rd1d", "obstacle_one_bump", "obstacle_two_bump", "dome2d")


@dataclass(frozen=True)
class Benchmark:
    """A boundary value problem: data maps take an (n, d) point array."""

    id: str
    kind: ProblemKind
    domain: Domain
    u_exact: PointMap
    g: PointMap
    f: Optional[PointMap] = None
    psi: Optional[PointMap] = None
    params: dict = field(default_factory=dict)


def _x(points) -> np.ndarray:
    p = np.asarray(points, dtype=float)
    return p[:, 0] if p.ndim == 2 else p


def _fold(x: np.ndarray) -> np.ndarray:
    """Reflect (0.5, 1] onto [0, 0.5) for the symmetric 1-D obstacles."""
    return np.where(x > 0.5, 1.0 - x, x)


def poisson1d(a1: float = -1.0, a2: float = -1.5, source_sign: float = POISSON_SOURCE_SIGN) -> Benchmark:
    """``-u'' = f`` on (0, 1) with ``u = sin(pi x) - (a1 - a2) x + a1``."""

    def u(p):
        x = _x(p)
        return np.sin(np.pi * x) - (a1 - a2) * x + a1

    def f(p):
        return source_sign * np.pi**2 * np.sin(np.pi * _x(p))

    return Benchmark(
        "poisson1d",
        ProblemKind.POISSON,
        Domain.interval(0.0, 1.0),
        u_exact=u,
        g=u,
        f=f,
        params={"a1": a1, "a2": a2, "source_sign": source_sign},
    )


def rd1d(amplitude: float = RD_AMPLITUDE, length: float = 5.0) -> Benchmark:
    """``-u'' + u = A sin(pi x)`` on (0, L), homogeneous Dirichlet data."""
    scale = amplitude / (1.0 + np.pi**2)

    def u(p):
        return scale * np.sin(np.pi * _x(p))

    def f(p):
        return amplitude * np.sin(np.pi * _x(p))

    def g(p):
        return np.zeros(len(_x(p)))

    return Benchmark(
        "rd1d",
        ProblemKind.REACTION_DIFFUSION,
        Domain.interval(0.0, length),
        u_exact=u,
        g=g,
        f=f,
        params={"amplitude": amplitude, "length": length},
    )


def _zero(p):
    return np.zeros(len(_x(p)))


def psi_one_bump(p) -> np.ndarray:
    x = _fold(_x(p))
    return np.where(x <= 0.25, 100.0 * x**2, 100.0 * x * (1.0 - x) - 12.5)


def u_one_bump(p) -> np.ndarray:
    x = _fold(_x(p))
    x_star = 1.0 / (2.0 * math.sqrt(2.0))
    return np.where(x <= x_star, (100.0 - 50.0 * math.sqrt(2.0)) * x, 100.0 * x * (1.0 - x) - 12.5)


def psi_two_bump(p) -> np.ndarray:
    x = _fold(_x(p))
    return np.where(
        x <= 0.25,
        10.0 * np.sin(2.0 * np.pi * x),
        5.0 * np.cos(np.pi * (4.0 * x - 1.0)) + 5.0,
    )


def u_two_bump(p) -> np.ndarray:
    x = _fold(_x(p))
    return np.where(x <= 0.25, 10.0 * np.sin(2.0 * np.pi * x), 10.0)


def obstacle_one_bump() -> Benchmark:
    return Benchmark(
        "obstacle_one_bump",
        ProblemKind.OBSTACLE,
        Domain.interval(0.0, 1.0),
        u_exact=u_one_bump,
        g=_zero,
        psi=psi_one_bump,
    )


def obstacle_two_bump() -> Benchmark:
    return Benchmark(
        "obstacle_two_bump",
        ProblemKind.OBSTACLE,
        Domain.interval(0.0, 1.0),
        u_exact=u_two_bump,
        g=_zero,
        psi=psi_two_bump,
    )


def solve_contact_radius(r_c: float = DOME_RC, tol: float = 1e-14) -> float:
    """Root of ``(r/r_c)^2 (1 + 2 log(1/r)) = 1`` in ``(0, r_c)`` by bisection.

    The left-hand side is increasing on (0, 1), so a sign change on the
    bracket pins down the unique root.
    """

    def residual(r):
        return (r * r) / (r_c * r_c) * (1.0 + 2.0 * math.log(1.0 / r)) - 1.0

    lo, hi = 1e-12, r_c
    if not (residual(lo) < 0.0 < residual(hi)):
        raise NumericError(f"contact radius not bracketed on ({lo}, {hi}) for r_c={r_c}")
    while True:
        mid = 0.5 * (lo + hi)
        # stop once the bracket cannot shrink any further in floating point
        if mid <= lo or mid >= hi:
            break
        f_mid = residual(mid)
        if f_mid == 0.0:
            return mid
        if f_mid < 0.0:
            lo = mid
        else:
            hi = mid
    r = lo if abs(residual(lo)) <= abs(residual(hi)) else hi
    if abs(residual(r)) > tol:
        raise NumericError(f"bisection stalled with residual {residual(r):.3e}")
    return r


def _radius(p) -> np.ndarray:
    p = np.asarray(p, dtype=float).reshape(-1, 2)
    return np.hypot(p[:, 0] - 0.5, p[:, 1] - 0.5)


def dome2d(r_c: float = DOME_RC) -> Benchmark:
    """Radially symmetric dome obstacle on the unit square."""
    r_star = solve_contact_radius(r_c)

    def psi(p):
        r = _radius(p)
        return np.where(r <= r_c, 1.0 - r**2 / r_c**2, 0.0)

    def u(p):
        r = _radius(p)
        outer = 1.0 - (r_star**2 / r_c**2) * (1.0 + 2.0 * np.log(np.maximum(r, r_star) / r_star))
        return np.where(r <= r_star, 1.0 - r**2 / r_c**2, outer)

    return Benchmark(
        "dome2d",
        ProblemKind.OBSTACLE,
        Domain.unit_square(),
        u_exact=u,
        g=u,
        psi=psi,
        params={"r_c": r_c, "r_star": r_star},
    )


_FACTORIES = {
    "poisson1d": poisson1d,
    "rd1d": rd1d,
    "obstacle_one_bump": obstacle_one_bump,
    "obstacle_two_bump": obstacle_two_bump,
    "dome2d": dome2d,
}


def get_benchmark(name: str) -> Benchmark:
    try:
        return _FACTORIES[name]()
    except KeyError:
        raise ConfigurationError(
            f"unknown benchmark {name!r}; expected one of {', '.join(BENCHMARK_IDS)}"
        ) from None


def relative_l2_error(u_hat, u_exact) -> float:
    u_hat = np.asarray(u_hat, dtype=float)
    u_exact = np.asarray(u_exact, dtype=float)
    if u_hat.shape != u_exact.shape:
        raise DomainError(f"shape mismatch {u_hat.shape} vs {u_exact.shape}")
    denom = np.linalg.norm(u_exact)
    if denom == 0.0:
        raise DomainError("relative error undefined for an identically zero exact solution")
    return float(np.linalg.norm(u_hat - u_exact) / denom)


def convergence_order(e_half: float, e_full: float) -> float:
    """Local order ``log2(E(N/2) / E(N))`` for a doubling of N."""
    if e_half <= 0 or e_full <= 0:
        raise DomainError(f"errors must be positive, got {e_half}, {e_full}")
    return math.log2(e_half / e_full)
