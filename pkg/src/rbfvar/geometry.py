"""Domains, center/collocation sampling and point-set diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from rbfvar.errors import ConfigurationError, DomainError

__all__ = [
    "Domain",
    "CenterSet",
    "CollocationSet",
    "sample_centers",
    "sample_collocation",
    "boundary_count",
    "fill_distance",
    "separation_distance",
]


@dataclass(frozen=True)
class Domain:
    """An interval ``(b1, b2)`` or the unit square ``(0, 1)^2``.

    In 1-D the boundary measure follows the counting convention
    ``|dOmega| = 2`` (two endpoints).
    """

    kind: str = "interval"
    b1: float = 0.0
    b2: float = 1.0

    def __post_init__(self):
        if self.kind not in ("interval", "unit_square"):
            raise DomainError(f"unknown domain kind {self.kind!r}")
        if self.kind == "interval" and not self.b1 < self.b2:
            raise DomainError(f"interval needs b1 < b2, got ({self.b1}, {self.b2})")

    @classmethod
    def interval(cls, b1: float, b2: float) -> Domain:
        return cls("interval", float(b1), float(b2))

    @classmethod
    def unit_square(cls) -> Domain:
        return cls("unit_square", 0.0, 1.0)

    @property
    def dim(self) -> int:
        return 1 if self.kind == "interval" else 2

    @property
    def measure_omega(self) -> float:
        return self.b2 - self.b1 if self.kind == "interval" else 1.0

    @property
    def measure_boundary(self) -> float:
        return 2.0 if self.kind == "interval" else 4.0

    @property
    def midpoint(self) -> np.ndarray:
        if self.kind == "interval":
            return np.array([0.5 * (self.b1 + self.b2)])
        return np.array([0.5, 0.5])

    @property
    def half_length(self) -> float:
        return 0.5 * (self.b2 - self.b1) if self.kind == "interval" else 0.5

    def vertices(self) -> np.ndarray:
        if self.kind == "interval":
            return np.array([[self.b1], [self.b2]])
        return np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])

    def contains(self, points: np.ndarray, closed: bool = True) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(len(points), self.dim)
        lo, hi = (self.b1, self.b2) if self.kind == "interval" else (0.0, 1.0)
        if closed:
            return np.all((pts >= lo) & (pts <= hi), axis=1)
        return np.all((pts > lo) & (pts < hi), axis=1)

    def uniform(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """``n`` i.i.d. uniform points in the open domain, shape (n, d)."""
        lo, hi = (self.b1, self.b2) if self.kind == "interval" else (0.0, 1.0)
        out = rng.uniform(lo, hi, size=(n, self.dim))
        # Generator.uniform samples [lo, hi); lo itself is on the boundary
        bad = ~self.contains(out, closed=False)
        while bad.any():
            out[bad] = rng.uniform(lo, hi, size=(int(bad.sum()), self.dim))
            bad = ~self.contains(out, closed=False)
        return out


@dataclass(frozen=True)
class CenterSet:
    points: np.ndarray
    T: float

    @property
    def N(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class CollocationSet:
    interior: np.ndarray
    boundary: np.ndarray
    zeta: int

    @property
    def m_omega(self) -> int:
        return self.interior.shape[0]

    @property
    def m_boundary(self) -> int:
        return self.boundary.shape[0]

    @property
    def m(self) -> int:
        return self.m_omega + self.m_boundary


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def sample_centers(domain: Domain, T: float, N: int, seed: int) -> CenterSet:
    """Draw ``N`` distinct centers uniformly from the domain expanded by ``T``.

    The expanded region is ``[q_mid - T*L_half, q_mid + T*L_half]`` in each
    coordinate, where ``q_mid`` and ``L_half`` are the midpoint and the
    half-length of the domain.
    """
    if N < 1:
        raise DomainError(f"number of centers must be positive, got {N}")
    if not T >= 1:
        raise DomainError(f"expansion factor must be >= 1, got {T}")
    rng = np.random.default_rng(seed)
    mid = domain.midpoint
    half = T * domain.half_length
    lo, hi = mid - half, mid + half
    pts = rng.uniform(lo, hi, size=(N, domain.dim))
    while True:
        _, first = np.unique(pts, axis=0, return_index=True)
        if len(first) == N:
            break
        dup = np.setdiff1d(np.arange(N), first)
        pts[dup] = rng.uniform(lo, hi, size=(len(dup), domain.dim))
    return CenterSet(_readonly(pts), float(T))


def boundary_count(domain: Domain, zeta: int, N: int) -> int:
    """Number of boundary collocation points for ``m = zeta * N``."""
    if domain.dim == 1:
        return 2
    per_side = int(math.floor(math.sqrt(zeta * N) + 0.5))
    return 4 * per_side


def sample_collocation(domain: Domain, zeta: int, N: int, seed: int) -> CollocationSet:
    """Sample ``m = zeta * N`` collocation points.

    1-D: the two endpoints plus ``m - 2`` uniform interior draws.
    2-D (unit square): ``round(sqrt(m))`` uniform points on each side, drawn
    on half-open edges so corners are never duplicated, and the remaining
    ``m - 4 round(sqrt(m))`` points uniform in the open square.
    """
    if zeta < 1 or N < 1:
        raise ConfigurationError(f"need zeta >= 1 and N >= 1, got zeta={zeta}, N={N}")
    m = zeta * N
    m_b = boundary_count(domain, zeta, N)
    m_omega = m - m_b
    if m_omega < 1:
        raise ConfigurationError(
            f"zeta*N = {m} leaves no interior points after {m_b} boundary points"
        )
    rng = np.random.default_rng(seed)
    if domain.dim == 1:
        boundary = np.array([[domain.b1], [domain.b2]])
    else:
        k = m_b // 4
        t = rng.uniform(0.0, 1.0, size=(4, k))
        zero, one = np.zeros(k), np.ones(k)
        boundary = np.concatenate(
            [
                np.column_stack([t[0], zero]),  # bottom, from (0,0)
                np.column_stack([one, t[1]]),  # right, from (1,0)
                np.column_stack([1.0 - t[2], one]),  # top, from (1,1)
                np.column_stack([zero, 1.0 - t[3]]),  # left, from (0,1)
            ]
        )
    interior = domain.uniform(rng, m_omega)
    return CollocationSet(_readonly(interior), _readonly(boundary), int(zeta))


def fill_distance(
    points,
    domain: Domain,
    probe_count: int | None = None,
    seed: int = 0,
    probes=None,
) -> float:
    """Monte-Carlo estimate of ``sup_{x in Omega} min_i |x - c_i|``.

    Probes are ``probe_count`` uniform draws (default ``10 * len(points)``)
    plus the domain vertices; pass ``probes`` to use an explicit probe set
    instead.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, domain.dim)
    if len(pts) == 0:
        raise DomainError("fill distance of an empty point set")
    if probes is None:
        n = 10 * len(pts) if probe_count is None else int(probe_count)
        rng = np.random.default_rng(seed)
        probes = np.concatenate([domain.uniform(rng, n), domain.vertices()])
    else:
        probes = np.asarray(probes, dtype=float).reshape(-1, domain.dim)
    dist, _ = cKDTree(pts).query(probes)
    return float(np.max(dist))


def separation_distance(points) -> float:
    """Half of the smallest pairwise Euclidean distance."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if len(pts) < 2:
        raise DomainError("separation distance needs at least two points")
    dist, _ = cKDTree(pts).query(pts, k=2)
    return 0.5 * float(np.min(dist[:, 1]))
