"""Dense operators of the discretized variational functionals.

With ``u_hat(x) = N^{-1/2} sum_i w_i phi(|x - c_i|)`` and Monte-Carlo
averages over the collocation points, every functional reduces to

    1/2 w^T A1 w - f^T A2 w + beta/2 |A3 w - g|^2           (Poisson, RD)
    1/2 w^T A1 w + mu |(psi - A2 w)_+|_1 + beta/2 |A3 w - g|^2   (obstacle)
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np

from rbfvar.errors import ConfigurationError, DomainError
from rbfvar.geometry import CenterSet, CollocationSet, Domain
from rbfvar.kernels import Kernel

if TYPE_CHECKING:
    from rbfvar.benchmarks import Benchmark

__all__ = [
    "ProblemKind",
    "SystemMeta",
    "AssembledSystem",
    "assemble_a1",
    "assemble_a2",
    "assemble_a3",
    "assemble_data",
    "assemble_system",
    "evaluate_uhat",
    "objective",
    "objective_gradient",
]


class ProblemKind(enum.Enum):
    POISSON = "poisson"
    REACTION_DIFFUSION = "reaction_diffusion"
    OBSTACLE = "obstacle"


@dataclass(frozen=True)
class SystemMeta:
    N: int
    m_omega: int
    m_boundary: int
    measure_omega: float
    measure_boundary: float
    kernel: Kernel
    kind: ProblemKind


@dataclass(frozen=True)
class AssembledSystem:
    A1: np.ndarray
    A2: np.ndarray
    A3: np.ndarray
    f: np.ndarray
    g: np.ndarray
    psi: Optional[np.ndarray]
    meta: SystemMeta

    def __post_init__(self):
        N, mo, mb = self.meta.N, self.meta.m_omega, self.meta.m_boundary
        if self.A1.shape != (N, N) or self.A2.shape != (mo, N) or self.A3.shape != (mb, N):
            raise DomainError("operator shapes disagree with system metadata")
        if self.f.shape != (mo,) or self.g.shape != (mb,):
            raise DomainError("data vector lengths disagree with system metadata")
        if (self.psi is None) == (self.meta.kind is ProblemKind.OBSTACLE):
            raise ConfigurationError("obstacle problems require psi; other kinds must not carry one")
        if self.psi is not None and self.psi.shape != (mo,):
            raise DomainError("obstacle vector length disagrees with system metadata")

    @property
    def kind(self) -> ProblemKind:
        return self.meta.kind


def _check(centers: CenterSet, colloc: CollocationSet) -> None:
    if colloc.interior.shape[1] != centers.dim or colloc.boundary.shape[1] != centers.dim:
        raise DomainError(
            f"centers are {centers.dim}-D but collocation points are "
            f"{colloc.interior.shape[1]}-D"
        )


def assemble_a1(
    kind: ProblemKind,
    kernel: Kernel,
    centers: CenterSet,
    colloc: CollocationSet,
    measure_omega: float,
) -> np.ndarray:
    """Stiffness matrix ``|Omega|/(m N) sum_j G_j G_j^T`` (+ mass term for RD).

    ``G_j`` is the N x d matrix of kernel gradients at interior point ``x_j``.
    """
    _check(centers, colloc)
    N, m = centers.N, colloc.m_omega
    grads = kernel.gradients(colloc.interior, centers.points)  # (m, N, d)
    scale = measure_omega / (m * N)
    a1 = np.zeros((N, N))
    for k in range(grads.shape[2]):
        gk = grads[:, :, k]
        a1 += gk.T @ gk
    if kind is ProblemKind.REACTION_DIFFUSION:
        phi = kernel.values(colloc.interior, centers.points)
        a1 += phi.T @ phi
    a1 *= scale
    # exact symmetry; BLAS may differ in the last ulp between (i,l) and (l,i)
    return 0.5 * (a1 + a1.T)


def assemble_a2(
    kernel: Kernel, centers: CenterSet, colloc: CollocationSet, measure_omega: float
) -> np.ndarray:
    """Interior load matrix ``|Omega|/(m sqrt(N)) phi(|x_j - c_i|)``."""
    _check(centers, colloc)
    scale = measure_omega / (colloc.m_omega * math.sqrt(centers.N))
    return scale * kernel.values(colloc.interior, centers.points)


def assemble_a3(
    kernel: Kernel, centers: CenterSet, colloc: CollocationSet, measure_boundary: float
) -> np.ndarray:
    """Boundary matrix ``sqrt(|dOmega|/(m_b N)) phi(|x_n - c_i|)``."""
    _check(centers, colloc)
    scale = math.sqrt(measure_boundary / (colloc.m_boundary * centers.N))
    return scale * kernel.values(colloc.boundary, centers.points)


def assemble_data(problem: Benchmark, colloc: CollocationSet):
    """Sampled source, scaled boundary data and scaled obstacle vectors.

    Returns ``(f, g, psi)`` with ``f_j = f(x_j)``,
    ``g_n = sqrt(|dOmega|/m_b) g(x_n)`` and ``psi_j = |Omega|/m psi(x_j)``
    (``psi`` is None for problems without an obstacle).
    """
    dom = problem.domain
    mo, mb = colloc.m_omega, colloc.m_boundary
    if problem.kind is ProblemKind.OBSTACLE and problem.psi is None:
        raise ConfigurationError(f"obstacle problem {problem.id!r} has no obstacle function")
    if problem.f is None:
        f = np.zeros(mo)
    else:
        f = np.asarray(problem.f(colloc.interior), dtype=float)
    g = math.sqrt(dom.measure_boundary / mb) * np.asarray(problem.g(colloc.boundary), dtype=float)
    psi = None
    if problem.kind is ProblemKind.OBSTACLE:
        psi = (dom.measure_omega / mo) * np.asarray(problem.psi(colloc.interior), dtype=float)
    return f, g, psi


def assemble_system(
    problem: Benchmark, kernel: Kernel, centers: CenterSet, colloc: CollocationSet
) -> AssembledSystem:
    dom: Domain = problem.domain
    f, g, psi = assemble_data(problem, colloc)
    meta = SystemMeta(
        N=centers.N,
        m_omega=colloc.m_omega,
        m_boundary=colloc.m_boundary,
        measure_omega=dom.measure_omega,
        measure_boundary=dom.measure_boundary,
        kernel=kernel,
        kind=problem.kind,
    )
    return AssembledSystem(
        A1=assemble_a1(problem.kind, kernel, centers, colloc, dom.measure_omega),
        A2=assemble_a2(kernel, centers, colloc, dom.measure_omega),
        A3=assemble_a3(kernel, centers, colloc, dom.measure_boundary),
        f=f,
        g=g,
        psi=psi,
        meta=meta,
    )


def evaluate_uhat(kernel: Kernel, centers: CenterSet, w, points) -> np.ndarray:
    """``u_hat`` at ``points``."""
    w = np.asarray(w, dtype=float)
    if w.shape != (centers.N,):
        raise DomainError(f"weight vector has shape {w.shape}, expected ({centers.N},)")
    phi = kernel.values(points, centers.points)
    return phi @ w / math.sqrt(centers.N)


def objective(sys: AssembledSystem, w, beta: float, mu: float = 0.0) -> float:
    """Discrete functional value at ``w``; ``mu`` is used only for obstacles."""
    w = np.asarray(w, dtype=float)
    if w.shape != (sys.meta.N,):
        raise DomainError(f"weight vector has shape {w.shape}, expected ({sys.meta.N},)")
    bnd = sys.A3 @ w - sys.g
    val = 0.5 * w @ (sys.A1 @ w) + 0.5 * beta * (bnd @ bnd)
    if sys.kind is ProblemKind.OBSTACLE:
        val += mu * np.sum(np.maximum(sys.psi - sys.A2 @ w, 0.0))
    else:
        val -= sys.f @ (sys.A2 @ w)
    return float(val)


def objective_gradient(sys: AssembledSystem, w, beta: float, mu: float = 0.0) -> np.ndarray:
    """Gradient of :func:`objective` (a subgradient on obstacle kinks)."""
    w = np.asarray(w, dtype=float)
    grad = sys.A1 @ w + beta * sys.A3.T @ (sys.A3 @ w - sys.g)
    if sys.kind is ProblemKind.OBSTACLE:
        active = (sys.psi - sys.A2 @ w) > 0.0
        grad -= mu * sys.A2.T @ active.astype(float)
    else:
        grad -= sys.A2.T @ sys.f
    return grad
