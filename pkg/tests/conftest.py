import math

import numpy as np

from rbfvar.assembly import ProblemKind, assemble_system
from rbfvar.benchmarks import Benchmark
from rbfvar.geometry import CenterSet, CollocationSet, Domain
from rbfvar.kernels import Kernel


def random_problem(kind: ProblemKind, dim: int = 1) -> Benchmark:
    """Smooth data maps on the unit interval or square."""
    dom = Domain.interval(0.0, 1.0) if dim == 1 else Domain.unit_square()

    def f(p):
        return np.cos(3.0 * np.asarray(p)[:, 0]) + 0.5

    def g(p):
        return 1.0 + np.asarray(p).sum(axis=1)

    def psi(p):
        x = np.asarray(p)
        return 0.4 - 2.0 * ((x - 0.5) ** 2).sum(axis=1)

    return Benchmark(
        "random",
        kind,
        dom,
        u_exact=g,
        g=g,
        f=None if kind is ProblemKind.OBSTACLE else f,
        psi=psi if kind is ProblemKind.OBSTACLE else None,
    )


def random_sets(N: int, m_omega: int, m_boundary: int, dim: int, seed: int, T: float = 1.5):
    rng = np.random.default_rng(seed)
    centers = CenterSet(rng.uniform(0.5 - T / 2, 0.5 + T / 2, (N, dim)), T)
    interior = rng.uniform(0.0, 1.0, (m_omega, dim))
    if dim == 1:
        boundary = np.array([[0.0], [1.0]])[:m_boundary]
    else:
        t = rng.uniform(0.0, 1.0, m_boundary)
        side = np.arange(m_boundary) % 4
        boundary = np.column_stack([
            np.where(side == 0, t, np.where(side == 1, 1.0, np.where(side == 2, 1.0 - t, 0.0))),
            np.where(side == 0, 0.0, np.where(side == 1, t, np.where(side == 2, 1.0, 1.0 - t))),
        ])
    zeta = max(1, math.ceil((m_omega + m_boundary) / N))
    return centers, CollocationSet(interior, boundary, zeta)


def small_system(kind, N=6, m_omega=12, dim=1, seed=0, kernel="gaussian", b=2.0):
    m_boundary = 2 if dim == 1 else 8
    centers, colloc = random_sets(N, m_omega, m_boundary, dim, seed)
    k = Kernel(kernel, b)
    return assemble_system(random_problem(kind, dim), k, centers, colloc), k, centers, colloc


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS, key=lambda k: int(k.split()[0])):
        ok, detail = RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {detail}")
