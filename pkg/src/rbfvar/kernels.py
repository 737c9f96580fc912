"""Radial basis function families and shape-parameter rules.

Every kernel is written as ``phi(r) = F(b * r)`` for a scalar profile ``F``.
Gradients are expressed through ``h(s) = F'(s) / s`` so that

    grad_x phi(|x - c|) = b**2 * h(b * r) * (x - c),

which is smooth at ``r = 0`` for every family below and returns the zero
vector at the center without any special casing.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from rbfvar.errors import DomainError

__all__ = [
    "KernelKind",
    "Kernel",
    "kernel_eval",
    "kernel_grad",
    "c_opt",
    "shape_param",
]


class KernelKind(enum.Enum):
    GAUSSIAN = "gaussian"
    MULTIQUADRIC = "multiquadric"
    INVERSE_QUADRATIC = "inverse_quadratic"
    INVERSE_MULTIQUADRIC = "inverse_multiquadric"
    WENDLAND_C2 = "wendland_c2"
    WENDLAND_C4 = "wendland_c4"

    @classmethod
    def parse(cls, name: str | KernelKind) -> KernelKind:
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise DomainError(f"unknown kernel {name!r}; expected one of {valid}") from None

    @property
    def compact(self) -> bool:
        return self in (KernelKind.WENDLAND_C2, KernelKind.WENDLAND_C4)


def _profile(kind: KernelKind, s: np.ndarray) -> np.ndarray:
    if kind is KernelKind.GAUSSIAN:
        return np.exp(-(s * s))
    if kind is KernelKind.MULTIQUADRIC:
        return np.sqrt(1.0 + s * s)
    if kind is KernelKind.INVERSE_QUADRATIC:
        return 1.0 / (1.0 + s * s)
    if kind is KernelKind.INVERSE_MULTIQUADRIC:
        return 1.0 / np.sqrt(1.0 + s * s)
    # Wendland: clip so the polynomial factor is exactly 0 outside the support
    t = np.clip(1.0 - s, 0.0, None)
    if kind is KernelKind.WENDLAND_C2:
        return t**4 * (4.0 * s + 1.0)
    return t**6 * (35.0 * s * s + 18.0 * s + 3.0)


def _profile_slope_over_s(kind: KernelKind, s: np.ndarray) -> np.ndarray:
    """``F'(s) / s``, continuous at ``s = 0``."""
    if kind is KernelKind.GAUSSIAN:
        return -2.0 * np.exp(-(s * s))
    if kind is KernelKind.MULTIQUADRIC:
        return 1.0 / np.sqrt(1.0 + s * s)
    if kind is KernelKind.INVERSE_QUADRATIC:
        q = 1.0 + s * s
        return -2.0 / (q * q)
    if kind is KernelKind.INVERSE_MULTIQUADRIC:
        return -((1.0 + s * s) ** -1.5)
    t = np.clip(1.0 - s, 0.0, None)
    if kind is KernelKind.WENDLAND_C2:
        return -20.0 * t**3
    return -56.0 * t**5 * (5.0 * s + 1.0)


@dataclass(frozen=True)
class Kernel:
    """A radial basis family together with its shape parameter ``b``."""

    kind: KernelKind
    b: float

    def __post_init__(self):
        object.__setattr__(self, "kind", KernelKind.parse(self.kind))
        if not (math.isfinite(self.b) and self.b > 0):
            raise DomainError(f"shape parameter must be positive and finite, got {self.b}")

    def __call__(self, r):
        """Evaluate ``phi(r)`` elementwise; ``r`` must be nonnegative."""
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise DomainError("kernel evaluated at negative radius")
        return _profile(self.kind, self.b * r)

    def values(self, points: np.ndarray, centers: np.ndarray) -> np.ndarray:
        """Matrix ``[phi(|x_j - c_i|)]`` of shape (len(points), len(centers))."""
        diff = _pairwise_diff(points, centers)
        r = np.sqrt(np.einsum("jid,jid->ji", diff, diff))
        return _profile(self.kind, self.b * r)

    def gradients(self, points: np.ndarray, centers: np.ndarray) -> np.ndarray:
        """Array of ``grad_x phi(|x_j - c_i|)`` with shape (m, N, d)."""
        diff = _pairwise_diff(points, centers)
        r = np.sqrt(np.einsum("jid,jid->ji", diff, diff))
        h = _profile_slope_over_s(self.kind, self.b * r)
        return (self.b * self.b) * h[..., None] * diff


def _as_points(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise DomainError(f"expected a point set of shape (n, d), got {a.shape}")
    return a


def _pairwise_diff(points, centers) -> np.ndarray:
    x = _as_points(points)
    c = _as_points(centers)
    if x.shape[1] != c.shape[1]:
        raise DomainError(f"dimension mismatch: points are {x.shape[1]}-D, centers {c.shape[1]}-D")
    return x[:, None, :] - c[None, :, :]


def kernel_eval(k: Kernel, r: float) -> float:
    """Scalar ``phi(r)``."""
    if r < 0:
        raise DomainError(f"radius must be nonnegative, got {r}")
    return float(_profile(k.kind, np.float64(k.b * r)))


def kernel_grad(k: Kernel, x, c) -> np.ndarray:
    """Gradient of ``phi(|x - c|)`` with respect to ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if x.shape != c.shape or x.ndim != 1:
        raise DomainError(f"dimension mismatch between x {x.shape} and c {c.shape}")
    diff = x - c
    s = k.b * math.sqrt(float(diff @ diff))
    return k.b * k.b * float(_profile_slope_over_s(k.kind, np.float64(s))) * diff


def c_opt(T: float, tau: float, variant: str = "table") -> float:
    """Shape-factor multiplier ``c(T, tau)``.

    ``variant="table"`` uses ``pi / (T sqrt(2 log(1 + tau^-2)))``, which
    gives the standard multipliers (0.033 at
    T=8, 0.134 at T=2, ...). ``variant="narrow"`` drops the factor 2 under
    the square root.
    """
    if not T >= 1:
        raise DomainError(f"expansion factor T must be >= 1, got {T}")
    if not 0 < tau < 1:
        raise DomainError(f"truncation threshold must lie in (0, 1), got {tau}")
    # log(1 + tau^-2) = log1p(tau^2) - 2 log(tau), finite for any tau > 0
    log_term = math.log1p(tau * tau) - 2.0 * math.log(tau)
    if variant == "table":
        denom = T * math.sqrt(2.0 * log_term)
    elif variant == "narrow":
        denom = T * math.sqrt(log_term)
    else:
        raise DomainError(f"unknown c_opt variant {variant!r}")
    return min(1.0, math.pi / denom)


def shape_param(c: float, N: int, d: int) -> float:
    """Kernel shape ``b``: ``c*N`` in 1-D, ``c*sqrt(N)`` in 2-D."""
    if c <= 0 or N < 1:
        raise DomainError(f"need c > 0 and N >= 1, got c={c}, N={N}")
    if d == 1:
        return c * N
    if d == 2:
        return c * math.sqrt(N)
    raise DomainError(f"unsupported dimension d={d}")
