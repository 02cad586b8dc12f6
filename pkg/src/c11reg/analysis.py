"""Discrete regularity measurements.

A function is k-semiconcave when ``u - |x|**2 / k`` is concave.  On a grid
that reads: every second difference along a step of length ``h_e`` is at
most ``2 h_e**2 / k``.  In 1D this is equivalent to concavity of the
piecewise-linear interpolant of ``u - x**2/k``; in 2D (axes plus the two
diagonals) it is a necessary condition only, and reports carry that flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridFunction, fp_tolerance, second_differences

__all__ = [
    "UNBOUNDED",
    "ModulusTable",
    "RegularityReport",
    "semiconcavity_constant",
    "semiconvexity_constant",
    "modulus_of_continuity",
    "epsilon_bound",
    "gradient_lipschitz_estimate",
    "c11_report",
]

#: constant returned when no second difference is positive
UNBOUNDED = math.inf


@dataclass(frozen=True, eq=False)
class ModulusTable:
    """Modulus of continuity tabulated at ``radii = h, 2h, ...``."""

    radii: np.ndarray
    rho: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        p = np.asarray(self.rho, dtype=float)
        if r.shape != p.shape or r.ndim != 1 or r.size == 0:
            raise ValueError("radii and rho must be non-empty 1D arrays of equal length")
        if (np.diff(r) <= 0).any() or r[0] <= 0:
            raise ValueError("radii must be positive and increasing")
        if (p < 0).any():
            raise ValueError("rho must be non-negative")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "rho", p)

    def __call__(self, r: float) -> float:
        """Right-continuous step extension: round ``r`` up to the next tabulated radius."""
        if r <= 0:
            return 0.0
        i = int(np.searchsorted(self.radii, r * (1 - 1e-12), side="left"))
        return float(self.rho[min(i, self.rho.size - 1)])


@dataclass(frozen=True)
class RegularityReport:
    k_semiconcave: float
    k_semiconvex: float
    grad_lipschitz: float
    c11_at_t: float | None
    #: True when the second-difference test is also sufficient (1D grids)
    sufficient: bool

    def as_dict(self) -> dict:
        return {
            "k_semiconcave": self.k_semiconcave,
            "k_semiconvex": self.k_semiconvex,
            "grad_lipschitz": self.grad_lipschitz,
            "c11_at_t": self.c11_at_t,
            "sufficient": self.sufficient,
        }


def semiconcavity_constant(u: GridFunction) -> float:
    """Largest k with every second difference ``<= 2 h_e**2 / k``.

    Returns :data:`UNBOUNDED` when no second difference exceeds the
    ``1e-12 * (1 + max|u|)`` floor.  Any smaller positive k is also valid.
    """
    field = second_differences(u)
    eps = fp_tolerance(u)
    best = UNBOUNDED
    for d2, h in zip(field.values, field.steps):
        top = float(d2.max()) if d2.size else 0.0
        if top > eps:
            best = min(best, 2.0 * h * h / top)
    return best


def semiconvexity_constant(u: GridFunction) -> float:
    """Semiconcavity constant of ``-u``."""
    return semiconcavity_constant(-u)


def gradient_lipschitz_estimate(u: GridFunction) -> float:
    """``max |second difference| / h_e**2`` over all directions and nodes."""
    field = second_differences(u)
    return max(float(np.abs(s).max()) for s in field.scaled())


def modulus_of_continuity(u: GridFunction) -> ModulusTable:
    """``rho(m h) = max |u(x + j h) - u(x)|`` over node pairs with ``|j| <= m``.

    Taking the running maximum over offsets keeps the table non-decreasing,
    matching a supremum over the ball of radius ``m h``.
    """
    if u.dim != 1:
        raise ValueError("modulus_of_continuity is 1D only")
    if not u.is_finite():
        raise ValueError("modulus needs finite values")
    vals = u.values
    n = vals.size
    raw = np.array([np.abs(vals[m:] - vals[:-m]).max() for m in range(1, n)])
    return ModulusTable(u.h * np.arange(1, n), np.maximum.accumulate(raw))


def epsilon_bound(table: ModulusTable, t: float) -> tuple[float, float]:
    """Approximation error of the envelopes for a modulus of continuity.

    Returns ``(max_r rho(r) - r**2/t floored at 0, rho(sqrt t) + rho(sqrt t)**2 / 4)``;
    the first never exceeds the second.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    exact = max(0.0, float(np.max(table.rho - table.radii ** 2 / t)))
    r = table(math.sqrt(t))
    return exact, r + r * r / 4.0


def c11_report(u: GridFunction, t: float, slack: float | None = None) -> RegularityReport:
    """Both regularity constants, the gradient estimate and a C^{1,1} verdict at level ``t``.

    The verdict ``c11_at_t = t`` is issued when every second difference
    lies in ``[-2 h_e**2/t - slack, 2 h_e**2/t + slack]``; ``slack``
    defaults to ``1e-12 * (1 + max|u|)``.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    if slack is None:
        slack = fp_tolerance(u)
    field = second_differences(u)
    ok = all(
        float(np.abs(d2).max()) <= 2.0 * h * h / t + slack
        for d2, h in zip(field.values, field.steps)
    )
    return RegularityReport(
        k_semiconcave=semiconcavity_constant(u),
        k_semiconvex=semiconvexity_constant(u),
        grad_lipschitz=gradient_lipschitz_estimate(u),
        c11_at_t=float(t) if ok else None,
        sufficient=u.dim == 1,
    )
