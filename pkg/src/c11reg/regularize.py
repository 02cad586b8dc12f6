"""Composite regularizers built from the quadratic envelopes.

``bernard_r(f, t)`` is the symmetric operator ``sup_t o inf_2t o sup_t``,
evaluated in the factored form ``opening(closing(f, t), t)``.  It is
C^{1,1} at level ``t``, and it never leaves the band between a
t-semiconcave upper bound and a t-semiconvex lower bound of ``f``.
:func:`ilmanen_sandwich` uses that to slide a C^{1,1} function between two
such bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import semiconcavity_constant
from .envelope import (
    EnvelopeParams, closing, inf_convolve, opening, sup_convolve,
)
from .grid import GridFunction, crop, fp_tolerance, pad

__all__ = [
    "DomainViolation",
    "PinchResult",
    "lasry_lions",
    "bernard_r",
    "semigroup_defect",
    "ilmanen_sandwich",
    "K_FLOOR",
    "K_CAP",
]

K_FLOOR = 1e-6
K_CAP = 1e6


class DomainViolation(ValueError):
    """Inputs outside an operator's domain (e.g. ``u < v`` somewhere)."""


@dataclass(frozen=True)
class PinchResult:
    w: GridFunction
    t_used: float
    k_upper: float
    k_lower: float
    sandwich_defect: float


def lasry_lions(u: GridFunction, s: float, t: float) -> GridFunction:
    """``sup_convolve(inf_convolve(u, t), s)`` for ``0 < s < t``.

    The intermediate inf-convolution is evaluated on the grid lattice
    widened by a margin ``sqrt(osc(u) s t / (t - s))`` beyond which no
    point can win the outer supremum.
    """
    s, t = EnvelopeParams(s).t, EnvelopeParams(t).t
    if s >= t:
        raise ValueError(f"need s < t, got s={s}, t={t}")
    if not u.is_finite():
        raise ValueError("lasry_lions needs finite input")
    osc = float(u.values.max() - u.values.min())
    reach = math.sqrt(osc * s * t / (t - s))
    margin = [int(math.ceil(reach / h)) + 1 for h in u.spec.spacing]
    wide = inf_convolve(pad(u, margin, np.inf), t)
    return crop(sup_convolve(wide, s), margin, extended=False)


def bernard_r(f: GridFunction, t: float) -> GridFunction:
    """Symmetric regularization ``R_t f = opening(closing(f, t), t)``.

    The second differences of the result lie in ``[-2h**2/t, 2h**2/t]``
    (exactly in 1D), functions that are both t-semiconcave and
    t-semiconvex are fixed, and ``u >= f >= v`` implies
    ``u >= R_t f >= v`` whenever ``u`` is t-semiconcave and ``v`` is
    t-semiconvex.
    """
    t = EnvelopeParams(t).t
    if not f.is_finite():
        raise ValueError("bernard_r needs finite input")
    return opening(closing(f, t), t)


def semigroup_defect(u: GridFunction, s: float, t: float) -> tuple[float, float]:
    """Extremes of ``T_t(T_s u) - T_{t+s} u`` over the nodes.

    The minimum is never below rounding level; the maximum is bounded by
    ``(h**2/4)(1/s + 1/t)`` per axis step (the inner minimiser snapped to
    the grid).
    """
    s, t = EnvelopeParams(s).t, EnvelopeParams(t).t
    d = inf_convolve(inf_convolve(u, s), t).values - inf_convolve(u, s + t).values
    return float(d.min()), float(d.max())


def _clamp_k(k: float) -> float:
    return min(max(k, K_FLOOR), K_CAP)


def ilmanen_sandwich(u: GridFunction, v: GridFunction, f: GridFunction | None = None,
                     k: float | str = "auto") -> PinchResult:
    """A C^{1,1} function between a semiconcave ``u`` and a semiconvex ``v <= u``.

    ``k="auto"`` measures ``min(semiconcavity(u), semiconcavity(-v))``,
    clamped to ``[1e-6, 1e6]``; a user-supplied ``k`` is capped at that
    value.  ``f`` defaults to ``u``.  Returns ``w = bernard_r(f, k)``
    together with the measured sandwich defect.
    """
    if u.spec != v.spec or (f is not None and f.spec != u.spec):
        raise ValueError("u, v and f must share a grid")
    if not (u.is_finite() and v.is_finite()):
        raise ValueError("ilmanen_sandwich needs finite u and v")
    eps = fp_tolerance(u, v)
    gap = float((v.values - u.values).max())
    if gap > eps:
        raise DomainViolation(f"u < v somewhere (by up to {gap:.3g})")
    if f is not None:
        if float((f.values - u.values).max()) > eps or float((v.values - f.values).max()) > eps:
            raise DomainViolation("f must satisfy u >= f >= v")

    k_upper = _clamp_k(semiconcavity_constant(u))
    k_lower = _clamp_k(semiconcavity_constant(-v))
    auto = min(k_upper, k_lower)
    if not auto > 0:
        raise DomainViolation("u or -v is not semiconcave")
    if k == "auto":
        t_used = auto
    else:
        k = float(k)
        if not k > 0:
            raise ValueError("k must be positive")
        t_used = min(k, auto)

    w = bernard_r(u if f is None else f, t_used)
    defect = max(0.0, float((w.values - u.values).max()), float((v.values - w.values).max()))
    return PinchResult(w, t_used, k_upper, k_lower, defect)
