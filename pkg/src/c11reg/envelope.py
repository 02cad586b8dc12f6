"""Inf- and sup-convolution with the quadratic kernel ``|y - x|**2 / t``.

``inf_convolve(u, t)(x) = min_y u(y) + |y - x|**2 / t`` over the grid nodes
``y``: the exact envelope of ``u`` extended by ``+inf`` off the grid.  It is
computed with the linear-time lower envelope of parabolas, axis by axis in
2D (the squared norm splits over axes).  ``sup_convolve`` is its mirror
image under negation.

The paired operators :func:`opening` (sup after inf) and :func:`closing`
(inf after sup) let the intermediate variable range over the whole line in
1D, which is what makes ``opening(u, t) == u`` hold exactly for every
``u`` with ``u + x**2 / t`` discretely convex.  A second, independent route
to the same numbers goes through discrete Legendre conjugates
(:func:`quadratic_bidual`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grid import GridFunction, crop, pad

__all__ = [
    "EnvelopeParams",
    "ConjugateTable",
    "lower_envelope_1d",
    "inf_convolve",
    "sup_convolve",
    "inf_convolve_bruteforce",
    "opening",
    "closing",
    "legendre_conjugate",
    "quadratic_bidual",
]


@dataclass(frozen=True)
class EnvelopeParams:
    """Width parameter ``t`` of the quadratic kernel."""

    t: float

    def __post_init__(self):
        t = float(self.t)
        if not (math.isfinite(t) and t > 0):
            raise ValueError(f"t must be positive and finite, got {self.t}")
        object.__setattr__(self, "t", t)


@dataclass(frozen=True, eq=False)
class ConjugateTable:
    """Samples of ``u*(p) = max_x p x - u(x)`` at increasing slopes."""

    slopes: np.ndarray
    values: np.ndarray

    def second_differences(self) -> np.ndarray:
        """Divided second differences in slope; non-negative up to rounding."""
        p, c = self.slopes, self.values
        d1 = np.diff(c) / np.diff(p)
        return np.diff(d1) / (0.5 * (p[2:] - p[:-2]))


def _check_t(t) -> float:
    return EnvelopeParams(t).t


def _check_inf_input(vals: np.ndarray):
    # a single reduction: NaN propagates through min, and min == +inf means no finite entry
    lo = float(np.min(vals))
    if math.isnan(lo):
        raise ValueError("NaN entries are not allowed")
    if lo == -math.inf:
        raise ValueError("-inf entries are only allowed in sup-type operations")
    if lo == math.inf:
        raise ValueError("at least one finite entry is required")


def lower_envelope_1d(f, h: float, t: float) -> np.ndarray:
    """``g[i] = min_j f[j] + (i - j)**2 h**2 / t`` in linear time.

    Entries equal to ``+inf`` are absent parabolas.

    Examples
    --------
    >>> lower_envelope_1d([0.0, np.inf, np.inf], 1.0, 1.0)
    array([0., 1., 4.])
    """
    t = _check_t(t)
    if not (h > 0 and math.isfinite(h)):
        raise ValueError("h must be positive")
    f = np.ascontiguousarray(f, dtype=np.float64)
    if f.ndim != 1:
        raise ValueError("expected a 1D array")
    _check_inf_input(f)
    out = np.empty_like(f)
    _kernels.lower_envelope_uniform(f, h * h / t, out)
    return out


def _inf_along(vals: np.ndarray, axis: int, w: float) -> np.ndarray:
    if vals.ndim == 1:
        out = np.empty_like(vals)
        _kernels.lower_envelope_uniform(np.ascontiguousarray(vals), w, out)
        return out
    moved = np.ascontiguousarray(np.moveaxis(vals, axis, -1))
    flat = moved.reshape(-1, moved.shape[-1])
    out = np.empty_like(flat)
    _kernels.lower_envelope_rows(flat, w, out)
    return np.moveaxis(out.reshape(moved.shape), -1, axis)


def inf_convolve(u: GridFunction, t: float) -> GridFunction:
    """Exact discrete ``T_t u(x) = min_y u(y) + |y - x|**2 / t`` on the grid of ``u``."""
    t = _check_t(t)
    _check_inf_input(u.values)
    vals = u.values
    for a, h in enumerate(u.spec.spacing):
        vals = _inf_along(vals, a, h * h / t)
    # every node sees at least one finite parabola, so the result is finite
    return GridFunction._trusted(u.spec, vals, False)


def sup_convolve(u: GridFunction, t: float) -> GridFunction:
    """Exact discrete ``max_y u(y) - |y - x|**2 / t``, as ``-inf_convolve(-u, t)``."""
    if (u.values == np.inf).any():
        raise ValueError("+inf entries are only allowed in inf-type operations")
    return -inf_convolve(-u, t)


def inf_convolve_bruteforce(u: GridFunction, t: float, max_nodes: int = 10**5,
                            force: bool = False) -> GridFunction:
    """Reference ``T_t u`` by scanning every pair of nodes.

    Quadratic in the node count; refuses grids above ``max_nodes`` unless
    ``force`` is set.
    """
    t = _check_t(t)
    _check_inf_input(u.values)
    n = u.spec.size
    if n > max_nodes and not force:
        raise ValueError(f"{n} nodes exceed the brute-force guard of {max_nodes}")
    idx = np.stack(np.meshgrid(*[np.arange(m, dtype=np.float64) for m in u.spec.shape],
                               indexing="ij"), axis=-1).reshape(n, u.dim)
    w = np.array([h * h / t for h in u.spec.spacing])
    f = u.flat()
    keep = np.isfinite(f)
    f, src = f[keep], idx[keep]
    out = np.empty(n)
    chunk = max(1, 4_000_000 // max(1, f.size))
    for start in range(0, n, chunk):
        q = idx[start:start + chunk]
        cost = np.broadcast_to(f, (q.shape[0], f.size)).copy()
        for a in range(u.dim):
            d = q[:, a:a + 1] - src[None, :, a]
            cost += d * d * w[a]
        out[start:start + chunk] = cost.min(axis=1)
    return GridFunction(u.spec, out.reshape(u.spec.shape))


# -- paired operators ---------------------------------------------------------

def _opening_1d(vals: np.ndarray, w: float) -> np.ndarray:
    # The lower envelope is piecewise quadratic; subtracting the kernel
    # centred at x leaves a function linear on each piece, so the sup over
    # the real line is attained at a breakpoint.
    first, last, zb, tb = _kernels.breakpoints_uniform(vals, w)
    n = vals.shape[0]
    out = np.full(n, np.inf)
    if first < 0:
        raise ValueError("at least one finite entry is required")
    if zb.size == 0:
        out[first] = vals[first]
        return out
    res = np.empty(last - first + 1)
    q = np.arange(first, last + 1, dtype=np.float64)
    v = np.empty(zb.size, dtype=np.int64)
    z = np.empty(zb.size + 1)
    k = _kernels.envelope_build(zb, -tb, w, v, z)
    _kernels.envelope_eval(zb, -tb, w, v, z, k, q, res)
    out[first:last + 1] = -res
    return out


def _lipschitz(u: GridFunction) -> float:
    lip = 0.0
    for a, h in enumerate(u.spec.spacing):
        lip = max(lip, float(np.abs(np.diff(u.values, axis=a)).max()) / h)
    return lip


def _lattice_margin(u: GridFunction, t: float) -> list[int]:
    # the optimal intermediate point sits within t * Lip / 2 of the box
    lip = _lipschitz(u) * math.sqrt(u.dim)
    return [int(math.ceil(t * lip / (2.0 * h))) + 1 for h in u.spec.spacing]


def opening(u: GridFunction, t: float) -> GridFunction:
    """``sup_convolve`` after ``inf_convolve``: ``max_y min_z u(z) + |z-y|^2/t - |y-x|^2/t``.

    The result is always ``<= u``.  In 1D the intermediate point ``y``
    ranges over the whole line, so ``opening(u, t) + x**2/t`` is exactly the
    lower convex envelope of the samples of ``u + x**2/t``, and equals it
    at every node where those samples are convex.  Entries of ``u`` equal
    to ``+inf`` are allowed in 1D; nodes outside the span of the finite
    entries stay ``+inf``.

    In 2D ``y`` ranges over the grid lattice extended by a margin large
    enough that enlarging it changes nothing; equality then holds only up
    to a discretisation defect of order ``h**2``.
    """
    t = _check_t(t)
    _check_inf_input(u.values)
    if u.dim == 1:
        vals = _opening_1d(np.ascontiguousarray(u.values), u.h * u.h / t)
        return GridFunction(u.spec, vals, extended=not np.isfinite(vals).all())
    if not u.is_finite():
        raise ValueError("2D paired operators need finite input")
    margin = _lattice_margin(u, t)
    wide = inf_convolve(pad(u, margin, np.inf), t)
    return crop(sup_convolve(wide, t), margin, extended=False)


def closing(u: GridFunction, t: float) -> GridFunction:
    """``inf_convolve`` after ``sup_convolve``; mirror of :func:`opening`, always ``>= u``."""
    if (u.values == np.inf).any():
        raise ValueError("+inf entries are only allowed in inf-type operations")
    return -opening(-u, t)


# -- Legendre route -----------------------------------------------------------

def _conjugate_points(x: np.ndarray, y: np.ndarray, slopes: np.ndarray) -> np.ndarray:
    """``max_j slopes * x[j] - y[j]`` for increasing ``x`` and increasing slopes."""
    hull = _kernels.lower_hull(x, y)
    out = np.empty(slopes.shape[0])
    _kernels.conjugate_sorted(x, y, hull, slopes, out)
    return out


def legendre_conjugate(u: GridFunction, slopes) -> ConjugateTable:
    """Discrete Legendre-Fenchel conjugate ``u*(p) = max over nodes x of p x - u(x)``.

    Evaluated through the lower convex hull of the samples, linear in
    ``len(u) + len(slopes)``.
    """
    if u.dim != 1:
        raise ValueError("legendre_conjugate is 1D only")
    if not u.is_finite():
        raise ValueError("conjugate needs finite values")
    p = np.ascontiguousarray(slopes, dtype=np.float64).ravel()
    if p.size == 0:
        raise ValueError("empty slope list")
    if not np.isfinite(p).all():
        raise ValueError("slopes must be finite")
    if (np.diff(p) < 0).any():
        raise ValueError("slopes must be sorted")
    x = u.spec.axis(0)
    return ConjugateTable(p, _conjugate_points(x, np.ascontiguousarray(u.values), p))


def quadratic_bidual(u: GridFunction, t: float) -> GridFunction:
    """``opening(u, t)`` computed as a Legendre biconjugate.

    Forms ``v = u + x**2/t``, conjugates it at the slopes where the
    maximising node changes (the chord slopes of its lower hull), conjugates
    the result back at the grid nodes and subtracts ``x**2/t``.
    """
    t = _check_t(t)
    if u.dim != 1:
        raise ValueError("quadratic_bidual is 1D only")
    if not u.is_finite():
        raise ValueError("quadratic_bidual needs finite values")
    x = u.spec.axis(0)
    v = np.ascontiguousarray(u.values + x * x / t)
    hull = _kernels.lower_hull(x, v)
    # rounding can leave nearly collinear chords a few ulps out of order
    chords = np.maximum.accumulate(np.diff(v[hull]) / np.diff(x[hull]))
    vstar = legendre_conjugate(GridFunction(u.spec, v), chords).values
    vss = _conjugate_points(chords, np.ascontiguousarray(vstar), x)
    return GridFunction(u.spec, vss - x * x / t)
