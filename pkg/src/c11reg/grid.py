"""Uniform grids, sampled functions and the pointwise toolkit around them.

A :class:`GridFunction` is the discrete stand-in for a bounded function on
``R^d`` (``d`` in {1, 2}).  Values may carry IEEE-754 infinities when the
``extended`` flag is set: ``+inf`` means "no constraint" for inf-type
operators, ``-inf`` the same for sup-type operators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "GridSpec",
    "GridFunction",
    "SecondDifferenceField",
    "GENERATORS",
    "fp_tolerance",
    "generate",
    "combine",
    "second_differences",
    "pad",
    "crop",
]

#: relative floor used by every "exact" comparison in the package
FP_RTOL = 1e-12


def fp_tolerance(*arrays) -> float:
    """Return ``1e-12 * (1 + max|u|)`` over the finite entries of the inputs."""
    scale = 0.0
    for a in arrays:
        vals = a.values if isinstance(a, GridFunction) else np.asarray(a, dtype=float)
        finite = vals[np.isfinite(vals)]
        if finite.size:
            scale = max(scale, float(np.max(np.abs(finite))))
    return FP_RTOL * (1.0 + scale)


@dataclass(frozen=True)
class GridSpec:
    """Geometry of a uniform axis-aligned grid.

    Node ``i`` on axis ``a`` sits at ``origin[a] + i * spacing[a]``.
    """

    origin: tuple[float, ...]
    spacing: tuple[float, ...]
    shape: tuple[int, ...]

    def __post_init__(self):
        origin = tuple(float(o) for o in np.atleast_1d(self.origin))
        spacing = tuple(float(h) for h in np.atleast_1d(self.spacing))
        shape = tuple(int(n) for n in np.atleast_1d(self.shape))
        if not (len(origin) == len(spacing) == len(shape)):
            raise ValueError("origin, spacing and shape must have one entry per axis")
        if len(shape) not in (1, 2):
            raise ValueError(f"only 1D and 2D grids are supported, got dim={len(shape)}")
        if not all(np.isfinite(o) for o in origin):
            raise ValueError("origin must be finite")
        if not all(np.isfinite(h) and h > 0 for h in spacing):
            raise ValueError(f"spacing must be positive and finite, got {spacing}")
        if not all(n >= 3 for n in shape):
            raise ValueError(f"every axis needs at least 3 nodes, got shape={shape}")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "shape", shape)

    @classmethod
    def from_bounds(cls, start: float, stop: float, h: float) -> "GridSpec":
        """1D grid from endpoints and spacing; ``stop`` must lie on the lattice."""
        count = (stop - start) / h
        n = int(round(count))
        if abs(count - n) > 1e-9 * max(1.0, abs(count)):
            raise ValueError(f"({stop} - {start}) is not a multiple of h={h}")
        return cls((start,), (h,), (n + 1,))

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def axis(self, a: int) -> np.ndarray:
        """Node coordinates along axis ``a``."""
        return self.origin[a] + np.arange(self.shape[a]) * self.spacing[a]

    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays broadcast to ``shape`` (``indexing='ij'``)."""
        return tuple(np.meshgrid(*[self.axis(a) for a in range(self.dim)], indexing="ij"))

    def squared_norm(self) -> np.ndarray:
        """``|x|**2`` sampled at every node."""
        return sum(c * c for c in self.coordinates())


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real samples on a :class:`GridSpec`, stored with the grid's shape."""

    spec: GridSpec
    values: np.ndarray
    extended: bool = False

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64)
        if vals.size != self.spec.size:
            raise ValueError(
                f"{vals.size} values for a grid of {self.spec.size} nodes")
        vals = vals.reshape(self.spec.shape)
        if np.isnan(vals).any():
            raise ValueError("NaN is not a valid grid value")
        if not self.extended and not np.isfinite(vals).all():
            raise ValueError("infinite entries require extended=True")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def dim(self) -> int:
        return self.spec.dim

    @property
    def h(self) -> float:
        """Spacing of a 1D grid."""
        return self.spec.spacing[0]

    def flat(self) -> np.ndarray:
        """Values in row-major node order."""
        return self.values.ravel()

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())

    def with_values(self, values, extended: bool | None = None) -> "GridFunction":
        vals = np.asarray(values, dtype=np.float64)
        if extended is None:
            extended = self.extended or not np.isfinite(vals).all()
        return GridFunction(self.spec, vals, extended)

    def __neg__(self) -> "GridFunction":
        return GridFunction._trusted(self.spec, -self.values, self.extended)

    @classmethod
    def _trusted(cls, spec: GridSpec, vals: np.ndarray, extended: bool) -> "GridFunction":
        """Wrap a freshly computed float64 array without copying or re-validating."""
        out = object.__new__(cls)
        vals = vals.reshape(spec.shape)
        vals.setflags(write=False)
        object.__setattr__(out, "spec", spec)
        object.__setattr__(out, "values", vals)
        object.__setattr__(out, "extended", bool(extended))
        return out

    def __repr__(self) -> str:
        return (f"GridFunction(shape={self.spec.shape}, spacing={self.spec.spacing}, "
                f"extended={self.extended})")


@dataclass(frozen=True)
class SecondDifferenceField:
    """Second differences ``u(x+e) - 2u(x) + u(x-e)`` along a set of steps.

    ``values[k]`` holds the differences along ``directions[k]`` over the
    nodes where both neighbours exist; ``steps[k]`` is the Euclidean length
    of that step.
    """

    spec: GridSpec
    directions: tuple[tuple[int, ...], ...]
    steps: tuple[float, ...]
    values: tuple[np.ndarray, ...] = field(repr=False)

    def max(self) -> float:
        return max(float(v.max()) for v in self.values)

    def min(self) -> float:
        return min(float(v.min()) for v in self.values)

    def scaled(self) -> tuple[np.ndarray, ...]:
        """Each direction divided by its squared step (a second derivative)."""
        return tuple(v / (h * h) for v, h in zip(self.values, self.steps))


def _shifted(a: np.ndarray, e: tuple[int, ...], offset: tuple[int, ...]) -> np.ndarray:
    """Nodes whose +/-``e`` neighbours exist, shifted by ``offset``."""
    idx = []
    for n, ea, o in zip(a.shape, e, offset):
        reach = abs(ea)
        idx.append(slice(reach + o, n - reach + o))
    return a[tuple(idx)]


def second_differences(u: GridFunction, include_diagonals: bool = True) -> SecondDifferenceField:
    """Second differences along the axes and, in 2D, the two diagonals.

    Only nodes with both neighbours along the step are reported, so the
    arrays of different directions have different shapes in 2D.
    """
    if not u.is_finite():
        raise ValueError("second differences need finite values")
    vals = u.values
    spacing = u.spec.spacing
    if u.dim == 1:
        directions = [(1,)]
    else:
        directions = [(1, 0), (0, 1)]
        if include_diagonals:
            directions += [(1, 1), (1, -1)]
    out, steps = [], []
    for e in directions:
        minus = tuple(-o for o in e)
        centre = _shifted(vals, e, tuple(0 for _ in e))
        d2 = _shifted(vals, e, e) - 2.0 * centre + _shifted(vals, e, minus)
        out.append(d2)
        steps.append(float(np.sqrt(sum((o * h) ** 2 for o, h in zip(e, spacing)))))
    return SecondDifferenceField(u.spec, tuple(directions), tuple(steps), tuple(out))


def pad(u: GridFunction, margin: int | Sequence[int], fill: float = 0.0) -> GridFunction:
    """Enlarge the grid by ``margin`` nodes on each side of each axis."""
    margins = np.broadcast_to(np.asarray(margin, dtype=int), (u.dim,))
    if (margins < 0).any():
        raise ValueError("margin must be non-negative")
    if not margins.any():
        return u
    spec = GridSpec(
        tuple(o - m * h for o, m, h in zip(u.spec.origin, margins, u.spec.spacing)),
        u.spec.spacing,
        tuple(n + 2 * m for n, m in zip(u.spec.shape, margins)),
    )
    vals = np.pad(u.values, [(m, m) for m in margins], constant_values=fill)
    return GridFunction(spec, vals, u.extended or not np.isfinite(fill))


def crop(u: GridFunction, margin: int | Sequence[int], extended: bool | None = None) -> GridFunction:
    """Inverse of :func:`pad`: drop ``margin`` nodes from each side."""
    margins = np.broadcast_to(np.asarray(margin, dtype=int), (u.dim,))
    if not margins.any():
        return u
    spec = GridSpec(
        tuple(o + m * h for o, m, h in zip(u.spec.origin, margins, u.spec.spacing)),
        u.spec.spacing,
        tuple(n - 2 * m for n, m in zip(u.spec.shape, margins)),
    )
    vals = u.values[tuple(slice(m, n - m) for m, n in zip(margins, u.spec.shape))]
    if extended is None:
        extended = not np.isfinite(vals).all()
    return GridFunction(spec, vals, extended)


_PAIRWISE = {
    "add": np.add,
    "subtract": np.subtract,
    "min": np.minimum,
    "max": np.maximum,
}


def combine(op: str, a: GridFunction, b: GridFunction | float | None = None) -> GridFunction:
    """Pointwise ``op`` of a grid function with another grid function or a scalar.

    Supported ops: add, subtract, scale, negate, min, max, multiply.
    Infinities follow IEEE-754; an undefined combination (``inf - inf``)
    raises.  ``multiply`` treats ``0 * inf`` as 0, so a weight vanishing
    outside its support also removes unbounded entries there.
    """
    if op == "negate":
        if b is not None:
            raise ValueError("negate takes a single operand")
        return -a
    if b is None:
        raise ValueError(f"{op} needs a second operand")
    if isinstance(b, GridFunction):
        if b.spec != a.spec:
            raise ValueError("grid specs differ")
        other = b.values
    else:
        other = float(b)
    if op == "scale":
        if isinstance(b, GridFunction):
            raise ValueError("scale takes a scalar")
        op = "multiply"
    with np.errstate(invalid="ignore"):
        if op in _PAIRWISE:
            res = _PAIRWISE[op](a.values, other)
        elif op == "multiply":
            res = a.values * other
            zero = (np.asarray(other) == 0) | (a.values == 0)
            res = np.where(zero, 0.0, res)
        else:
            raise ValueError(f"unknown op {op!r}")
    if np.isnan(res).any():
        raise ValueError(f"{op}: undefined combination of infinities")
    return GridFunction(a.spec, res, not np.isfinite(res).all())


# -- generators -------------------------------------------------------------

def _centres(spec: GridSpec, rng: np.random.Generator, count: int) -> np.ndarray:
    lo = np.array(spec.origin)
    hi = lo + (np.array(spec.shape) - 1) * np.array(spec.spacing)
    return rng.uniform(lo, hi, size=(count, spec.dim))


def _parabolas(spec, params, seed, sign):
    k, count = params
    if k <= 0:
        raise ValueError("curvature parameter k must be positive")
    count = int(count)
    if count < 1:
        raise ValueError("need at least one parabola")
    rng = np.random.default_rng(seed)
    centres = _centres(spec, rng, count)
    offsets = rng.uniform(0.0, 1.0, size=count)
    coords = spec.coordinates()
    out = None
    for c, off in zip(centres, offsets):
        r2 = sum((x - ci) ** 2 for x, ci in zip(coords, c))
        p = off + sign * r2 / k
        out = p if out is None else (np.minimum(out, p) if sign > 0 else np.maximum(out, p))
    return out


def _trig(spec, params):
    amp, freq, phase = params
    coords = spec.coordinates()
    vals = amp * np.sin(freq * coords[0] + phase)
    if spec.dim == 2:
        vals = vals * np.cos(freq * coords[1])
    return vals


#: kind -> (parameter count, needs seed)
GENERATORS = {
    "constant": (1, False),
    "quadratic": (1, False),
    "abs": (1, False),
    "lipschitz-trig": (3, False),
    "min-of-parabolas": (2, True),
    "max-of-parabolas": (2, True),
    "random-between": (2, True),
}


def generate(kind: str, params: Sequence[float], spec: GridSpec, seed: int | None = None) -> GridFunction:
    """Sample a closed-form test function on ``spec``.

    ========================  ==================  ==================================
    kind                      params              function
    ========================  ==================  ==================================
    ``constant``              ``[c]``             ``c``
    ``quadratic``             ``[a]``             ``a * |x|**2``
    ``abs``                   ``[L]``             ``L * |x|``
    ``lipschitz-trig``        ``[A, w, phi]``     ``A sin(w x0 + phi)`` (``* cos(w x1)`` in 2D)
    ``min-of-parabolas``      ``[k, m]``          min of ``m`` random ``c_i + |x - p_i|**2 / k``
    ``max-of-parabolas``      ``[k, m]``          max of ``m`` random ``c_i - |x - p_i|**2 / k``
    ``random-between``        ``[lo, hi]``        i.i.d. uniform on ``[lo, hi]``
    ========================  ==================  ==================================

    ``min-of-parabolas`` is k-semiconcave and ``max-of-parabolas`` is
    k-semiconvex.  Random kinds require an explicit ``seed``.
    """
    if kind not in GENERATORS:
        raise ValueError(f"unknown generator {kind!r}; choose from {sorted(GENERATORS)}")
    count, random = GENERATORS[kind]
    params = [float(p) for p in params]
    if len(params) != count:
        raise ValueError(f"{kind} takes {count} parameter(s), got {len(params)}")
    if random and seed is None:
        raise ValueError(f"{kind} is random and needs an explicit seed")

    if kind == "constant":
        vals = np.full(spec.shape, params[0])
    elif kind == "quadratic":
        vals = params[0] * spec.squared_norm()
    elif kind == "abs":
        vals = params[0] * np.sqrt(spec.squared_norm())
    elif kind == "lipschitz-trig":
        vals = _trig(spec, params)
    elif kind == "min-of-parabolas":
        vals = _parabolas(spec, params, seed, +1.0)
    elif kind == "max-of-parabolas":
        vals = _parabolas(spec, params, seed, -1.0)
    else:
        lo, hi = params
        if hi < lo:
            raise ValueError("random-between needs lo <= hi")
        vals = np.random.default_rng(seed).uniform(lo, hi, size=spec.shape)
    return GridFunction(spec, vals)
