"""Chart-wise regularization on the circle through a partition of unity.

``G_t f = sum_i push_i( R_{t a_i}( pull_i(g_i f) ) )`` where chart ``i``
maps ``s in (-1, 1)`` to the angle ``center_i + half_width_i * s``, the
weights ``g_i`` sum to one, and ``a_i`` is small enough for
``g_i u`` and ``-g_i v`` to be ``a_i``-semiconcave in chart coordinates.
Each chart term then stays between ``g_i u`` and ``g_i v``, so the sum
stays between ``u`` and ``v``.

Chart grids are commensurate with the circle grid (chart nodes land on
circle nodes), so pulling and pushing are exact index maps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .analysis import semiconcavity_constant
from .grid import GridFunction, GridSpec, crop, pad
from .regularize import bernard_r

__all__ = [
    "Chart",
    "CircleFunction",
    "CircleAtlas",
    "bump",
    "build_atlas",
    "chart_transfer",
    "localization_constants",
    "g_t_apply",
]

TWO_PI = 2.0 * math.pi
BUMP_RADIUS = 0.9
A_FLOOR = 1e-6
A_CAP = 1e3


def bump(s) -> np.ndarray:
    """``exp(-1 / (1 - (s/0.9)**2))`` on ``|s| < 0.9``, zero elsewhere."""
    s = np.asarray(s, dtype=float)
    r2 = (s / BUMP_RADIUS) ** 2
    out = np.zeros_like(s)
    inside = r2 < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    return out


def _wrap(delta):
    """Angle difference folded into ``[-pi, pi)``."""
    return (np.asarray(delta) + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class Chart:
    center: float
    half_width: float

    def __post_init__(self):
        if not 0 < self.half_width < math.pi:
            raise ValueError("half_width must lie in (0, pi)")
        object.__setattr__(self, "center", float(self.center) % TWO_PI)

    def to_param(self, theta) -> np.ndarray:
        """Chart coordinate of each angle (may fall outside (-1, 1))."""
        return _wrap(np.asarray(theta) - self.center) / self.half_width

    def contains(self, theta) -> np.ndarray:
        return np.abs(self.to_param(theta)) < 1.0


@dataclass(frozen=True, eq=False)
class CircleFunction:
    """Samples at the angles ``2 pi j / n``; node ``n`` is node 0."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).ravel()
        if vals.size < 3:
            raise ValueError("need at least 3 circle nodes")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def h(self) -> float:
        return TWO_PI / self.n

    def angles(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n) / self.n

    @classmethod
    def sample(cls, func, n: int) -> "CircleFunction":
        return cls(func(TWO_PI * np.arange(n) / n))

    def second_differences(self) -> np.ndarray:
        v = self.values
        return np.roll(v, -1) - 2.0 * v + np.roll(v, 1)


@dataclass(frozen=True, eq=False)
class CircleAtlas:
    """Charts, pulled-back weights ``g_i o phi_i`` and localization constants."""

    n: int
    charts: tuple[Chart, ...]
    weights: tuple[GridFunction, ...]
    a: tuple[float, ...] | None = None

    def chart_spec(self, i: int) -> GridSpec:
        return self.weights[i].spec

    def circle_weight(self, i: int) -> CircleFunction:
        """``g_i`` on the circle grid (zero outside the chart image)."""
        return chart_transfer(self.weights[i], self.charts[i], direction="push", n=self.n)


def _chart_spec(chart: Chart, n: int) -> GridSpec:
    hs = (TWO_PI / n) / chart.half_width
    reach = int(math.ceil(1.0 / hs)) - 1
    return GridSpec((-reach * hs,), (hs,), (2 * reach + 1,))


def build_atlas(n_charts: int, nodes_per_chart: int) -> CircleAtlas:
    """Evenly spaced charts with a normalized bump partition of unity.

    The circle carries ``n_charts * nodes_per_chart`` nodes so that every
    chart centre is a node.  Half-widths are ``1.35 pi (2 / n_charts)``
    (kept below pi), which puts every angle inside at least two chart
    images.  ``a`` is left unset; see :func:`localization_constants`.
    """
    if n_charts < 3:
        raise ValueError("need at least 3 charts to cover the circle")
    if nodes_per_chart < 64:
        raise ValueError("need at least 64 nodes per chart")
    n = n_charts * nodes_per_chart
    hw = min(0.9 * math.pi * (2.0 / n_charts) * 1.5, math.pi * (1 - 1e-9))
    charts = tuple(Chart(TWO_PI * i / n_charts, hw) for i in range(n_charts))

    theta = TWO_PI * np.arange(n) / n
    cover = sum(c.contains(theta).astype(int) for c in charts)
    if cover.min() < 2:
        raise ValueError("chart images do not doubly cover the circle")
    raw = np.array([bump(c.to_param(theta)) for c in charts])
    total = raw.sum(axis=0)
    if total.min() <= 0:
        raise ValueError("bump supports do not cover the circle")
    g = raw / total

    weights = []
    for i, c in enumerate(charts):
        spec = _chart_spec(c, n)
        idx = _circle_index(spec.axis(0), c, n)
        weights.append(GridFunction(spec, g[i][idx]))
    return CircleAtlas(n, charts, tuple(weights))


def _circle_index(s: np.ndarray, chart: Chart, n: int) -> np.ndarray:
    pos = (chart.center + chart.half_width * s) * n / TWO_PI
    idx = np.rint(pos)
    if np.abs(pos - idx).max() > 1e-6:
        raise ValueError("chart grid is not commensurate with the circle grid")
    return idx.astype(int) % n


def _sample_periodic(values: np.ndarray, theta: np.ndarray) -> np.ndarray:
    n = values.size
    pos = (np.asarray(theta) % TWO_PI) * n / TWO_PI
    near = np.rint(pos)
    exact = np.abs(pos - near) < 1e-9
    lo = np.floor(pos).astype(int)
    frac = pos - lo
    interp = (1 - frac) * values[lo % n] + frac * values[(lo + 1) % n]
    return np.where(exact, values[near.astype(int) % n], interp)


def chart_transfer(f, chart: Chart, grid: GridSpec | None = None, direction: str = "pull",
                   n: int | None = None):
    """Move a function between the circle and a chart's parameter grid.

    ``pull``: ``CircleFunction`` -> ``GridFunction`` on ``grid`` holding
    ``f(phi(s))`` for ``|s| < 1`` and 0 elsewhere.  ``push``:
    ``GridFunction`` -> ``CircleFunction`` with ``n`` nodes, holding
    ``f(phi^-1(theta))`` inside the chart image and 0 outside.  Nodes that
    coincide are copied; others are linearly interpolated.
    """
    if direction == "pull":
        if grid is None or grid.dim != 1:
            raise ValueError("pull needs a 1D chart grid")
        s = grid.axis(0)
        if s[0] > -1.0 + grid.spacing[0] or s[-1] < 1.0 - grid.spacing[0]:
            raise ValueError("chart grid does not cover (-1, 1)")
        inside = np.abs(s) < 1.0
        out = np.zeros(s.size)
        theta = chart.center + chart.half_width * s[inside]
        out[inside] = _sample_periodic(f.values, theta)
        return GridFunction(grid, out)
    if direction == "push":
        if n is None:
            raise ValueError("push needs the circle node count n")
        s_grid = f.spec.axis(0)
        theta = TWO_PI * np.arange(n) / n
        s = chart.to_param(theta)
        inside = np.abs(s) < 1.0
        if inside.any() and (s[inside].min() < s_grid[0] - 1e-9 * f.h
                             or s[inside].max() > s_grid[-1] + 1e-9 * f.h):
            raise ValueError("chart grid does not span the chart image")
        pos = (s[inside] - s_grid[0]) / f.h
        near = np.rint(pos)
        exact = np.abs(pos - near) < 1e-6
        out = np.zeros(n)
        vals = np.where(exact, f.values[np.clip(near.astype(int), 0, s_grid.size - 1)],
                        np.interp(s[inside], s_grid, f.values))
        out[inside] = vals
        return CircleFunction(out)
    raise ValueError(f"direction must be 'pull' or 'push', got {direction!r}")


def _local_product(atlas: CircleAtlas, i: int, f: CircleFunction) -> GridFunction:
    w = atlas.weights[i]
    pulled = chart_transfer(f, atlas.charts[i], w.spec, "pull")
    return GridFunction(w.spec, w.values * pulled.values)


def localization_constants(atlas: CircleAtlas, u: CircleFunction, v: CircleFunction) -> CircleAtlas:
    """Fill ``a_i = min(k(g_i u), k(-g_i v))`` measured on zero-extended chart grids.

    Constants are clamped to ``[1e-6, 1e3]``.
    """
    if u.n != atlas.n or v.n != atlas.n:
        raise ValueError("circle functions must live on the atlas grid")
    if not (np.isfinite(u.values).all() and np.isfinite(v.values).all()):
        raise ValueError("u and v must be finite")
    a = []
    for i in range(len(atlas.charts)):
        gu = pad(_local_product(atlas, i, u), 2, 0.0)
        gv = pad(_local_product(atlas, i, v), 2, 0.0)
        k = min(semiconcavity_constant(gu), semiconcavity_constant(-gv))
        a.append(min(max(k, A_FLOOR), A_CAP))
    return replace(atlas, a=tuple(a))


def padding_margin(atlas: CircleAtlas, i: int, f: CircleFunction, t: float) -> int:
    """Zero-extension width (nodes) for chart ``i``: ``2 ceil(sqrt(t a_i osc) / h_s)``."""
    osc = 1.0 + float(np.abs(f.values).max()) - min(0.0, float(f.values.min()))
    reach = math.sqrt(t * atlas.a[i] * osc)
    return 2 * int(math.ceil(reach / atlas.weights[i].h)) + 1


def g_t_apply(atlas: CircleAtlas, f: CircleFunction, t: float, margin_scale: float = 1.0) -> CircleFunction:
    """``G_t f``: regularize ``g_i f`` in each chart with ``R_{t a_i}`` and sum.

    Chart terms are added in chart order.  ``margin_scale > 1`` widens the
    zero extension, which should not change the result.
    """
    if atlas.a is None:
        raise ValueError("atlas localization constants are unset")
    if not 0 < t <= 1:
        raise ValueError("t must lie in (0, 1]")
    if f.n != atlas.n:
        raise ValueError("f must live on the atlas grid")
    total = np.zeros(atlas.n)
    for i, chart in enumerate(atlas.charts):
        m = int(math.ceil(margin_scale * padding_margin(atlas, i, f, t)))
        local = pad(_local_product(atlas, i, f), m, 0.0)
        reg = crop(bernard_r(local, t * atlas.a[i]), m)
        total = total + chart_transfer(reg, chart, direction="push", n=atlas.n).values
    return CircleFunction(total)
