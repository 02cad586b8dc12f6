"""Compiled sweeps: lower envelope of parabolas and lower convex hull.

All kernels work in "index units": a parabola rooted at center ``c`` with
value ``f`` is ``y -> f + w * (y - c)**2``.  Callers fold grid spacing and
the width parameter into ``w = h**2 / t``.
"""

import numpy as np
from numba import njit

INF = np.inf


@njit(cache=True)
def envelope_build(centers, values, w, v, z):
    """Build the lower envelope of parabolas; return the index of the last one.

    ``centers`` must be strictly increasing.  Entries equal to +inf are
    skipped.  On return ``v[0..k]`` holds the active parabola indices and
    ``z[0..k+1]`` their boundaries, with ``z[0] = -inf`` and
    ``z[k+1] = +inf``.  Returns ``k``, or -1 when every value is +inf.
    """
    n = centers.shape[0]
    k = -1
    for j in range(n):
        fj = values[j]
        if fj == INF:
            continue
        if k < 0:
            k = 0
            v[0] = j
            z[0] = -INF
            z[1] = INF
            continue
        cj = centers[j]
        s = 0.0
        while k >= 0:
            i = v[k]
            ci = centers[i]
            s = 0.5 * (ci + cj) + (fj - values[i]) / (2.0 * w * (cj - ci))
            if s <= z[k]:
                # tie at a boundary: the later parabola takes the right side
                k -= 1
            else:
                break
        k += 1
        v[k] = j
        if k == 0:
            z[0] = -INF
        else:
            z[k] = s
        z[k + 1] = INF
    return k


@njit(cache=True)
def envelope_eval(centers, values, w, v, z, k, queries, out):
    """Evaluate a built envelope at increasing query positions."""
    m = 0
    for q in range(queries.shape[0]):
        x = queries[q]
        while z[m + 1] < x:
            m += 1
        d = x - centers[v[m]]
        out[q] = values[v[m]] + w * d * d


@njit(cache=True)
def lower_envelope_uniform(values, w, out):
    """out[i] = min_j values[j] + w * (i - j)**2, in linear time.

    Same sweep as :func:`envelope_build` / :func:`envelope_eval` with the
    centers being the indices themselves, which saves two arrays.
    """
    n = values.shape[0]
    v = np.empty(n, dtype=np.int64)
    z = np.empty(n + 1, dtype=np.float64)
    k = -1
    for j in range(n):
        fj = values[j]
        if fj == INF:
            continue
        if k < 0:
            k = 0
            v[0] = j
            z[0] = -INF
            z[1] = INF
            continue
        s = 0.0
        while k >= 0:
            i = v[k]
            s = 0.5 * (i + j) + (fj - values[i]) / (2.0 * w * (j - i))
            if s <= z[k]:
                k -= 1
            else:
                break
        k += 1
        v[k] = j
        if k == 0:
            z[0] = -INF
        else:
            z[k] = s
        z[k + 1] = INF
    if k < 0:
        for i in range(n):
            out[i] = INF
        return
    m = 0
    for q in range(n):
        while z[m + 1] < q:
            m += 1
        d = q - v[m]
        out[q] = values[v[m]] + w * d * d


@njit(cache=True)
def lower_envelope_rows(values, w, out):
    """Apply ``lower_envelope_uniform`` to every row of a 2D array."""
    for r in range(values.shape[0]):
        lower_envelope_uniform(values[r], w, out[r])


@njit(cache=True)
def breakpoints_uniform(values, w):
    """Breakpoints of the lower envelope and the envelope value there.

    Returns ``(first, last, zb, tb)`` where ``first``/``last`` are the
    first and last finite indices (-1 when none) and ``zb``/``tb`` the
    finite breakpoints in increasing order with the envelope value at each.
    """
    n = values.shape[0]
    centers = np.arange(n).astype(np.float64)
    v = np.empty(n, dtype=np.int64)
    z = np.empty(n + 1, dtype=np.float64)
    k = envelope_build(centers, values, w, v, z)
    first = -1
    last = -1
    for i in range(n):
        if values[i] != INF:
            if first < 0:
                first = i
            last = i
    zb = np.empty(max(k, 0), dtype=np.float64)
    tb = np.empty(max(k, 0), dtype=np.float64)
    for m in range(1, k + 1):
        x = z[m]
        a = v[m - 1]
        b = v[m]
        da = x - a
        db = x - b
        left = values[a] + w * da * da
        right = values[b] + w * db * db
        zb[m - 1] = x
        tb[m - 1] = min(left, right)
    return first, last, zb, tb


@njit(cache=True)
def lower_hull(x, y):
    """Indices of the lower convex hull of points with increasing ``x``.

    Andrew's monotone chain; collinear interior points are dropped.
    """
    n = x.shape[0]
    hull = np.empty(n, dtype=np.int64)
    m = 0
    for j in range(n):
        while m >= 2:
            a = hull[m - 2]
            b = hull[m - 1]
            cross = (x[b] - x[a]) * (y[j] - y[a]) - (y[b] - y[a]) * (x[j] - x[a])
            if cross <= 0.0:
                m -= 1
            else:
                break
        hull[m] = j
        m += 1
    return hull[:m]


@njit(cache=True)
def conjugate_sorted(x, y, hull, slopes, out):
    """out[q] = max_j slopes[q] * x[j] - y[j] for increasing ``slopes``.

    The maximiser is a hull vertex and moves right as the slope grows, so a
    single forward walk over ``hull`` suffices.
    """
    m = hull.shape[0]
    h = 0
    for q in range(slopes.shape[0]):
        p = slopes[q]
        best = p * x[hull[h]] - y[hull[h]]
        while h + 1 < m:
            nxt = p * x[hull[h + 1]] - y[hull[h + 1]]
            if nxt >= best:
                best = nxt
                h += 1
            else:
                break
        out[q] = best
