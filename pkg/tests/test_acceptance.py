"""Acceptance criteria, one check per criterion.

Each ``check_N`` returns ``(passed, detail)``.  Under pytest every result
is also listed in the terminal summary; ``python3 tests/test_acceptance.py``
runs them standalone and prints one line each.
"""

import math
import time

import numpy as np
import pytest

from c11reg import (
    CircleFunction, GridFunction, GridSpec, bernard_r, build_atlas, c11_report, combine,
    epsilon_bound, g_t_apply, generate, gradient_lipschitz_estimate, ilmanen_sandwich,
    inf_convolve, inf_convolve_bruteforce, localization_constants, modulus_of_continuity,
    opening, quadratic_bidual, second_differences, semigroup_defect, sup_convolve,
)
from conftest import ACCEPTANCE, corpus, eps, line, plane

KINDS_1D = [
    ("lipschitz-trig", lambda r: [r.uniform(0.5, 2), r.uniform(1, 6), r.uniform(0, 3)]),
    ("min-of-parabolas", lambda r: [r.uniform(0.2, 2), r.integers(1, 6)]),
    ("max-of-parabolas", lambda r: [r.uniform(0.2, 2), r.integers(1, 6)]),
    ("random-between", lambda r: [-r.uniform(0, 3), r.uniform(0, 3)]),
    ("abs", lambda r: [r.uniform(0.1, 3)]),
    ("quadratic", lambda r: [r.uniform(-2, 2)]),
]


def random_function(rng, spec):
    kind, params = KINDS_1D[rng.integers(len(KINDS_1D))]
    return generate(kind, params(rng), spec, seed=int(rng.integers(2 ** 31)))


def family(h, count=50, seed=0):
    rng = np.random.default_rng(seed)
    spec = line(-2, 2, h)
    return [random_function(rng, spec) for _ in range(count)]


def full_corpus():
    return corpus() + [(f"family-{i}", f) for i, f in enumerate(family(0.02, 30, seed=99))]


def check_1():
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(17, 258))
        h = 4.0 / (n - 1)
        u = random_function(rng, GridSpec((-2.0,), (h,), (n,)))
        for t in (0.01, 0.1, 1.0):
            d = np.abs(inf_convolve(u, t).values - inf_convolve_bruteforce(u, t).values).max()
            worst = max(worst, d / eps(u) * 1e-12)
    for _ in range(20):
        n0, n1 = (int(x) for x in rng.integers(8, 65, size=2))
        spec = GridSpec((-1.0, -1.0), (2 / (n0 - 1), 2 / (n1 - 1)), (n0, n1))
        kind, params = KINDS_1D[rng.integers(len(KINDS_1D))]
        u = generate(kind, params(rng), spec, seed=int(rng.integers(2 ** 31)))
        for t in (0.01, 0.1, 1.0):
            d = np.abs(inf_convolve(u, t).values - inf_convolve_bruteforce(u, t).values).max()
            worst = max(worst, d / eps(u) * 1e-12)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 30
    return ok, f"oracle: worst |fast-brute|/(1+max|u|) = {worst:.2e} (<= 1e-12), {elapsed:.1f}s (< 30s)"


def check_2():
    worst = 0.0
    for _, u in full_corpus():
        e = eps(u)
        v = u.values
        for t in (0.01, 0.1, 1.0):
            lo, hi = inf_convolve(u, t).values, sup_convolve(u, t).values
            viol = max((v.min() - lo).max(), (lo - v).max(), (v - hi).max(), (hi - v.max()).max(),
                       np.abs(inf_convolve(-u, t).values + hi).max())
            worst = max(worst, viol / e)
    return worst <= 1, f"ordering chain and duality: worst violation {worst:.2e} x fp_eps"


def check_3():
    worst_lo, worst_ratio = 0.0, 0.0
    for h in (0.04, 0.02, 0.01):
        for u in family(h, 50, seed=3):
            for s, t in ((0.5, 0.5), (0.1, 0.3)):
                lo, hi = semigroup_defect(u, s, t)
                worst_lo = min(worst_lo, lo)
                worst_ratio = max(worst_ratio, hi / ((h * h / 4) * (1 / s + 1 / t) + 1e-12))
    ok = worst_lo >= -1e-12 and worst_ratio <= 1
    return ok, f"semigroup: min defect {worst_lo:.2e} (>= -1e-12), max defect / bound {worst_ratio:.4f} (<= 1)"


def check_4():
    worst = -np.inf
    for _, u in full_corpus():
        for t in (0.01, 0.1, 1.0):
            for op, sign in ((inf_convolve, 1), (sup_convolve, -1)):
                field = second_differences(op(u, t), include_diagonals=False)
                for d2, h in zip(field.values, field.steps):
                    worst = max(worst, float((sign * d2).max()) - 2 * h * h / t)
    return worst <= 1e-12, f"envelope curvature: max excess over 2h^2/t = {worst:.2e} (<= 1e-12)"


def convex_family(t, count=20):
    rng = np.random.default_rng(5)
    spec = line(-2, 2, 0.01)
    x = spec.axis(0)
    out = []
    while len(out) < count:
        k = t * rng.uniform(1.0, 3.0)
        u = generate("max-of-parabolas", [k, int(rng.integers(1, 6))], spec, seed=int(rng.integers(2 ** 31)))
        u = combine("add", u, GridFunction(spec, rng.uniform(0, 0.5) * np.abs(x - rng.uniform(-1, 1))))
        if (np.diff(u.values + x * x / t, 2) >= -eps(u)).all():
            out.append(u)
    return out


def check_5():
    above = -np.inf
    for _, u in full_corpus():
        for t in (0.05, 0.5):
            above = max(above, float((opening(u, t).values - u.values).max()))
    t = 0.5
    eq = max(np.abs(opening(u, t).values - u.values).max() for u in convex_family(t))
    agree = 0.0
    for _, u in full_corpus():
        if u.dim == 1:
            for t in (0.05, 0.5, 2.0):
                agree = max(agree, np.abs(quadratic_bidual(u, t).values - opening(u, t).values).max())
    ok = above <= 1e-12 and eq <= 1e-9 and agree <= 1e-9
    return ok, (f"opening <= u (max excess {above:.1e}); equality on 20 convex cases {eq:.1e}; "
                f"bidual route {agree:.1e} (<= 1e-9)")


def check_6():
    low, lip_ratio = np.inf, 0.0
    for _, f in full_corpus():
        for t in (0.05, 0.5):
            w = bernard_r(f, t)
            field = second_differences(w, include_diagonals=False)
            for d2, h in zip(field.values, field.steps):
                low = min(low, float(d2.min()) + 2 * h * h / t)
            lip_ratio = max(lip_ratio, gradient_lipschitz_estimate(w) * t / 6)
    hs = (0.04, 0.02, 0.01)
    t = 0.2
    defects = []
    for h in hs:
        worst = 0.0
        for f in [generate("abs", [1], line(-2, 2, h)),
                  generate("lipschitz-trig", [1, 3, 0.1], line(-2, 2, h)),
                  generate("min-of-parabolas", [0.1, 5], line(-2, 2, h), seed=8)]:
            d2 = np.diff(bernard_r(f, t).values, 2)
            worst = max(worst, float(np.maximum(d2 - 2 * h * h / t, 0).max()))
        defects.append(worst)
    fp = 1e-12 * 3
    if max(defects) <= fp:
        rate_ok, rate = True, "positive-side defect at rounding level for every h"
    else:
        slope = np.polyfit(np.log(hs), np.log(np.maximum(defects, 1e-300)), 1)[0]
        rate_ok, rate = slope >= 1.9, f"defect slope {slope:.2f}"
    ok = low >= -1e-12 and lip_ratio <= 1 and rate_ok
    return ok, (f"exact side min excess {low:.1e}; {rate} ({', '.join(f'{d:.1e}' for d in defects)}); "
                f"grad-Lip * t / 6 <= {lip_ratio:.3f}")


def triples(count=50):
    spec = line(-2, 2, 0.01)
    rng = np.random.default_rng(7)
    for i in range(count):
        u = generate("min-of-parabolas", [1.0, int(rng.integers(1, 6))], spec, seed=2 * i)
        v = generate("max-of-parabolas", [1.0, int(rng.integers(1, 6))], spec, seed=2 * i + 1)
        v = combine("subtract", v, float((v.values - u.values).max()) + rng.uniform(0, 0.5))
        lam = rng.uniform(0, 1)
        f = combine("add", v, combine("scale", combine("subtract", u, v), lam))
        yield u, f, v


def check_7():
    worst = -np.inf
    for u, f, v in triples():
        for t in (0.25, 0.5, 1.0):
            w = bernard_r(f, t).values
            worst = max(worst, float((w - u.values).max()), float((v.values - w).max()))
    return worst <= 1e-9, f"pinching on 50 triples x 3 t: max violation {worst:.1e} (<= 1e-9)"


def check_8():
    f = generate("quadratic", [0.3], line(-2, 2, 0.01))
    fixed = max(np.abs(bernard_r(f, t).values - f.values).max() for t in (0.5, 1.0))
    spec = line(-4, 4, 0.01)
    x = spec.axis(0)
    at = lambda g, p: g.values[np.argmin(np.abs(x - p))]
    sq, ab = generate("quadratic", [1], spec), generate("abs", [1], spec)
    fine = generate("abs", [1], line(-4, 4, 0.001))
    spots = [
        (at(inf_convolve(sq, 1.0), 1.0), 0.5, 1e-4),
        (at(sup_convolve(sq, 0.5), 1.0), 2.0, 1e-4),
        (at(inf_convolve(ab, 1.0), 0.25), 0.0625, 1e-6),
        (bernard_r(fine, 0.04).values[4000], 0.01, 1e-5),
    ]
    spot_ok = all(abs(a - b) <= tol for a, b, tol in spots)
    ok = fixed <= 1e-9 and spot_ok
    return ok, (f"fixed point error {fixed:.1e} (<= 1e-9); spot checks "
                + ", ".join(f"{a:.6f}~{b}" for a, b, _ in spots))


def check_9():
    spec = line(-1, 1, 0.005)
    x = spec.axis(0)
    res = ilmanen_sandwich(GridFunction(spec, 1 - x * x), GridFunction(spec, x * x - 1))
    verdict = c11_report(res.w, 1.0).c11_at_t
    ok = res.sandwich_defect <= 1e-9 and verdict == 1.0
    return ok, f"pinch defect {res.sandwich_defect:.1e} (<= 1e-9), C11 verdict at t=1: {verdict}"


def check_10():
    h = 0.005
    spec = GridSpec((-math.pi,), (h,), (int(2 * math.pi / h) + 1,))
    x = spec.axis(0)
    f = GridFunction(spec, np.abs(np.sin(3 * x)))
    parts, ok = [], True
    for t in (0.1, 0.01, 0.001):
        band = int(math.ceil(math.sqrt(t * (f.values.max() - f.values.min())) / spec.spacing[0]))
        err = np.abs(bernard_r(f, t).values - f.values)[band:-band].max()
        ok &= err <= 9 * t
        parts.append(f"t={t}: {err:.2e}<={9 * t:g}")
    gap = -np.inf
    for _, u in full_corpus():
        if u.dim == 1:
            table = modulus_of_continuity(u)
            for t in (0.001, 0.01, 0.1, 1.0):
                exact, closed = epsilon_bound(table, t)
                gap = max(gap, exact - closed)
    ok &= gap <= 1e-12
    return ok, "approximation " + "; ".join(parts) + f"; max(eps_exact - eps_closed) {gap:.1e}"


def check_11():
    start = time.perf_counter()
    atlas = build_atlas(3, 512)
    n = atlas.n
    c = CircleFunction(np.full(n, 0.8))
    const = np.abs(g_t_apply(localization_constants(atlas, c, c), c, 0.5).values - 0.8).max()

    u = CircleFunction.sample(lambda th: 1.2 + 0.1 * np.cos(th), n)
    v = CircleFunction.sample(lambda th: -0.2 + 0.1 * np.sin(th), n)
    rough = CircleFunction.sample(lambda th: np.abs(np.sin(th)), n)
    at = localization_constants(atlas, u, v)
    sandwich = -np.inf
    for t in (1.0, 0.1, 0.01):
        g = g_t_apply(at, rough, t).values
        sandwich = max(sandwich, float((g - u.values).max()), float((v.values - g).max()))

    f = CircleFunction.sample(np.sin, n)
    at = localization_constants(atlas, CircleFunction(f.values + 0.5), CircleFunction(f.values - 0.5))
    errs = [np.abs(g_t_apply(at, f, t).values - f.values).max() for t in (0.2, 0.1, 0.05, 0.02, 0.01)]
    monotone = all(b <= a + 1e-9 for a, b in zip(errs, errs[1:]))
    elapsed = time.perf_counter() - start
    ok = const <= 1e-9 and sandwich <= 1e-6 and monotone and errs[-1] <= 0.05 and elapsed < 60
    return ok, (f"constant {const:.1e}; sandwich violation {sandwich:.1e}; sin errors "
                f"{', '.join(f'{e:.1e}' for e in errs)} (monotone {monotone}); {elapsed:.1f}s")


def check_12():
    rng = np.random.default_rng(12)
    sizes = (10 ** 6, 2 * 10 ** 6)
    grids = [GridFunction(GridSpec((0.0,), (1.0 / n,), (n,)), rng.uniform(-1, 1, n)) for n in sizes]
    best = [np.inf, np.inf]
    for u in grids:
        inf_convolve(u, 0.1)  # compile and warm the allocator
    # interleave the two sizes so a burst of machine noise cannot favour one of them
    for _ in range(10):
        for i, u in enumerate(grids):
            t0 = time.perf_counter()
            inf_convolve(u, 0.1)
            best[i] = min(best[i], time.perf_counter() - t0)
    t1, t2 = best
    ok = t1 < 0.5 and t2 / t1 < 2.6
    return ok, f"n=1e6: {t1 * 1e3:.0f} ms (< 500), doubling ratio {t2 / t1:.2f} (< 2.6)"


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6,
          check_7, check_8, check_9, check_10, check_11, check_12]


@pytest.mark.parametrize("num", range(1, 13))
def test_criterion(num):
    ok, detail = CHECKS[num - 1]()
    ACCEPTANCE.append((num, bool(ok), detail))
    print(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


if __name__ == "__main__":
    for i, check in enumerate(CHECKS, 1):
        ok, detail = check()
        print(f"criterion {i:2d}: {'PASS' if ok else 'FAIL'}  {detail}", flush=True)
