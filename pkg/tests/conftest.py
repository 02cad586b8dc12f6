"""Shared fixtures: a seeded corpus of grid functions covering every generator."""

import numpy as np
import pytest

from c11reg import GridFunction, GridSpec, generate


def line(a, b, h):
    return GridSpec.from_bounds(a, b, h)


def plane(a, b, h):
    s = GridSpec.from_bounds(a, b, h)
    return GridSpec((a, a), (h, h), (s.shape[0], s.shape[0]))


def sample(spec, func):
    return GridFunction(spec, func(*spec.coordinates()))


def corpus_1d(h=0.02, seeds=range(3)):
    """List of ``(label, GridFunction)`` on [-2, 2]."""
    spec = line(-2.0, 2.0, h)
    items = [
        ("constant", generate("constant", [1.5], spec)),
        ("quadratic", generate("quadratic", [0.7], spec)),
        ("neg-quadratic", generate("quadratic", [-0.4], spec)),
        ("abs", generate("abs", [1.0], spec)),
        ("trig", generate("lipschitz-trig", [1.0, 3.0, 0.2], spec)),
    ]
    for s in seeds:
        items += [
            (f"min-par-{s}", generate("min-of-parabolas", [1.0, 4], spec, seed=s)),
            (f"max-par-{s}", generate("max-of-parabolas", [0.5, 3], spec, seed=s)),
            (f"random-{s}", generate("random-between", [-1.0, 1.0], spec, seed=s)),
        ]
    return items


def corpus_2d(h=0.1, seeds=range(2)):
    spec = plane(-1.0, 1.0, h)
    items = [
        ("quadratic-2d", generate("quadratic", [1.0], spec)),
        ("abs-2d", generate("abs", [1.0], spec)),
        ("trig-2d", generate("lipschitz-trig", [1.0, 2.0, 0.3], spec)),
    ]
    for s in seeds:
        items += [
            (f"min-par-2d-{s}", generate("min-of-parabolas", [1.0, 3], spec, seed=s)),
            (f"random-2d-{s}", generate("random-between", [0.0, 1.0], spec, seed=s)),
        ]
    return items


def corpus():
    return corpus_1d() + corpus_2d()


@pytest.fixture(scope="session")
def full_corpus():
    return corpus()


def eps(*fs):
    return 1e-12 * (1.0 + max(float(np.abs(f.values).max()) for f in fs))


#: (criterion number, passed, detail) lines collected by test_acceptance
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
