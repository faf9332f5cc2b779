import itertools
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from hyperentropy import core

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def brute_force_mu(W, n):
    """Law of G(n, W) by summing over every cell assignment; independent of the elimination code."""
    k = W.k
    below, exact, _ = core.shortlex(n, k)
    coords = core.shortlex(k, k)[0]
    out: dict[tuple[int, ...], Fraction] = {}
    for assign in itertools.product(range(W.m), repeat=len(below)):
        cell = dict(zip(below, assign))
        weight = Fraction(1)
        for c in assign:
            weight *= W.grid.weights[c]
        dists = [W.evaluate(tuple(cell[tuple(J[i] for i in F)] for F in coords)).items for J in exact]
        for combo in itertools.product(*dists):
            p = weight
            for _, q in combo:
                p *= q
            key = tuple(t for t, _ in combo)
            out[key] = out.get(key, Fraction(0)) + p
    return {core.structure_from_types(W.signature, n, key): p for key, p in out.items() if p}


@pytest.fixture
def er2():
    from hyperentropy import hypergraphon as H

    return H.make_er(k=2)


@pytest.fixture
def triangle():
    from hyperentropy import hypergraphon as H

    return H.make_triangle()


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
